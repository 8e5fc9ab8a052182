"""Estimator-style wrappers so solvers plug into sklearn-flavoured tooling.

The "data" an estimator is fitted on is a market: a :class:`MarketGraph`, a
dict in the market JSON schema, a path to such a file, or a
``(nodes, edges)`` pair.
"""
from __future__ import annotations

import json
import os

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .equilibrium import proportionalize
from .lex import solve_lex_optimal
from .market import MarketGraph, validate_market
from .sim import SimConfig, convergence_report, simulate
from .structure import verify_level_structure


def check_market(X) -> MarketGraph:
    """Coerce any supported market description into a validated MarketGraph."""
    if isinstance(X, MarketGraph):
        return X
    if isinstance(X, (str, os.PathLike)):
        with open(X) as fh:
            return MarketGraph.from_dict(json.load(fh))
    if isinstance(X, dict):
        return MarketGraph.from_dict(X)
    if isinstance(X, tuple) and len(X) == 2:
        return validate_market(*X)
    raise TypeError(f"cannot interpret {type(X).__name__} as a market")


class LexFairAllocator(BaseEstimator):
    """Max-min fair allocator.

    Parameters
    ----------
    equilibrium : bool
        Re-balance the allocation into a reciprocal (exchange-equilibrium)
        one after solving. Ratios are unaffected.
    verify : bool
        Run the structural checker on the result and keep its report.
    """

    def __init__(self, equilibrium=False, verify=True):
        self.equilibrium = equilibrium
        self.verify = verify

    def fit(self, X, y=None):
        market = check_market(X)
        solution = solve_lex_optimal(market)
        allocation = proportionalize(market, solution) if self.equilibrium else solution.allocation
        self.market_ = market
        self.solution_ = solution
        self.allocation_ = allocation
        self.received_ = solution.received
        self.ratios_ = solution.ratios
        self.decomposition_ = solution.decomposition
        self.levels_ = solution.decomposition.levels
        self.n_levels_ = solution.K
        self.report_ = verify_level_structure(market, allocation) if self.verify else None
        return self

    def predict(self, X=None):
        """Exact ratio vector of ``X`` (or of the fitted market)."""
        check_is_fitted(self, "ratios_")
        if X is None:
            return self.ratios_
        market = check_market(X)
        if market == self.market_:
            return self.ratios_
        return solve_lex_optimal(market).ratios

    def fit_predict(self, X, y=None):
        return self.fit(X).ratios_

    def transform(self, X=None):
        """Ratios as a float array, for numeric pipelines."""
        return np.asarray([float(v) for v in self.predict(X)])


class TokenExchangeSimulator(BaseEstimator):
    """Token dynamics with rates equal to the market endowments."""

    def __init__(self, tokens=100_000, seed=0, sample_every=100, tolerance=0.05):
        self.tokens = tokens
        self.seed = seed
        self.sample_every = sample_every
        self.tolerance = tolerance

    def fit(self, X, y=None):
        market = check_market(X)
        config = SimConfig(tokens=self.tokens, seed=self.seed, sample_every=self.sample_every)
        self.market_ = market
        self.trace_ = simulate(market, config)
        self.reference_ = solve_lex_optimal(market)
        self.report_ = convergence_report(self.trace_, self.reference_, self.tolerance)
        return self

    def transform(self, X=None):
        check_is_fitted(self, "trace_")
        return np.asarray(self.trace_.ratios[-1])

    def score(self, X=None, y=None):
        """Negative worst relative deviation from the lex-optimal levels."""
        check_is_fitted(self, "report_")
        return -max(self.report_.deviations.values())
