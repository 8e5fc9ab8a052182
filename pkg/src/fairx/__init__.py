"""Max-min fair service exchange on graphs: solver, checkers, and token dynamics."""

from .equilibrium import EquilibriumReport, is_exchange_equilibrium, proportionalize
from .estimator import LexFairAllocator, TokenExchangeSimulator, check_market
from .lex import LexSolution, extract_bottom_level, pair_link_allocation, solve_lex_optimal
from .market import (
    Allocation,
    LevelDecomposition,
    MarketGraph,
    conservation_check,
    in_out,
    level_decomposition,
    lex_compare,
    ratio_vector,
    received_vector,
    to_rational,
    validate_market,
)
from .maxmin import FeasibilityResult, MaxMinSolution, feasible_at, hall_ratio, solve_maxmin
from .sim import SimConfig, SimTrace, convergence_report, simulate
from .stability import coalition_improvement, strong_stability_check, weak_stability_check
from .structure import groups, redundant_links, verify_neighbor_levels, verify_level_structure

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "EquilibriumReport",
    "FeasibilityResult",
    "LevelDecomposition",
    "LexFairAllocator",
    "LexSolution",
    "MarketGraph",
    "MaxMinSolution",
    "SimConfig",
    "SimTrace",
    "TokenExchangeSimulator",
    "check_market",
    "coalition_improvement",
    "conservation_check",
    "convergence_report",
    "extract_bottom_level",
    "feasible_at",
    "groups",
    "hall_ratio",
    "in_out",
    "is_exchange_equilibrium",
    "level_decomposition",
    "lex_compare",
    "pair_link_allocation",
    "proportionalize",
    "ratio_vector",
    "received_vector",
    "redundant_links",
    "simulate",
    "solve_lex_optimal",
    "solve_maxmin",
    "strong_stability_check",
    "to_rational",
    "validate_market",
    "verify_neighbor_levels",
    "verify_level_structure",
    "weak_stability_check",
]
