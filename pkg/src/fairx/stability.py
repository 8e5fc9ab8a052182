"""Coalitional stability of a received-resource vector by subset enumeration.

A coalition S can only trade on its induced subgraph, where its members'
total receipts are fixed at the total endowment of its non-isolated
members. That turns both blocking tests into flow problems:

* some member strictly better, nobody worse: receipts ``>= r`` are routable
  and the coalition's endowment exceeds ``sum(r)`` over S;
* every member strictly better: the largest uniform margin ``eps`` with
  receipts ``>= r + eps`` routable is positive.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import InstanceTooLarge, UnknownNode
from .market import Allocation, MarketGraph, fmt, received_vector, to_rational
from .maxmin import complete_allocation, demand_flow, parametric_max

log = logging.getLogger(__name__)

DEFAULT_CAP = 16


@dataclass(frozen=True)
class Improvement:
    members: tuple  # ids of S
    allocation: Allocation  # on the induced sub-market of S
    received: dict  # id -> new receipt

    def to_dict(self):
        return {
            "members": list(self.members),
            "received": {k: fmt(v) for k, v in self.received.items()},
            "flows": self.allocation.to_dict()["flows"],
        }


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    mode: str
    blocking: Improvement | None = None
    coalitions_checked: int = 0

    def to_dict(self):
        out = {"stable": self.stable, "mode": self.mode, "coalitions_checked": self.coalitions_checked}
        if self.blocking is not None:
            out["blocking_coalition"] = self.blocking.to_dict()
        return out


def _coalition(market, S, baseline):
    for i in S:
        if not (isinstance(i, int) and 0 <= i < market.n):
            raise UnknownNode(i)
    members = sorted(set(S))
    sub = market.induced(members)
    base = [to_rational(baseline[i]) for i in members]
    return sub, base


def coalition_improvement(market: MarketGraph, S, baseline, strict_all: bool = False):
    """Find an allocation on the subgraph induced by ``S`` that blocks ``baseline``.

    With ``strict_all=False`` the allocation must give every member at least
    its baseline and some member more; with ``strict_all=True`` every member
    must gain. Returns an :class:`Improvement` or ``None``.
    """
    if not S:
        raise ValueError("coalition must be nonempty")
    sub, base = _coalition(market, S, baseline)
    # members with no partner inside S are stuck at zero
    if any(base[k] > 0 for k in sub.isolated):
        return None
    if strict_all and sub.isolated:
        return None
    if not sub.edges:
        return None
    supply = sub.total_endowment - sum((sub.endowments[k] for k in sub.isolated), Fraction(0))
    need = sum(base, Fraction(0))
    if supply <= need:
        return None

    if strict_all:
        weight = [Fraction(1)] * sub.n
        ok, _, _ = demand_flow(sub, base)
        if not ok:
            return None
        # uniform margin over all members is at most the average surplus
        eps, flows, _, _ = parametric_max(sub, base, weight, (supply - need) / sub.n)
        if eps <= 0:
            return None
        flows_for = flows
    else:
        ok, flows_for, _ = demand_flow(sub, base)
        if not ok:
            return None

    allocation = complete_allocation(sub, flows_for)
    got = received_vector(sub, allocation)
    return Improvement(sub.ids, allocation, dict(zip(sub.ids, got)))


def _subsets(n):
    for size in range(1, n + 1):
        yield from combinations(range(n), size)


def _check(market, baseline, strict_all, cap, workers):
    if market.n > cap:
        raise InstanceTooLarge(f"{market.n} nodes exceeds the cap of {cap}")
    if cap > DEFAULT_CAP and market.n > DEFAULT_CAP:
        log.warning("enumerating 2^%d coalitions", market.n)
    baseline = [to_rational(x) for x in baseline]
    mode = "weak" if strict_all else "strong"
    subsets = list(_subsets(market.n))
    if workers and workers > 1:
        # results come back in submission order, so the reported blocker is
        # the first in enumeration order regardless of completion order
        with ThreadPoolExecutor(workers) as pool:
            results = pool.map(lambda S: coalition_improvement(market, S, baseline, strict_all), subsets)
            for count, (S, found) in enumerate(zip(subsets, results), 1):
                if found is not None:
                    return StabilityVerdict(False, mode, found, count)
        return StabilityVerdict(True, mode, None, len(subsets))
    for count, S in enumerate(subsets, 1):
        found = coalition_improvement(market, S, baseline, strict_all)
        if found is not None:
            return StabilityVerdict(False, mode, found, count)
    return StabilityVerdict(True, mode, None, len(subsets))


def strong_stability_check(market: MarketGraph, received, cap: int = DEFAULT_CAP, workers: int = 0) -> StabilityVerdict:
    """No coalition can make one member better off without hurting another."""
    return _check(market, received, False, cap, workers)


def weak_stability_check(market: MarketGraph, received, cap: int = DEFAULT_CAP, workers: int = 0) -> StabilityVerdict:
    """No coalition can make all of its members strictly better off (core membership)."""
    return _check(market, received, True, cap, workers)
