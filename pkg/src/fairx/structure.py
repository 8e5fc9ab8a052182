"""Certificate checker for (market, allocation) pairs.

Every check recomputes ratios and level sets from the allocation alone and
never consults solver internals. Failed properties are reported, not raised.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .market import (
    Allocation,
    LevelDecomposition,
    MarketGraph,
    fmt,
    in_out,
    level_decomposition,
    ratio_vector,
    received_vector,
)


@dataclass
class Verdict:
    name: str
    passed: bool = True
    counterexample: object = None
    notes: list = field(default_factory=list)

    def fail(self, counterexample, note=None):
        if self.passed:
            self.passed = False
            self.counterexample = counterexample
        if note:
            self.notes.append(note)

    def to_dict(self):
        out = {"pass": self.passed}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.notes:
            out["notes"] = self.notes
        return out


@dataclass
class StructureReport:
    K: int
    levels: tuple
    verdicts: dict

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts.values())

    def __getitem__(self, name) -> Verdict:
        return self.verdicts[name]

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "K": self.K,
            "levels": [fmt(v) for v in self.levels],
            "properties": {name: v.to_dict() for name, v in self.verdicts.items()},
        }


def _views(market, allocation):
    received = received_vector(market, allocation)
    ratios = ratio_vector(market, received)
    return received, ratios, level_decomposition(market, ratios)


def verify_neighbor_levels(market: MarketGraph, allocation: Allocation) -> Verdict:
    """Every node's recipients share one level; unserved neighbors sit no lower."""
    _, ratios, _ = _views(market, allocation)
    ids = market.ids
    verdict = Verdict("neighbor_levels")
    for i in range(market.n):
        served = allocation.recipients(i)
        if not served:
            continue
        level = ratios[served[0]]
        for j in served[1:]:
            if ratios[j] != level:
                verdict.fail(
                    {"node": ids[i], "recipients": [ids[served[0]], ids[j]]},
                    f"{ids[i]} serves levels {fmt(level)} and {fmt(ratios[j])}",
                )
        for j in allocation.idle_links(i):
            if ratios[j] < level:
                verdict.fail(
                    {"node": ids[i], "unserved": ids[j], "served": ids[served[0]]},
                    f"{ids[i]} skips {ids[j]} at {fmt(ratios[j])} below served level {fmt(level)}",
                )
    return verdict


def _level_verdicts(market, received, dec: LevelDecomposition):
    ids = market.ids
    D = market.endowments
    names = ("independent_bottom", "top_is_neighborhood", "reciprocal_levels", "bottom_receives_top_endowment")
    out = {name: Verdict(name) for name in names}
    K = dec.K
    for k in range(K // 2):
        Q = dec.peeled[k]
        low, high = dec.level_sets[k], dec.level_sets[K - 1 - k]
        for i in sorted(low):
            for j in market.neighbors[i]:
                if j in low and i < j:
                    out["independent_bottom"].fail({"k": k + 1, "edge": [ids[i], ids[j]]})
        nbhd = market.neighborhood(low, within=Q)
        if nbhd != high:
            out["top_is_neighborhood"].fail(
                {
                    "k": k + 1,
                    "neighborhood": sorted(ids[i] for i in nbhd),
                    "top_level": sorted(ids[i] for i in high),
                }
            )
        prod = dec.levels[k] * dec.levels[K - 1 - k]
        if prod != 1:
            out["reciprocal_levels"].fail({"k": k + 1, "product": fmt(prod)})
        got = sum((received[i] for i in low), Fraction(0))
        owed = sum((D[i] for i in high), Fraction(0))
        if got != owed:
            out["bottom_receives_top_endowment"].fail(
                {"k": k + 1, "received": fmt(got), "top_endowment": fmt(owed)}
            )
    return out


def verify_level_structure(market: MarketGraph, allocation: Allocation) -> StructureReport:
    """Full structural report: recipient levels, the four level properties,
    the single-level rule, grouping, and zero flow across groups."""
    received, ratios, dec = _views(market, allocation)
    verdicts = {"neighbor_levels": verify_neighbor_levels(market, allocation)}
    verdicts.update(_level_verdicts(market, received, dec))

    single = Verdict("single_level_is_one")
    if dec.K == 1 and dec.levels[0] != 1:
        single.fail({"level": fmt(dec.levels[0])})
    verdicts["single_level_is_one"] = single

    grouping = Verdict("grouping")
    covered = set()
    for g in dec.groups:
        if covered & g:
            grouping.fail({"overlap": sorted(market.ids[i] for i in covered & g)})
        covered |= g
    active = {i for i in range(market.n) if i not in market.isolated}
    if covered != active:
        grouping.fail({"uncovered": sorted(market.ids[i] for i in active - covered)})
    if dec.K % 2 == 1 and dec.K > 0 and dec.levels[dec.K // 2] != 1:
        grouping.fail({"middle_level": fmt(dec.levels[dec.K // 2])})
    verdicts["grouping"] = grouping

    isolation = Verdict("group_flow_isolation")
    for k, g in enumerate(dec.groups):
        flows = in_out(market, allocation, g)
        if flows.in_flow or flows.out_flow:
            isolation.fail({"group": k + 1, "in": fmt(flows.in_flow), "out": fmt(flows.out_flow)})
    verdicts["group_flow_isolation"] = isolation
    return StructureReport(dec.K, dec.levels, verdicts)


def groups(decomposition: LevelDecomposition) -> list:
    """Groups with their levels: ``[(node_set, (low_level, high_level) or (1,)), ...]``."""
    members = set()
    out = []
    for g, lv in zip(decomposition.groups, decomposition.group_levels()):
        if members & g:
            raise ValueError("groups overlap; decomposition is not from a verified solution")
        members |= g
        out.append((g, lv))
    if members != set(decomposition.level_of):
        raise ValueError("groups do not cover every node")
    return out


def redundant_links(market: MarketGraph, solution) -> list:
    """Edges idle in both directions whose endpoints fall in different groups."""
    allocation = solution.allocation
    dec = solution.decomposition
    group_of = {}
    for k, g in enumerate(dec.groups):
        for i in g:
            group_of[i] = k
    out = []
    for i, j in market.edges:
        if allocation[(i, j)] or allocation[(j, i)]:
            continue
        if group_of.get(i) != group_of.get(j):
            out.append((market.ids[i], market.ids[j]))
    return out
