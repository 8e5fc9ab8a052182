"""Exchange equilibrium: checking it, and building one from a lex-optimal allocation."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NotLexOptimalInput
from .market import Allocation, MarketGraph, fmt, ratio_vector, received_vector


@dataclass
class EquilibriumReport:
    is_equilibrium: bool
    violations: list = field(default_factory=list)

    def to_dict(self):
        return {"is_equilibrium": self.is_equilibrium, "violations": self.violations}


def is_exchange_equilibrium(market: MarketGraph, allocation: Allocation) -> EquilibriumReport:
    """Check reciprocity ``d_ji == rho_i * d_ij`` on every link and that every
    node is served only by its cheapest (lowest-ratio) neighbors."""
    ratios = ratio_vector(market, received_vector(market, allocation))
    ids = market.ids
    violations = []
    for i in range(market.n):
        nbrs = market.neighbors[i]
        if not nbrs:
            continue
        for j in nbrs:
            if allocation[(j, i)] != ratios[i] * allocation[(i, j)]:
                violations.append(
                    {
                        "edge": [ids[i], ids[j]],
                        "condition": "reciprocity",
                        "detail": f"d[{ids[j]}->{ids[i]}]={fmt(allocation[(j, i)])} but "
                        f"rho[{ids[i]}]*d[{ids[i]}->{ids[j]}]={fmt(ratios[i] * allocation[(i, j)])}",
                    }
                )
        cheapest = min(ratios[k] for k in nbrs)
        for j in nbrs:
            if allocation[(j, i)] > 0 and ratios[j] != cheapest:
                violations.append(
                    {
                        "edge": [ids[j], ids[i]],
                        "condition": "cheapest_partner",
                        "detail": f"rho[{ids[j]}]={fmt(ratios[j])} above neighborhood minimum {fmt(cheapest)}",
                    }
                )
    return EquilibriumReport(not violations, violations)


def _violated(flows, ratios, i, j):
    return ratios[i] * flows.get((i, j), 0) > flows.get((j, i), 0)


def proportionalize(market: MarketGraph, lex) -> Allocation:
    """Cancel non-reciprocal flow around cycles until every link is reciprocal.

    A link (i, j) is violated when ``rho_i * d_ij > d_ji``. Starting from the
    lowest violated link, follow violated links backwards (from each node to
    a neighbor whose link into it is violated) until a node repeats, then
    push ``delta`` around that cycle: every cycle node sends ``delta`` less
    to its predecessor and ``delta`` more to its successor. Received amounts
    never change. ``delta`` is the smallest per-node slack
    ``(rho * d_out_back - d_in_back) / (rho + 1)``, which turns at least one
    violation into an equality without reversing any other.
    """
    allocation = lex.allocation
    ratios = ratio_vector(market, received_vector(market, allocation))
    if list(ratios) != list(lex.ratios):
        raise NotLexOptimalInput("allocation does not produce the stated ratio vector")
    if any(ratios[i] == 0 for i in range(market.n) if i not in market.isolated):
        raise NotLexOptimalInput("a non-isolated node has ratio 0")
    flows = dict(allocation.flows)
    before = received_vector(market, allocation)
    max_rounds = 2 * len(market.edges) + 1

    for _ in range(max_rounds):
        start = next((arc for arc in market.arcs if _violated(flows, ratios, *arc)), None)
        if start is None:
            break
        # chain[m] is served too much by chain[m + 1] relative to what it returns
        chain = [start[1], start[0]]
        where = {start[1]: 0, start[0]: 1}
        while True:
            cur = chain[-1]
            nxt = next((j for j in market.neighbors[cur] if _violated(flows, ratios, j, cur)), None)
            if nxt is None:
                raise NotLexOptimalInput(f"no violated link into {market.ids[cur]}; input is not lex-optimal")
            if nxt in where:
                cycle = chain[where[nxt]:]
                break
            where[nxt] = len(chain)
            chain.append(nxt)
        # in the cycle each node c[m] over-serves c[m - 1]; successor is c[m + 1]
        M = len(cycle)
        delta = min(
            (ratios[c] * flows.get((c, cycle[m - 1]), Fraction(0)) - flows.get((cycle[m - 1], c), Fraction(0)))
            / (ratios[c] + 1)
            for m, c in enumerate(cycle)
        )
        for m, c in enumerate(cycle):
            prev, succ = cycle[m - 1], cycle[(m + 1) % M]
            flows[(c, prev)] = flows.get((c, prev), Fraction(0)) - delta
            flows[(c, succ)] = flows.get((c, succ), Fraction(0)) + delta
        flows = {arc: v for arc, v in flows.items() if v}
        if any(v < 0 for v in flows.values()):
            raise NotLexOptimalInput("cycle cancellation produced a negative flow")
    else:
        raise NotLexOptimalInput("cycle cancellation did not terminate")

    result = Allocation(market, flows)
    if received_vector(market, result) != before:
        raise AssertionError("received vector changed during cycle cancellation")
    return result
