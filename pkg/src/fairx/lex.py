"""Lex-optimal (max-min fair) allocation by level peeling.

Each round solves the max-min problem on the still-unassigned nodes, isolates
the exact bottom level by local flow reshuffling, pairs it with its
neighborhood (whose level is the reciprocal), fixes the flows between the two
by transportation, and recurses on what is left. A round whose max-min value
is 1 closes the middle level.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InfeasibleTransport, NotOptimalInput
from .market import (
    Allocation,
    LevelDecomposition,
    MarketGraph,
    fmt,
    level_decomposition,
    ratio_vector,
    received_vector,
)
from .maxflow import FlowNetwork, common_scale
from .maxmin import MaxMinSolution, solve_maxmin


@dataclass(frozen=True)
class PeelRound:
    nodes: tuple  # ids of the peeled node set this round worked on
    lam: Fraction
    low: tuple = ()
    high: tuple = ()
    maxmin: dict = field(default_factory=dict)


@dataclass(frozen=True)
class LexSolution:
    market: MarketGraph
    allocation: Allocation
    received: tuple
    ratios: tuple
    decomposition: LevelDecomposition
    rounds: tuple = ()

    @property
    def K(self) -> int:
        return self.decomposition.K

    def to_dict(self, explain: bool = False) -> dict:
        ids = self.market.ids
        dec = self.decomposition
        out = {
            "levels": [fmt(v) for v in dec.levels],
            "level_sets": [[ids[i] for i in sorted(s)] for s in dec.level_sets],
            "groups": [[ids[i] for i in sorted(g)] for g in dec.groups],
            "received": {ids[i]: fmt(v) for i, v in enumerate(self.received)},
            "ratios": {ids[i]: fmt(v) for i, v in enumerate(self.ratios)},
            "flows": [[ids[i], ids[j], fmt(a)] for (i, j), a in sorted(self.allocation.flows.items())],
        }
        if explain:
            out["rounds"] = [
                {
                    "nodes": list(rd.nodes),
                    "lambda": fmt(rd.lam),
                    "low": list(rd.low),
                    "high": list(rd.high),
                    "certificate": rd.maxmin,
                }
                for rd in self.rounds
            ]
        return out


def extract_bottom_level(market: MarketGraph, maxmin: MaxMinSolution):
    """Shrink the max-min minimizers to the true bottom level.

    Starting from every node at the max-min ratio, repeatedly move flow off a
    link into a node that is above the floor and onto a link into a floor
    node, lifting the latter off the floor. First this removes every edge
    inside the candidate set; then it stops neighbors of the set from
    serving anything outside it. Each move takes
    ``min(d_src, slack_src / 2)``, which keeps the donor strictly above the
    floor. Returns ``(bottom_set, reshaped_allocation)``.
    """
    lam = maxmin.lambda_star
    D = market.endowments
    active = [i for i in range(market.n) if i not in market.isolated]
    flows = dict(maxmin.allocation.flows)
    r = list(received_vector(market, maxmin.allocation))
    if min(r[i] / D[i] for i in active) != lam:
        raise NotOptimalInput("allocation floor differs from the stated max-min value")
    if lam >= 1:
        raise NotOptimalInput("a single-level market has no separate bottom level")

    L = {i for i in active if r[i] == lam * D[i]}

    def move(i, src, dst):
        delta = min(flows[(i, src)], (r[src] - lam * D[src]) / 2)
        flows[(i, src)] -= delta
        if not flows[(i, src)]:
            del flows[(i, src)]
        flows[(i, dst)] = flows.get((i, dst), Fraction(0)) + delta
        r[src] -= delta
        r[dst] += delta

    # edges inside L: lift one endpoint using flow its partner sends outside L
    while True:
        pick = None
        for i in sorted(L):
            donor = next((x for x in market.neighbors[i] if x not in L and (i, x) in flows), None)
            if donor is None:
                continue
            inner = next((j for j in market.neighbors[i] if j in L), None)
            if inner is not None:
                pick = (i, inner, donor)
                break
        if pick is None:
            break
        i, j, j1 = pick
        move(i, j1, j)
        L.discard(j)

    # neighbors of L that still serve outsiders redirect that flow into L
    while True:
        pick = None
        for i in sorted(market.neighborhood(L)):
            donor = next((x for x in market.neighbors[i] if x not in L and (i, x) in flows), None)
            if donor is not None:
                target = next(j for j in market.neighbors[i] if j in L)
                pick = (i, target, donor)
                break
        if pick is None:
            break
        i, j, j1 = pick
        move(i, j1, j)
        L.discard(j)

    if not L:
        raise NotOptimalInput("bottom level vanished; input was not max-min optimal")
    return frozenset(L), Allocation(market, flows)


def _transport(market, senders, receivers, supply, demand):
    """Ship ``supply[i]`` from each sender along edges to meet ``demand[j]`` exactly."""
    senders, receivers = sorted(senders), sorted(receivers)
    scale = common_scale([supply[i] for i in senders] + [demand[j] for j in receivers])
    source, sink = 2 * market.n, 2 * market.n + 1
    net = FlowNetwork(2 * market.n + 2)
    total_supply = sum((supply[i] for i in senders), Fraction(0))
    total_demand = sum((demand[j] for j in receivers), Fraction(0))
    if total_supply != total_demand:
        raise InfeasibleTransport(f"supply {fmt(total_supply)} != demand {fmt(total_demand)}")
    for i in senders:
        net.add_edge(source, i, int(supply[i] * scale))
    recv = set(receivers)
    handles = {}
    for i in senders:
        for j in market.neighbors[i]:
            if j in recv:
                handles[(i, j)] = net.add_edge(i, market.n + j, int(total_supply * scale))
    for j in receivers:
        net.add_edge(market.n + j, sink, int(demand[j] * scale))
    if Fraction(net.max_flow(source, sink), scale) != total_supply:
        raise InfeasibleTransport("cross-level transportation problem is infeasible")
    return {arc: Fraction(net.flow(h), scale) for arc, h in handles.items() if net.flow(h)}


def pair_link_allocation(market: MarketGraph, low, high, l_low) -> dict:
    """Flows on the edges between a bottom level set and its neighborhood.

    Low nodes send their whole endowment to high nodes, each high node
    collecting ``D_j / l_low``; high nodes send their whole endowment back,
    each low node collecting ``l_low * D_i``.
    """
    l_low = Fraction(l_low)
    l_high = 1 / l_low
    D = market.endowments
    up = _transport(market, low, high, D, [l_high * d for d in D])
    down = _transport(market, high, low, D, [l_low * d for d in D])
    return {**up, **down}


def _two_node(market):
    return {(0, 1): market.endowments[0], (1, 0): market.endowments[1]}


def _solve_connected(market: MarketGraph):
    if market.n == 2:
        return _two_node(market), ()
    flows, rounds = {}, []
    Q = list(range(market.n))
    while Q:
        sub = market.induced(Q)
        if sub.isolated:
            raise RuntimeError("peeled graph left a node without neighbors")
        mm = solve_maxmin(sub)
        lam = mm.lambda_star
        if lam == 1:
            # every ratio is 1: the witness is the middle-level circulation
            for (i, j), amount in mm.allocation.flows.items():
                flows[(Q[i], Q[j])] = amount
            rounds.append(PeelRound(sub.ids, lam, maxmin=mm.explain(sub)))
            break
        low, _ = extract_bottom_level(sub, mm)
        high = sub.neighborhood(low)
        # flows from middle nodes into the high set are dropped by construction:
        # the middle nodes are reallocated from scratch in the next round
        for (i, j), amount in pair_link_allocation(sub, low, high, lam).items():
            flows[(Q[i], Q[j])] = amount
        rounds.append(
            PeelRound(
                sub.ids,
                lam,
                tuple(sub.ids[i] for i in sorted(low)),
                tuple(sub.ids[i] for i in sorted(high)),
                mm.explain(sub),
            )
        )
        done = {Q[i] for i in low | high}
        Q = [q for q in Q if q not in done]
    return flows, tuple(rounds)


def solve_lex_optimal(market: MarketGraph) -> LexSolution:
    """Lex-optimal allocation, received and ratio vectors, and level structure.

    Each connected component is solved on its own; isolated nodes keep
    ratio 0.
    """
    flows, rounds = {}, []
    for comp in market.components():
        if len(comp) < 2:
            continue
        sub = market.induced(comp)
        sub_flows, sub_rounds = _solve_connected(sub)
        for (i, j), amount in sub_flows.items():
            flows[(comp[i], comp[j])] = amount
        rounds.extend(sub_rounds)
    allocation = Allocation(market, flows)
    received = received_vector(market, allocation)
    ratios = ratio_vector(market, received)
    return LexSolution(
        market, allocation, received, ratios, level_decomposition(market, ratios), tuple(rounds)
    )
