"""Exact solution of the max-min ratio subproblem.

``feasible_at`` decides whether every non-isolated node can receive at least
``lam * D_j`` by reducing to bipartite max-flow; ``solve_maxmin`` finds the
largest such ``lam`` by a Dinkelbach-style descent over min-cut sink sets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import EmptyEdgeSet, NegativeLambda
from .market import Allocation, MarketGraph, fmt, received_vector, to_rational
from .maxflow import FlowNetwork, common_scale


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    lam: Fraction
    witness: Allocation | None = None
    # sink set T of the min cut; a Hall violation when infeasible
    certificate: frozenset | None = None

    def certificate_bound(self, market: MarketGraph):
        """Return (supply adjacent to T, lam * demand of T)."""
        T = self.certificate
        return supply_adjacent(market, T), self.lam * sum((market.endowments[j] for j in T), Fraction(0))


@dataclass(frozen=True)
class MaxMinSolution:
    lambda_star: Fraction
    allocation: Allocation
    received: tuple
    certificate: frozenset
    steps: tuple = field(default=())  # (lam tried, violated sink set) per descent step

    def explain(self, market: MarketGraph) -> dict:
        return {
            "lambda_star": fmt(self.lambda_star),
            "bottleneck": sorted(market.ids[j] for j in self.certificate),
            "steps": [
                {"lambda": fmt(lam), "violated_set": sorted(market.ids[j] for j in T)}
                for lam, T in self.steps
            ],
        }


def adjacent_senders(market: MarketGraph, T) -> frozenset:
    """Nodes with at least one neighbor in T (members of T included)."""
    T = set(T)
    return frozenset(i for i in range(market.n) if any(j in T for j in market.neighbors[i]))


def supply_adjacent(market: MarketGraph, T) -> Fraction:
    return sum((market.endowments[i] for i in adjacent_senders(market, T)), Fraction(0))


def hall_ratio(market: MarketGraph, T) -> Fraction:
    """Supply that can reach T divided by the endowment of T."""
    demand = sum((market.endowments[j] for j in T), Fraction(0))
    return supply_adjacent(market, T) / demand


def demand_flow(market: MarketGraph, demands):
    """Route supply toward per-node demands on the bipartite sender/receiver network.

    Returns ``(feasible, flows, sink_set)``: ``flows`` maps arcs to the routed
    amounts (not yet a full allocation), ``sink_set`` holds the receivers not
    reachable from the source in the final residual network.
    """
    active = [j for j in range(market.n) if j not in market.isolated]
    scale = common_scale(list(market.endowments) + [demands[j] for j in active])
    n = market.n
    source, sink = 2 * n, 2 * n + 1
    net = FlowNetwork(2 * n + 2)
    big = int(market.total_endowment * scale)
    for i in active:
        net.add_edge(source, i, int(market.endowments[i] * scale))
    handles = {}
    for i, j in market.arcs:
        handles[(i, j)] = net.add_edge(i, n + j, big)
    need = 0
    for j in active:
        cap = demands[j] * scale
        if cap.denominator != 1:
            raise ArithmeticError("demand did not scale to an integer")
        need += int(cap)
        net.add_edge(n + j, sink, int(cap))
    value = net.max_flow(source, sink)
    flows = {arc: Fraction(net.flow(h), scale) for arc, h in handles.items() if net.flow(h)}
    seen = net.reachable(source)
    sink_set = frozenset(j for j in active if n + j not in seen)
    return value == need, flows, sink_set


def complete_allocation(market: MarketGraph, flows) -> Allocation:
    """Top up each sender's unrouted endowment onto its lowest-index neighbor."""
    flows = dict(flows)
    sent = [Fraction(0)] * market.n
    for (i, _), amount in flows.items():
        sent[i] += amount
    for i in range(market.n):
        if i in market.isolated:
            continue
        rest = market.endowments[i] - sent[i]
        if rest:
            arc = (i, market.neighbors[i][0])
            flows[arc] = flows.get(arc, Fraction(0)) + rest
    return Allocation(market, flows)


def feasible_at(market: MarketGraph, lam) -> FeasibilityResult:
    """Can every non-isolated node j receive at least ``lam * D_j``?"""
    lam = to_rational(lam)
    if lam < 0:
        raise NegativeLambda(fmt(lam))
    demands = [lam * d for d in market.endowments]
    ok, flows, sink_set = demand_flow(market, demands)
    if ok:
        return FeasibilityResult(True, lam, complete_allocation(market, flows), sink_set)
    return FeasibilityResult(False, lam, None, sink_set)


def parametric_max(market: MarketGraph, base, weight, start):
    """Largest t with demands ``base + t * weight`` routable, descending from ``start``.

    ``start`` must be an upper bound on the optimum. Each infeasible probe
    yields a violated sink set T and the next probe is the value at which T
    becomes exactly tight, so t strictly decreases and visits each T at most
    once. Returns ``(t, flows, sink_set, steps)``.
    """
    t = to_rational(start)
    steps = []
    while True:
        demands = [base[j] + t * weight[j] for j in range(market.n)]
        ok, flows, T = demand_flow(market, demands)
        if ok:
            return t, flows, T, tuple(steps)
        steps.append((t, T))
        slack = supply_adjacent(market, T) - sum((base[j] for j in T), Fraction(0))
        t_next = slack / sum((weight[j] for j in T), Fraction(0))
        if t_next >= t:
            raise ArithmeticError("parametric descent failed to decrease")
        t = t_next


def solve_maxmin(market: MarketGraph) -> MaxMinSolution:
    """Maximize the smallest ratio ``r_j / D_j`` over non-isolated nodes, exactly."""
    if not market.edges:
        raise EmptyEdgeSet("market has no edges")
    zero = [Fraction(0)] * market.n
    weight = [Fraction(0) if i in market.isolated else d for i, d in enumerate(market.endowments)]
    # T = all non-isolated nodes has Hall ratio 1, an upper bound
    lam, flows, T, steps = parametric_max(market, zero, weight, Fraction(1))
    allocation = complete_allocation(market, flows)
    return MaxMinSolution(lam, allocation, received_vector(market, allocation), T, steps)
