"""Market model: graph, endowments, allocations, and the quantities derived from them.

All amounts are exact :class:`fractions.Fraction` values. Node ids are opaque
strings; internally every node is addressed by its position in
``MarketGraph.ids`` and all iteration happens in that order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Rational

from .errors import (
    AllocationMismatch,
    DimensionMismatch,
    MarketValidationError,
    UnknownNode,
)

__all__ = [
    "to_rational",
    "fmt",
    "MarketGraph",
    "Allocation",
    "FlowSummary",
    "ConservationReport",
    "LevelDecomposition",
    "validate_market",
    "received_vector",
    "ratio_vector",
    "in_out",
    "conservation_check",
    "lex_compare",
    "level_decomposition",
]


def to_rational(value) -> Fraction:
    """Parse ``value`` into an exact Fraction.

    Accepts ints, Fractions, and strings in decimal (``"0.25"``) or ``"p/q"``
    form. Floats are read through their shortest decimal repr, so ``0.1``
    becomes ``1/10`` rather than the binary approximation.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not amounts")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational amount")


def fmt(value: Fraction) -> str:
    """Render an exact amount as ``"p/q"`` (or ``"p"`` for integers)."""
    return str(Fraction(value))


@dataclass(frozen=True)
class MarketGraph:
    ids: tuple
    endowments: tuple
    edges: tuple  # (i, j) index pairs with i < j, sorted
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {nid: k for k, nid in enumerate(self.ids)})

    @property
    def n(self) -> int:
        return len(self.ids)

    def index(self, node_id) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def indices(self, node_ids) -> frozenset:
        return frozenset(self.index(x) for x in node_ids)

    @cached_property
    def neighbors(self) -> tuple:
        adj = [[] for _ in self.ids]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def arcs(self) -> tuple:
        """Directed pairs (i, j) for every edge, in ascending order."""
        return tuple(sorted([(i, j) for i, j in self.edges] + [(j, i) for i, j in self.edges]))

    @cached_property
    def isolated(self) -> frozenset:
        return frozenset(i for i, nb in enumerate(self.neighbors) if not nb)

    @cached_property
    def total_endowment(self) -> Fraction:
        return sum(self.endowments, Fraction(0))

    def has_edge(self, i, j) -> bool:
        return j in self.neighbors[i]

    def neighbors_within(self, i, nodes) -> tuple:
        return tuple(j for j in self.neighbors[i] if j in nodes)

    def neighborhood(self, S, within=None) -> frozenset:
        """Neighbors of S outside S, optionally restricted to the node set ``within``."""
        out = set()
        for i in S:
            out.update(self.neighbors[i])
        out -= set(S)
        if within is not None:
            out &= set(within)
        return frozenset(out)

    def components(self) -> list:
        """Connected components (as sorted tuples of indices), isolated nodes included."""
        seen = set()
        comps = []
        for start in range(self.n):
            if start in seen:
                continue
            stack, comp = [start], []
            seen.add(start)
            while stack:
                u = stack.pop()
                comp.append(u)
                for v in self.neighbors[u]:
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
            comps.append(tuple(sorted(comp)))
        return comps

    def is_connected(self) -> bool:
        return self.n > 0 and len(self.components()) == 1

    def induced(self, nodes) -> "MarketGraph":
        """Induced sub-market on ``nodes`` (indices); keeps original ids and order."""
        keep = sorted(set(nodes))
        pos = {old: new for new, old in enumerate(keep)}
        edges = tuple(sorted((pos[i], pos[j]) for i, j in self.edges if i in pos and j in pos))
        return MarketGraph(
            tuple(self.ids[i] for i in keep),
            tuple(self.endowments[i] for i in keep),
            edges,
        )

    def with_endowments(self, endowments) -> "MarketGraph":
        return MarketGraph(self.ids, tuple(to_rational(x) for x in endowments), self.edges)

    def to_dict(self) -> dict:
        return {
            "nodes": [{"id": nid, "endowment": fmt(d)} for nid, d in zip(self.ids, self.endowments)],
            "edges": [[self.ids[i], self.ids[j]] for i, j in self.edges],
        }

    @classmethod
    def from_dict(cls, data) -> "MarketGraph":
        nodes = [(str(node["id"]), node["endowment"]) for node in data["nodes"]]
        edges = [(str(a), str(b)) for a, b in data.get("edges", [])]
        return validate_market(nodes, edges)


def validate_market(nodes, edges) -> MarketGraph:
    """Build a :class:`MarketGraph`, collecting every model violation.

    ``nodes`` is a sequence of ``(id, endowment)`` pairs or a mapping id ->
    endowment; ``edges`` a sequence of id pairs. Raises
    :class:`MarketValidationError` listing all problems at once.
    """
    if hasattr(nodes, "items"):
        nodes = list(nodes.items())
    problems = []
    ids, endowments, index = [], [], {}
    for node_id, endowment in nodes:
        node_id = str(node_id)
        if node_id in index:
            problems.append(("DuplicateNode", node_id))
            continue
        try:
            value = to_rational(endowment)
        except (TypeError, ValueError, ZeroDivisionError):
            problems.append(("BadEndowment", node_id))
            value = None
        if value is not None and value <= 0:
            problems.append(("NonPositiveEndowment", node_id))
        index[node_id] = len(ids)
        ids.append(node_id)
        endowments.append(value)

    seen = set()
    edge_list = []
    for a, b in edges:
        a, b = str(a), str(b)
        if a == b:
            problems.append(("SelfLoop", a))
            continue
        missing = [x for x in (a, b) if x not in index]
        if missing:
            problems.extend(("UnknownNode", x) for x in missing)
            continue
        i, j = sorted((index[a], index[b]))
        if (i, j) in seen:
            problems.append(("DuplicateEdge", (a, b)))
            continue
        seen.add((i, j))
        edge_list.append((i, j))

    if problems:
        raise MarketValidationError(problems)
    return MarketGraph(tuple(ids), tuple(endowments), tuple(sorted(edge_list)))


class Allocation:
    """Exact amounts ``d_ij`` on every directed arc of a market.

    Arcs missing from ``flows`` carry zero. Construction checks that every
    non-isolated node hands out exactly its endowment.
    """

    __slots__ = ("market", "flows")

    def __init__(self, market: MarketGraph, flows, check: bool = True):
        self.market = market
        clean = {}
        for (i, j), amount in flows.items():
            amount = to_rational(amount)
            if amount:
                clean[(i, j)] = amount
        self.flows = clean
        if check:
            self.validate()

    def validate(self):
        m = self.market
        sent = [Fraction(0)] * m.n
        for (i, j), amount in self.flows.items():
            if not (0 <= i < m.n and 0 <= j < m.n) or not m.has_edge(i, j):
                raise AllocationMismatch(f"flow on absent edge ({i}, {j})")
            if amount < 0:
                raise AllocationMismatch(f"negative flow on ({m.ids[i]}, {m.ids[j]})")
            sent[i] += amount
        for i in range(m.n):
            if i in m.isolated:
                continue
            if sent[i] != m.endowments[i]:
                raise AllocationMismatch(
                    f"node {m.ids[i]} allocates {fmt(sent[i])} but owns {fmt(m.endowments[i])}"
                )

    def __getitem__(self, arc) -> Fraction:
        return self.flows.get(arc, Fraction(0))

    def __eq__(self, other):
        return isinstance(other, Allocation) and self.market == other.market and self.flows == other.flows

    def __repr__(self):
        return f"Allocation({self.to_dict()})"

    def recipients(self, i) -> tuple:
        return tuple(j for j in self.market.neighbors[i] if self[(i, j)] > 0)

    def idle_links(self, i) -> tuple:
        return tuple(j for j in self.market.neighbors[i] if self[(i, j)] == 0)

    def givers(self, i) -> tuple:
        return tuple(j for j in self.market.neighbors[i] if self[(j, i)] > 0)

    def to_dict(self) -> dict:
        ids = self.market.ids
        return {
            "flows": [
                {"from": ids[i], "to": ids[j], "amount": fmt(self.flows[(i, j)])}
                for i, j in sorted(self.flows)
            ]
        }

    @classmethod
    def from_dict(cls, market: MarketGraph, data) -> "Allocation":
        flows = {}
        for row in data["flows"]:
            if not isinstance(row, dict):
                row = dict(zip(("from", "to", "amount"), row))
            arc = (market.index(str(row["from"])), market.index(str(row["to"])))
            if arc in flows:
                raise AllocationMismatch(f"duplicate flow {row['from']}->{row['to']}")
            flows[arc] = to_rational(row["amount"])
        return cls(market, flows)


def received_vector(market: MarketGraph, allocation: Allocation) -> tuple:
    if allocation.market != market:
        raise AllocationMismatch("allocation belongs to a different market")
    r = [Fraction(0)] * market.n
    for (_, j), amount in allocation.flows.items():
        r[j] += amount
    return tuple(r)


def ratio_vector(market: MarketGraph, received) -> tuple:
    if len(received) != market.n:
        raise DimensionMismatch("received vector length differs from node count")
    return tuple(
        Fraction(0) if i in market.isolated else Fraction(received[i]) / market.endowments[i]
        for i in range(market.n)
    )


@dataclass(frozen=True)
class FlowSummary:
    in_flow: Fraction
    out_flow: Fraction


def in_out(market: MarketGraph, allocation: Allocation, S) -> FlowSummary:
    """Flow entering ``S`` from outside and leaving ``S`` to outside."""
    S = frozenset(S)
    for i in S:
        if not (isinstance(i, int) and 0 <= i < market.n):
            raise UnknownNode(i)
    inflow = outflow = Fraction(0)
    for (i, j), amount in allocation.flows.items():
        if i in S and j not in S:
            outflow += amount
        elif j in S and i not in S:
            inflow += amount
    return FlowSummary(inflow, outflow)


@dataclass(frozen=True)
class ConservationReport:
    ok: bool
    lhs: Fraction  # sum_S r_i + Out(S)
    rhs: Fraction  # sum_S D_i + In(S)
    out_within_endowment: bool
    in_within_received: bool

    def __bool__(self):
        return self.ok


def conservation_check(market: MarketGraph, allocation: Allocation, S) -> ConservationReport:
    """Check the balance identity for ``S`` and the two bounds it implies.

    Works on the raw flows, so a hand-corrupted allocation built with
    ``check=False`` is reported rather than rejected.
    """
    S = frozenset(S)
    flows = in_out(market, allocation, S)
    r = [Fraction(0)] * market.n
    sent = [Fraction(0)] * market.n
    for (i, j), amount in allocation.flows.items():
        r[j] += amount
        sent[i] += amount
    r_S = sum((r[i] for i in S), Fraction(0))
    d_S = sum((market.endowments[i] for i in S if i not in market.isolated), Fraction(0))
    sent_S = sum((sent[i] for i in S), Fraction(0))
    lhs = r_S + flows.out_flow
    rhs = d_S + flows.in_flow
    out_ok = flows.out_flow <= d_S
    in_ok = flows.in_flow <= r_S
    return ConservationReport(lhs == rhs and sent_S == d_S and out_ok and in_ok, lhs, rhs, out_ok, in_ok)


def lex_compare(x, y) -> int:
    """Compare ascending-sorted copies of two vectors: -1, 0 or 1."""
    if len(x) != len(y):
        raise DimensionMismatch(f"{len(x)} vs {len(y)} components")
    for a, b in zip(sorted(x), sorted(y)):
        if a != b:
            return -1 if a < b else 1
    return 0


@dataclass(frozen=True)
class LevelDecomposition:
    """Distinct ratio levels and the node sets built from them.

    ``levels[k]`` is the (k+1)-th smallest level, ``level_sets[k]`` its nodes,
    ``peeled[k]`` the node set left after stripping the k outermost level
    pairs, and ``groups[k]`` the union of the k-th lowest and k-th highest
    level sets (a single set for the middle level when K is odd).
    """

    levels: tuple
    level_sets: tuple
    level_of: dict
    peeled: tuple
    groups: tuple

    @property
    def K(self) -> int:
        return len(self.levels)

    def level(self, i) -> Fraction:
        return self.levels[self.level_of[i]]

    def group_levels(self) -> list:
        K = self.K
        out = []
        for k in range(len(self.groups)):
            hi = K - 1 - k
            out.append((self.levels[k],) if hi == k else (self.levels[k], self.levels[hi]))
        return out


def level_decomposition(market: MarketGraph, ratios) -> LevelDecomposition:
    """Split non-isolated nodes by exact ratio value. Isolated nodes are left out."""
    active = [i for i in range(market.n) if i not in market.isolated]
    levels = tuple(sorted({Fraction(ratios[i]) for i in active}))
    pos = {v: k for k, v in enumerate(levels)}
    level_of = {i: pos[Fraction(ratios[i])] for i in active}
    sets = [set() for _ in levels]
    for i in active:
        sets[level_of[i]].add(i)
    level_sets = tuple(frozenset(s) for s in sets)

    K = len(levels)
    half = (K + 1) // 2
    peeled, groups = [], []
    remaining = frozenset(active)
    for k in range(half):
        peeled.append(remaining)
        group = level_sets[k] | level_sets[K - 1 - k]
        groups.append(group)
        remaining = remaining - group
    return LevelDecomposition(levels, level_sets, level_of, tuple(peeled), tuple(groups))
