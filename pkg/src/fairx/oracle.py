"""Brute-force reference solvers, independent of the flow-based pipeline.

* :func:`linprog_exact` is a dense two-phase simplex over Fractions with
  Bland's rule (no cycling, no rounding).
* :func:`maxmin_programming` computes the lex-optimal ratio vector by
  classic max-min programming: maximize the common floor of the unfixed
  ratios, freeze every node that is tight in all optimal solutions, repeat.
* :func:`hall_minimum` enumerates every sink set to get the max-min value.

These are slow by design and meant for small instances.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .market import MarketGraph

__all__ = ["linprog_exact", "maxmin_programming", "hall_minimum", "LPResult"]


class LPResult:
    __slots__ = ("status", "value", "x")

    def __init__(self, status, value=None, x=None):
        self.status = status
        self.value = value
        self.x = x

    def __repr__(self):
        return f"LPResult({self.status!r}, {self.value!r})"


def _pivot(T, row, col):
    pivot = T[row][col]
    if pivot != 1:
        T[row] = [v / pivot for v in T[row]]
    prow = T[row]
    for r, line in enumerate(T):
        if r != row and line[col]:
            f = line[col]
            T[r] = [a - f * b for a, b in zip(line, prow)]


def _run(T, basis, cost, allowed):
    """Maximize ``cost . x`` over the tableau in place. Returns False if unbounded."""
    width = len(T[0]) - 1
    while True:
        entering = None
        for j in range(width):
            if not allowed[j]:
                continue
            reduced = sum((cost[basis[i]] * T[i][j] for i in range(len(T)) if T[i][j]), Fraction(0)) - cost[j]
            if reduced < 0:
                entering = j
                break
        if entering is None:
            return True
        best = None
        for i, line in enumerate(T):
            a = line[entering]
            if a > 0:
                ratio = line[-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return False
        _pivot(T, best[1], entering)
        basis[best[1]] = entering


def linprog_exact(c, A_ub=(), b_ub=(), A_eq=(), b_eq=()) -> LPResult:
    """Maximize ``c . x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``."""
    c = [Fraction(v) for v in c]
    n = len(c)
    n_slack = len(A_ub)
    rows = []
    for k, (a, b) in enumerate(zip(A_ub, b_ub)):
        line = [Fraction(v) for v in a] + [Fraction(0)] * n_slack
        line[n + k] = Fraction(1)
        rows.append((line, Fraction(b)))
    for a, b in zip(A_eq, b_eq):
        rows.append(([Fraction(v) for v in a] + [Fraction(0)] * n_slack, Fraction(b)))
    m = len(rows)
    width = n + n_slack + m
    T = []
    for k, (line, b) in enumerate(rows):
        if b < 0:
            line, b = [-v for v in line], -b
        art = [Fraction(0)] * m
        art[k] = Fraction(1)
        T.append(line + art + [b])
    basis = [n + n_slack + k for k in range(m)]

    phase1 = [Fraction(0)] * (n + n_slack) + [Fraction(-1)] * m
    _run(T, basis, phase1, [True] * width)
    if any(T[i][-1] for i in range(m) if basis[i] >= n + n_slack):
        return LPResult("infeasible")

    # drive zero-level artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= n + n_slack:
            col = next((j for j in range(n + n_slack) if T[i][j]), None)
            if col is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, i, col)
            basis[i] = col
        i += 1

    cost = c + [Fraction(0)] * (n_slack + m)
    allowed = [True] * (n + n_slack) + [False] * m
    if not _run(T, basis, cost, allowed):
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = T[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult("optimal", value, x)


def maxmin_programming(market: MarketGraph) -> tuple:
    """Lex-optimal ratio vector by iterated exact LP. Isolated nodes get 0."""
    arcs = list(market.arcs)
    A = len(arcs)
    t_col = A
    width = A + 1
    active = [i for i in range(market.n) if i not in market.isolated]
    ratios = [Fraction(0)] * market.n
    if not active:
        return tuple(ratios)

    alloc_rows, alloc_rhs = [], []
    for i in active:
        row = [0] * width
        for k, (a, _) in enumerate(arcs):
            if a == i:
                row[k] = 1
        alloc_rows.append(row)
        alloc_rhs.append(market.endowments[i])

    def inflow_row(i):
        row = [0] * width
        for k, (_, b) in enumerate(arcs):
            if b == i:
                row[k] = 1
        return row

    fixed = {}
    while len(fixed) < len(active):
        free = [i for i in active if i not in fixed]
        eq_rows = list(alloc_rows) + [inflow_row(i) for i in fixed]
        eq_rhs = list(alloc_rhs) + [fixed[i] for i in fixed]
        ub_rows, ub_rhs = [], []
        for i in free:
            row = [-v for v in inflow_row(i)]
            row[t_col] = market.endowments[i]
            ub_rows.append(row)
            ub_rhs.append(0)
        objective = [0] * width
        objective[t_col] = 1
        res = linprog_exact(objective, ub_rows, ub_rhs, eq_rows, eq_rhs)
        if res.status != "optimal":
            raise RuntimeError(f"max-min LP ended {res.status}")
        t_star = res.value

        pin_t = [0] * width
        pin_t[t_col] = 1
        blocked = []
        for i in free:
            probe = linprog_exact(
                inflow_row(i), ub_rows, ub_rhs, eq_rows + [pin_t], eq_rhs + [t_star]
            )
            if probe.value == t_star * market.endowments[i]:
                blocked.append(i)
        if not blocked:
            raise RuntimeError("no node tight in every optimum; LP solver inconsistent")
        for i in blocked:
            fixed[i] = t_star * market.endowments[i]
            ratios[i] = t_star
    return tuple(ratios)


def hall_minimum(market: MarketGraph):
    """Minimum Hall ratio over all nonempty sets of non-isolated nodes.

    Returns ``(value, minimizers)``. Exponential in the node count.
    """
    active = [i for i in range(market.n) if i not in market.isolated]
    best, argbest = None, []
    for size in range(1, len(active) + 1):
        for T in combinations(active, size):
            Tset = set(T)
            supply = sum(
                (market.endowments[i] for i in active if any(j in Tset for j in market.neighbors[i])),
                Fraction(0),
            )
            value = supply / sum((market.endowments[j] for j in T), Fraction(0))
            if best is None or value < best:
                best, argbest = value, [frozenset(T)]
            elif value == best:
                argbest.append(frozenset(T))
    return best, argbest
