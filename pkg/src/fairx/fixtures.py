"""Named example markets and a random market generator."""
from __future__ import annotations

import random

from .market import MarketGraph, validate_market


def two_node() -> MarketGraph:
    return validate_market([("1", 10), ("2", 30)], [("1", "2")])


def star(leaves: int = 3) -> MarketGraph:
    nodes = [("c", 1)] + [(f"l{k}", 1) for k in range(1, leaves + 1)]
    return validate_market(nodes, [("c", f"l{k}") for k in range(1, leaves + 1)])


def path4() -> MarketGraph:
    return validate_market([(x, 1) for x in "abcd"], [("a", "b"), ("b", "c"), ("c", "d")])


def cycle4() -> MarketGraph:
    return validate_market([(x, 10) for x in "abcd"], [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])


def triangle() -> MarketGraph:
    return validate_market([(x, 1) for x in "abc"], [("a", "b"), ("b", "c"), ("a", "c")])


def three_level() -> MarketGraph:
    """Six-node market with three ratio levels (1/2, 1, 2).

    The edge set is reconstructed: only the endowments and the received
    amounts (20, 40, 10, 10, 60, 30) are known, and these edges reproduce
    them.
    """
    endowments = {"1": 40, "2": 20, "3": 10, "4": 10, "5": 30, "6": 60}
    edges = [("1", "2"), ("2", "4"), ("2", "5"), ("3", "4"), ("5", "6")]
    return validate_market(endowments, edges)


def complete(endowments) -> MarketGraph:
    ids = [str(k) for k in range(1, len(endowments) + 1)]
    edges = [(a, b) for x, a in enumerate(ids) for b in ids[x + 1:]]
    return validate_market(list(zip(ids, endowments)), edges)


def complete6() -> MarketGraph:
    """Complete graph on six nodes where node 4 dominates (levels 247/250 and 250/247)."""
    return complete([49, 50, 49, 250, 50, 49])


FIXTURES = {
    "two_node": two_node,
    "star": star,
    "path4": path4,
    "cycle4": cycle4,
    "triangle": triangle,
    "three_level": three_level,
    "complete6": complete6,
}


def random_market(rng: random.Random, n: int, p: float = 0.4, connected: bool = True,
                  low: int = 1, high: int = 100) -> MarketGraph:
    """Random G(n, p) market with integer endowments in [low, high].

    With ``connected=True`` a random spanning tree is laid down first so the
    graph is always connected.
    """
    ids = [str(k) for k in range(1, n + 1)]
    edges = set()
    if connected:
        order = list(range(n))
        rng.shuffle(order)
        for k in range(1, n):
            a, b = order[k], order[rng.randrange(k)]
            edges.add((min(a, b), max(a, b)))
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                edges.add((a, b))
    nodes = [(nid, rng.randint(low, high)) for nid in ids]
    return validate_market(nodes, [(ids[a], ids[b]) for a, b in sorted(edges)])
