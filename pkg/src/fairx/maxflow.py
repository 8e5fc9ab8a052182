"""Integer max-flow (Dinic) with residual reachability for min-cut extraction."""
from __future__ import annotations

from collections import deque
from fractions import Fraction
from math import lcm


class FlowNetwork:
    """Directed network on nodes ``0..n-1`` with integer capacities.

    Arcs are stored as paired forward/backward entries; ``add_edge`` returns a
    handle for reading the final flow. Augmentation follows insertion order,
    so results are deterministic.
    """

    def __init__(self, n: int):
        self.n = n
        self.graph = [[] for _ in range(n)]
        self.to = []
        self.cap = []

    def add_edge(self, u: int, v: int, cap: int) -> int:
        if cap < 0:
            raise ValueError("negative capacity")
        handle = len(self.to)
        self.to.append(v)
        self.cap.append(int(cap))
        self.graph[u].append(handle)
        self.to.append(u)
        self.cap.append(0)
        self.graph[v].append(handle + 1)
        return handle

    def flow(self, handle: int) -> int:
        # flow on a forward arc equals the residual capacity of its twin
        return self.cap[handle + 1]

    def _bfs(self, s, t):
        level = [-1] * self.n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in self.graph[u]:
                v = self.to[e]
                if self.cap[e] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def _dfs(self, u, t, pushed, level, it):
        if u == t:
            return pushed
        adj = self.graph[u]
        while it[u] < len(adj):
            e = adj[it[u]]
            v = self.to[e]
            if self.cap[e] > 0 and level[v] == level[u] + 1:
                got = self._dfs(v, t, min(pushed, self.cap[e]), level, it)
                if got:
                    self.cap[e] -= got
                    self.cap[e ^ 1] += got
                    return got
            it[u] += 1
        return 0

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        limit = sum(self.cap) + 1
        while True:
            level = self._bfs(s, t)
            if level is None:
                return total
            it = [0] * self.n
            while True:
                pushed = self._dfs(s, t, limit, level, it)
                if not pushed:
                    break
                total += pushed

    def reachable(self, s: int) -> set:
        """Nodes reachable from ``s`` in the residual network."""
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for e in self.graph[u]:
                v = self.to[e]
                if self.cap[e] > 0 and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen


def common_scale(values) -> int:
    """Smallest positive integer that clears every denominator in ``values``."""
    scale = 1
    for v in values:
        scale = lcm(scale, Fraction(v).denominator)
    return scale
