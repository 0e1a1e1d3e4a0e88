"""Vertex connectivity through unit-capacity max-flow on the vertex-split graph."""

from __future__ import annotations

from collections import deque

from .errors import DisconnectedInput, NoCutExists
from .graph import Graph

_INF = 1 << 30


class _SplitNetwork:
    """Residual network where vertex ``v`` becomes ``2v`` (in) -> ``2v+1`` (out)."""

    def __init__(self, g: Graph, s: int, t: int):
        self.head: list[list[int]] = [[] for _ in range(2 * g.n)]
        self.to: list[int] = []
        self.cap: list[int] = []
        for v in range(g.n):
            self._arc(2 * v, 2 * v + 1, _INF if v in (s, t) else 1)
        for u, v in g.edges:
            self._arc(2 * u + 1, 2 * v, _INF)
            self._arc(2 * v + 1, 2 * u, _INF)
        self.source = 2 * s + 1
        self.sink = 2 * t

    def _arc(self, a: int, b: int, c: int) -> None:
        self.head[a].append(len(self.to))
        self.to.append(b)
        self.cap.append(c)
        self.head[b].append(len(self.to))
        self.to.append(a)
        self.cap.append(0)

    def _augment(self) -> bool:
        prev = [-1] * len(self.head)
        prev[self.source] = -2
        queue = deque([self.source])
        while queue:
            x = queue.popleft()
            for arc in self.head[x]:
                y = self.to[arc]
                if self.cap[arc] > 0 and prev[y] == -1:
                    prev[y] = arc
                    if y == self.sink:
                        while y != self.source:
                            a = prev[y]
                            self.cap[a] -= 1
                            self.cap[a ^ 1] += 1
                            y = self.to[a ^ 1]
                        return True
                    queue.append(y)
        return False

    def max_flow(self, limit: int) -> int:
        flow = 0
        while flow < limit and self._augment():
            flow += 1
        return flow

    def source_side(self) -> list[bool]:
        seen = [False] * len(self.head)
        seen[self.source] = True
        queue = deque([self.source])
        while queue:
            x = queue.popleft()
            for arc in self.head[x]:
                y = self.to[arc]
                if self.cap[arc] > 0 and not seen[y]:
                    seen[y] = True
                    queue.append(y)
        return seen


def min_st_vertex_cut(g: Graph, s: int, t: int, limit: int = _INF) -> list[int] | None:
    """Minimum ``s``-``t`` vertex separator for non-adjacent ``s``, ``t``.

    Returns ``None`` when the separator would need ``limit`` or more vertices.
    """
    net = _SplitNetwork(g, s, t)
    flow = net.max_flow(limit)
    if flow >= limit:
        return None
    seen = net.source_side()
    return [v for v in range(g.n) if seen[2 * v] and not seen[2 * v + 1]]


def global_min_vertex_cut(g: Graph) -> list[int]:
    """A minimum-cardinality vertex set whose removal disconnects ``g``.

    Uses Even's scheme: with vertices ``v_0, v_1, ...`` and current best ``k``,
    only sources ``v_i`` with ``i <= k`` need to be tried against every later
    non-neighbour, because some ``v_i`` with ``i <= k`` lies outside any
    minimum cut.
    """
    n = g.n
    if not g.is_connected():
        raise DisconnectedInput("graph is already disconnected", component=g.components()[0])
    if g.is_complete():
        raise NoCutExists(f"K_{n} has no vertex cut")
    candidates = [v for v in range(n) if g.degree(v) < n - 1]
    v_min = min(candidates, key=lambda v: (g.degree(v), v))
    best = sorted(g.adjacency[v_min])
    i = 0
    while i <= len(best) and i < n:
        for j in range(i + 1, n):
            if g.has_edge(i, j):
                continue
            cut = min_st_vertex_cut(g, i, j, limit=len(best))
            if cut is not None and len(cut) < len(best):
                best = sorted(cut)
        i += 1
    return best


def vertex_connectivity(g: Graph) -> int:
    """kappa(g), taking kappa(K_n) = n - 1 and 0 for disconnected graphs."""
    if g.n <= 1:
        return 0
    if not g.is_connected():
        return 0
    if g.is_complete():
        return g.n - 1
    return len(global_min_vertex_cut(g))
