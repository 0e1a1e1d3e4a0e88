"""Maximum bipartite matching (Hopcroft-Karp) and Hall-deficiency witnesses."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

from .errors import InvalidArgument

_INF = float("inf")


@dataclass(frozen=True)
class Matching:
    pairs: dict  # left vertex -> right vertex

    @property
    def size(self) -> int:
        return len(self.pairs)

    def edges(self) -> list[tuple]:
        return sorted(self.pairs.items())


def _adjacency(
    left: list, right: set, edges: Iterable[tuple[Hashable, Hashable]] | Mapping
) -> dict:
    adj: dict = {u: [] for u in left}
    items = (
        ((u, v) for u, vs in edges.items() for v in vs) if isinstance(edges, Mapping) else edges
    )
    for u, v in items:
        if u not in adj or v not in right:
            raise InvalidArgument(f"edge ({u}, {v}) does not join left to right")
        adj[u].append(v)
    for u in adj:
        adj[u] = sorted(set(adj[u]))
    return adj


def max_bipartite_matching(
    left: Iterable[Hashable],
    right: Iterable[Hashable],
    edges: Iterable[tuple[Hashable, Hashable]] | Mapping,
) -> Matching:
    """Maximum-cardinality matching between ``left`` and ``right``.

    ``edges`` is either ``(l, r)`` pairs or a mapping from each left vertex
    to its right neighbours.  Deterministic for a fixed input.
    """
    left = sorted(set(left))
    right_set = set(right)
    if right_set & set(left):
        raise InvalidArgument("left and right sides must be disjoint")
    adj = _adjacency(left, right_set, edges)
    match_l: dict = {u: None for u in left}
    match_r: dict = {v: None for v in right_set}
    dist: dict = {}

    def bfs() -> bool:
        queue = deque()
        for u in left:
            if match_l[u] is None:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = _INF
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w is None:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(root) -> bool:
        # iterative layered DFS to stay clear of the recursion limit
        stack = [(root, iter(adj[root]))]
        path = []
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                w = match_r[v]
                if w is None:
                    path.append((u, v))
                    for a, b in path:
                        match_l[a] = b
                        match_r[b] = a
                    return True
                if dist[w] == dist[u] + 1:
                    path.append((u, v))
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                dist[u] = _INF
                stack.pop()
                if path:
                    path.pop()
        return False

    while bfs():
        for u in left:
            if match_l[u] is None:
                dfs(u)
    return Matching({u: v for u, v in match_l.items() if v is not None})


def hall_deficiency_witness(
    left: Iterable[Hashable],
    right: Iterable[Hashable],
    edges: Iterable[tuple[Hashable, Hashable]] | Mapping,
    matching: Matching | None = None,
) -> tuple[list, int]:
    """A left subset ``W`` maximising ``|W| - |N(W)|`` and that deficiency.

    The maximum deficiency equals ``|L| - size of a maximum matching``; ``W``
    is the set of left vertices reachable from unmatched left vertices along
    alternating paths.
    """
    left = sorted(set(left))
    right_set = set(right)
    adj = _adjacency(left, right_set, edges)
    if matching is None:
        matching = max_bipartite_matching(left, right_set, adj)
    match_r = {v: u for u, v in matching.pairs.items()}
    seen = {u for u in left if u not in matching.pairs}
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            w = match_r.get(v)
            if w is not None and w not in seen:
                seen.add(w)
                queue.append(w)
    return sorted(seen), len(left) - matching.size
