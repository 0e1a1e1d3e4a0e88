"""Spanning-tree congestion: two independent evaluators, centroid, exact oracle."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DisconnectedInput, InvalidArgument, ResourceLimit
from .graph import Edge, Graph, RootedTree, bfs_tree, check_spanning, norm_edge

DEFAULT_EXACT_CAP = 10


@dataclass(frozen=True)
class CongestionReport:
    per_edge: dict[Edge, int]
    max: int
    total: int

    @classmethod
    def from_counts(cls, per_edge: dict[Edge, int]) -> "CongestionReport":
        ordered = dict(sorted(per_edge.items()))
        return cls(ordered, max(ordered.values(), default=0), sum(ordered.values()))

    def to_json(self) -> dict:
        return {
            "max": self.max,
            "total": self.total,
            "perEdge": [[u, v, c] for (u, v), c in self.per_edge.items()],
        }


def edge_congestion_cut(g: Graph, t: RootedTree, e: Sequence[int]) -> int:
    """Edges of ``g`` leaving the component of ``t - e`` that avoids the root."""
    check_spanning(g, t)
    child = t.child_side(e)
    return g.cut_size(t.subtree(child))


def _lca(t: RootedTree, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = t.n
    parent = np.array(t.parent, dtype=np.int64)
    parent[t.root] = t.root
    depth = np.array(t.depth, dtype=np.int64)
    levels = max(1, int(depth.max()).bit_length())
    up = [parent]
    for _ in range(1, levels):
        up.append(up[-1][up[-1]])
    swap = depth[a] < depth[b]
    a, b = np.where(swap, b, a), np.where(swap, a, b)
    diff = depth[a] - depth[b]
    for k in range(levels):
        step = ((diff >> k) & 1).astype(bool)
        a = np.where(step, up[k][a], a)
    for k in range(levels - 1, -1, -1):
        ua, ub = up[k][a], up[k][b]
        move = ua != ub
        a = np.where(move, ua, a)
        b = np.where(move, ub, b)
    del n
    return np.where(a == b, a, up[0][a])


def congestion(g: Graph, t: RootedTree) -> CongestionReport:
    """Edge-congestion of every tree edge via the cut characterisation.

    Each graph edge ``ab`` adds +1 at ``a`` and ``b`` and -2 at their tree LCA;
    the subtree sum below a child ``c`` then equals the number of edges with
    exactly one endpoint in that subtree, i.e. the cut of ``t - (c, parent(c))``.
    """
    check_spanning(g, t)
    n = g.n
    if n <= 1:
        return CongestionReport({}, 0, 0)
    weight = np.zeros(n, dtype=np.int64)
    if g.m:
        ends = np.array(g.edges, dtype=np.int64)
        lca = _lca(t, ends[:, 0], ends[:, 1])
        weight += np.bincount(ends[:, 0], minlength=n)
        weight += np.bincount(ends[:, 1], minlength=n)
        weight -= 2 * np.bincount(lca, minlength=n)
    acc = weight.tolist()
    for v in reversed(t.order):
        p = t.parent[v]
        if p >= 0:
            acc[p] += acc[v]
    per_edge = {norm_edge(v, p): acc[v] for v, p in enumerate(t.parent) if p >= 0}
    return CongestionReport.from_counts(per_edge)


def congestion_via_detours(g: Graph, t: RootedTree) -> CongestionReport:
    """Edge-congestion by walking the tree detour of every graph edge."""
    check_spanning(g, t)
    counts = {e: 0 for e in t.tree_edges}
    for a, b in g.edges:
        for e in t.path(a, b):
            counts[e] += 1
    return CongestionReport.from_counts(counts)


def centroid(t: RootedTree) -> int:
    """Smallest-id vertex whose removal leaves components of size at most n/2."""
    n = t.n
    size = t.subtree_size
    for v in range(n):
        largest = n - size[v]
        for c in t.children[v]:
            largest = max(largest, size[c])
        if 2 * largest <= n:
            return v
    raise AssertionError("every tree has a centroid")


# --- exact oracle -----------------------------------------------------------


def cut_table(g: Graph) -> list[int]:
    """``cut[mask]`` for every vertex subset encoded as a bitmask (small n only)."""
    n = g.n
    deg = g.degrees
    adj = g.adj_masks
    table = [0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        b = low.bit_length() - 1
        rest = mask ^ low
        table[mask] = table[rest] + deg[b] - 2 * (adj[b] & rest).bit_count()
    return table


def cut_array(g: Graph) -> np.ndarray:
    """Vectorised :func:`cut_table`: ``cut[mask]`` for all ``2^n`` masks, built by doubling."""
    cut = np.zeros(1, dtype=np.int32)
    deg = g.degrees
    adj = g.adj_masks
    for b in range(g.n):
        low = np.arange(1 << b, dtype=np.uint32)
        shared = np.bitwise_count(low & np.uint32(adj[b] & ((1 << b) - 1))).astype(np.int32)
        cut = np.concatenate([cut, cut + deg[b] - 2 * shared])
    return cut


def iter_spanning_trees(g: Graph) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Yield every spanning tree once as ``(parent, insertion_order)`` rooted at 0.

    Frontier-growing enumeration: each frontier edge is first included, then
    excluded; the exclusion branch stops once the remaining edges no longer
    connect the graph.
    """
    n = g.n
    if n == 0:
        return
    adj = g.adjacency
    in_tree = [False] * n
    in_tree[0] = True
    parent = [-1] * n
    order = [0]
    excluded: set[Edge] = set()

    def still_connected() -> bool:
        seen = [False] * n
        seen[0] = True
        queue = deque([0])
        reached = 1
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if not seen[y] and norm_edge(x, y) not in excluded:
                    seen[y] = True
                    reached += 1
                    queue.append(y)
        return reached == n

    def grow(frontier: list[Edge]) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
        if len(order) == n:
            yield tuple(parent), tuple(order)
            return
        frontier = list(frontier)
        dropped: list[Edge] = []
        while frontier:
            u, v = frontier.pop()
            in_tree[v] = True
            parent[v] = u
            order.append(v)
            nxt = [e for e in frontier if e[1] != v]
            nxt.extend(
                (v, w) for w in adj[v] if not in_tree[w] and norm_edge(v, w) not in excluded
            )
            yield from grow(nxt)
            order.pop()
            parent[v] = -1
            in_tree[v] = False
            e = norm_edge(u, v)
            excluded.add(e)
            dropped.append(e)
            if not still_connected():
                break
        for e in dropped:
            excluded.discard(e)

    yield from grow([(0, w) for w in adj[0]])


def _check_exact_input(g: Graph, cap: int) -> None:
    if g.n > cap:
        raise ResourceLimit(f"exact_stc is capped at n <= {cap}, got n = {g.n}")
    if g.n == 0:
        raise InvalidArgument("empty graph")
    if not g.is_connected():
        raise DisconnectedInput("exact_stc needs a connected graph", component=g.components()[0])


def exact_stc_bruteforce(g: Graph, cap: int = 8) -> tuple[int, RootedTree]:
    """Minimum congestion by enumerating every spanning tree (tiny graphs only)."""
    _check_exact_input(g, cap)
    if g.n == 1:
        return 0, RootedTree(0, (-1,))
    cut = cut_table(g)
    best = None
    best_parent: tuple[int, ...] = ()
    n = g.n
    for parent, order in iter_spanning_trees(g):
        masks = [1 << v for v in range(n)]
        worst = 0
        for v in reversed(order[1:]):
            c = cut[masks[v]]
            if c > worst:
                worst = c
            masks[parent[v]] |= masks[v]
        if best is None or worst < best:
            best, best_parent = worst, parent
    assert best is not None
    return best, RootedTree(0, best_parent)


def _tree_within(g: Graph, cut: list[int], limit: int) -> tuple[int, ...] | None:
    """Parent array of a spanning tree with congestion <= ``limit``, or None.

    Subset DP.  ``split[r][U]`` records how ``U`` (not containing ``r``)
    splits into child subtrees hanging from ``r``; a set ``B`` can hang from
    ``r`` when ``cut(B) <= limit`` and some ``r'`` in ``B`` adjacent to ``r``
    roots a valid tree of ``G[B]``.
    """
    n = g.n
    full = (1 << n) - 1
    adj = g.adj_masks
    size = 1 << n
    split = [[-1] * size for _ in range(n)]
    for r in range(n):
        split[r][0] = 0
    hangs = [0] * size  # bitmask of parents that B may hang from
    by_count: list[list[int]] = [[] for _ in range(n + 1)]
    for mask in range(1, size):
        by_count[mask.bit_count()].append(mask)

    def rooted_ok(b: int, r2: int) -> bool:
        return split[r2][b ^ (1 << r2)] != -1

    for s in range(1, n):
        for b in by_count[s]:
            if cut[b] > limit:
                continue
            parents = 0
            rest = b
            while rest:
                low = rest & -rest
                rest ^= low
                if rooted_ok(b, low.bit_length() - 1):
                    parents |= adj[low.bit_length() - 1]
            hangs[b] = parents & ~b
        for u in by_count[s]:
            low = u & -u
            tail = u ^ low
            for r in range(n):
                if u >> r & 1:
                    continue
                row = split[r]
                sub = tail
                while True:
                    b = sub | low
                    if hangs[b] >> r & 1 and row[u ^ b] != -1:
                        row[u] = b
                        break
                    if sub == 0:
                        break
                    sub = (sub - 1) & tail
    if split[0][full ^ 1] == -1:
        return None
    parent = [-1] * n

    def build(block: int, r: int) -> None:
        u = block ^ (1 << r)
        while u:
            b = split[r][u]
            r2 = next(v for v in range(n) if b >> v & 1 and adj[v] >> r & 1 and rooted_ok(b, v))
            parent[r2] = r
            build(b, r2)
            u ^= b

    build(full, 0)
    return tuple(parent)


def exact_stc(g: Graph, cap: int = DEFAULT_EXACT_CAP) -> tuple[int, RootedTree]:
    """Minimum congestion over all spanning trees, with a witness tree.

    Binary search on the answer; each probe is an ``O(n 3^n)`` subset DP
    over rooted subtrees.  Intended as an oracle for graphs with at most
    ``cap`` vertices.
    """
    _check_exact_input(g, cap)
    if g.n == 1:
        return 0, RootedTree(0, (-1,))
    cut = cut_table(g)
    # every tree has a leaf, whose edge carries its whole degree
    lo = min(g.degrees)
    best = bfs_tree(g)
    hi = congestion(g, best).max
    while lo < hi:
        mid = (lo + hi) // 2
        parent = _tree_within(g, cut, mid)
        if parent is None:
            lo = mid + 1
        else:
            best = RootedTree(0, parent)
            hi = congestion(g, best).max
    return hi, best
