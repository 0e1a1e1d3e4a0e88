"""Undirected simple graphs and rooted spanning trees over dense integer ids."""

from __future__ import annotations

import io
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .errors import DisconnectedInput, InvalidArgument

Edge = tuple[int, int]


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """An undirected simple graph on vertices ``0..n-1``.

    ``edges`` is kept sorted lexicographically with ``u < v`` in every pair;
    ``adjacency[v]`` is the sorted neighbour list of ``v``.
    """

    n: int
    edges: tuple[Edge, ...]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        if n < 0:
            raise InvalidArgument(f"vertex count must be non-negative, got {n}")
        seen: set[Edge] = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise InvalidArgument(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidArgument(f"edge ({u}, {v}) out of range for n={n}")
            pair = norm_edge(u, v)
            if pair in seen:
                raise InvalidArgument(f"parallel edge {pair}")
            seen.add(pair)
        ordered = tuple(sorted(seen))
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in ordered:
            adj[u].append(v)
            adj[v].append(u)
        return cls(n, ordered, tuple(tuple(sorted(a)) for a in adj))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, ((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, ((i, i + 1) for i in range(n - 1)))

    @classmethod
    def star(cls, leaves: int) -> "Graph":
        return cls.from_edges(leaves + 1, ((0, i) for i in range(1, leaves + 1)))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adj_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adjacency)

    @cached_property
    def adj_masks(self) -> tuple[int, ...]:
        """Neighbourhoods as Python-int bitmasks."""
        out = []
        for a in self.adjacency:
            mask = 0
            for v in a:
                mask |= 1 << v
            out.append(mask)
        return tuple(out)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj_sets[u]

    def is_complete(self) -> bool:
        return self.m == self.n * (self.n - 1) // 2

    def components(self, allowed: Iterable[int] | None = None) -> list[list[int]]:
        """Connected components of the subgraph induced by ``allowed``.

        Components are returned with sorted members, ordered by smallest member.
        """
        verts = range(self.n) if allowed is None else allowed
        alive = set(verts)
        comps = []
        for s in sorted(alive):
            if s not in alive:
                continue
            alive.discard(s)
            comp = [s]
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for y in self.adjacency[x]:
                    if y in alive:
                        alive.discard(y)
                        comp.append(y)
                        queue.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self, allowed: Iterable[int] | None = None) -> bool:
        verts = list(range(self.n)) if allowed is None else list(allowed)
        if len(verts) <= 1:
            return True
        return len(self.components(verts)) == 1

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph relabelled to ``0..k-1``.

        Returns the subgraph and the list mapping new ids back to old ids
        (sorted ascending, so relative id order is preserved).
        """
        old = sorted(set(vertices))
        index = {v: i for i, v in enumerate(old)}
        sub_edges = [
            (index[u], index[v])
            for u in old
            for v in self.adjacency[u]
            if u < v and v in index
        ]
        return Graph.from_edges(len(old), sub_edges), old

    def edges_within(self, vertices: Iterable[int]) -> int:
        vs = set(vertices)
        return sum(1 for u in vs for v in self.adjacency[u] if u < v and v in vs)

    def cut_size(self, side: Iterable[int]) -> int:
        """Number of edges with exactly one endpoint in ``side``."""
        s = set(side)
        return sum(1 for u in s for v in self.adjacency[u] if v not in s)


@dataclass(frozen=True)
class RootedTree:
    """A spanning tree stored as parent pointers (``parent[root] == -1``)."""

    root: int
    parent: tuple[int, ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], root: int = 0) -> "RootedTree":
        edge_list = [norm_edge(int(u), int(v)) for u, v in edges]
        if n == 0:
            raise InvalidArgument("a spanning tree needs at least one vertex")
        if len(edge_list) != n - 1:
            raise InvalidArgument(f"a spanning tree on {n} vertices has {n - 1} edges, got {len(edge_list)}")
        if not 0 <= root < n:
            raise InvalidArgument(f"root {root} out of range")
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edge_list:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise InvalidArgument(f"bad tree edge ({u}, {v})")
            adj[u].append(v)
            adj[v].append(u)
        parent = [-2] * n
        parent[root] = -1
        stack = [root]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if parent[y] == -2:
                    parent[y] = x
                    stack.append(y)
        if -2 in parent:
            raise InvalidArgument("tree edges do not connect all vertices")
        return cls(root, tuple(parent))

    @property
    def n(self) -> int:
        return len(self.parent)

    @cached_property
    def tree_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(norm_edge(v, p) for v, p in enumerate(self.parent) if p >= 0))

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        ch: list[list[int]] = [[] for _ in range(self.n)]
        for v, p in enumerate(self.parent):
            if p >= 0:
                ch[p].append(v)
        return tuple(tuple(c) for c in ch)

    @cached_property
    def order(self) -> tuple[int, ...]:
        """Vertices in BFS order from the root (parents before children)."""
        out = [self.root]
        i = 0
        while i < len(out):
            out.extend(self.children[out[i]])
            i += 1
        return tuple(out)

    @cached_property
    def depth(self) -> tuple[int, ...]:
        d = [0] * self.n
        for v in self.order[1:]:
            d[v] = d[self.parent[v]] + 1
        return tuple(d)

    @cached_property
    def subtree_size(self) -> tuple[int, ...]:
        size = [1] * self.n
        for v in reversed(self.order):
            p = self.parent[v]
            if p >= 0:
                size[p] += size[v]
        return tuple(size)

    def neighbors(self, v: int) -> list[int]:
        out = list(self.children[v])
        if self.parent[v] >= 0:
            out.append(self.parent[v])
        return sorted(out)

    def subtree(self, v: int) -> list[int]:
        out = [v]
        i = 0
        while i < len(out):
            out.extend(self.children[out[i]])
            i += 1
        return out

    def child_side(self, e: Sequence[int]) -> int:
        """For tree edge ``e``, the endpoint farther from the root."""
        u, v = int(e[0]), int(e[1])
        if self.parent[v] == u:
            return v
        if self.parent[u] == v:
            return u
        raise InvalidArgument(f"({u}, {v}) is not a tree edge")

    def path(self, u: int, v: int) -> list[Edge]:
        """Tree edges on the unique ``u``-``v`` path."""
        du, dv = self.depth[u], self.depth[v]
        left, right = [], []
        while du > dv:
            left.append(norm_edge(u, self.parent[u]))
            u = self.parent[u]
            du -= 1
        while dv > du:
            right.append(norm_edge(v, self.parent[v]))
            v = self.parent[v]
            dv -= 1
        while u != v:
            left.append(norm_edge(u, self.parent[u]))
            right.append(norm_edge(v, self.parent[v]))
            u, v = self.parent[u], self.parent[v]
        return left + right[::-1]


def check_spanning(g: Graph, t: RootedTree) -> None:
    """Raise :class:`InvalidArgument` unless ``t`` is a spanning tree of ``g``."""
    if t.n != g.n:
        raise InvalidArgument(f"tree has {t.n} vertices, graph has {g.n}")
    for u, v in t.tree_edges:
        if not g.has_edge(u, v):
            raise InvalidArgument(f"tree edge ({u}, {v}) is not a graph edge")


def bfs_tree(g: Graph, root: int | None = None) -> RootedTree:
    """Breadth-first spanning tree, neighbours visited in increasing id order."""
    if g.n == 0:
        raise InvalidArgument("empty graph has no spanning tree")
    root = 0 if root is None else root
    parent = [-2] * g.n
    parent[root] = -1
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in g.adjacency[x]:
            if parent[y] == -2:
                parent[y] = x
                queue.append(y)
    if -2 in parent:
        comp = [v for v in range(g.n) if parent[v] != -2]
        raise DisconnectedInput("graph is disconnected", component=comp)
    return RootedTree(root, tuple(parent))


# --- text formats -----------------------------------------------------------


def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def _data_lines(text: str) -> list[list[str]]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line.split())
    return out


def parse_graph(text: str) -> Graph:
    """Parse the ``n m`` header plus ``m`` edge lines; any ``b`` trailer is ignored."""
    rows = [r for r in _data_lines(text) if r[0] != "b"]
    if not rows or len(rows[0]) != 2:
        raise InvalidArgument("graph header must be 'n m'")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
        edges = [(int(r[0]), int(r[1])) for r in rows[1:]]
    except (ValueError, IndexError) as exc:
        raise InvalidArgument(f"malformed graph text: {exc}") from None
    if len(edges) != m:
        raise InvalidArgument(f"header promises {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


def write_graph(g: Graph, path: str | Path | TextIO) -> None:
    _write(format_graph(g), path)


def read_graph(path: str | Path) -> Graph:
    return parse_graph(Path(path).read_text())


def format_tree(t: RootedTree) -> str:
    """A tree is written as a graph on its own edges."""
    lines = [f"{t.n} {t.n - 1}"]
    lines.extend(f"{u} {v}" for u, v in t.tree_edges)
    return "\n".join(lines) + "\n"


def parse_tree(text: str, root: int = 0) -> RootedTree:
    tg = parse_graph(text)
    return RootedTree.from_edges(tg.n, tg.edges, root=root)


def read_tree(path: str | Path, root: int = 0) -> RootedTree:
    return parse_tree(Path(path).read_text(), root=root)


def write_tree(t: RootedTree, path: str | Path | TextIO) -> None:
    _write(format_tree(t), path)


def _write(text: str, path: str | Path | TextIO) -> None:
    if isinstance(path, io.TextIOBase) or hasattr(path, "write"):
        path.write(text)  # type: ignore[union-attr]
    else:
        Path(path).write_text(text)
