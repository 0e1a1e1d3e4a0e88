"""Random instance generators and brute-force oracles shared by the tests."""

from __future__ import annotations

import itertools
import random

from hypothesis import strategies as st

from stclab.connectivity import vertex_connectivity
from stclab.graph import Graph


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    return Graph.from_edges(n, [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p])


def random_connected_graph(rng: random.Random, n: int, p: float | None = None) -> Graph:
    """Random tree plus independent extra edges, so always connected."""
    p = rng.uniform(0.1, 0.9) if p is None else p
    order = list(range(n))
    rng.shuffle(order)
    edges = {tuple(sorted((order[i], order[rng.randrange(i)]))) for i in range(1, n)}
    edges |= {(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p}
    return Graph.from_edges(n, edges)


def random_k_connected(rng: random.Random, k: int, n_lo: int, n_hi: int) -> tuple[Graph, int]:
    """Rejection-sampled graph with vertex connectivity at least ``k``."""
    while True:
        n = rng.randint(n_lo, n_hi)
        g = random_graph(rng, n, rng.uniform(0.45, 0.95))
        kappa = vertex_connectivity(g)
        if kappa >= k:
            return g, kappa


def brute_vertex_connectivity(g: Graph) -> int:
    """Smallest vertex set whose removal disconnects ``g``; ``n - 1`` for complete graphs."""
    n = g.n
    for size in range(n - 1):
        for cut in itertools.combinations(range(n), size):
            rest = [v for v in range(n) if v not in cut]
            if len(rest) >= 2 and not g.is_connected(rest):
                return size
    return n - 1


def brute_cut(g: Graph, side) -> int:
    side = set(side)
    return sum(1 for u, v in g.edges if (u in side) != (v in side))


def brute_tree_congestion(g: Graph, tree_edges) -> dict:
    """Per-tree-edge congestion by deleting the edge and flooding one side."""
    out = {}
    for e in tree_edges:
        rest = [f for f in tree_edges if f != e]
        side = Graph.from_edges(g.n, rest).components([*range(g.n)])
        comp = next(c for c in side if e[0] in c)
        out[tuple(e)] = brute_cut(g, comp)
    return out


@st.composite
def connected_graphs(draw, min_n: int = 2, max_n: int = 9):
    n = draw(st.integers(min_n, max_n))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    edges = {(p, i) for i, p in enumerate(parents, start=1)}
    pairs = list(itertools.combinations(range(n), 2))
    if pairs:
        extra = draw(st.lists(st.sampled_from(pairs), max_size=len(pairs)))
        edges |= set(extra)
    return Graph.from_edges(n, edges)


def random_spec(rng: random.Random, g: Graph, k: int, max_weight: int = 10):
    """Distinct random terminals, weights in ``1..max_weight`` and random valid targets."""
    from stclab.partition import PartitionSpec

    weights = [rng.randint(1, max_weight) for _ in range(g.n)]
    terminals = rng.sample(range(g.n), k)
    targets = [weights[t] for t in terminals]
    for _ in range(sum(weights) - sum(targets)):
        targets[rng.randrange(k)] += 1
    return PartitionSpec.build(terminals, targets, weights)
