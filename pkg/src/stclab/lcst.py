"""Low-congestion spanning trees by recursive vertex-cut splitting.

On a well-connected host the tree is assembled from a connected min-max
partition (degree weights) joined by a star around a hub terminal; on a
poorly connected host the graph is split along a minimum vertex cut and
the two halves are solved recursively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .congestion import congestion
from .connectivity import global_min_vertex_cut
from .errors import DisconnectedInput, InternalError, InvalidArgument, NoCutExists
from .graph import Edge, Graph, RootedTree, bfs_tree, norm_edge
from .partition import FULL_K, HALF_K, Partition, PartitionResult, PartitionSpec, gl_partition

DEFAULT_BASE_FACTOR = 8.0


def _terminals(g: Graph, ell: int) -> list[int]:
    """A max-degree hub (smallest id on ties) followed by its ell-1 smallest neighbours."""
    hub = min(range(g.n), key=lambda v: (-g.degree(v), v))
    nbrs = sorted(g.adjacency[hub])
    if len(nbrs) < ell - 1:
        raise InvalidArgument(f"hub {hub} has only {len(nbrs)} neighbours, {ell - 1} needed")
    return [hub, *nbrs[: ell - 1]]


def balanced_targets(total: int, ell: int, floors: Sequence[int]) -> list[int]:
    """Near-equal targets summing to ``total`` with ``targets[j] >= floors[j]``.

    Any shortfall is taken from the currently largest target that still has
    slack above its own floor.
    """
    base, extra = divmod(total, ell)
    targets = [base + (1 if j < extra else 0) for j in range(ell)]
    for j in range(ell):
        while targets[j] < floors[j]:
            donors = [i for i in range(ell) if i != j and targets[i] > floors[i]]
            if not donors:
                raise InvalidArgument("terminal weights exceed the total weight")
            i = max(donors, key=lambda i: (targets[i], -i))
            moved = min(floors[j] - targets[j], targets[i] - floors[i])
            targets[i] -= moved
            targets[j] += moved
    return targets


def _weighted_partition(
    g: Graph,
    ell: int,
    weights: list[int],
    variant: str,
    connectivity: int | None,
    check: bool,
    known_connectivity: bool = False,
) -> PartitionResult:
    if ell < 1:
        raise InvalidArgument("ell must be positive")
    terminals = _terminals(g, ell)
    targets = balanced_targets(sum(weights), ell, [weights[t] for t in terminals])
    spec = PartitionSpec.build(terminals, targets, weights)
    return gl_partition(
        g, spec, variant=variant, connectivity=connectivity, check=check, known_connectivity=known_connectivity
    )


def min_max_partition(
    g: Graph,
    ell: int,
    variant: str = FULL_K,
    connectivity: int | None = None,
    check: bool = True,
    known_connectivity: bool = False,
) -> PartitionResult:
    """Connected ell-partition whose parts each have degree-sum at most ``4m/ell``."""
    return _weighted_partition(g, ell, list(g.degrees), variant, connectivity, check, known_connectivity)


def balanced_min_max_partition(
    g: Graph,
    ell: int,
    c: Fraction | int | str,
    variant: str = FULL_K,
    connectivity: int | None = None,
    check: bool = True,
) -> PartitionResult:
    """Like :func:`min_max_partition`, with a per-vertex surcharge ``c*m/n``.

    Weights are scaled by ``n * denominator(c)`` so the surcharge stays an
    exact integer.  Parts then have degree-sum at most ``(2c+4)m/ell`` and
    at most ``((2c+4)/c) * n/ell`` vertices.
    """
    c = Fraction(c)
    if c <= 0:
        raise InvalidArgument("c must be positive")
    m, n = g.m, g.n
    weights = [c.numerator * m + c.denominator * n * d for d in g.degrees]
    return _weighted_partition(g, ell, weights, variant, connectivity, check)


def degree_sums(g: Graph, partition: Partition) -> list[int]:
    return [sum(g.degree(v) for v in part) for part in partition.parts]


def star_assemble(g: Graph, partition: Partition, hub: int, spokes: Sequence[int]) -> RootedTree:
    """BFS trees inside each part, joined by hub-spoke edges; rooted at the hub.

    ``hub`` must lie in the first part and ``spokes[j-1]`` in part ``j``.
    """
    parts = partition.parts
    if len(spokes) != len(parts) - 1:
        raise InvalidArgument(f"{len(parts)} parts need {len(parts) - 1} spokes")
    if hub not in parts[0]:
        raise InvalidArgument(f"hub {hub} is not in the first part")
    edges: list[Edge] = []
    for j, part in enumerate(parts):
        root = hub if j == 0 else spokes[j - 1]
        if root not in part:
            raise InvalidArgument(f"spoke {root} is not in part {j}")
        if j > 0:
            if not g.has_edge(hub, root):
                raise InvalidArgument(f"spoke {root} is not adjacent to hub {hub}")
            edges.append(norm_edge(hub, root))
        sub, old = g.induced(part)
        local = bfs_tree(sub, old.index(root))
        edges.extend(norm_edge(old[a], old[b]) for a, b in local.tree_edges)
    return RootedTree.from_edges(g.n, edges, root=hub)


@dataclass
class RecursionNode:
    n_h: int
    m_h: int
    k: int
    branch: str
    congestion_bound: float
    congestion: int = 0
    iterations: int | None = None
    max_rank: int | None = None
    cut: list[int] | None = None
    children: list["RecursionNode"] = field(default_factory=list)

    def to_json(self) -> dict:
        out: dict = {
            "nH": self.n_h,
            "mH": self.m_h,
            "k": self.k,
            "branch": self.branch,
            "congestionBound": self.congestion_bound,
            "congestion": self.congestion,
        }
        if self.iterations is not None:
            out["iterations"] = self.iterations
            out["maxRank"] = self.max_rank
        if self.cut is not None:
            out["cutSize"] = len(self.cut)
        if self.children:
            out["children"] = [child.to_json() for child in self.children]
        return out

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass
class LcstResult:
    tree: RootedTree
    trace: RecursionNode
    bound: float


def lcst_bound(n: int, m: int) -> float:
    return 8 * math.sqrt(m * n)


def find_lcst(
    g: Graph,
    base_factor: float = DEFAULT_BASE_FACTOR,
    check: bool = True,
) -> LcstResult:
    """Spanning tree with congestion at most ``8 * sqrt(m * n)``.

    A host ``H`` is a base case when ``m_H <= base_factor * sqrt(m * n_H)``
    (with ``m`` the top-level edge count).  The default factor 8 makes every
    graph with ``n <= 128`` a base case; smaller factors, down to 0, force the
    splitting and partition branches while keeping the same final bound.
    """
    if g.n == 0:
        raise InvalidArgument("empty graph")
    if not 0 <= base_factor <= DEFAULT_BASE_FACTOR:
        raise InvalidArgument(f"base_factor must lie in [0, {DEFAULT_BASE_FACTOR}]")
    if not g.is_connected():
        raise DisconnectedInput("find_lcst needs a connected graph", component=g.components()[0])
    m_hat = g.m
    edges, trace = _find(g, list(range(g.n)), m_hat, base_factor, check)
    tree = RootedTree.from_edges(g.n, edges, root=0)
    bound = lcst_bound(g.n, m_hat)
    return LcstResult(tree, trace, bound)


def _find(
    h: Graph, ids: list[int], m_hat: int, base_factor: float, check: bool
) -> tuple[list[Edge], RecursionNode]:
    n_h, m_h = h.n, h.m
    k = max(1, math.ceil(math.sqrt(m_hat / n_h)))
    bound = lcst_bound(n_h, m_hat)

    def finish(local: list[Edge], node: RecursionNode) -> tuple[list[Edge], RecursionNode]:
        node.congestion = congestion(h, RootedTree.from_edges(n_h, local)).max if n_h > 1 else 0
        if check and node.congestion > bound:
            raise InternalError(f"subtree congestion {node.congestion} exceeds {bound:.2f}")
        return [norm_edge(ids[a], ids[b]) for a, b in local], node

    if m_h <= base_factor * math.sqrt(m_hat * n_h):
        return finish(list(bfs_tree(h).tree_edges), RecursionNode(n_h, m_h, k, "base", bound))

    try:
        cut = global_min_vertex_cut(h)
    except NoCutExists:
        cut = None
    if cut is not None and len(cut) < k:
        in_cut = set(cut)
        rest = [v for v in range(n_h) if v not in in_cut]
        comps = h.components(rest)
        small = min(comps, key=lambda c: (len(c), c[0]))
        x_set = set(small)
        other = [v for v in range(n_h) if v not in x_set]
        h_x, ids_x = h.induced(small)
        h_yz, ids_yz = h.induced(other)
        if not h_yz.is_connected():
            raise InternalError("host minus the smallest side is disconnected")
        edges_x, node_x = _find(h_x, ids_x, m_hat, base_factor, check)
        edges_yz, node_yz = _find(h_yz, ids_yz, m_hat, base_factor, check)
        join = min(norm_edge(x, y) for x in small for y in h.adjacency[x] if y in in_cut)
        edges_local = edges_x + edges_yz + [join]
        node = RecursionNode(n_h, m_h, k, "split", bound, cut=list(cut), children=[node_x, node_yz])
        return finish(edges_local, node)

    kappa = n_h - 1 if cut is None else len(cut)
    if kappa < k:
        # complete host too small for the requested connectivity
        return finish(list(bfs_tree(h).tree_edges), RecursionNode(n_h, m_h, k, "complete", bound))
    ell = k // 2 + 1
    # the failed cut search above already certifies k-connectivity
    result = min_max_partition(h, ell, variant=HALF_K, connectivity=k, check=check, known_connectivity=True)
    terminals = result.spec.terminals
    tree = star_assemble(h, result.partition, terminals[0], terminals[1:])
    node = RecursionNode(
        n_h, m_h, k, "partition", bound, iterations=result.iterations, max_rank=result.max_rank
    )
    if check:
        d = max(degree_sums(h, result.partition))
        if congestion(h, tree).max > d:
            raise InternalError("star assembly exceeded the largest part degree-sum")
    return finish(list(tree.tree_edges), node)
