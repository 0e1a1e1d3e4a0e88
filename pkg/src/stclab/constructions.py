"""Random graph generators, the three-block lower-bound graph, and congestion certificates."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .congestion import centroid, congestion, cut_array
from .errors import GenerationFailure, InternalError, InvalidArgument
from .graph import Graph, RootedTree, check_spanning, format_graph, parse_graph

EXHAUSTIVE_EXPANSION_MAX_N = 20
DEFAULT_EXPANSION_SAMPLES = 10**5
DEFAULT_RETRIES = 50


def _sample_gnp(n: int, p: float, rng: np.random.Generator) -> Graph:
    if n <= 1:
        return Graph.from_edges(max(n, 0), [])
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return Graph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def gen_gnp(n: int, p: float, seed: int) -> Graph:
    """Erdős–Rényi ``G(n, p)``, reproducible for a fixed seed."""
    if n < 0:
        raise InvalidArgument("n must be non-negative")
    if not 0 <= p <= 1:
        raise InvalidArgument(f"p must lie in [0, 1], got {p}")
    return _sample_gnp(n, p, np.random.default_rng(seed))


# --- H(n, m): sampled graphs with certified edge expansion --------------------


@dataclass
class HnmReport:
    n: int
    m: int
    p: float
    attempts: int
    edges: int
    verification: str  # exhaustive | spectral | sampled
    lambda2: float | None = None
    samples: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.verification in ("exhaustive", "spectral")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "p": self.p,
            "attempts": self.attempts,
            "edges": self.edges,
            "verification": self.verification,
            "lambda2": self.lambda2,
            "samples": self.samples,
            "warnings": self.warnings,
        }


def _adjacency_matrix(g: Graph, dtype=np.float32) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=dtype)
    if g.m:
        e = np.array(g.edges)
        a[e[:, 0], e[:, 1]] = 1
        a[e[:, 1], e[:, 0]] = 1
    return a


def _expansion_exhaustive(g: Graph, rate: float) -> bool:
    n = g.n
    cut = cut_array(g).astype(np.float64)
    sizes = np.bitwise_count(np.arange(1 << n, dtype=np.uint32)).astype(np.float64)
    small = (sizes >= 1) & (sizes <= n / 2)
    return bool(np.all(cut[small] >= rate * sizes[small]))


def _algebraic_connectivity(g: Graph) -> float:
    a = _adjacency_matrix(g, np.float64)
    lap = np.diag(a.sum(axis=1)) - a
    return float(np.linalg.eigvalsh(lap)[1])


def _expansion_sampled(g: Graph, rate: float, samples: int, rng: np.random.Generator) -> bool:
    n = g.n
    a = _adjacency_matrix(g)
    deg = a.sum(axis=1)
    batch = 4096
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        sizes = rng.integers(1, n // 2 + 1, size=b)
        keys = rng.random((b, n))
        ranks = np.argsort(np.argsort(keys, axis=1), axis=1)
        x = (ranks < sizes[:, None]).astype(np.float32)
        inner = np.einsum("ij,ij->i", x @ a, x)
        cut = x @ deg - inner
        if np.any(cut < rate * sizes - 1e-3):
            return False
        done += b
    return True


def gen_hnm(
    n: int,
    m: int,
    seed: int,
    retries: int = DEFAULT_RETRIES,
    samples: int = DEFAULT_EXPANSION_SAMPLES,
) -> tuple[Graph, HnmReport]:
    """Sample ``G(n, 2m/n^2)`` until it is connected, has ``m/2..2m`` edges and
    satisfies ``cut(S) >= (m/2n)|S|`` for every ``|S| <= n/2``.

    Expansion is checked exhaustively for ``n <= 20``; otherwise a spectral
    certificate (``cut(S) >= lambda2 |S| |V-S| / n``) is tried first and, if
    it is too weak, random subsets are sampled.
    """
    if n < 2 or m < 1:
        raise InvalidArgument("need n >= 2 and m >= 1")
    notes = []
    p = 2 * m / n**2
    if p > 1:
        notes.append(f"2m/n^2 = {p:.3f} > 1, clamped to 1")
        p = 1.0
    if m < 16 * n * math.log(n):
        notes.append(f"m = {m} is below 16 n ln n = {16 * n * math.log(n):.0f} (relaxed regime)")
    for note in notes:
        warnings.warn(note, stacklevel=2)
    rate = m / (2 * n)
    rng = np.random.default_rng(seed)
    failures: dict[str, int] = {}
    for attempt in range(1, retries + 1):
        g = _sample_gnp(n, p, rng)
        if not g.is_connected():
            failures["disconnected"] = failures.get("disconnected", 0) + 1
            continue
        if not m / 2 <= g.m <= 2 * m:
            failures["edge count"] = failures.get("edge count", 0) + 1
            continue
        report = HnmReport(n, m, p, attempt, g.m, "", warnings=notes)
        if n <= EXHAUSTIVE_EXPANSION_MAX_N:
            report.verification = "exhaustive"
            ok = _expansion_exhaustive(g, rate)
        else:
            lam = _algebraic_connectivity(g)
            report.lambda2 = lam
            # |V-S| >= n/2 for |S| <= n/2, so lambda2/2 >= rate certifies; keep a float margin
            if lam / 2 >= rate * (1 + 1e-9) + 1e-9:
                report.verification = "spectral"
                ok = True
            else:
                report.verification = "sampled"
                report.samples = samples
                ok = _expansion_sampled(g, rate, samples, rng)
        if ok:
            return g, report
        failures["expansion"] = failures.get("expansion", 0) + 1
    raise GenerationFailure(f"H({n}, {m}) not found in {retries} attempts: {failures}")


# --- the three-block lower-bound graph ----------------------------------------


def _ceil_sqrt_ratio(m: int, n: int) -> int:
    """Smallest integer ``r`` with ``r^2 >= m/n``."""
    r = math.isqrt(m // n)
    while r * r * n < m:
        r += 1
    return max(r, 1)


@dataclass(frozen=True)
class LbConstructionSpec:
    n: int
    m: int

    @property
    def overlap(self) -> int:
        return _ceil_sqrt_ratio(self.m, self.n)

    @property
    def total_vertices(self) -> int:
        return 3 * self.n - 2 * self.overlap

    def blocks(self) -> tuple[range, range, range]:
        n, ov = self.n, self.overlap
        return range(0, n), range(n - ov, 2 * n - ov), range(2 * n - 2 * ov, 3 * n - 2 * ov)

    def check(self) -> list[str]:
        n, m = self.n, self.m
        if self.overlap > n // 2:
            raise InvalidArgument(f"overlap {self.overlap} is too large for blocks of {n}")
        notes = []
        if m > n * n / 2:
            notes.append(f"m = {m} exceeds n^2/2 = {n * n / 2:.0f}")
        floor = max(16 * n * math.log(n), 100 * n)
        if m < floor:
            notes.append(f"m = {m} is below max(16 n ln n, 100 n) = {floor:.0f} (relaxed regime)")
        return notes


@dataclass(frozen=True)
class LabeledGraph:
    """Graph with a per-vertex block bitmask (bit 0: V1, bit 1: V2, bit 2: V3)."""

    graph: Graph
    labels: tuple[int, ...]
    n_block: int
    m: int

    def block(self, i: int) -> list[int]:
        return [v for v, mask in enumerate(self.labels) if mask >> i & 1]


def gen_lower_bound_graph(
    spec: LbConstructionSpec, seed: int
) -> tuple[LabeledGraph, list[HnmReport]]:
    """Three overlapping ``H(n, m)`` blocks plus the overlap-to-block edges."""
    for note in spec.check():
        warnings.warn(note, stacklevel=2)
    n, ov = spec.n, spec.overlap
    blocks = spec.blocks()
    total = spec.total_vertices
    seeds = np.random.SeedSequence(seed).generate_state(3)
    edges: set[tuple[int, int]] = set()
    reports = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for block, sub_seed in zip(blocks, seeds):
            h, rep = gen_hnm(n, spec.m, int(sub_seed))
            reports.append(rep)
            base = block.start
            edges.update((base + a, base + b) for a, b in h.edges)
    v1, v2, v3 = (set(b) for b in blocks)
    for hubs, reach in ((v1 & v2, v1 | v2), (v2 & v3, v2 | v3)):
        for a in hubs:
            for b in reach:
                if a != b:
                    edges.add((min(a, b), max(a, b)))
    g = Graph.from_edges(total, edges)
    labels = tuple(
        (1 if v in v1 else 0) | (2 if v in v2 else 0) | (4 if v in v3 else 0) for v in range(total)
    )
    if g.n != 3 * n - 2 * ov:
        raise InternalError(f"emitted {g.n} vertices, expected {3 * n - 2 * ov}")
    if not spec.m <= g.m <= 7 * spec.m:
        raise GenerationFailure(f"edge count {g.m} is outside [{spec.m}, {7 * spec.m}]")
    return LabeledGraph(g, labels, n, spec.m), reports


def format_labeled_graph(lg: LabeledGraph) -> str:
    head = f"# lowerbound n={lg.n_block} m={lg.m}\n"
    trailer = "".join(f"b {v} {mask}\n" for v, mask in enumerate(lg.labels))
    return head + format_graph(lg.graph) + trailer


def parse_labeled_graph(text: str) -> LabeledGraph:
    g = parse_graph(text)
    labels = [0] * g.n
    seen = False
    n_block = m = None
    for line in text.splitlines():
        parts = line.split()
        if parts[:2] == ["#", "lowerbound"]:
            fields = dict(p.split("=", 1) for p in parts[2:] if "=" in p)
            n_block, m = int(fields["n"]), int(fields["m"])
        elif parts and parts[0] == "b":
            if len(parts) != 3:
                raise InvalidArgument(f"malformed label line: {line!r}")
            v, mask = int(parts[1]), int(parts[2])
            if not 0 <= v < g.n or not 0 <= mask < 8:
                raise InvalidArgument(f"bad label line: {line!r}")
            labels[v] = mask
            seen = True
    if not seen:
        raise InvalidArgument("graph carries no block labels")
    if n_block is None:
        n_block = sum(1 for mask in labels if mask & 1)
    if m is None:
        raise InvalidArgument("labelled graph lacks its '# lowerbound n=.. m=..' header")
    return LabeledGraph(g, tuple(labels), n_block, m)


def read_labeled_graph(path: str | Path) -> LabeledGraph:
    return parse_labeled_graph(Path(path).read_text())


def write_labeled_graph(lg: LabeledGraph, path: str | Path) -> None:
    Path(path).write_text(format_labeled_graph(lg))


# --- spanning trees and certificates ------------------------------------------


def random_spanning_tree(g: Graph, seed: int, root: int = 0) -> RootedTree:
    """Minimum spanning tree under i.i.d. uniform edge weights."""
    rng = np.random.default_rng(seed)
    order = np.argsort(rng.random(g.m), kind="stable")
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    for idx in order.tolist():
        a, b = g.edges[idx]
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            chosen.append((a, b))
            if len(chosen) == g.n - 1:
                break
    if len(chosen) != g.n - 1:
        raise InvalidArgument("graph is disconnected")
    return RootedTree.from_edges(g.n, chosen, root=root)


def _centroid_components(t: RootedTree, u: int) -> list[list[int]]:
    """Components of ``t - u``, each as a sorted vertex list."""
    comps = [sorted(t.subtree(c)) for c in t.children[u]]
    if t.parent[u] >= 0:
        below = set(t.subtree(u))
        comps.append([v for v in range(t.n) if v not in below])
    return comps


@dataclass(frozen=True)
class CentroidCertificate:
    centroid: int
    piece: tuple[int, ...]
    cut_size: int
    crossing_tree_edges: int
    bound: int

    def to_json(self) -> dict:
        return {
            "centroid": self.centroid,
            "pieceSize": len(self.piece),
            "cutSize": self.cut_size,
            "crossingTreeEdges": self.crossing_tree_edges,
            "bound": self.bound,
        }


def centroid_lower_bound(g: Graph, t: RootedTree) -> CentroidCertificate:
    """Lower bound on the congestion of ``t`` from a piece around its centroid.

    The piece is a union of components of ``t - u`` holding at least a
    quarter of the vertices; only its edges to ``u`` cross the piece's
    boundary in the tree, so one of them carries at least
    ``cut(piece) / (number of components used)`` detours.
    """
    check_spanning(g, t)
    n = g.n
    u = centroid(t)
    comps = sorted(_centroid_components(t, u), key=lambda c: (-len(c), c[0]))
    if not comps:
        return CentroidCertificate(u, (), 0, 0, 0)
    if 4 * len(comps[0]) >= n:
        chosen = [comps[0]]
    else:
        chosen, size = [], 0
        for comp in comps:
            chosen.append(comp)
            size += len(comp)
            if 4 * size >= n:
                break
    piece = tuple(sorted(v for comp in chosen for v in comp))
    cut = g.cut_size(piece)
    crossing = len(chosen)
    return CentroidCertificate(u, piece, cut, crossing, -(-cut // crossing))


@dataclass
class CaseReport:
    case: int
    centroid: int
    swapped: bool
    b1: int
    threshold: float
    overlap_in_piece: int
    value: float
    edge_congestion: int
    tree_congestion: int
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "centroid": self.centroid,
            "swappedV1V3": self.swapped,
            "b1": self.b1,
            "threshold": self.threshold,
            "overlapInPiece": self.overlap_in_piece,
            "value": self.value,
            "edgeCongestion": self.edge_congestion,
            "treeCongestion": self.tree_congestion,
            **self.detail,
        }


def lb_case_analysis(lg: LabeledGraph, t: RootedTree) -> CaseReport:
    """Classify ``t`` into the three-case argument and evaluate that case's
    congestion lower bound on the actual vertex sets.

    Every counted edge has exactly one endpoint in the chosen component
    ``U_j``, so the value never exceeds the congestion of the tree edge
    joining ``U_j`` to the centroid.
    """
    g = lg.graph
    check_spanning(g, t)
    n, m = lg.n_block, lg.m
    u = centroid(t)
    v1, v2, v3 = (set(lg.block(i)) for i in range(3))
    swapped = u in v1
    if swapped:
        v1, v3 = v3, v1
    overlap_12 = v1 & v2
    overlap_any = overlap_12 | (v2 & v3)
    comps = _centroid_components(t, u)
    piece = max(comps, key=lambda c: (len(v1.intersection(c)), -c[0]))
    in_piece = set(piece)
    b1 = len(v1 & in_piece)
    threshold = n * math.sqrt(n / m)
    w_prime = overlap_12 & in_piece
    edge_cong = g.cut_size(piece)
    detail: dict = {}
    if b1 <= n - threshold:
        case = 1
        # certified expansion of the V1 block; the raw crossing count is reported alongside
        value = (m / (2 * n)) * min(b1, n - b1)
        inside = v1 & in_piece
        detail["v1CrossingEdges"] = sum(
            1 for a in inside for b in g.adjacency[a] if b in v1 and b not in in_piece
        )
        if b1 < threshold:
            detail["belowThreshold"] = True
    elif len(w_prime) <= 0.5 * math.sqrt(m / n):
        case = 2
        w = overlap_12 - in_piece
        # each vertex of W is joined to every vertex of V1 inside the piece
        value = len(w) * b1
        detail["W"] = len(w)
    else:
        case = 3
        z = (v2 - v1) & in_piece
        side = v2 & in_piece
        rest = v2 - in_piece
        value = sum(1 for a in side for b in rest if a in overlap_any or b in overlap_any)
        detail.update({"Wprime": len(w_prime), "Z": len(z), "F2": "F1 and F3 edges inside V2"})
    tree_cong = congestion(g, t).max
    if edge_cong < value or tree_cong < value:
        raise InternalError(f"case {case} value {value} exceeds the congestion {edge_cong}")
    return CaseReport(
        case, u, swapped, b1, threshold, len(w_prime), value, edge_cong, tree_cong, detail
    )
