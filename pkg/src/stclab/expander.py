"""Spanning trees of expanding graphs by balanced branch growth plus matching rounds.

A graph is ``(n, s, d1, d2, d3, t)``-expanding when

1. every ``|S| = s`` has ``|N(S)| >= d1*n``;
2. every ``|S| <= s`` has ``|N(S)| >= d2*|S|``;
3. every ``|S| <= n/2`` and ``S' <= S`` has ``|N_{V-S}(S')| >= |S'| - t``;
4. every ``S`` has ``cut(S) <= d3*|S|``,

where ``N(S)`` is the neighbourhood of ``S`` outside ``S``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .congestion import congestion, cut_array
from .errors import DisconnectedInput, ExpandingPropertyViolation, InternalError, InvalidArgument
from .graph import Graph, RootedTree
from .matching import hall_deficiency_witness, max_bipartite_matching

EXHAUSTIVE_MAX_N = 24
ENUMERATION_CAP = 10**6
DEFAULT_SAMPLES = 10**4


def _frac(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


@dataclass(frozen=True)
class ExpandingParams:
    n: int
    s: int
    d1: Fraction
    d2: Fraction
    d3: Fraction
    t: Fraction

    @classmethod
    def build(cls, n: int, s: int, d1, d2, d3, t) -> "ExpandingParams":
        p = cls(int(n), int(s), _frac(d1), _frac(d2), _frac(d3), _frac(t))
        if not 0 < p.d1 <= 1:
            raise InvalidArgument("d1 must lie in (0, 1]")
        if p.s < 1 or p.n < 1:
            raise InvalidArgument("n and s must be positive")
        if p.d2 <= 0 or p.d3 <= 0 or p.t < 0:
            raise InvalidArgument("d2, d3 must be positive and t non-negative")
        return p

    @classmethod
    def from_random_graph(cls, n: int, p) -> "ExpandingParams":
        """Parameters a dense G(n, p) satisfies with high probability."""
        p = _frac(p)
        if not 0 < p <= 1:
            raise InvalidArgument("p must lie in (0, 1]")
        return cls.build(n, math.ceil(1 / p), Fraction(1, 25), n * p / 16, n * p, 12 / p)

    @property
    def delta(self) -> Fraction:
        return self.t / (self.d1 * self.n)

    @property
    def saturation(self) -> int:
        """Branch size ``A`` at which a branch counts as saturated."""
        return max(self.s + 1, math.ceil(3 * self.d1 * self.n / self.d2))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "s": self.s,
            "d1": str(self.d1),
            "d2": str(self.d2),
            "d3": str(self.d3),
            "t": str(self.t),
            "delta": float(self.delta),
            "A": self.saturation,
        }


def _log_base(base: float, x: float) -> float:
    return math.log(x) / math.log(base)


def branch_bound(p: ExpandingParams) -> float:
    """``d3 * (4A * (1/(2 d1))**log_{2-delta}(2) + t)``, evaluated literally.

    The logarithm base ``2 - delta`` must be positive and different from 1;
    otherwise the bound is reported as infinite.
    """
    base = 2 - float(p.delta)
    if base <= 0 or base == 1:
        return math.inf
    exponent = _log_base(base, 2)
    growth = (1 / (2 * float(p.d1))) ** exponent
    return float(p.d3) * (4 * p.saturation * growth + float(p.t))


def phase2_round_bound(p: ExpandingParams) -> int | None:
    """``ceil(log_{2-delta}(1/(2 d1))) + 2`` when ``delta < 1``, else None."""
    base = 2 - float(p.delta)
    if base <= 1:
        return None
    return math.ceil(_log_base(base, 1 / (2 * float(p.d1)))) + 2


# --- checking the conditions --------------------------------------------------


@dataclass
class ConditionResult:
    checked: int
    exhaustive: bool
    passed: bool = True
    witness: list[int] | None = None
    detail: str = ""

    def to_json(self) -> dict:
        out = {"checked": self.checked, "exhaustive": self.exhaustive, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
            out["detail"] = self.detail
        return out


@dataclass
class ExpandingReport:
    mode: str
    params: ExpandingParams
    conditions: dict[str, ConditionResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    @property
    def first_violation(self) -> tuple[str, ConditionResult] | None:
        for name, c in self.conditions.items():
            if not c.passed:
                return name, c
        return None

    def to_json(self) -> dict:
        out = {
            "mode": self.mode,
            "passed": self.passed,
            "params": self.params.to_json(),
            "conditions": {name: c.to_json() for name, c in self.conditions.items()},
        }
        bad = self.first_violation
        if bad is not None:
            out["firstViolation"] = {"condition": bad[0], "witness": bad[1].witness}
        return out


def _members(mask: int) -> list[int]:
    return [v for v in range(mask.bit_length()) if mask >> v & 1]


def _neighbourhood(adj: tuple[int, ...], mask: int) -> int:
    out = 0
    for v in _members(mask):
        out |= adj[v]
    return out & ~mask


def _random_mask(rng: random.Random, n: int, size: int) -> int:
    mask = 0
    for v in rng.sample(range(n), size):
        mask |= 1 << v
    return mask


def _subsets(n: int, sizes: Iterable[int]) -> Iterable[int]:
    for k in sizes:
        for combo in itertools.combinations(range(n), k):
            mask = 0
            for v in combo:
                mask |= 1 << v
            yield mask


def _count_subsets(n: int, sizes: Iterable[int]) -> int:
    return sum(math.comb(n, k) for k in sizes)


def _check_sets(
    masks: Iterable[int], ok, exhaustive: bool, describe
) -> ConditionResult:
    count = 0
    for mask in masks:
        count += 1
        if not ok(mask):
            return ConditionResult(count, exhaustive, False, _members(mask), describe(mask))
    return ConditionResult(count, exhaustive)


def check_expanding(
    g: Graph,
    params: ExpandingParams,
    mode: str = "exhaustive",
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    cap: int = ENUMERATION_CAP,
) -> ExpandingReport:
    """Check the four expanding conditions and report the first violation.

    ``mode="exhaustive"`` enumerates subsets wherever the enumeration fits
    under ``cap`` (and ``n <= 24`` for the cut condition), falling back to
    ``samples`` random subsets otherwise.  The Hall-type condition is always
    checked per sampled ``S`` against every ``S' <= S`` at once: by König's
    theorem the worst ``S'`` falls short by exactly ``|S|`` minus the
    maximum matching between ``S`` and ``V - S``.
    """
    if mode not in ("exhaustive", "sampled"):
        raise InvalidArgument(f"unknown mode {mode!r}")
    if params.n != g.n:
        raise InvalidArgument(f"params are for n = {params.n}, graph has n = {g.n}")
    n = g.n
    adj = g.adj_masks
    rng = random.Random(seed)
    exhaustive = mode == "exhaustive"
    report = ExpandingReport(mode, params)
    s = min(params.s, n)

    # (1) |N(S)| >= d1 n for |S| = s
    need1 = params.d1 * n
    full1 = exhaustive and math.comb(n, s) <= cap
    masks1 = _subsets(n, [s]) if full1 else (_random_mask(rng, n, s) for _ in range(samples))
    report.conditions["1"] = _check_sets(
        masks1,
        lambda m: _neighbourhood(adj, m).bit_count() >= need1,
        full1,
        lambda m: f"|N(S)| = {_neighbourhood(adj, m).bit_count()} < {float(need1):.3f}",
    )

    # (2) |N(S)| >= d2 |S| for |S| <= s
    sizes2 = range(1, s + 1)
    full2 = exhaustive and _count_subsets(n, sizes2) <= cap
    if full2:
        masks2: Iterable[int] = _subsets(n, sizes2)
    else:
        singles = [1 << v for v in range(n)]
        masks2 = itertools.chain(singles, (_random_mask(rng, n, rng.randint(1, s)) for _ in range(samples)))
    report.conditions["2"] = _check_sets(
        masks2,
        lambda m: _neighbourhood(adj, m).bit_count() >= params.d2 * m.bit_count(),
        full2,
        lambda m: f"|N(S)| = {_neighbourhood(adj, m).bit_count()} < d2*|S|",
    )

    # (3) matching between S and V-S of size >= |S| - t, for |S| <= n/2
    half = n // 2
    sizes3 = [k for k in range(1, half + 1) if k > params.t]
    if not sizes3:
        report.conditions["3"] = ConditionResult(0, True, detail="vacuous: t >= n/2")
    else:
        full3 = exhaustive and _count_subsets(n, sizes3) <= min(cap, samples)
        masks3 = _subsets(n, sizes3) if full3 else (_random_mask(rng, n, rng.choice(sizes3)) for _ in range(samples))
        report.conditions["3"] = _check_hall(g, masks3, params.t, full3)

    # (4) cut(S) <= d3 |S|
    num, den = params.d3.numerator, params.d3.denominator
    if exhaustive and n <= EXHAUSTIVE_MAX_N:
        cut = cut_array(g)
        sizes = np.bitwise_count(np.arange(1 << n, dtype=np.uint32)).astype(np.int64)
        bad = np.nonzero(cut.astype(np.int64) * den > sizes * num)[0]
        res = ConditionResult(1 << n, True)
        if bad.size:
            first = int(bad[np.argmin(sizes[bad])])
            res = ConditionResult(
                1 << n, True, False, _members(first), f"cut(S) = {int(cut[first])} > d3*|S|"
            )
        report.conditions["4"] = res
    else:
        singles = [1 << v for v in range(n)]
        drawn = (_random_mask(rng, n, rng.randint(1, n)) for _ in range(samples))
        report.conditions["4"] = _check_sets(
            itertools.chain(singles, drawn),
            lambda m: g.cut_size(_members(m)) * den <= num * m.bit_count(),
            False,
            lambda m: f"cut(S) = {g.cut_size(_members(m))} > d3*|S|",
        )
    return report


def _check_hall(g: Graph, masks: Iterable[int], t: Fraction, exhaustive: bool) -> ConditionResult:
    count = 0
    for mask in masks:
        count += 1
        inside = _members(mask)
        inside_set = set(inside)
        edges = {u: [v for v in g.adjacency[u] if v not in inside_set] for u in inside}
        outside = [v for v in range(g.n) if v not in inside_set]
        matching = max_bipartite_matching(inside, outside, edges)
        if matching.size < len(inside) - t:
            witness, deficiency = hall_deficiency_witness(inside, outside, edges, matching)
            return ConditionResult(
                count, exhaustive, False, witness,
                f"S = {inside}: subset falls {deficiency} short of its neighbourhood (t = {t})",
            )
    return ConditionResult(count, exhaustive)


# --- growing the tree ---------------------------------------------------------


@dataclass
class GrowTrace:
    phase1_rounds: int = 0
    transfers: int = 0
    phase2_rounds: int = 0
    branch_sizes_after_phase1: list[int] = field(default_factory=list)
    branch_sizes_final: list[int] = field(default_factory=list)
    congestion: int = 0
    branch_bound: float = math.inf
    phase2_round_bound: int | None = None

    def to_json(self) -> dict:
        bound = self.branch_bound
        return {
            "phase1Rounds": self.phase1_rounds,
            "transfers": self.transfers,
            "phase2Rounds": self.phase2_rounds,
            "branchSizesAfterPhase1": self.branch_sizes_after_phase1,
            "branchSizesFinal": self.branch_sizes_final,
            "congestion": self.congestion,
            "branchBound": bound if math.isfinite(bound) else "inf",
            "phase2RoundBound": self.phase2_round_bound,
        }


@dataclass
class GrowResult:
    tree: RootedTree
    trace: GrowTrace
    gate: ExpandingReport | None = None


class _Growth:
    """Tree rooted at ``v0`` whose branches hang off ``v0``'s neighbours."""

    def __init__(self, g: Graph, root: int):
        self.g = g
        self.root = root
        self.parent = [-2] * g.n  # -2: outside the tree
        self.parent[root] = -1
        self.children: list[set[int]] = [set() for _ in range(g.n)]
        self.branch = [-1] * g.n
        self.sizes: list[int] = []
        for i, v in enumerate(sorted(g.adjacency[root])):
            self.attach(v, root, i)

    def in_tree(self, v: int) -> bool:
        return self.parent[v] != -2

    @property
    def tree_size(self) -> int:
        return 1 + sum(self.sizes)

    def attach(self, b: int, a: int, branch: int | None = None) -> None:
        if branch is None:
            branch = self.branch[a]
        if branch == len(self.sizes):
            self.sizes.append(0)
        self.parent[b] = a
        self.children[a].add(b)
        self.branch[b] = branch
        self.sizes[branch] += 1

    def subtree(self, x: int) -> list[int]:
        out, stack = [], [x]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(self.children[v])
        return out

    def move(self, x: int, y: int) -> None:
        """Re-hang the subtree of ``x`` below ``y`` (in another branch)."""
        sub = self.subtree(x)
        src, dst = self.branch[x], self.branch[y]
        self.children[self.parent[x]].discard(x)
        self.parent[x] = y
        self.children[y].add(x)
        for v in sub:
            self.branch[v] = dst
        self.sizes[src] -= len(sub)
        self.sizes[dst] += len(sub)


def _max_degree_vertex(g: Graph) -> int:
    return min(range(g.n), key=lambda v: (-g.degree(v), v))


def grow_tree(g: Graph, params: ExpandingParams, gate: bool = False) -> GrowResult:
    """Spanning tree whose branches stay balanced, built in two phases.

    Phase 1 grows branches around a max-degree root until the tree holds
    ``d1*n`` vertices, never letting a branch exceed the saturation size
    ``A``.  Phase 2 repeatedly adds a maximum matching between tree and
    non-tree vertices.  With ``gate=True`` the expanding conditions are
    checked first and a failure raises ExpandingPropertyViolation.
    """
    n = g.n
    if params.n != n:
        raise InvalidArgument(f"params are for n = {params.n}, graph has n = {n}")
    if n == 0:
        raise InvalidArgument("empty graph")
    report = None
    if gate:
        report = check_expanding(g, params, "exhaustive" if n <= EXHAUSTIVE_MAX_N else "sampled")
        if not report.passed:
            name, res = report.first_violation
            raise ExpandingPropertyViolation(f"condition ({name}) fails: {res.detail}; witness {res.witness}")
    trace = GrowTrace(branch_bound=branch_bound(params), phase2_round_bound=phase2_round_bound(params))
    if n == 1:
        return GrowResult(RootedTree(0, (-1,)), trace, report)
    v0 = _max_degree_vertex(g)
    state = _Growth(g, v0)
    cap = params.saturation
    target = params.d1 * n
    adj = g.adjacency

    def unsaturated(i: int) -> bool:
        return state.sizes[i] < cap

    def attach_next(allowed) -> bool:
        for b in range(n):
            if state.in_tree(b):
                continue
            for a in adj[b]:
                if state.in_tree(a) and a != v0 and allowed(state.branch[a]):
                    state.attach(b, a)
                    return True
        return False

    while state.tree_size < target:
        trace.phase1_rounds += 1
        if attach_next(unsaturated):
            pass
        else:
            move = _best_transfer(state, cap)
            if move is None:
                raise ExpandingPropertyViolation(
                    f"phase 1 stuck at |V_T| = {state.tree_size} with branch sizes {state.sizes}"
                )
            _, x, j, y = move
            src = state.branch[x]
            state.move(x, y)
            trace.transfers += 1
            if not attach_next(lambda i: i in (src, j)):
                raise ExpandingPropertyViolation(
                    f"no outside vertex next to branches {src} and {j} after a transfer"
                )
        if max(state.sizes) > cap:
            raise InternalError(f"branch exceeded the saturation size {cap}")
    trace.branch_sizes_after_phase1 = list(state.sizes)

    while state.tree_size < n:
        inside = [v for v in range(n) if state.in_tree(v)]
        outside = [v for v in range(n) if not state.in_tree(v)]
        edges = {u: [v for v in adj[u] if not state.in_tree(v)] for u in inside}
        matching = max_bipartite_matching(inside, outside, edges)
        if matching.size == 0:
            raise DisconnectedInput("graph is disconnected", component=inside)
        trace.phase2_rounds += 1
        for a, b in matching.edges():
            state.attach(b, a, len(state.sizes) if a == v0 else None)
    trace.branch_sizes_final = list(state.sizes)
    tree = RootedTree(v0, tuple(state.parent))
    trace.congestion = congestion(g, tree).max
    return GrowResult(tree, trace, report)


def _best_transfer(state: _Growth, cap: int) -> tuple[int, int, int, int] | None:
    """Transferable ``x`` with the smallest subtree: ``(|T_x|, x, j, y)``."""
    g = state.g
    best = None
    for x in range(g.n):
        i = state.branch[x]
        if i < 0 or state.sizes[i] < cap:
            continue
        size_x = None
        for y in g.adjacency[x]:
            j = state.branch[y]
            if j < 0 or j == i:
                continue
            if size_x is None:
                size_x = len(state.subtree(x))
            if state.sizes[j] + size_x < cap:
                cand = (size_x, x, j, y)
                if best is None or cand < best:
                    best = cand
    return best
