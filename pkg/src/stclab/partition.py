"""Constructive connected k-partition with weight targets, by local search.

Given a k-connected graph, vertex weights ``w``, distinct terminals
``t_1..t_k`` and integer targets ``T_j`` with ``sum(T) == w(V)`` and
``T_j >= w(t_j)``, the search returns connected parts ``V_j`` containing
``t_j`` with ``w(V_j) <= T_j + w_max - 1``.

The state is a *configuration*: a fitted partial partition plus, for each
heavy set, a cascade of cut vertices.  Ranks and levels propagate outwards
from the light sets; every iteration moves to a configuration whose vector
``(L, N^0, N^1, ...)`` is strictly better, so the search terminates.
"""

from __future__ import annotations

import json
import logging
import math
import warnings
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .connectivity import vertex_connectivity
from .errors import (
    ConnectivityError,
    InternalError,
    InvalidArgument,
    InvalidConfiguration,
    PreconditionViolation,
)
from .graph import Graph

log = logging.getLogger(__name__)

INF = math.inf
CONNECTIVITY_CHECK_MAX_N = 12

FULL_K = "full-k"
HALF_K = "half-k"


@dataclass(frozen=True)
class PartitionSpec:
    terminals: tuple[int, ...]
    targets: tuple[int, ...]
    weights: tuple[int, ...]

    @classmethod
    def build(
        cls,
        terminals: Sequence[int],
        targets: Sequence[int],
        weights: Sequence[int] | None = None,
        n: int | None = None,
    ) -> "PartitionSpec":
        if weights is None:
            if n is None:
                raise InvalidArgument("either weights or n is required")
            weights = [1] * n
        return cls(tuple(int(t) for t in terminals), tuple(int(t) for t in targets), tuple(int(w) for w in weights))

    @property
    def k(self) -> int:
        return len(self.terminals)

    @property
    def w_max(self) -> int:
        return max(self.weights)

    def weight(self, vertices: Iterable[int]) -> int:
        return sum(self.weights[v] for v in vertices)

    def capacity(self, j: int) -> int:
        """Largest weight a fitted part ``j`` may carry."""
        return self.targets[j] + self.w_max - 1

    def validate(self, g: Graph) -> None:
        n = g.n
        if len(self.weights) != n:
            raise InvalidArgument(f"expected {n} weights, got {len(self.weights)}")
        if any(w <= 0 for w in self.weights):
            raise InvalidArgument("weights must be positive integers")
        if len(self.targets) != self.k:
            raise InvalidArgument(f"{self.k} terminals but {len(self.targets)} targets")
        if self.k == 0:
            raise InvalidArgument("at least one part is required")
        if len(set(self.terminals)) != self.k:
            raise InvalidArgument("terminals must be distinct")
        if any(not 0 <= t < n for t in self.terminals):
            raise InvalidArgument("terminal out of range")
        if any(t <= 0 for t in self.targets):
            raise InvalidArgument("targets must be positive integers")
        total = sum(self.weights)
        if sum(self.targets) != total:
            raise InvalidArgument(f"targets sum to {sum(self.targets)}, but w(V) = {total}")
        for t, target in zip(self.terminals, self.targets):
            if target < self.weights[t]:
                raise InvalidArgument(f"target {target} is below the weight of terminal {t}")


@dataclass(frozen=True, eq=False)
class ConfigVector:
    """``(L, N^0, ..., N^n)``: light-set count, then finite-level vertex counts."""

    light_count: int
    level_counts: tuple[int, ...]

    def key(self, upto: int | None = None) -> tuple[int, ...]:
        counts = self.level_counts if upto is None else self.level_counts[: upto + 1]
        return (-self.light_count, *counts)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ConfigVector) and self.key() == other.key()

    def __lt__(self, other: "ConfigVector") -> bool:
        return self.key() < other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def to_json(self, iteration: int) -> dict:
        counts = list(self.level_counts)
        while counts and counts[-1] == 0:
            counts.pop()
        return {"iteration": iteration, "lightCount": self.light_count, "levelCounts": counts}


def compare(a: ConfigVector, b: ConfigVector, upto: int | None = None) -> int:
    """+1 if ``a`` is strictly better, -1 if worse, 0 if equal.

    Fewer light sets is better; ties go to the larger ``N^0``, then ``N^1``
    and so on.  ``upto`` restricts the comparison to ``N^0..N^upto``.
    """
    ka, kb = a.key(upto), b.key(upto)
    return (ka > kb) - (ka < kb)


@dataclass(frozen=True, eq=False)
class Configuration:
    """Fitted partial partition, cascades, and the derived rank/level labels."""

    spec: PartitionSpec
    sets: tuple[frozenset[int], ...]
    cascades: tuple[tuple[int, ...], ...]
    levels: tuple[float, ...] = ()
    ranks: dict[int, int] = field(default_factory=dict)
    reservoirs: dict[int, frozenset[int]] = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.spec.weights)

    @property
    def k(self) -> int:
        return len(self.sets)

    @property
    def unassigned(self) -> frozenset[int]:
        covered = set().union(*self.sets)
        return frozenset(v for v in range(self.n) if v not in covered)

    def owner(self) -> list[int]:
        out = [-1] * self.n
        for j, part in enumerate(self.sets):
            for v in part:
                out[v] = j
        return out

    def is_light(self, j: int) -> bool:
        return self.spec.weight(self.sets[j]) < self.spec.targets[j]

    @property
    def ell(self) -> int:
        """Highest cascade rank, 0 when there are no cascade vertices."""
        return max(self.ranks.values(), default=0)

    def vector(self) -> ConfigVector:
        counts = [0] * (self.n + 1)
        for lv in self.levels:
            if lv != INF:
                counts[int(lv)] += 1
        light = sum(1 for j in range(self.k) if self.is_light(j))
        return ConfigVector(light, tuple(counts))


@dataclass(frozen=True)
class Partition:
    parts: tuple[tuple[int, ...], ...]
    weights: tuple[int, ...]

    def format(self) -> str:
        return "".join(" ".join(map(str, p)) + "\n" for p in self.parts)


@dataclass
class PartitionResult:
    partition: Partition
    trace: list[ConfigVector]
    iterations: int
    max_rank: int
    variant: str
    spec: PartitionSpec
    rank_bound: int | None = None

    def trace_json(self) -> list[dict]:
        return [vec.to_json(i) for i, vec in enumerate(self.trace)]


# --- labels -------------------------------------------------------------------


def reservoir(g: Graph, part: frozenset[int], terminal: int, v: int) -> frozenset[int]:
    """Component of ``terminal`` in ``G[part] - v``."""
    if v == terminal:
        raise InvalidArgument("the reservoir of a terminal is undefined")
    seen = {terminal}
    queue = deque([terminal])
    while queue:
        x = queue.popleft()
        for y in g.adjacency[x]:
            if y != v and y in part and y not in seen:
                seen.add(y)
                queue.append(y)
    return frozenset(seen)


def recompute_labels(g: Graph, c: Configuration) -> Configuration:
    """Recompute ranks and levels from the sets and cascades alone.

    Light-set vertices sit at level 0.  Round ``i`` ranks every unranked
    cascade vertex adjacent to a level-``i`` vertex as ``i + 1``, then puts
    unlabelled vertices of those vertices' reservoirs at level ``i + 1``.
    """
    n = c.n
    levels: list[float] = [INF] * n
    for j, part in enumerate(c.sets):
        if c.is_light(j):
            for v in part:
                levels[v] = 0
    reservoirs: dict[int, frozenset[int]] = {}
    for j, cas in enumerate(c.cascades):
        for z in cas:
            reservoirs[z] = reservoir(g, c.sets[j], c.spec.terminals[j], z)
    ranks: dict[int, int] = {}
    pending = set(reservoirs)
    i = 0
    while pending:
        frontier = [z for z in pending if any(levels[y] == i for y in g.adjacency[z])]
        if not frontier and not any(lv == i for lv in levels):
            break
        for z in frontier:
            ranks[z] = i + 1
            pending.discard(z)
        for z in sorted(frontier):
            for x in reservoirs[z]:
                if levels[x] == INF:
                    levels[x] = i + 1
        i += 1
    if pending:
        raise InvalidConfiguration(f"cascade vertices without a rank: {sorted(pending)}")
    return Configuration(c.spec, c.sets, c.cascades, tuple(levels), ranks, reservoirs)


def configuration_problems(g: Graph, c: Configuration) -> list[str]:
    """Every violated validity condition of ``c`` (empty when valid)."""
    spec = c.spec
    problems = []
    seen: set[int] = set()
    for j, part in enumerate(c.sets):
        t = spec.terminals[j]
        if seen & part:
            problems.append(f"set {j} overlaps an earlier set")
        seen |= part
        if t not in part:
            problems.append(f"set {j} lacks terminal {t}")
        if not g.is_connected(part):
            problems.append(f"set {j} is not connected")
        if spec.weight(part) > spec.capacity(j):
            problems.append(f"set {j} is not fitted")
        cas = c.cascades[j]
        if c.is_light(j) and cas:
            problems.append(f"light set {j} carries a cascade")
        for idx, z in enumerate(cas):
            if z not in part or z == t:
                problems.append(f"cascade vertex {z} of set {j} is not a non-terminal member")
            elif idx > 0 and cas[idx] in reservoir(g, part, t, cas[idx - 1]):
                problems.append(f"cascade vertex {z} lies in the reservoir of its predecessor")
            if z not in c.ranks:
                problems.append(f"cascade vertex {z} has no rank")
            elif idx > 0 and cas[idx - 1] in c.ranks and c.ranks[cas[idx - 1]] >= c.ranks[z]:
                problems.append(f"ranks not strictly increasing in cascade of set {j}")
    return problems


def check_configuration(g: Graph, c: Configuration) -> None:
    problems = configuration_problems(g, c)
    if problems:
        raise InvalidConfiguration("; ".join(problems))


def find_bridges(g: Graph, c: Configuration) -> list[tuple[int, int]]:
    """Edges ``(u, v)`` with ``u`` unassigned and ``v`` at a finite level, sorted."""
    out = []
    for u in sorted(c.unassigned):
        for v in g.adjacency[u]:
            if c.levels[v] != INF:
                out.append((u, v))
    return out


def goodness_problems(g: Graph, c: Configuration, ell: int) -> list[str]:
    """Reasons ``c`` fails to be ell-good (empty when it is)."""
    problems = []
    if c.ell != ell:
        problems.append(f"highest rank is {c.ell}, not {ell}")
    terminals = set(c.spec.terminals)
    for v in range(c.n):
        lv = c.levels[v]
        if lv == INF or lv > ell - 1:
            continue
        for y in g.adjacency[v]:
            # a cascade vertex borders its own reservoir, so any rank up to lv + 1 is fine
            if c.ranks.get(y, INF) <= lv + 1 or c.levels[y] <= lv + 1 or y in terminals:
                continue
            problems.append(f"level-{int(lv)} vertex {v} breaks maximality via {y}")
            break
    for u, v in find_bridges(g, c):
        if c.levels[v] != ell:
            problems.append(f"bridge ({u}, {v}) lands on level {c.levels[v]}")
    return problems


def is_good(g: Graph, c: Configuration, ell: int) -> bool:
    return not goodness_problems(g, c, ell)


# --- local moves --------------------------------------------------------------


def initial_configuration(g: Graph, spec: PartitionSpec) -> Configuration:
    spec.validate(g)
    sets = tuple(frozenset({t}) for t in spec.terminals)
    c = Configuration(spec, sets, tuple(() for _ in sets))
    return recompute_labels(g, c)


def step_good_inc(g: Graph, c: Configuration, check: bool = True) -> Configuration:
    """Bridge-free ell-good configuration -> strictly better (ell+1)-good one."""
    ell = c.ell
    if not c.unassigned:
        raise PreconditionViolation("the partial partition already covers V")
    if find_bridges(g, c):
        raise PreconditionViolation("configuration has a bridge")
    if check:
        problems = goodness_problems(g, c, ell)
        if problems:
            raise PreconditionViolation(f"not {ell}-good: {problems[0]}")
    cascade_vertices = set(c.ranks)
    cascades = list(c.cascades)
    extended = False
    for j, part in enumerate(c.sets):
        if c.is_light(j):
            continue
        t = c.spec.terminals[j]
        candidates = sorted(
            x
            for x in part
            if c.levels[x] == INF
            and x != t
            and x not in cascade_vertices
            and any(c.levels[y] == ell for y in g.adjacency[x])
        )
        if not candidates:
            continue
        chosen = None
        for x in candidates:
            res = reservoir(g, part, t, x)
            if all(y in res for y in candidates if y != x):
                chosen = x
                break
        if chosen is None:
            raise InternalError(f"no candidate of set {j} dominates the others")
        cascades[j] = c.cascades[j] + (chosen,)
        extended = True
    if not extended:
        raise InternalError(
            "no heavy set can extend its cascade; the input graph is not k-connected"
        )
    out = recompute_labels(g, Configuration(c.spec, c.sets, tuple(cascades)))
    if check:
        _expect(out.ell == ell + 1, f"new highest rank {out.ell} != {ell + 1}")
        _expect(not goodness_problems(g, out, ell + 1), "result is not (ell+1)-good")
        _expect(compare(out.vector(), c.vector()) > 0, "result is not strictly better")
    return out


def _dfs_tree(g: Graph, vertices: frozenset[int], root: int) -> dict[int, set[int]]:
    tree: dict[int, set[int]] = {root: set()}
    stack = [(root, iter(g.adjacency[root]))]
    while stack:
        x, it = stack[-1]
        for y in it:
            if y in vertices and y not in tree:
                tree[y] = {x}
                tree[x].add(y)
                stack.append((y, iter(g.adjacency[y])))
                break
        else:
            stack.pop()
    return tree


def step_bridging(g: Graph, c: Configuration, bridge: tuple[int, int], check: bool = True) -> Configuration:
    """Absorb the unassigned end of a bridge into the set holding its other end.

    The result is either ell-good and strictly better up to level ell, or
    (ell-1)-good, no worse up to level ell-1, and has a bridge into level
    ell-1 (the deleted cascade vertex and its lower neighbour).
    """
    u, v = bridge
    ell = c.ell
    if u not in c.unassigned:
        raise InvalidArgument(f"{u} is not unassigned")
    if c.levels[v] == INF or not g.has_edge(u, v):
        raise InvalidArgument(f"({u}, {v}) is not a bridge")
    if c.levels[v] != ell:
        raise PreconditionViolation(f"bridge lands on level {c.levels[v]}, expected {ell}")
    if check:
        problems = goodness_problems(g, c, ell)
        if problems:
            raise PreconditionViolation(f"not {ell}-good: {problems[0]}")
    spec = c.spec
    j = c.owner()[v]
    part = c.sets[j]
    sets = list(c.sets)
    cascades = list(c.cascades)
    if c.is_light(j):
        sets[j] = part | {u}
        cascades = [() for _ in cascades]
        case = "1"
    elif spec.weight(part) + spec.weights[u] <= spec.capacity(j):
        sets[j] = part | {u}
        case = "2.1"
    else:
        z = c.cascades[j][-1]
        if c.ranks[z] != ell:
            raise InternalError(f"top cascade vertex of set {j} has rank {c.ranks[z]}, expected {ell}")
        beyond = part - c.reservoirs[z] - {z}
        tree = _dfs_tree(g, beyond | {z}, z)
        grown = set(part | {u})
        cap = spec.capacity(j)
        while spec.weight(grown) > cap and len(tree) > 1:
            leaf = min(x for x, nb in tree.items() if x != z and len(nb) == 1)
            for y in tree.pop(leaf):
                tree[y].discard(leaf)
            grown.discard(leaf)
        z_deleted = False
        if spec.weight(grown) > cap:
            grown.discard(z)
            z_deleted = True
        if spec.weight(grown) > cap:
            grown.discard(u)
        sets[j] = frozenset(grown)
        if z_deleted:
            cascades = [tuple(x for x in cas if c.ranks[x] != ell) for cas in cascades]
            case = "2.2.2"
        else:
            case = "2.2.1"
    out = recompute_labels(g, Configuration(spec, tuple(sets), tuple(cascades)))
    log.debug("bridging case %s on (%d, %d)", case, u, v)
    if check:
        check_configuration(g, out)
        if case == "2.2.2":
            _expect(out.ell == ell - 1, f"case 2.2.2 left highest rank {out.ell}")
            _expect(not goodness_problems(g, out, ell - 1), "case 2.2.2 result is not (ell-1)-good")
            _expect(compare(out.vector(), c.vector(), upto=ell - 1) >= 0, "case 2.2.2 result got worse")
            _expect(
                any(out.levels[b] <= ell - 1 for _, b in find_bridges(g, out)),
                "case 2.2.2 result lacks a bridge into level ell-1",
            )
        else:
            _expect(out.ell == ell, f"case {case} changed the highest rank")
            _expect(not goodness_problems(g, out, ell), f"case {case} result is not ell-good")
            _expect(compare(out.vector(), c.vector(), upto=ell) > 0, f"case {case} did not improve")
    return out


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise InternalError(message)


# --- driver -------------------------------------------------------------------


def iteration_bound(n: int) -> int:
    return n * 4**n


def half_k_rank_bound(n: int, connectivity: int) -> int | None:
    if connectivity < 3:
        return None
    return -(-2 * n // (connectivity - 2))


def gl_partition(
    g: Graph,
    spec: PartitionSpec,
    variant: str = FULL_K,
    connectivity: int | None = None,
    check: bool = True,
    known_connectivity: bool = False,
) -> PartitionResult:
    """Run the local search to a full connected partition.

    ``variant="half-k"`` expects a ``connectivity``-connected graph and
    ``floor(connectivity / 2) + 1`` parts; ranks are then bounded by
    ``ceil(2n / (connectivity - 2))``.  Connectivity is verified on small
    graphs unless ``known_connectivity`` says the caller already has.
    """
    spec.validate(g)
    n = g.n
    if variant not in (FULL_K, HALF_K):
        raise InvalidArgument(f"unknown variant {variant!r}")
    if variant == HALF_K:
        if connectivity is None:
            raise InvalidArgument("half-k needs the input connectivity")
        if spec.k != connectivity // 2 + 1:
            raise InvalidArgument(f"half-k on a {connectivity}-connected graph uses {connectivity // 2 + 1} parts, got {spec.k}")
        required = connectivity
    else:
        required = spec.k if connectivity is None else max(spec.k, connectivity)
    if known_connectivity:
        pass
    elif n <= CONNECTIVITY_CHECK_MAX_N:
        kappa = vertex_connectivity(g) if n > 1 else 0
        if n > 1 and kappa < required:
            raise ConnectivityError(f"graph is {kappa}-connected, {required} required")
    else:
        warnings.warn(f"{required}-connectivity of an n={n} graph is trusted, not verified", stacklevel=2)
    rank_bound = half_k_rank_bound(n, required) if variant == HALF_K else None
    limit = iteration_bound(n)

    c = initial_configuration(g, spec)
    trace = [c.vector()]
    max_rank = 0
    iterations = 0
    while c.unassigned:
        iterations += 1
        if iterations > limit:
            raise InternalError(f"iteration bound {limit} exceeded")
        bridges = find_bridges(g, c)
        if not bridges:
            c = step_good_inc(g, c, check=check)
        else:
            while True:
                before = c.ell
                c = step_bridging(g, c, bridges[0], check=check)
                if c.ell == before:
                    break
                bridges = [b for b in find_bridges(g, c) if c.levels[b[1]] == c.ell]
                if not bridges:
                    raise InternalError("descended configuration has no bridge")
        max_rank = max(max_rank, c.ell)
        if rank_bound is not None and c.ell > rank_bound:
            raise InternalError(f"rank {c.ell} exceeds the half-k bound {rank_bound}")
        vec = c.vector()
        if compare(vec, trace[-1]) <= 0:
            raise InternalError("configuration vector did not strictly improve")
        trace.append(vec)
        if check:
            check_configuration(g, c)

    parts = tuple(tuple(sorted(s)) for s in c.sets)
    partition = Partition(parts, tuple(spec.weight(p) for p in parts))
    problems = partition_problems(g, spec, partition)
    if problems:
        raise InternalError("; ".join(problems))
    return PartitionResult(partition, trace, iterations, max_rank, variant, spec, rank_bound)


def partition_problems(g: Graph, spec: PartitionSpec, partition: Partition) -> list[str]:
    """Validator for the output contract (empty list means the partition passes)."""
    problems = []
    if len(partition.parts) != spec.k:
        problems.append(f"expected {spec.k} parts, got {len(partition.parts)}")
    seen: list[int] = []
    for j, part in enumerate(partition.parts):
        seen.extend(part)
        if j < spec.k and spec.terminals[j] not in part:
            problems.append(f"part {j} lacks terminal {spec.terminals[j]}")
        if not part or not g.is_connected(part):
            problems.append(f"part {j} is not connected")
        if j < spec.k and spec.weight(part) > spec.capacity(j):
            problems.append(f"part {j} weighs {spec.weight(part)} > {spec.capacity(j)}")
    if len(seen) != len(set(seen)):
        problems.append("parts overlap")
    if sorted(set(seen)) != list(range(g.n)):
        problems.append("parts do not cover V")
    return problems


# --- files --------------------------------------------------------------------


def parse_spec(text: str, n: int) -> PartitionSpec:
    rows = [line.split() for line in text.splitlines() if line.split("#", 1)[0].strip()]
    if len(rows) < 3:
        raise InvalidArgument("spec needs lines: k, terminals, targets[, weights]")
    try:
        k = int(rows[0][0])
        terminals = [int(x) for x in rows[1]]
        targets = [int(x) for x in rows[2]]
        weights = [int(x) for x in rows[3]] if len(rows) > 3 else [1] * n
    except ValueError as exc:
        raise InvalidArgument(f"malformed spec: {exc}") from None
    if len(terminals) != k:
        raise InvalidArgument(f"k = {k} but {len(terminals)} terminals")
    return PartitionSpec.build(terminals, targets, weights)


def read_spec(path: str | Path, n: int) -> PartitionSpec:
    return parse_spec(Path(path).read_text(), n)


def format_spec(spec: PartitionSpec) -> str:
    lines = [str(spec.k), " ".join(map(str, spec.terminals)), " ".join(map(str, spec.targets))]
    if any(w != 1 for w in spec.weights):
        lines.append(" ".join(map(str, spec.weights)))
    return "\n".join(lines) + "\n"


def write_trace(result: PartitionResult, path: str | Path) -> None:
    Path(path).write_text(json.dumps(result.trace_json(), indent=1) + "\n")
