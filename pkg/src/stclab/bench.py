"""Benchmark suites: generator x size x seed x algorithm, one row each."""

from __future__ import annotations

import json
import math
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .congestion import congestion, exact_stc
from .constructions import LbConstructionSpec, centroid_lower_bound, gen_gnp, gen_hnm, gen_lower_bound_graph
from .errors import InvalidArgument
from .expander import ExpandingParams, grow_tree
from .graph import Graph, RootedTree, bfs_tree, format_graph, format_tree
from .lcst import degree_sums, find_lcst, min_max_partition, star_assemble

GENERATORS = ("gnp", "hnm", "lowerbound")
ALGORITHMS = ("bfs", "findlcst", "expander", "partition")
DEFAULT_EXACT_MAX_N = 10


@dataclass(frozen=True)
class BenchRow:
    row_id: str
    generator: str
    n: int
    seed: int
    algorithm: str
    options: tuple[tuple[str, object], ...]

    def option(self, key: str, default=None):
        return dict(self.options).get(key, default)


def load_suite(path: str | Path) -> dict:
    try:
        suite = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"suite is not valid JSON: {exc}") from None
    if not isinstance(suite, dict):
        raise InvalidArgument("suite must be a JSON object")
    return suite


def expand_suite(suite: dict) -> list[BenchRow]:
    """Cross product of every case's sizes, seeds and algorithms."""
    cases = suite.get("cases", [])
    if not isinstance(cases, list):
        raise InvalidArgument("'cases' must be a list")
    rows = []
    for ci, case in enumerate(cases):
        if "seeds" not in case or not case["seeds"]:
            raise InvalidArgument(f"case {ci} lists no seeds; seeds are mandatory")
        generator = str(case.get("generator", ""))
        sizes = case.get("sizes", [case["n"]] if "n" in case else [])
        algorithms = case.get("algorithms", ["bfs"])
        options = tuple(
            sorted((k, v) for k, v in case.items() if k not in ("generator", "sizes", "n", "seeds", "algorithms"))
        )
        for n in sizes:
            for seed in case["seeds"]:
                for alg in algorithms:
                    row_id = f"{ci:02d}-{generator}-n{n}-s{seed}-{alg}"
                    rows.append(BenchRow(row_id, generator, int(n), int(seed), str(alg), options))
    return rows


def build_graph(row: BenchRow) -> tuple[Graph, float | None]:
    """The row's input graph and the edge density ``p`` used for expander parameters."""
    if row.generator == "gnp":
        p = float(row.option("p", 0.5))
        return gen_gnp(row.n, p, row.seed), p
    if row.generator == "hnm":
        m = int(row.option("m", 0))
        g, _ = gen_hnm(row.n, m, row.seed)
        return g, min(1.0, 2 * m / row.n**2)
    if row.generator == "lowerbound":
        lg, _ = gen_lower_bound_graph(LbConstructionSpec(row.n, int(row.option("m", 0))), row.seed)
        return lg.graph, None
    raise InvalidArgument(f"unknown generator {row.generator!r}")


def build_tree(row: BenchRow, g: Graph, p: float | None) -> tuple[RootedTree, str, float, str | None]:
    """The row's spanning tree, the bound's name and value, and any partition text."""
    if row.algorithm == "bfs":
        return bfs_tree(g), "edge-count", float(g.m), None
    if row.algorithm == "partition":
        ell = int(row.option("ell", 2))
        res = min_max_partition(g, ell)
        hub, *spokes = res.spec.terminals
        tree = star_assemble(g, res.partition, hub, spokes)
        return tree, "max-part-degree-sum", float(max(degree_sums(g, res.partition))), res.partition.format()
    if row.algorithm == "findlcst":
        res = find_lcst(g, base_factor=float(row.option("base_factor", 8.0)))
        return res.tree, "lcst-8sqrt(mn)", res.bound, None
    if row.algorithm == "expander":
        if p is None:
            raise InvalidArgument("expander rows need a generator with a density p")
        res = grow_tree(g, ExpandingParams.from_random_graph(g.n, p))
        return res.tree, "expander-branch-bound", res.trace.branch_bound, None
    raise InvalidArgument(f"unknown algorithm {row.algorithm!r}")


def run_row(row: BenchRow, out_dir: str | None = None) -> dict:
    start = time.perf_counter()
    record: dict = {
        "id": row.row_id,
        "generator": row.generator,
        "n": row.n,
        "seed": row.seed,
        "algorithm": row.algorithm,
    }
    try:
        g, p = build_graph(row)
        tree, bound_name, bound, parts = build_tree(row, g, p)
        cong = congestion(g, tree).max
        record.update(
            {
                "m": g.m,
                "congestion": cong,
                "bound": {"name": bound_name, "value": bound if math.isfinite(bound) else "inf"},
                "withinBound": cong <= bound,
                "centroidLowerBound": centroid_lower_bound(g, tree).bound,
            }
        )
        if g.n <= int(row.option("exact_max_n", DEFAULT_EXACT_MAX_N)) and g.is_connected():
            record["exact"] = exact_stc(g)[0]
        if out_dir is not None:
            out = Path(out_dir)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"{row.row_id}.graph.txt").write_text(format_graph(g))
            (out / f"{row.row_id}.tree.txt").write_text(format_tree(tree))
            if parts is not None:
                (out / f"{row.row_id}.partition.txt").write_text(parts)
        record["status"] = "ok"
    except Exception as exc:  # rows fail independently
        record["status"] = "error"
        record["error"] = f"{type(exc).__name__}: {exc}"
        record["trace"] = traceback.format_exc(limit=3)
    record["wallTimeSec"] = round(time.perf_counter() - start, 6)
    return record


def run_suite(suite: dict, jobs: int = 1, out_dir: str | None = None) -> list[dict]:
    rows = expand_suite(suite)
    if jobs <= 1 or len(rows) <= 1:
        return [run_row(r, out_dir) for r in rows]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_row, rows, [out_dir] * len(rows)))


def format_table(records: list[dict]) -> str:
    cols = ["id", "status", "n", "m", "congestion", "bound", "exact", "centroidLowerBound", "wallTimeSec"]
    lines = ["\t".join(cols)]
    for rec in records:
        cells = []
        for c in cols:
            v = rec.get(c, "")
            if isinstance(v, dict):
                v = v.get("value", "")
            if isinstance(v, float):
                v = f"{v:.3f}"
            cells.append(str(v))
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"
