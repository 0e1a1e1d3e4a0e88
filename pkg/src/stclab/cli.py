"""Command-line driver: ``stclab gen|tree|partition|verify|bench``.

Reports are JSON on stdout (and optionally a file); graphs, trees and
partitions are plain text.  Exit codes: 0 success, 2 usage or bad input,
3 infeasible input, 4 internal contract violation, 5 resource cap.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
import time
import warnings
from pathlib import Path

from . import __version__
from .bench import format_table, load_suite, run_suite
from .congestion import DEFAULT_EXACT_CAP, congestion, congestion_via_detours, exact_stc
from .constructions import (
    LbConstructionSpec,
    centroid_lower_bound,
    gen_gnp,
    gen_hnm,
    gen_lower_bound_graph,
    lb_case_analysis,
    parse_labeled_graph,
    write_labeled_graph,
)
from .errors import (
    ConnectivityError,
    DisconnectedInput,
    ExpandingPropertyViolation,
    GenerationFailure,
    InternalError,
    InvalidArgument,
    InvalidConfiguration,
    PreconditionViolation,
    ResourceLimit,
)
from .expander import ExpandingParams, check_expanding, grow_tree
from .graph import Graph, bfs_tree, format_graph, parse_graph, read_tree, write_graph, write_tree
from .partition import gl_partition, iteration_bound, parse_spec, partition_problems
from .lcst import find_lcst

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_CONTRACT, EXIT_CAP = 0, 2, 3, 4, 5

log = logging.getLogger("stclab")


class ContractFailure(Exception):
    """A result failed its validator."""


def _default_seed() -> int:
    raw = os.environ.get("STCLAB_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InvalidArgument(f"STCLAB_SEED must be an integer, got {raw!r}") from None


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InvalidArgument(f"cannot read {path}: {exc.strerror}") from None


def _load_graph(path: str) -> tuple[Graph, dict]:
    text = _read_text(path)
    g = parse_graph(text)
    digest = {"path": path, "n": g.n, "m": g.m, "sha256": hashlib.sha256(format_graph(g).encode()).hexdigest()}
    return g, digest


def _parse_kv(items: list[str] | None) -> dict[str, str]:
    out = {}
    for item in items or []:
        for part in item.split(","):
            if not part:
                continue
            if "=" not in part:
                raise InvalidArgument(f"expected key=value, got {part!r}")
            k, v = part.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def _expanding_params(args, n: int) -> ExpandingParams:
    auto = _parse_kv(args.auto_params)
    explicit = _parse_kv(args.params)
    if "p" in auto:
        return ExpandingParams.from_random_graph(n, auto["p"])
    keys = ("s", "d1", "d2", "d3", "t")
    if all(k in explicit for k in keys):
        return ExpandingParams.build(n, int(explicit["s"]), *(explicit[k] for k in keys[1:]))
    raise InvalidArgument("give --auto-params p=<density> or --params s=..,d1=..,d2=..,d3=..,t=..")


def _finite(x: float):
    return x if math.isfinite(x) else "inf"


# --- commands -----------------------------------------------------------------


def cmd_gen(args) -> dict:
    seed = args.seed
    out = Path(args.out)
    report: dict = {"kind": args.kind, "seed": seed, "output": str(out)}
    if args.kind == "gnp":
        if args.p is None:
            raise InvalidArgument("gen gnp needs -p")
        g = gen_gnp(args.n, args.p, seed)
        write_graph(g, out)
        report["params"] = {"n": args.n, "p": args.p}
    elif args.kind == "hnm":
        if args.m is None:
            raise InvalidArgument("gen hnm needs -m")
        g, rep = gen_hnm(args.n, args.m, seed)
        write_graph(g, out)
        report["params"] = {"n": args.n, "m": args.m}
        report["verification"] = rep.to_json()
    else:
        if args.m is None:
            raise InvalidArgument("gen lowerbound needs -m")
        spec = LbConstructionSpec(args.n, args.m)
        lg, reps = gen_lower_bound_graph(spec, seed)
        write_labeled_graph(lg, out)
        g = lg.graph
        report["params"] = {"n": args.n, "m": args.m, "overlap": spec.overlap}
        report["verification"] = {
            "vertices": g.n,
            "expectedVertices": spec.total_vertices,
            "edgesInRange": [args.m, 7 * args.m],
            "blocks": [r.to_json() for r in reps],
        }
    report["graph"] = {"n": g.n, "m": g.m, "sha256": hashlib.sha256(format_graph(g).encode()).hexdigest()}
    provenance = Path(str(out) + ".json")
    provenance.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    report["provenance"] = str(provenance)
    return report


def cmd_tree(args) -> dict:
    g, digest = _load_graph(args.graph)
    report: dict = {"input": digest, "algorithm": args.algorithm}
    if args.algorithm == "bfs":
        tree = bfs_tree(g)
        bound = {"name": "edge-count", "value": g.m}
    elif args.algorithm == "findlcst":
        res = find_lcst(g, base_factor=args.base_factor)
        tree = res.tree
        bound = {"name": "lcst-8sqrt(mn)", "value": res.bound}
        report["trace"] = res.trace.to_json()
    else:
        params = _expanding_params(args, g.n)
        res = grow_tree(g, params, gate=args.gate)
        tree = res.tree
        bound = {"name": "expander-branch-bound", "value": _finite(res.trace.branch_bound)}
        report["params"] = params.to_json()
        report["trace"] = res.trace.to_json()
        if res.gate is not None:
            report["gate"] = res.gate.to_json()
    cong = congestion(g, tree)
    report["congestion"] = {"max": cong.max, "total": cong.total}
    report["bound"] = bound
    value = bound["value"]
    report["withinBound"] = value == "inf" or cong.max <= value
    if args.out:
        write_tree(tree, args.out)
        report["output"] = args.out
    return report


def cmd_partition(args) -> dict:
    g, digest = _load_graph(args.graph)
    spec = parse_spec(_read_text(args.spec), g.n)
    res = gl_partition(g, spec, variant=args.variant, connectivity=args.connectivity)
    problems = partition_problems(g, spec, res.partition)
    report = {
        "input": digest,
        "algorithm": "gl-partition",
        "variant": args.variant,
        "iterations": res.iterations,
        "iterationBound": iteration_bound(g.n),
        "maxRank": res.max_rank,
        "rankBound": res.rank_bound,
        "parts": [list(p) for p in res.partition.parts],
        "partWeights": list(res.partition.weights),
        "validator": {"passed": not problems, "problems": problems},
    }
    if args.out:
        Path(args.out).write_text(res.partition.format())
        report["output"] = args.out
    if args.trace:
        Path(args.trace).write_text(json.dumps(res.trace_json(), indent=1) + "\n")
    if problems:
        raise ContractFailure("; ".join(problems))
    return report


def cmd_verify(args) -> dict:
    text = _read_text(args.graph)
    g = parse_graph(text)
    report: dict = {"what": args.what, "input": {"path": args.graph, "n": g.n, "m": g.m}}
    if args.what == "congestion":
        tree = read_tree(_need(args.tree, "tree"), root=0)
        a, b = congestion(g, tree), congestion_via_detours(g, tree)
        report["congestion"] = a.to_json()
        report["evaluatorsAgree"] = a.per_edge == b.per_edge
        if not report["evaluatorsAgree"]:
            raise ContractFailure("congestion evaluators disagree")
    elif args.what == "stc-exact":
        value, tree = exact_stc(g, cap=args.cap)
        report["stc"] = value
        report["witness"] = [list(e) for e in tree.tree_edges]
    elif args.what == "expanding":
        params = _expanding_params(args, g.n)
        rep = check_expanding(g, params, mode=args.mode, samples=args.samples, seed=args.seed)
        report["expanding"] = rep.to_json()
    else:
        tree = read_tree(_need(args.tree, "tree"), root=0)
        cert = centroid_lower_bound(g, tree)
        cong = congestion(g, tree).max
        report["certificate"] = cert.to_json()
        report["congestion"] = cong
        report["sound"] = cong >= cert.bound
        if any(line.startswith("b ") for line in text.splitlines()):
            report["caseAnalysis"] = lb_case_analysis(parse_labeled_graph(text), tree).to_json()
        if not report["sound"]:
            raise ContractFailure("certificate exceeds the congestion")
    return report


def _need(value, name: str):
    if value is None:
        raise InvalidArgument(f"--{name} is required here")
    return value


def cmd_bench(args) -> dict:
    suite = load_suite(args.suite)
    records = run_suite(suite, jobs=args.jobs, out_dir=args.out_dir)
    if args.table:
        Path(args.table).write_text(format_table(records))
    failed = sum(1 for r in records if r["status"] != "ok")
    report = {"suite": args.suite, "rows": records, "failedRows": failed}
    if records and failed == len(records):
        report["allRowsFailed"] = True
    return report


# --- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stclab", description="Spanning tree congestion toolkit")
    parser.add_argument("--version", action="version", version=f"stclab {__version__}")
    parser.add_argument("--report", help="also write the JSON report to this file")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a graph")
    gen.add_argument("kind", choices=["gnp", "hnm", "lowerbound"])
    gen.add_argument("-n", type=int, required=True)
    gen.add_argument("-p", type=float)
    gen.add_argument("-m", type=int)
    gen.add_argument("-s", "--seed", type=int, default=None)
    gen.add_argument("-o", "--out", required=True)

    tree = sub.add_parser("tree", help="build a spanning tree")
    tree.add_argument("algorithm", choices=["bfs", "findlcst", "expander"])
    tree.add_argument("graph")
    tree.add_argument("-o", "--out")
    tree.add_argument("--base-factor", type=float, default=8.0)
    tree.add_argument("--auto-params", action="append", help="p=<density>")
    tree.add_argument("--params", action="append", help="s=..,d1=..,d2=..,d3=..,t=..")
    tree.add_argument("--gate", action="store_true", help="check the expanding conditions first")

    part = sub.add_parser("partition", help="connected partition with weight targets")
    part.add_argument("graph")
    part.add_argument("spec")
    part.add_argument("--variant", choices=["full-k", "half-k"], default="full-k")
    part.add_argument("--connectivity", type=int)
    part.add_argument("-o", "--out")
    part.add_argument("--trace")

    ver = sub.add_parser("verify", help="run an oracle or checker")
    ver.add_argument("what", choices=["congestion", "stc-exact", "expanding", "certificate"])
    ver.add_argument("graph")
    ver.add_argument("tree", nargs="?")
    ver.add_argument("--cap", type=int, default=DEFAULT_EXACT_CAP)
    ver.add_argument("--auto-params", action="append")
    ver.add_argument("--params", action="append")
    ver.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    ver.add_argument("--samples", type=int, default=10**4)
    ver.add_argument("-s", "--seed", type=int, default=None)

    bench = sub.add_parser("bench", help="run a benchmark suite")
    bench.add_argument("suite")
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--out-dir")
    bench.add_argument("--table", help="write a TSV summary here")
    return parser


COMMANDS = {"gen": cmd_gen, "tree": cmd_tree, "partition": cmd_partition, "verify": cmd_verify, "bench": cmd_bench}


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, ResourceLimit):
        return EXIT_CAP
    if isinstance(exc, (ConnectivityError, GenerationFailure, ExpandingPropertyViolation)):
        return EXIT_INFEASIBLE
    if isinstance(exc, (InvalidArgument, PreconditionViolation)):
        return EXIT_USAGE
    if isinstance(exc, (ContractFailure, InternalError, InvalidConfiguration)):
        return EXIT_CONTRACT
    return EXIT_CONTRACT


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    start = time.perf_counter()
    report: dict = {"command": ["stclab", *argv]}
    code = EXIT_OK
    try:
        if getattr(args, "seed", "absent") is None:
            args.seed = _default_seed()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report.update(COMMANDS[args.command](args))
        if caught:
            report["warnings"] = sorted({str(w.message) for w in caught})
    except Exception as exc:
        code = _exit_code(exc)
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, DisconnectedInput) and exc.component is not None:
            report["error"]["component"] = list(exc.component)
        if code == EXIT_CONTRACT and not isinstance(exc, (ContractFailure, InternalError, InvalidConfiguration)):
            log.exception("unexpected failure")
    if args.command == "bench" and report.get("allRowsFailed"):
        code = EXIT_CONTRACT
    report["exitCode"] = code
    report["wallTimeSec"] = round(time.perf_counter() - start, 6)
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if args.report:
        Path(args.report).write_text(text + "\n")
    if code:
        print(f"stclab: {report['error']['message']}" if "error" in report else "stclab: failed", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
