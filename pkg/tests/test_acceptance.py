"""Acceptance criteria, each at its stated tolerance.

Every test records a PASS/FAIL line that is repeated in the pytest terminal
summary; run ``pytest tests/test_acceptance.py`` to see only these.
"""

import itertools
import json
import math
import random
import warnings

import pytest

from stclab.cli import main
from stclab.congestion import congestion, congestion_via_detours, exact_stc
from stclab.constructions import (
    LbConstructionSpec,
    centroid_lower_bound,
    gen_gnp,
    gen_lower_bound_graph,
    lb_case_analysis,
    random_spanning_tree,
)
from stclab.errors import StcError
from stclab.expander import ExpandingParams, check_expanding, grow_tree, phase2_round_bound, branch_bound
from stclab.graph import Graph, bfs_tree
from stclab.lcst import degree_sums, find_lcst, lcst_bound, min_max_partition, star_assemble
from stclab.matching import max_bipartite_matching
from stclab.partition import HALF_K, compare, gl_partition, half_k_rank_bound, iteration_bound, partition_problems
from support import random_connected_graph, random_k_connected, random_spec


def _small_graph_catalog(rng: random.Random) -> list[Graph]:
    """Every labelled connected graph on at most 5 vertices, plus random ones on 6 and 7."""
    out = []
    for n in range(1, 6):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            g = Graph.from_edges(n, [e for i, e in enumerate(pairs) if mask >> i & 1])
            if g.is_connected():
                out.append(g)
    for n in (6, 7):
        out.extend(random_connected_graph(rng, n) for _ in range(150))
    return out


def test_criterion_1_oracle_self_consistency(record):
    rng = random.Random(1)
    graphs = _small_graph_catalog(rng)
    mismatches = 0
    trees = 0
    for g in graphs:
        candidates = [bfs_tree(g)]
        if g.m:
            candidates += [random_spanning_tree(g, rng.randrange(10**6)) for _ in range(2)]
        for t in candidates:
            trees += 1
            if congestion(g, t).per_edge != congestion_via_detours(g, t).per_edge:
                mismatches += 1
    cycles = all(exact_stc(Graph.cycle(n))[0] == 2 for n in range(3, 8))
    cliques = all(exact_stc(Graph.complete(n))[0] == n - 1 for n in range(4, 8))
    ok = len(graphs) >= 500 and mismatches == 0 and cycles and cliques
    record(1, ok, f"{len(graphs)} graphs, {trees} trees, {mismatches} mismatches, cycles {cycles}, cliques {cliques}")
    assert ok


def test_criterion_2_partition_contract(record):
    rng = random.Random(2)
    failures = []
    half_k_runs = 0
    worst_rank_ratio = 0.0
    for i in range(100):
        k = rng.choice([2, 3])
        g, _ = random_k_connected(rng, k, 5, 12)
        spec = random_spec(rng, g, k)
        try:
            res = gl_partition(g, spec)
        except StcError as exc:
            failures.append(f"instance {i}: {exc}")
            continue
        if partition_problems(g, spec, res.partition):
            failures.append(f"instance {i}: validator")
        if any(compare(b, a) <= 0 for a, b in zip(res.trace, res.trace[1:])):
            failures.append(f"instance {i}: trace not strictly increasing")
        if res.iterations > iteration_bound(g.n):
            failures.append(f"instance {i}: {res.iterations} iterations")
        if k == 3:
            half_k_runs += 1
            hspec = random_spec(rng, g, 3 // 2 + 1)
            bound = half_k_rank_bound(g.n, 3)
            try:
                hres = gl_partition(g, hspec, variant=HALF_K, connectivity=3)
            except StcError as exc:
                failures.append(f"instance {i} half-k: {exc}")
                continue
            if partition_problems(g, hspec, hres.partition) or hres.max_rank > bound:
                failures.append(f"instance {i} half-k: rank {hres.max_rank} > {bound}")
            worst_rank_ratio = max(worst_rank_ratio, hres.max_rank / bound)
    ok = not failures
    record(2, ok, f"100 instances, {half_k_runs} half-k runs, max rank/bound {worst_rank_ratio:.2f}, failures {failures[:3]}")
    assert ok


def test_criterion_3_findlcst_sandwich(record):
    rng = random.Random(3)
    bad = []
    worst = 0.0
    for i in range(200):
        g = random_connected_graph(rng, rng.randint(2, 10))
        res = find_lcst(g)
        cong = congestion(g, res.tree).max
        lower = exact_stc(g)[0]
        upper = lcst_bound(g.n, g.m)
        if not lower <= cong <= upper:
            bad.append((i, lower, cong, upper))
        worst = max(worst, cong / upper)
    ok = not bad
    record(3, ok, f"200 graphs, max congestion/bound {worst:.3f}, violations {bad[:3]}")
    assert ok


def test_criterion_4_four_part_degree_sums(record):
    rng = random.Random(4)
    bad = []
    for i in range(50):
        g, _ = random_k_connected(rng, 4, 6, 14)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # connectivity above n=12 comes from the sampler
            res = min_max_partition(g, 4)
        sums = degree_sums(g, res.partition)
        hub, *spokes = res.spec.terminals
        tree = star_assemble(g, res.partition, hub, spokes)
        cong = congestion(g, tree).max
        if partition_problems(g, res.spec, res.partition) or max(sums) > g.m or cong > max(sums):
            bad.append((i, max(sums), g.m, cong))
    ok = not bad
    record(4, ok, f"50 graphs, violations {bad[:3]}")
    assert ok


def test_criterion_5_expanding_desk_scale(record):
    lines = []
    ok = True
    for n, p in itertools.product((24, 32), (0.6, 0.8)):
        params = ExpandingParams.from_random_graph(n, p)
        bound = branch_bound(params)
        rounds = phase2_round_bound(params)
        passed = 0
        violations: dict[str, int] = {}
        for seed in range(10):
            g = gen_gnp(n, p, seed)
            rep = check_expanding(g, params, mode="exhaustive")
            if not rep.passed:
                name = rep.first_violation[0]
                violations[name] = violations.get(name, 0) + 1
                continue
            passed += 1
            res = grow_tree(g, params)
            if res.trace.congestion > bound or (rounds is not None and res.trace.phase2_rounds > rounds):
                ok = False
        ok = ok and passed >= 8
        lines.append(f"n={n} p={p}: {passed}/10 pass, first violations {violations}")
    record(5, ok, "; ".join(lines))
    assert ok


def test_criterion_6_random_graph_linear_congestion(record):
    n, p = 512, 0.5
    params = ExpandingParams.from_random_graph(n, p)
    coefficient = branch_bound(params) / n
    good = 0
    rows = []
    for seed in range(5):
        g = gen_gnp(n, p, seed)
        res = grow_tree(g, params)
        cert = centroid_lower_bound(g, res.tree)
        if res.trace.congestion <= coefficient * n and cert.bound >= n / 64:
            good += 1
        rows.append(f"{res.trace.congestion}/{cert.bound}")
    ok = good >= 4
    record(6, ok, f"{good}/5 seeds, C={coefficient:.2f}, congestion/centroid bound per seed {rows}")
    assert ok


def test_criterion_7_lower_bound_construction(record):
    n, m = 256, 32768
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lg, reports = gen_lower_bound_graph(LbConstructionSpec(n, m), 0)
    g = lg.graph
    shape_ok = g.n == 744 and m <= g.m <= 7 * m
    unsound = 0
    cases: dict[int, int] = {}
    least = math.inf
    for seed in range(50):
        t = random_spanning_tree(g, seed)
        try:
            rep = lb_case_analysis(lg, t)
        except StcError:
            unsound += 1
            continue
        if rep.tree_congestion < rep.value:
            unsound += 1
        cases[rep.case] = cases.get(rep.case, 0) + 1
        least = min(least, rep.tree_congestion)
    floor = 0.05 * math.sqrt(m * n)
    ok = shape_ok and unsound == 0 and least >= floor
    record(
        7,
        ok,
        f"N={g.n} M={g.m}, blocks {[r.verification for r in reports]}, cases {cases}, "
        f"min sampled congestion {least} vs {floor:.1f} (sampled trees, not a proof)",
    )
    assert ok


def test_criterion_8_deficient_hall(record):
    rng = random.Random(8)
    bad = 0
    tight = 0
    for _ in range(100):
        nl, nr = rng.randint(1, 8), rng.randint(0, 8)
        left = [("L", i) for i in range(nl)]
        right = [("R", i) for i in range(nr)]
        density = rng.random()
        edges = [(u, v) for u in left for v in right if rng.random() < density]
        nbrs = {u: {v for a, v in edges if a == u} for u in left}
        deficiency = max(
            len(w) - len(set().union(*(nbrs[u] for u in w)))
            for r in range(nl + 1)
            for w in itertools.combinations(left, r)
        )
        t = deficiency + rng.choice([0, 0, 1])
        tight += t == deficiency
        if max_bipartite_matching(left, right, edges).size < nl - t:
            bad += 1
    ok = bad == 0
    record(8, ok, f"100 graphs ({tight} at the exact deficiency), {bad} violations")
    assert ok


SUITE = {
    "cases": [
        {"generator": "gnp", "sizes": [10, 24], "p": 0.6, "seeds": [1, 2], "algorithms": ["bfs", "findlcst", "expander", "partition"], "ell": 3},
        {"generator": "hnm", "sizes": [20], "m": 120, "seeds": [5], "algorithms": ["findlcst", "partition"]},
        {"generator": "lowerbound", "sizes": [32], "m": 512, "seeds": [7], "algorithms": ["bfs", "findlcst"]},
    ]
}


def test_criterion_9_bench_determinism(record, tmp_path, capsys):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps(SUITE))
    codes = [
        main(["bench", str(suite), "--out-dir", str(tmp_path / "a")]),
        main(["bench", str(suite), "--jobs", "2", "--out-dir", str(tmp_path / "b")]),
    ]
    capsys.readouterr()
    files_a = sorted(p.name for p in (tmp_path / "a").iterdir())
    files_b = sorted(p.name for p in (tmp_path / "b").iterdir())
    differing = [f for f in files_a if f not in files_b or (tmp_path / "a" / f).read_bytes() != (tmp_path / "b" / f).read_bytes()]
    kinds = {f.split(".")[-2] for f in files_a}
    ok = codes == [0, 0] and files_a == files_b and not differing and kinds == {"graph", "tree", "partition"}
    record(9, ok, f"{len(files_a)} artifacts, kinds {sorted(kinds)}, differing {differing[:3]}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
