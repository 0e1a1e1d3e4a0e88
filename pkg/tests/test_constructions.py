import random
import warnings

import pytest

from stclab.congestion import congestion
from stclab.constructions import (
    LbConstructionSpec,
    centroid_lower_bound,
    format_labeled_graph,
    gen_gnp,
    gen_hnm,
    gen_lower_bound_graph,
    lb_case_analysis,
    parse_labeled_graph,
    random_spanning_tree,
)
from stclab.errors import GenerationFailure, InvalidArgument
from stclab.graph import Graph, bfs_tree, check_spanning, parse_graph
from support import brute_cut, random_connected_graph


def test_gnp_extremes_and_determinism():
    assert gen_gnp(10, 0, 1).m == 0
    assert gen_gnp(10, 1, 1) == Graph.complete(10)
    assert gen_gnp(40, 0.3, 7) == gen_gnp(40, 0.3, 7)
    assert gen_gnp(40, 0.3, 7) != gen_gnp(40, 0.3, 8)
    with pytest.raises(InvalidArgument):
        gen_gnp(5, 1.5, 0)


def test_hnm_small_is_exhaustively_certified():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        g, rep = gen_hnm(20, 120, 3)
    assert rep.verification == "exhaustive" and rep.certified
    assert g.is_connected() and 60 <= g.m <= 240
    rate = 120 / 40
    rng = random.Random(0)
    for _ in range(300):
        side = rng.sample(range(20), rng.randint(1, 10))
        assert brute_cut(g, side) >= rate * len(side)


def test_hnm_reports_failure():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(GenerationFailure):
            gen_hnm(20, 2, 0, retries=3)


def test_lower_bound_spec_arithmetic():
    spec = LbConstructionSpec(256, 32768)
    assert spec.overlap == 12
    assert spec.total_vertices == 744
    b1, b2, b3 = spec.blocks()
    assert len(set(b1) & set(b2)) == 12 and len(set(b2) & set(b3)) == 12 and not set(b1) & set(b3)
    with pytest.raises(InvalidArgument):
        LbConstructionSpec(4, 10**4).check()


def test_small_lower_bound_graph_round_trip():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lg, reports = gen_lower_bound_graph(LbConstructionSpec(32, 512), 1)
    assert lg.graph.n == 3 * 32 - 2 * 4
    assert len(reports) == 3
    text = format_labeled_graph(lg)
    assert parse_labeled_graph(text) == lg
    assert parse_graph(text) == lg.graph
    # every overlap vertex is joined to both of its blocks
    for v in range(lg.graph.n):
        if bin(lg.labels[v]).count("1") == 2:
            reach = [w for w in range(lg.graph.n) if lg.labels[w] & lg.labels[v] and w != v]
            assert all(lg.graph.has_edge(v, w) for w in reach)


def test_parse_labeled_graph_needs_labels():
    with pytest.raises(InvalidArgument):
        parse_labeled_graph("2 1\n0 1\n")


def test_random_spanning_tree_is_seeded():
    g = gen_gnp(30, 0.4, 1)
    a = random_spanning_tree(g, 5)
    assert a.tree_edges == random_spanning_tree(g, 5).tree_edges
    check_spanning(g, a)


def test_centroid_certificate_is_sound():
    rng = random.Random(9)
    for _ in range(100):
        g = random_connected_graph(rng, rng.randint(2, 25))
        t = random_spanning_tree(g, rng.randrange(1000))
        cert = centroid_lower_bound(g, t)
        assert 4 * len(cert.piece) >= g.n or g.n <= 1
        assert cert.cut_size == brute_cut(g, cert.piece)
        assert congestion(g, t).max >= cert.bound


def test_case_analysis_on_small_graph():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lg, _ = gen_lower_bound_graph(LbConstructionSpec(32, 512), 2)
    seen = set()
    for seed in range(30):
        t = random_spanning_tree(lg.graph, seed)
        rep = lb_case_analysis(lg, t)
        assert rep.tree_congestion == congestion(lg.graph, t).max >= rep.value
        seen.add(rep.case)
    rep = lb_case_analysis(lg, bfs_tree(lg.graph, 40))
    assert rep.to_json()["case"] in (1, 2, 3)
    assert seen
