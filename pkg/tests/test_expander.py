import json
import math
from fractions import Fraction

import pytest

from stclab.congestion import congestion
from stclab.constructions import gen_gnp
from stclab.errors import ExpandingPropertyViolation, InvalidArgument
from stclab.expander import (
    ExpandingParams,
    check_expanding,
    grow_tree,
    phase2_round_bound,
    branch_bound,
)
from stclab.graph import Graph, check_spanning


def test_params_from_random_graph():
    p = ExpandingParams.from_random_graph(512, 0.5)
    assert (p.s, p.d1, p.d2, p.d3, p.t) == (2, Fraction(1, 25), 16, 256, 24)
    assert p.delta == Fraction(24 * 25, 512)
    assert p.saturation == max(3, math.ceil(3 * 512 / 25 / 16))
    with pytest.raises(InvalidArgument):
        ExpandingParams.from_random_graph(10, 0)
    with pytest.raises(InvalidArgument):
        ExpandingParams.build(10, 1, 2, 1, 1, 1)


def test_bounds_follow_delta():
    p = ExpandingParams.build(100, 2, Fraction(1, 4), 5, 50, 5)  # delta = 0.2
    base = 1.8
    expected = 50 * (4 * p.saturation * 2 ** (math.log(2) / math.log(base)) + 5)
    assert branch_bound(p) == pytest.approx(expected)
    assert phase2_round_bound(p) == math.ceil(math.log(2) / math.log(base)) + 2
    big = ExpandingParams.build(20, 2, Fraction(1, 25), 1, 14, 20)  # delta = 25
    assert branch_bound(big) == math.inf and phase2_round_bound(big) is None


def test_complete_graph_passes():
    g = Graph.complete(8)
    params = ExpandingParams.build(8, 1, Fraction(1, 2), 2, 7, 0)
    rep = check_expanding(g, params)
    assert rep.passed and rep.first_violation is None
    assert all(c.exhaustive for c in rep.conditions.values())


def test_path_fails_neighbourhood_growth_at_an_endpoint():
    g = Graph.path(8)
    params = ExpandingParams.build(8, 1, Fraction(1, 8), 2, 2, 8)
    rep = check_expanding(g, params)
    name, res = rep.first_violation
    assert name == "2"
    assert res.witness in ([0], [7])
    assert rep.to_json()["firstViolation"]["condition"] == "2"


def test_hall_condition_witness():
    # the star's leaves all share one neighbour outside
    g = Graph.star(7)
    params = ExpandingParams.build(8, 1, Fraction(1, 8), 1, 7, 1)
    rep = check_expanding(g, params)
    res = rep.conditions["3"]
    assert not res.passed
    # the detail names S; the witness is a subset whose outside neighbourhood is too small
    inside = set(json.loads(res.detail.split(":")[0][4:]))
    outside_nbrs = {y for x in res.witness for y in g.adjacency[x] if y not in inside}
    assert set(res.witness) <= inside and len(outside_nbrs) < len(res.witness) - 1


def test_sampled_mode_and_param_mismatch():
    g = gen_gnp(30, 0.7, 1)
    params = ExpandingParams.from_random_graph(30, 0.7)
    rep = check_expanding(g, params, mode="sampled", samples=200, seed=3)
    assert not any(c.exhaustive for c in rep.conditions.values() if c.checked)
    with pytest.raises(InvalidArgument):
        check_expanding(Graph.complete(5), params)


def test_grow_tree_spans_and_reports():
    g = gen_gnp(64, 0.5, 2)
    params = ExpandingParams.from_random_graph(64, 0.5)
    res = grow_tree(g, params)
    check_spanning(g, res.tree)
    assert res.trace.congestion == congestion(g, res.tree).max
    assert max(res.trace.branch_sizes_after_phase1) <= params.saturation
    assert sum(res.trace.branch_sizes_final) == g.n - 1
    assert set(res.trace.to_json()) >= {"phase1Rounds", "phase2Rounds", "branchBound"}


def test_gate_rejects_non_expanding_input():
    g = Graph.path(8)
    with pytest.raises(ExpandingPropertyViolation):
        grow_tree(g, ExpandingParams.build(8, 1, Fraction(1, 8), 2, 2, 8), gate=True)


def test_grow_tree_large_random_graph():
    g = gen_gnp(512, 0.5, 0)
    params = ExpandingParams.from_random_graph(512, 0.5)
    res = grow_tree(g, params)
    assert res.trace.congestion <= branch_bound(params)
