import random

import pytest

from stclab.errors import ConnectivityError, InvalidArgument, PreconditionViolation
from stclab.graph import Graph
from stclab.partition import (
    FULL_K,
    HALF_K,
    ConfigVector,
    PartitionSpec,
    check_configuration,
    compare,
    find_bridges,
    format_spec,
    gl_partition,
    goodness_problems,
    half_k_rank_bound,
    initial_configuration,
    iteration_bound,
    parse_spec,
    partition_problems,
    step_bridging,
    step_good_inc,
)
from support import random_k_connected, random_spec


def test_config_vector_order():
    a = ConfigVector(1, (3, 0, 0))
    b = ConfigVector(2, (5, 0, 0))
    assert compare(a, b) == 1  # fewer light sets wins
    c = ConfigVector(1, (3, 2, 0))
    assert compare(c, a) == 1
    assert compare(c, a, upto=0) == 0
    assert a.to_json(0) == {"iteration": 0, "lightCount": 1, "levelCounts": [3]}


def test_spec_validation():
    g = Graph.complete(4)
    with pytest.raises(InvalidArgument):
        PartitionSpec.build([0, 1], [2, 1], n=4).validate(g)  # wrong sum
    with pytest.raises(InvalidArgument):
        PartitionSpec.build([0, 0], [2, 2], n=4).validate(g)
    with pytest.raises(InvalidArgument):
        PartitionSpec.build([0, 1], [1, 3], [2, 1, 1, 1]).validate(g)  # target below terminal weight
    PartitionSpec.build([0, 1], [2, 2], n=4).validate(g)


def test_spec_text_round_trip():
    spec = PartitionSpec.build([0, 3], [3, 4], [1, 2, 3, 1])
    assert parse_spec(format_spec(spec), 4) == spec
    assert parse_spec("2\n0 1\n2 2\n", 4) == PartitionSpec.build([0, 1], [2, 2], n=4)


def test_path_bipartition():
    g = Graph.cycle(6)
    res = gl_partition(g, PartitionSpec.build([0, 3], [3, 3], n=6))
    assert sorted(map(len, res.partition.parts)) == [3, 3]


def test_cycle_unit_weights_exact_targets():
    g = Graph.cycle(8)
    res = gl_partition(g, PartitionSpec.build([0, 4], [5, 3], n=8))
    assert sorted(map(len, res.partition.parts)) == [3, 5]
    assert res.partition.weights == (5, 3)


def test_low_connectivity_is_rejected():
    with pytest.raises(ConnectivityError):
        gl_partition(Graph.path(5), PartitionSpec.build([0, 2, 4], [2, 1, 2], n=5))


def test_half_k_needs_matching_part_count():
    g = Graph.complete(6)
    with pytest.raises(InvalidArgument):
        gl_partition(g, PartitionSpec.build([0, 1, 2], [2, 2, 2], n=6), variant=HALF_K, connectivity=2)


def test_initial_configuration_is_zero_good():
    rng = random.Random(1)
    g, _ = random_k_connected(rng, 3, 7, 10)
    c = initial_configuration(g, random_spec(rng, g, 3))
    check_configuration(g, c)
    assert not goodness_problems(g, c, 0)


def test_steps_check_preconditions():
    g = Graph.path(4)
    spec = PartitionSpec.build([0, 3], [2, 2], n=4)
    c = initial_configuration(g, spec)
    # both terminals are light and adjacent to unassigned vertices
    assert find_bridges(g, c) == [(1, 0), (2, 3)]
    with pytest.raises(PreconditionViolation):
        step_good_inc(g, c)
    nxt = step_bridging(g, c, (1, 0))
    assert 1 in nxt.sets[0]
    with pytest.raises(InvalidArgument):
        step_bridging(g, nxt, (1, 0))


def _run_instances(seed: int, count: int, variant: str):
    rng = random.Random(seed)
    results = []
    for _ in range(count):
        k = rng.choice([2, 3])
        g, kappa = random_k_connected(rng, 3 if variant == HALF_K else k, 5, 11)
        parts = kappa // 2 + 1 if variant == HALF_K else k
        spec = random_spec(rng, g, parts)
        res = gl_partition(g, spec, variant=variant, connectivity=kappa if variant == HALF_K else None)
        results.append((g, spec, res, kappa))
    return results


def test_random_full_k_instances():
    for g, spec, res, _ in _run_instances(3, 60, FULL_K):
        assert partition_problems(g, spec, res.partition) == []
        assert all(compare(b, a) > 0 for a, b in zip(res.trace, res.trace[1:]))
        assert res.iterations <= iteration_bound(g.n)


def test_random_half_k_instances():
    for g, spec, res, kappa in _run_instances(4, 30, HALF_K):
        assert partition_problems(g, spec, res.partition) == []
        assert res.max_rank <= half_k_rank_bound(g.n, kappa)


def test_validator_catches_bad_partitions():
    from stclab.partition import Partition

    g = Graph.path(4)
    spec = PartitionSpec.build([0, 3], [2, 2], n=4)
    bad = Partition(((0, 2), (1, 3)), (2, 2))
    problems = partition_problems(g, spec, bad)
    assert any("not connected" in p for p in problems)
    heavy = Partition(((0, 1, 2), (3,)), (3, 1))
    assert any("weighs" in p for p in partition_problems(g, spec, heavy))
