import random

import pytest

from stclab.errors import DisconnectedInput, InvalidArgument
from stclab.graph import Graph, RootedTree, bfs_tree, check_spanning, format_graph, parse_graph, parse_tree, format_tree
from support import random_connected_graph


def test_from_edges_rejects_bad_input():
    with pytest.raises(InvalidArgument):
        Graph.from_edges(3, [(0, 0)])
    with pytest.raises(InvalidArgument):
        Graph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(InvalidArgument):
        Graph.from_edges(3, [(0, 3)])
    with pytest.raises(InvalidArgument):
        Graph.from_edges(-1, [])


def test_format_is_sorted_and_round_trips():
    g = Graph.from_edges(4, [(3, 2), (1, 0), (2, 0)])
    assert format_graph(g) == "4 3\n0 1\n0 2\n2 3\n"
    assert parse_graph(format_graph(g)) == g


def test_parse_ignores_comments_and_block_lines():
    text = "# header\n3 2\n0 1 # first\n1 2\nb 0 1\n"
    g = parse_graph(text)
    assert g.edges == ((0, 1), (1, 2))


@pytest.mark.parametrize("text", ["", "3\n", "3 2\n0 1\n", "2 1\n0 x\n"])
def test_parse_rejects_malformed(text):
    with pytest.raises(InvalidArgument):
        parse_graph(text)


def test_random_round_trip():
    rng = random.Random(5)
    for _ in range(50):
        g = random_connected_graph(rng, rng.randint(1, 15))
        assert parse_graph(format_graph(g)) == g
        t = bfs_tree(g)
        assert parse_tree(format_tree(t)).tree_edges == t.tree_edges


def test_tree_structure():
    t = RootedTree.from_edges(5, [(0, 1), (1, 2), (1, 3), (3, 4)])
    assert t.parent == (-1, 0, 1, 1, 3)
    assert t.subtree_size[1] == 4
    assert sorted(t.subtree(3)) == [3, 4]
    assert t.path(2, 4) == [(1, 2), (1, 3), (3, 4)]
    assert t.child_side((1, 3)) == 3


def test_tree_rejects_non_trees():
    with pytest.raises(InvalidArgument):
        RootedTree.from_edges(4, [(0, 1), (1, 2)])
    with pytest.raises(InvalidArgument):
        RootedTree.from_edges(4, [(0, 1), (1, 2), (0, 2)])


def test_check_spanning_rejects_non_graph_edge():
    g = Graph.path(3)
    with pytest.raises(InvalidArgument):
        check_spanning(g, RootedTree.from_edges(3, [(0, 2), (0, 1)]))


def test_bfs_tree_reports_component():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(DisconnectedInput) as info:
        bfs_tree(g)
    assert sorted(info.value.component) == [0, 1]


def test_components_and_cut():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (3, 4)])
    assert sorted(map(sorted, g.components())) == [[0, 1, 2], [3, 4]]
    assert g.cut_size([1]) == 2
    sub, old = g.induced([2, 1, 4])
    assert old == [1, 2, 4] and sub.edges == ((0, 1),)
