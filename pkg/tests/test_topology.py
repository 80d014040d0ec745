import itertools

import pytest

from ghznetsim import topology
from ghznetsim.topology import NetworkGraph, TopologyError, UserSet, make_grid


def test_grid_counts_table_defaults():
    g = make_grid(6, 0.1, 0.987)
    assert g.n_nodes == 36
    assert g.n_edges == 60


def test_grid_counts_smallest():
    g = make_grid(2, 0.5, 0.9)
    assert g.n_nodes == 4
    assert g.n_edges == 4


def test_grid_counts_m4():
    g = make_grid(4, 0.5, 0.9)
    assert g.n_nodes == 16
    assert g.n_edges == 24


@pytest.mark.parametrize("m", range(2, 13))
def test_grid_closed_forms(m):
    g = make_grid(m, 0.3, 0.9)
    assert g.n_nodes == m * m
    assert g.n_edges == 2 * m * (m - 1)
    assert g.is_connected()


def test_grid_rejects_m1():
    with pytest.raises(TopologyError):
        make_grid(1, 0.5, 0.9)


def test_graph_validation():
    with pytest.raises(TopologyError):
        NetworkGraph(3, [(0, 0, 0.5, 0.9)])
    with pytest.raises(TopologyError):
        NetworkGraph(3, [(0, 1, 0.5, 0.9), (1, 0, 0.5, 0.9)])
    with pytest.raises(TopologyError):
        NetworkGraph(3, [(0, 1, 1.5, 0.9)])
    with pytest.raises(TopologyError):
        NetworkGraph(3, [(0, 1, 0.5, -0.1)])
    with pytest.raises(TopologyError):
        NetworkGraph(2, [(0, 5, 0.5, 0.9)])


def test_json_round_trip():
    g = make_grid(3, 0.25, 0.95)
    g2 = NetworkGraph.from_json(g.to_json())
    assert g2.n_nodes == g.n_nodes
    assert g2.edges == g.edges
    assert g2.gen_prob == g.gen_prob
    assert g2.w0 == g.w0


def test_user_set_validation():
    g = make_grid(3, 0.5, 0.9)
    with pytest.raises(TopologyError):
        UserSet([4], g)
    with pytest.raises(TopologyError):
        UserSet([1, 1], g)
    with pytest.raises(TopologyError):
        UserSet([0, 99], g)
    assert list(UserSet([3, 1], g)) == [3, 1]


def test_steiner_distance_corners():
    for m in (2, 3, 4, 6):
        g = make_grid(m, 0.5, 0.9)
        corners = [0, m - 1, m * (m - 1), m * m - 1]
        assert topology.steiner_distance(g, corners) == 3 * (m - 1)


def test_steiner_distance_adjacent_pair():
    g = make_grid(3, 0.5, 0.9)
    assert topology.steiner_distance(g, [0, 1]) == 1


def test_steiner_distance_4x4_corners_vs_enumeration():
    from ghznetsim.validation import brute_force_steiner_product

    # exact edge count is recovered from the brute-force max product at
    # uniform edge value v: product = v**n_edges
    g = make_grid(3, 0.5, 0.9)
    users = [0, 2, 6, 8]
    values = {e: 0.5 for e in g.edges}
    best = brute_force_steiner_product(g.edges, values, users)
    import math

    n_edges = round(math.log(best) / math.log(0.5))
    assert topology.steiner_distance(g, users) == n_edges == 6


def test_steiner_distance_permutation_invariant():
    g = make_grid(4, 0.5, 0.9)
    users = (0, 5, 10, 15)
    base = topology.steiner_distance(g, users)
    for perm in itertools.permutations(users):
        assert topology.steiner_distance(g, perm) == base


def test_centroid_3x3_corners_is_center():
    g = make_grid(3, 0.5, 0.9)
    assert topology.centroid_node(g, [0, 2, 6, 8]) == 4


def test_centroid_single_node():
    g = make_grid(3, 0.5, 0.9)
    assert topology.centroid_node(g, [5]) == 5


def test_centroid_adjacent_pair_tie_breaks_low_id():
    g = make_grid(3, 0.5, 0.9)
    assert topology.centroid_node(g, [0, 1]) == 0
    assert topology.centroid_node(g, [1, 0]) == 0


def test_centroid_order_invariant():
    g = make_grid(4, 0.5, 0.9)
    users = (1, 7, 8, 14)
    base = topology.centroid_node(g, users)
    for perm in itertools.permutations(users):
        assert topology.centroid_node(g, perm) == base


def test_centroid_exclude():
    g = make_grid(3, 0.5, 0.9)
    c = topology.centroid_node(g, [0, 2, 6, 8], exclude=[4])
    assert c != 4
