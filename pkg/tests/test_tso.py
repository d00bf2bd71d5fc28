"""The recompute-per-interval solver."""

import random
from fractions import Fraction

import pytest

from tsmst.harness import GenSpec, gen_random
from tsmst.model import NetworkError, perturb_degenerate
from tsmst.static_mst import SpanningTree, kruskal_at, total_cost
from tsmst.tso import merge_intervals, split_times, tso, tso_incremental_sort
from tsmst.geometry import find_intersections

from conftest import FIGURE_COSTS, FIGURE_TREES, build_figure_network, build_network


@pytest.fixture(scope="module")
def figure_result():
    net = perturb_degenerate(build_figure_network())
    return net, tso(net)


def test_figure_has_four_subintervals(figure_result):
    net, result = figure_result
    assert len(result.intervals) == 4
    assert tuple(tuple(i.tree.edge_ids()) for i in result.intervals) == FIGURE_TREES


def test_figure_boundaries(figure_result):
    _, result = figure_result
    starts = [i.start for i in result.intervals]
    assert starts[0] == 1
    assert starts[1] == Fraction(3, 2)
    assert starts[2] == Fraction(8, 3)
    # the third boundary sits at the perturbed crossing just below 11/3
    assert abs(starts[3] - Fraction(11, 3)) < Fraction(1, 100)
    assert result.intervals[-1].end == 4


def test_figure_cost_table(figure_result):
    # each tree's total cost at the integer instants, on the original
    # (unperturbed) series
    original = build_figure_network()
    for tree_edges, costs in FIGURE_COSTS.items():
        mask = sum(1 << e for e in tree_edges)
        tree = SpanningTree(mask, original.m)
        assert tuple(
            total_cost(original, tree, Fraction(t)) for t in range(1, 5)
        ) == costs


def test_partition_invariants(figure_result):
    net, result = figure_result
    assert result.intervals[0].start == 1
    assert result.intervals[-1].end == net.horizon
    for a, b in zip(result.intervals, result.intervals[1:]):
        assert a.end == b.start
        assert a.tree.mask != b.tree.mask
    for item in result.intervals:
        assert item.tree.edge_count == net.node_count - 1


def test_tree_optimal_at_interval_midpoints(figure_result):
    net, result = figure_result
    for item in result.intervals:
        mid = (item.start + item.end) / 2
        assert item.tree.mask == kruskal_at(net, mid).mask


def test_metadata(figure_result):
    _, result = figure_result
    assert result.metadata["algorithm"] == "tso"
    assert result.metadata["perturbed"] is True
    assert result.metadata["event_count"] > 0


def test_rejects_degenerate_network():
    with pytest.raises(NetworkError):
        tso(build_figure_network())


def test_split_times_interior_only():
    net = build_network(3, 3, [
        (0, 1, [1, 3, 5]),
        (1, 2, [4, 3, 2]),
    ])
    assert split_times(net, find_intersections(net)) == [Fraction(2)]


def test_merge_intervals_collapses_equal_trees():
    t1 = SpanningTree(0b01, 2)
    t2 = SpanningTree(0b10, 2)
    pieces = [
        (Fraction(1), Fraction(2), t1),
        (Fraction(2), Fraction(3), t1),
        (Fraction(3), Fraction(4), t2),
    ]
    merged = merge_intervals(pieces)
    assert [(i.start, i.end, i.tree.mask) for i in merged] == [
        (Fraction(1), Fraction(3), 0b01),
        (Fraction(3), Fraction(4), 0b10),
    ]


def test_single_interval_network():
    net = build_network(3, 3, [
        (0, 1, [1, 1, 1]),
        (1, 2, [2, 2, 2]),
        (0, 2, [3, 3, 3]),
    ])
    result = tso(net)
    assert len(result.intervals) == 1
    assert result.intervals[0].tree.edge_ids() == [0, 1]


def test_incremental_sort_variant_matches(figure_result):
    net, result = figure_result
    assert tso_incremental_sort(net).same_partition(result)


def test_incremental_sort_on_random_networks():
    rng = random.Random(17)
    for seed in range(15):
        n = rng.randint(4, 12)
        m = rng.randint(n - 1, min(2 * n, n * (n - 1) // 2))
        ab = rng.randint(0, 1)
        net = gen_random(GenSpec(n, m, 5, seed=seed, weight_range=(1, 40),
                                 absence_count=ab))
        assert tso_incremental_sort(net).same_partition(tso(net))
