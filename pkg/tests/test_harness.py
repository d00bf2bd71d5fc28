"""Generators, enumeration oracle, verifier and benchmark runner."""

import random
from fractions import Fraction

import pytest

from tsmst.harness import (
    BENCH_FIELDS,
    GenSpec,
    bench,
    gen_random,
    gen_trajectory,
    oracle_enumerate,
    verify,
)
from tsmst.model import NetworkError, validate
from tsmst.static_mst import kruskal_at, total_cost
from tsmst.tso import TimeSubIntervalMST, TsmstResult, tso

from conftest import build_figure_network


class TestGenRandom:
    def test_deterministic(self):
        spec = GenSpec(8, 14, 5, seed=3)
        a = gen_random(spec)
        b = gen_random(spec)
        assert [e.weights.samples for e in a.edges] == [
            e.weights.samples for e in b.edges]

    def test_shape_and_validity(self):
        net = gen_random(GenSpec(9, 16, 6, seed=1))
        assert net.node_count == 9 and net.m == 16 and net.horizon == 6
        assert validate(net).ok

    def test_seed_changes_output(self):
        a = gen_random(GenSpec(8, 14, 5, seed=3))
        b = gen_random(GenSpec(8, 14, 5, seed=4))
        assert [e.weights.samples for e in a.edges] != [
            e.weights.samples for e in b.edges]

    def test_weight_range_respected(self):
        net = gen_random(GenSpec(6, 8, 4, seed=0, weight_range=(5, 9)))
        for e in net.edges:
            for _, v in e.weights.samples:
                # perturbation may lower a value slightly below the range
                assert Fraction(4) < v <= 9

    def test_absences_land_inside_horizon(self):
        net = gen_random(GenSpec(10, 25, 8, seed=5, absence_count=4))
        assert net.absence_interval_count > 0
        for e in net.edges:
            for a, b in e.weights.absence:
                assert 1 < a < b < 8
        assert validate(net).ok

    def test_rejects_impossible_edge_count(self):
        with pytest.raises(NetworkError):
            gen_random(GenSpec(4, 10, 3, seed=0))


class TestGenTrajectory:
    POSITIONS = [[(0, 0)] * 3, [(4, 0)] * 3, [(4, 3)] * 3,
                 [(8, 2)] * 3, [(1, 6)] * 3]

    def test_static_positions_give_expected_topology(self):
        net = gen_trajectory(self.POSITIONS, radius=5)
        links = {(e.u, e.v) for e in net.edges}
        assert links == {(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 4)}
        weights = {(e.u, e.v): e.weights.value_at(Fraction(1)) for e in net.edges}
        assert weights[(0, 1)] == 16 and weights[(1, 2)] == 9
        assert weights[(2, 4)] == 18

    def test_moving_node_changes_weight(self):
        positions = [[(0, 0), (0, 0)], [(1, 0), (3, 0)], [(1, 1), (1, 1)]]
        net = gen_trajectory(positions, radius=4)
        edge = next(e for e in net.edges if (e.u, e.v) == (0, 1))
        assert edge.weights.value_at(Fraction(1)) == 1
        assert edge.weights.value_at(Fraction(2)) == 9

    def test_out_of_range_segment_becomes_absence(self):
        # node 1 spends the whole middle segment beyond the radius but
        # stays reachable through node 2
        positions = [[(0, 0), (0, 0), (0, 0), (0, 0)],
                     [(1, 0), (8, 0), (8, 0), (1, 0)],
                     [(4, 0), (4, 0), (4, 0), (4, 0)]]
        net = gen_trajectory(positions, radius=5)
        edge = next(e for e in net.edges if (e.u, e.v) == (0, 1))
        assert edge.weights.absence == ((Fraction(2), Fraction(3)),)

    def test_disconnection_rejected(self):
        positions = [[(0, 0), (0, 0)], [(50, 0), (50, 0)], [(0, 1), (0, 1)]]
        with pytest.raises(NetworkError):
            gen_trajectory(positions, radius=3)


class TestOracle:
    def test_triangle_minimum(self):
        net = build_figure_network()
        samples = oracle_enumerate(net, [Fraction(2)])
        assert samples[0].min_cost == 7
        tree_mask = sum(1 << e for e in (0, 3, 4, 5))
        assert tree_mask in samples[0].optimal_masks

    def test_counts_spanning_trees_of_figure(self):
        # contract/delete enumeration agrees with the known tree count
        net = build_figure_network()
        samples = oracle_enumerate(net, [Fraction(1)])
        assert samples[0].strict
        assert samples[0].min_cost == 8

    def test_node_limit(self):
        net = gen_random(GenSpec(12, 14, 3, seed=0))
        with pytest.raises(NetworkError):
            oracle_enumerate(net, [Fraction(2)])

    def test_matches_kruskal_on_random_networks(self):
        rng = random.Random(77)
        for seed in range(10):
            n = rng.randint(3, 6)
            m = rng.randint(n - 1, n * (n - 1) // 2)
            net = gen_random(GenSpec(n, m, 4, seed=seed, weight_range=(1, 25)))
            for t in (Fraction(3, 2), Fraction(11, 4)):
                sample = oracle_enumerate(net, [t])[0]
                tree = kruskal_at(net, t)
                assert tree.mask in sample.optimal_masks
                assert total_cost(net, tree, t) == sample.min_cost


class TestVerify:
    def test_accepts_correct_result(self):
        net = gen_random(GenSpec(6, 10, 5, seed=9))
        report = verify(net, tso(net))
        assert report.match and report.first_divergence is None
        assert report.samples_checked > 0

    def test_rejects_corrupted_tree(self):
        net = gen_random(GenSpec(6, 10, 5, seed=9))
        result = tso(net)
        bad = list(result.intervals)
        item = bad[0]
        wrong = kruskal_at(net, (item.start + item.end) / 2)
        mask = wrong.mask
        # swap the lowest tree edge for the lowest non-tree edge
        out = next(e for e in range(net.m) if mask >> e & 1)
        inn = next(e for e in range(net.m) if not mask >> e & 1)
        corrupted = type(wrong)(mask ^ (1 << out) ^ (1 << inn), net.m)
        bad[0] = TimeSubIntervalMST(item.start, item.end, corrupted)
        report = verify(net, TsmstResult(tuple(bad), dict(result.metadata)))
        assert not report.match
        assert report.first_divergence is not None

    def test_rejects_broken_partition(self):
        net = gen_random(GenSpec(6, 10, 5, seed=9))
        result = tso(net)
        report = verify(net, TsmstResult(result.intervals[1:], {}))
        assert not report.match


def test_bench_rows():
    rows = bench([GenSpec(6, 9, 4, seed=2)], ["tso", "eio"])
    assert len(rows) == 2
    assert [row["algo"] for row in rows] == ["tso", "eio"]
    for row in rows:
        assert set(row) == set(BENCH_FIELDS)
        assert row["wall_time"] > 0
        assert row["nodes"] == 6 and row["edges"] == 9
    assert rows[0]["intervals"] == rows[1]["intervals"]
