"""Shared fixtures: the five-node figure network and small helpers."""

from __future__ import annotations

from fractions import Fraction

import pytest

from tsmst.model import TemporalEdge, TemporalNetwork, WeightSeries


def series(values, absence=()) -> WeightSeries:
    return WeightSeries.from_values([Fraction(v) for v in values], absence)


def build_network(node_count, horizon, edge_specs, meta=None) -> TemporalNetwork:
    """edge_specs: list of (u, v, values[, absence])."""
    edges = []
    for i, spec in enumerate(edge_specs):
        u, v, values = spec[0], spec[1], spec[2]
        absence = spec[3] if len(spec) > 3 else ()
        edges.append(TemporalEdge(i, u, v, series(values, absence)))
    return TemporalNetwork(node_count, tuple(edges), horizon, meta or {})


# Five nodes, six edges, node 4 hanging off node 2 by the only long edge.
# The weight series reproduce the known cost table: the four trees that
# take turns being optimal cost (8,10,13,5), (11,7,11,6), (13,9,10,6)
# and (10,10,12,5) at the integer instants.
FIGURE_EDGE_SPECS = [
    (0, 1, ["14/9", 1, 2, 1]),
    (0, 2, ["11/9", 4, 3, 1]),
    (1, 2, ["29/9", 4, 2, 1]),
    (1, 3, ["38/9", 1, 1, 2]),
    (2, 3, ["11/9", 2, 3, 1]),
    (2, 4, [4, 3, 5, 2]),
]

FIGURE_TREES = ((0, 1, 4, 5), (0, 3, 4, 5), (0, 2, 3, 5), (0, 2, 4, 5))

FIGURE_COSTS = {
    (0, 1, 4, 5): (8, 10, 13, 5),
    (0, 3, 4, 5): (11, 7, 11, 6),
    (0, 2, 3, 5): (13, 9, 10, 6),
    (0, 2, 4, 5): (10, 10, 12, 5),
}


def build_figure_network() -> TemporalNetwork:
    return build_network(5, 4, FIGURE_EDGE_SPECS)


@pytest.fixture
def figure_net() -> TemporalNetwork:
    """The five-node example network, degeneracies not yet resolved."""
    return build_figure_network()


@pytest.fixture
def triangle_net() -> TemporalNetwork:
    """Three nodes, three edges; edges 0 and 2 swap order at t=2."""
    return build_network(3, 3, [
        (0, 1, [1, 3, 1]),
        (1, 2, [2, 5, 6]),
        (0, 2, [3, 1, 3]),
    ])
