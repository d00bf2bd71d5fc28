"""Minimum spanning trees of networks whose edge weights change over time.

Edge weights are piecewise-linear functions sampled at integer instants;
the horizon [1, K] splits into maximal sub-intervals each carrying one
minimum spanning tree.  Two solvers compute that partition: :func:`tso`
rebuilds the tree inside every edge-order interval, :func:`eio` builds it
once and patches it at the few intersection events that matter.
"""

from .eio import eio
from .geometry import (
    EdgeOrderInterval,
    EventGroup,
    IntersectionEvent,
    build_intervals,
    find_intersections,
    group_events,
    order_around,
)
from .harness import GenSpec, OracleReport, bench, gen_random, gen_trajectory, oracle_enumerate, verify
from .model import (
    AbsentEdgeError,
    NetworkError,
    TemporalEdge,
    TemporalNetwork,
    ValidationReport,
    WeightSeries,
    parse_network,
    perturb_degenerate,
    serialize_network,
    validate,
    weight_at,
)
from .static_mst import (
    SpanningTree,
    biconnected_components,
    fundamental_cycle,
    kruskal_at,
    modified_reverse_delete,
    total_cost,
)
from .tso import TimeSubIntervalMST, TsmstResult, tso, tso_incremental_sort

__version__ = "0.1.0"

__all__ = [
    "AbsentEdgeError",
    "EdgeOrderInterval",
    "EventGroup",
    "GenSpec",
    "IntersectionEvent",
    "NetworkError",
    "OracleReport",
    "SpanningTree",
    "TemporalEdge",
    "TemporalNetwork",
    "TimeSubIntervalMST",
    "TsmstResult",
    "ValidationReport",
    "WeightSeries",
    "bench",
    "biconnected_components",
    "build_intervals",
    "eio",
    "find_intersections",
    "fundamental_cycle",
    "gen_random",
    "gen_trajectory",
    "group_events",
    "kruskal_at",
    "modified_reverse_delete",
    "oracle_enumerate",
    "order_around",
    "parse_network",
    "perturb_degenerate",
    "serialize_network",
    "total_cost",
    "tso",
    "tso_incremental_sort",
    "validate",
    "verify",
    "weight_at",
]
