"""Recompute-based TSMST solver.

Splits the horizon at every intersection time (and absence boundary),
rebuilds the MST at the midpoint of each resulting interval, and merges
consecutive intervals that carry the same tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .geometry import find_intersections, group_events
from .model import NetworkError, TemporalNetwork, validate
from .static_mst import SpanningTree, UnionFind, kruskal_at

__all__ = ["TimeSubIntervalMST", "TsmstResult", "tso", "tso_incremental_sort"]


@dataclass(frozen=True)
class TimeSubIntervalMST:
    """A maximal interval together with its unique MST.

    Intervals are half-open [start, end); the final interval closes at the
    horizon.  A boundary at which the tree changes belongs to the new
    interval.
    """

    start: Fraction
    end: Fraction
    tree: SpanningTree


@dataclass
class TsmstResult:
    intervals: tuple[TimeSubIntervalMST, ...]
    metadata: dict = field(default_factory=dict)

    def same_partition(self, other: "TsmstResult") -> bool:
        return [
            (i.start, i.end, i.tree.mask) for i in self.intervals
        ] == [(i.start, i.end, i.tree.mask) for i in other.intervals]


def _require_valid(net: TemporalNetwork) -> None:
    report = validate(net)
    if not report.ok:
        raise NetworkError(f"invalid network: {report.summary()}")


def split_times(net: TemporalNetwork, events) -> list[Fraction]:
    """Interior boundary times: event times plus absence endpoints."""
    end = Fraction(net.horizon)
    times = {e.time for e in events}
    for edge in net.edges:
        for a, b in edge.weights.absence:
            times.update((a, b))
    return sorted(t for t in times if 1 < t < end)


def merge_intervals(
    pieces: list[tuple[Fraction, Fraction, SpanningTree]]
) -> tuple[TimeSubIntervalMST, ...]:
    merged: list[TimeSubIntervalMST] = []
    for start, end, tree in pieces:
        if merged and merged[-1].tree.mask == tree.mask:
            last = merged[-1]
            merged[-1] = TimeSubIntervalMST(last.start, end, last.tree)
        else:
            merged.append(TimeSubIntervalMST(start, end, tree))
    return tuple(merged)


def tso(net: TemporalNetwork) -> TsmstResult:
    """TSMST by rebuilding the MST inside every edge-order-interval."""
    _require_valid(net)
    events = find_intersections(net)
    bounds = [Fraction(1), *split_times(net, events), Fraction(net.horizon)]
    pieces = []
    for a, b in zip(bounds, bounds[1:]):
        pieces.append((a, b, kruskal_at(net, (a + b) / 2)))
    return TsmstResult(
        merge_intervals(pieces),
        {
            "algorithm": "tso",
            "event_count": len(events),
            "perturbed": bool(net.meta.get("perturbed", False)),
        },
    )


def _after_key(net: TemporalNetwork, e: int, t: Fraction):
    series = net.edges[e].weights
    return (series.interpolate(t), series.slope_right(t), e)


def tso_incremental_sort(net: TemporalNetwork) -> TsmstResult:
    """TSO variant maintaining one sorted edge order across intervals.

    Only the edges involved in each intersection are re-placed in the
    order; everything else keeps its position.  Produces the identical
    result to :func:`tso`.
    """
    _require_valid(net)
    events = find_intersections(net)
    groups = {g.time: g for g in group_events(events)}
    absence_start: dict[Fraction, list[int]] = {}
    absence_end: dict[Fraction, list[int]] = {}
    for edge in net.edges:
        for a, b in edge.weights.absence:
            absence_start.setdefault(a, []).append(edge.id)
            absence_end.setdefault(b, []).append(edge.id)
    bounds = [Fraction(1), *split_times(net, events), Fraction(net.horizon)]

    first_mid = (bounds[0] + bounds[1]) / 2
    order = sorted(
        net.present_edges(first_mid),
        key=lambda e: (net.edges[e].weights.value_at(first_mid), e),
    )
    pieces = []
    for idx, (a, b) in enumerate(zip(bounds, bounds[1:])):
        if idx > 0:
            t = a
            for e in absence_start.get(t, ()):
                order.remove(e)
            group = groups.get(t)
            if group is not None:
                for event in group.events:
                    members = [e for e in event.edge_ids if e in order]
                    slots = sorted(order.index(e) for e in members)
                    reordered = sorted(
                        members, key=lambda e: _after_key(net, e, t)
                    )
                    for slot, e in zip(slots, reordered):
                        order[slot] = e
            mid = (a + b) / 2
            for e in sorted(absence_end.get(t, ())):
                w = net.edges[e].weights.value_at(mid)
                pos = 0
                while pos < len(order):
                    other = net.edges[order[pos]].weights.value_at(mid)
                    if (other, order[pos]) > (w, e):
                        break
                    pos += 1
                order.insert(pos, e)
        uf = UnionFind(net.node_count)
        mask = 0
        picked = 0
        for e in order:
            edge = net.edges[e]
            if uf.union(edge.u, edge.v):
                mask |= 1 << e
                picked += 1
                if picked == net.node_count - 1:
                    break
        if picked != net.node_count - 1:
            raise NetworkError(f"network disconnected around t={(a + b) / 2}")
        pieces.append((a, b, SpanningTree(mask, net.m)))
    return TsmstResult(
        merge_intervals(pieces),
        {
            "algorithm": "tso",
            "incremental_sort": True,
            "event_count": len(events),
            "perturbed": bool(net.meta.get("perturbed", False)),
        },
    )
