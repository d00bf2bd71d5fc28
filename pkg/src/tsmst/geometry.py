"""Intersections of edge weight functions and the derived interval structure.

Every pair of edge weight functions can cross (or touch) at most once per
linear piece, so the full set of intersection points is found by walking
pairs of segments.  Consecutive intersection times partition the horizon
into intervals on which the total order of edge weights is fixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import groupby
from math import gcd

import numpy as np

from .model import TemporalNetwork

__all__ = [
    "IntersectionEvent",
    "EventGroup",
    "EdgeOrderInterval",
    "find_intersections",
    "build_intervals",
    "group_events",
    "order_around",
]


@dataclass(frozen=True, slots=True)
class IntersectionEvent:
    """A (time, value) point shared by two or more edge weight functions."""

    time: Fraction
    value: Fraction
    edge_ids: frozenset[int]


@dataclass(frozen=True, slots=True)
class EventGroup:
    """All intersection events with the same time coordinate."""

    time: Fraction
    events: tuple[IntersectionEvent, ...]


@dataclass(frozen=True)
class EdgeOrderInterval:
    start: Fraction
    end: Fraction


def _sort_key(event: IntersectionEvent):
    # Float prefix makes the exact Fraction comparison a rare tie-break.
    return (float(event.time), event.time, float(event.value), event.value)


def _fast_pairs(net: TemporalNetwork) -> dict[tuple[Fraction, Fraction], set[int]]:
    """Integer-grid crossing enumeration via numpy sign tests.

    Points are merged under normalised integer (time, value) keys; plain
    int tuples hash an order of magnitude faster than Fractions, which
    matters at millions of crossings.
    """
    cache = net.cache()
    values = np.array(cache.int_values, dtype=np.int64)
    scale = cache.scale
    merged: dict[tuple[int, int, int, int], set[int]] = {}
    m = net.m
    iu, ju = np.triu_indices(m, k=1)
    for k in range(net.horizon - 1):
        a = values[:, k]
        b = values[:, k + 1]
        d0 = a[:, None] - a[None, :]
        d1 = b[:, None] - b[None, :]
        cross = (d0 * d1 <= 0) & ((d0 != 0) | (d1 != 0))
        hits = np.nonzero(cross[iu, ju])[0]
        if hits.size == 0:
            continue
        t0 = k + 1
        ai = a.tolist()
        bi = b.tolist()
        for h in hits.tolist():
            i = int(iu[h])
            j = int(ju[h])
            num = ai[i] - ai[j]
            den = num - (bi[i] - bi[j])
            if den < 0:
                num, den = -num, -den
            tn = t0 * den + num
            g = gcd(tn, den)
            vn = ai[i] * den + (bi[i] - ai[i]) * num
            vd = den * scale
            g2 = gcd(vn, vd)
            key = (tn // g, den // g, vn // g2, vd // g2)
            merged.setdefault(key, set()).update((i, j))
    return {
        (Fraction(tn, td), Fraction(vn, vd)): ids
        for (tn, td, vn, vd), ids in merged.items()
    }


def _generic_pairs(net: TemporalNetwork) -> dict[tuple[Fraction, Fraction], set[int]]:
    merged: dict[tuple[Fraction, Fraction], set[int]] = {}
    m = net.m
    for i in range(m):
        si = net.edges[i].weights
        for j in range(i + 1, m):
            sj = net.edges[j].weights
            cuts = sorted(
                {t for t, _ in si.samples}
                | {t for t, _ in sj.samples}
                | {x for gap in si.absence for x in gap}
                | {x for gap in sj.absence for x in gap}
            )
            for t0, t1 in zip(cuts, cuts[1:]):
                mid = (t0 + t1) / 2
                if si.is_absent(mid) or sj.is_absent(mid):
                    continue
                d0 = si.interpolate(t0) - sj.interpolate(t0)
                d1 = si.interpolate(t1) - sj.interpolate(t1)
                if d0 == 0 and d1 == 0:
                    continue  # coincident piece; excluded by validation
                if d0 * d1 > 0:
                    continue
                t = t0 + (t1 - t0) * d0 / (d0 - d1)
                if si.is_absent(t) or sj.is_absent(t):
                    continue
                v = si.interpolate(t)
                merged.setdefault((t, v), set()).update((i, j))
    return merged


def find_intersections(net: TemporalNetwork) -> list[IntersectionEvent]:
    """All pairwise crossing/touching points, merged by (time, value).

    Points falling inside an absence interval of a participating edge are
    suppressed.  Output is sorted by time, then value.
    """
    cache = net.cache()
    if cache.int_values is not None and not cache.has_absence:
        merged = _fast_pairs(net)
    else:
        merged = _generic_pairs(net)
    events = [
        IntersectionEvent(t, v, frozenset(ids)) for (t, v), ids in merged.items()
    ]
    events.sort(key=_sort_key)
    return events


def build_intervals(
    events: list[IntersectionEvent], horizon: int
) -> list[EdgeOrderInterval]:
    """Consecutive event times, bracketed by the horizon endpoints."""
    end = Fraction(horizon)
    times = sorted({e.time for e in events if 1 < e.time < end})
    bounds = [Fraction(1), *times, end]
    return [EdgeOrderInterval(a, b) for a, b in zip(bounds, bounds[1:])]


def group_events(events: list[IntersectionEvent]) -> list[EventGroup]:
    """Partition a time-sorted event list into per-time groups."""
    return [
        EventGroup(t, tuple(members))
        for t, members in groupby(events, key=lambda e: e.time)
    ]


def order_around(
    net: TemporalNetwork, edge_ids, t: Fraction
) -> tuple[list[int], list[int]]:
    """Decreasing weight order of the given edges just before and just after t.

    Uses one-sided slopes instead of sampling at an offset, so the answer
    is exact however close the neighbouring events are.
    """
    keys = {}
    for e in sorted(edge_ids):
        series = net.edges[e].weights
        keys[e] = (series.value_at(t), series.slope_left(t), series.slope_right(t))
    before = sorted(keys, key=lambda e: (-keys[e][0], keys[e][1], e))
    after = sorted(keys, key=lambda e: (-keys[e][0], -keys[e][2], e))
    return before, after
