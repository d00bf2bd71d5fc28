"""Time-aggregated graph model.

An undirected network whose edges carry piecewise-linear weight functions
over a shared time horizon [1, K].  All times and weights are exact
rationals so that comparisons, intersections, and tie-breaking are
deterministic and platform independent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

__all__ = [
    "NetworkError",
    "AbsentEdgeError",
    "WeightSeries",
    "TemporalEdge",
    "TemporalNetwork",
    "ValidationReport",
    "weight_at",
    "validate",
    "perturb_degenerate",
    "expand_absence",
    "parse_network",
    "serialize_network",
    "fraction_str",
    "ABSENCE_MARGIN",
]

# Margin used when expanding a weight series around an absence interval.
ABSENCE_MARGIN = Fraction(1, 1000)


class NetworkError(ValueError):
    """Malformed network, or a query outside the model's domain."""


class AbsentEdgeError(NetworkError):
    """Weight query at a time where the edge does not exist."""


def as_fraction(x: object) -> Fraction:
    """Convert ints, decimal strings ("2.5") or fraction strings ("14/9")."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise NetworkError(f"cannot parse {x!r} as an exact number") from exc
    raise NetworkError(f"cannot interpret {x!r} as an exact number")


def fraction_str(x: Fraction) -> str:
    """Exact text form: a decimal string when the denominator allows, else p/q."""
    den = x.denominator
    twos = fives = 0
    d = den
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    if den == 1:
        return str(x.numerator)
    shift = max(twos, fives)
    scaled = x.numerator * 10**shift // den
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(shift + 1, "0")
    return f"{sign}{digits[:-shift]}.{digits[-shift:]}"


@dataclass(frozen=True)
class WeightSeries:
    """Piecewise-linear weight function given by (instant, value) samples.

    Instants are strictly increasing; the function interpolates linearly
    between consecutive samples.  ``absence`` lists disjoint closed time
    intervals during which the edge does not exist.
    """

    samples: tuple[tuple[Fraction, Fraction], ...]
    absence: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self) -> None:
        if len(self.samples) < 2:
            raise NetworkError("a weight series needs at least two samples")
        instants = [t for t, _ in self.samples]
        if any(b <= a for a, b in zip(instants, instants[1:])):
            raise NetworkError("sample instants must be strictly increasing")
        prev_end = None
        for a, b in self.absence:
            if a > b:
                raise NetworkError(f"absence interval [{a}, {b}] is reversed")
            if a < self.start or b > self.end:
                raise NetworkError("absence interval outside the time horizon")
            if prev_end is not None and a <= prev_end:
                raise NetworkError("absence intervals must be disjoint and sorted")
            prev_end = b

    @property
    def start(self) -> Fraction:
        return self.samples[0][0]

    @property
    def end(self) -> Fraction:
        return self.samples[-1][0]

    @classmethod
    def from_values(
        cls,
        values: Sequence[object],
        absence: Iterable[tuple[object, object]] = (),
    ) -> "WeightSeries":
        """Series sampled at the integer instants 1..len(values)."""
        samples = tuple(
            (Fraction(i + 1), as_fraction(v)) for i, v in enumerate(values)
        )
        gaps = tuple((as_fraction(a), as_fraction(b)) for a, b in absence)
        return cls(samples, gaps)

    def is_absent(self, t: Fraction) -> bool:
        return any(a <= t <= b for a, b in self.absence)

    def _segment(self, t: Fraction) -> int:
        """Index i with samples[i].instant <= t <= samples[i+1].instant."""
        if t < self.start or t > self.end:
            raise NetworkError(f"time {t} outside horizon [{self.start}, {self.end}]")
        lo, hi = 0, len(self.samples) - 2
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.samples[mid][0] <= t:
                lo = mid
            else:
                hi = mid - 1
        return lo

    def interpolate(self, t: Fraction) -> Fraction:
        """Linear interpolation from the samples, ignoring absence."""
        i = self._segment(t)
        (t0, v0), (t1, v1) = self.samples[i], self.samples[i + 1]
        if t == t0:
            return v0
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0)

    def value_at(self, t: Fraction) -> Fraction:
        if self.is_absent(t):
            raise AbsentEdgeError(f"edge absent at time {t}")
        return self.interpolate(t)

    def _slope(self, i: int) -> Fraction:
        (t0, v0), (t1, v1) = self.samples[i], self.samples[i + 1]
        return (v1 - v0) / (t1 - t0)

    def slope_right(self, t: Fraction) -> Fraction:
        """Slope on the segment immediately to the right of t (left of t=end)."""
        if t == self.end:
            return self._slope(len(self.samples) - 2)
        return self._slope(self._segment(t))

    def slope_left(self, t: Fraction) -> Fraction:
        if t == self.start:
            return self._slope(0)
        i = self._segment(t)
        if self.samples[i][0] == t:
            i -= 1
        return self._slope(i)


@dataclass(frozen=True)
class TemporalEdge:
    id: int
    u: int
    v: int
    weights: WeightSeries

    def __post_init__(self) -> None:
        if self.u == self.v:
            raise NetworkError(f"edge {self.id} is a self-loop")

    @property
    def endpoints(self) -> tuple[int, int]:
        return (self.u, self.v)


class _NetCache:
    """Per-network evaluation cache built lazily on first use.

    When every edge is sampled exactly at the integer instants 1..K the
    solvers can evaluate weights with plain integer arithmetic, which is
    where almost all of the running time goes on large inputs.
    """

    def __init__(self, net: "TemporalNetwork") -> None:
        k = net.horizon
        grid = tuple(Fraction(i) for i in range(1, k + 1))
        self.uniform = all(
            tuple(t for t, _ in e.weights.samples) == grid for e in net.edges
        )
        self.values: list[tuple[Fraction, ...]] | None = None
        self.int_values: list[list[int]] | None = None
        self.scale = 1
        if self.uniform:
            self.values = [tuple(v for _, v in e.weights.samples) for e in net.edges]
            # Values scaled by a common denominator stay exact; the int64
            # bound keeps the numpy crossing sign tests overflow-free.
            scale = lcm(*{v.denominator for row in self.values for v in row})
            if scale <= 10**6 and all(
                abs(v.numerator) * (scale // v.denominator) < 2**31
                for row in self.values
                for v in row
            ):
                self.int_values = [
                    [v.numerator * (scale // v.denominator) for v in row]
                    for row in self.values
                ]
                self.scale = scale
        self.has_absence = any(e.weights.absence for e in net.edges)


@dataclass
class TemporalNetwork:
    """The time-aggregated graph G = (V, E) over the horizon [1, K].

    Nodes are 0..node_count-1.  Treated as immutable after construction;
    operations that modify it return new networks.
    """

    node_count: int
    edges: tuple[TemporalEdge, ...]
    horizon: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.node_count < 1:
            raise NetworkError("network needs at least one node")
        if self.horizon < 2:
            raise NetworkError("time horizon must be at least 2")
        self.edges = tuple(self.edges)
        seen = set()
        for i, e in enumerate(self.edges):
            if e.id != i:
                raise NetworkError(f"edge ids must be dense; got {e.id} at index {i}")
            if not (0 <= e.u < self.node_count and 0 <= e.v < self.node_count):
                raise NetworkError(f"edge {e.id} endpoint out of range")
            key = (min(e.u, e.v), max(e.u, e.v))
            if key in seen:
                raise NetworkError(f"duplicate edge between {e.u} and {e.v}")
            seen.add(key)
        self._cache: _NetCache | None = None

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def absence_interval_count(self) -> int:
        return sum(len(e.weights.absence) for e in self.edges)

    def cache(self) -> _NetCache:
        if self._cache is None:
            self._cache = _NetCache(self)
        return self._cache

    def present_edges(self, t: Fraction) -> list[int]:
        return [e.id for e in self.edges if not e.weights.is_absent(t)]


def weight_at(edge: TemporalEdge, t: Fraction) -> Fraction:
    """Exact weight of the edge at time t; linear between samples."""
    return edge.weights.value_at(as_fraction(t))


@dataclass
class ValidationReport:
    connectivity_failures: list[Fraction] = field(default_factory=list)
    degenerate_pairs: list[tuple[int, int]] = field(default_factory=list)
    horizon_issues: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (
            self.connectivity_failures
            or self.degenerate_pairs
            or self.horizon_issues
        )

    def summary(self) -> str:
        if self.ok:
            return "ok"
        parts = []
        if self.horizon_issues:
            parts.append("; ".join(self.horizon_issues))
        if self.connectivity_failures:
            times = ", ".join(str(t) for t in self.connectivity_failures[:5])
            parts.append(f"disconnected at t={times}")
        if self.degenerate_pairs:
            pairs = ", ".join(str(p) for p in self.degenerate_pairs[:5])
            parts.append(f"coincident weight functions: {pairs}")
        return "; ".join(parts)


def _connected(node_count: int, links: Iterable[tuple[int, int]]) -> bool:
    parent = list(range(node_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = node_count
    for u, v in links:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps == 1


def _degenerate_pairs_uniform(net: TemporalNetwork) -> list[tuple[int, int]]:
    # On a uniform grid a pair coincides on a segment iff the sample values
    # agree at both segment endpoints; bucket by (value_k, value_k+1).
    values = net.cache().values
    assert values is not None
    pairs: set[tuple[int, int]] = set()
    for k in range(net.horizon - 1):
        buckets: dict[tuple[Fraction, Fraction], list[int]] = {}
        for e in range(net.m):
            buckets.setdefault((values[e][k], values[e][k + 1]), []).append(e)
        for members in buckets.values():
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    pairs.add((members[i], members[j]))
    return sorted(pairs)


def _degenerate_pairs_generic(net: TemporalNetwork) -> list[tuple[int, int]]:
    pairs = []
    for i in range(net.m):
        si = net.edges[i].weights
        for j in range(i + 1, net.m):
            sj = net.edges[j].weights
            cuts = sorted({t for t, _ in si.samples} | {t for t, _ in sj.samples})
            hit = False
            for t0, t1 in zip(cuts, cuts[1:]):
                if si.interpolate(t0) == sj.interpolate(t0) and si.interpolate(
                    t1
                ) == sj.interpolate(t1):
                    hit = True
                    break
            if hit:
                pairs.append((i, j))
    return pairs


def validate(net: TemporalNetwork) -> ValidationReport:
    """Report-only check of connectivity, degeneracy, and horizon uniformity."""
    report = ValidationReport()
    k = Fraction(net.horizon)
    for e in net.edges:
        if e.weights.start != 1 or e.weights.end != k:
            report.horizon_issues.append(
                f"edge {e.id} spans [{e.weights.start}, {e.weights.end}], "
                f"expected [1, {net.horizon}]"
            )
    if report.horizon_issues:
        return report

    # Connectivity at every sample instant and strictly inside every span
    # between absence boundaries, with absent edges removed.
    probe_times: set[Fraction] = set()
    for e in net.edges:
        probe_times.update(t for t, _ in e.weights.samples)
        for a, b in e.weights.absence:
            probe_times.update((a, b))
    ordered = sorted(probe_times)
    probes = list(ordered)
    probes.extend((a + b) / 2 for a, b in zip(ordered, ordered[1:]))
    for t in sorted(probes):
        links = [
            (e.u, e.v) for e in net.edges if not e.weights.is_absent(t)
        ]
        if not _connected(net.node_count, links):
            report.connectivity_failures.append(t)

    if net.cache().uniform:
        report.degenerate_pairs = _degenerate_pairs_uniform(net)
    else:
        report.degenerate_pairs = _degenerate_pairs_generic(net)
    return report


def perturb_degenerate(net: TemporalNetwork) -> TemporalNetwork:
    """Resolve coincident weight functions by lowering the higher-id edge.

    The shift is eps = 1/(2*D*m*K) with D the lcm of all sample
    denominators, small enough to preserve every strict inequality at the
    sample instants.  Applied iteratively; fails after m passes.
    """
    current = net
    for _ in range(max(net.m, 1)):
        report = validate(current)
        if report.connectivity_failures or report.horizon_issues:
            raise NetworkError(f"invalid network: {report.summary()}")
        if not report.degenerate_pairs:
            return current
        denoms = [
            x.denominator
            for e in current.edges
            for t, v in e.weights.samples
            for x in (t, v)
        ]
        eps = Fraction(1, 2 * lcm(*denoms) * current.m * current.horizon)
        shifted = {max(i, j) for i, j in report.degenerate_pairs}
        new_edges = []
        for e in current.edges:
            if e.id in shifted:
                series = WeightSeries(
                    tuple((t, v - eps) for t, v in e.weights.samples),
                    e.weights.absence,
                )
                e = replace(e, weights=series)
            new_edges.append(e)
        meta = dict(current.meta)
        meta["perturbed"] = True
        current = TemporalNetwork(current.node_count, tuple(new_edges), current.horizon, meta)
    raise NetworkError("degeneracies not resolved after m perturbation passes")


def expand_absence(edge: TemporalEdge) -> WeightSeries:
    """Refine the sample list around each absence interval of the edge.

    Samples are inserted at a - 1/1000 and b + 1/1000 for every absence
    interval [a, b], carrying the interpolated values of the original
    function; original samples falling strictly between the two inserted
    instants are dropped.
    """
    series = edge.weights
    if not series.absence:
        return series
    samples = list(series.samples)
    for a, b in series.absence:
        lo, hi = a - ABSENCE_MARGIN, b + ABSENCE_MARGIN
        if lo < series.start or hi > series.end:
            raise NetworkError(
                f"absence interval [{a}, {b}] of edge {edge.id} touches the horizon boundary"
            )
        vals = {t: v for t, v in samples}
        new = [(t, v) for t, v in samples if not (lo < t < hi)]
        if lo not in vals:
            new.append((lo, series.interpolate(lo)))
        if hi not in vals:
            new.append((hi, series.interpolate(hi)))
        samples = sorted(new)
    return WeightSeries(tuple(samples), series.absence)


# ---------------------------------------------------------------------------
# File format


def parse_network(source: str | dict) -> TemporalNetwork:
    """Read the canonical JSON network format.

    {"horizon": K, "nodes": n,
     "edges": [{"id": 0, "u": 0, "v": 1, "weights": ["4", "3.5", ...],
                "absent": [["2.5", "2.9"], ...]}]}
    """
    if isinstance(source, str):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise NetworkError(f"not valid JSON: {exc}") from exc
    else:
        doc = source
    try:
        horizon = int(doc["horizon"])
        nodes = int(doc["nodes"])
        raw_edges = doc["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise NetworkError(f"missing or malformed field: {exc}") from exc
    edges = []
    for idx, rec in enumerate(raw_edges):
        try:
            weights = rec["weights"]
            if len(weights) != horizon:
                raise NetworkError(
                    f"edge {rec.get('id', idx)}: expected {horizon} weights, "
                    f"got {len(weights)}"
                )
            series = WeightSeries.from_values(weights, rec.get("absent", ()))
            edges.append(TemporalEdge(int(rec["id"]), int(rec["u"]), int(rec["v"]), series))
        except (KeyError, TypeError) as exc:
            raise NetworkError(f"edge record {idx}: {exc}") from exc
    return TemporalNetwork(nodes, tuple(edges), horizon, dict(doc.get("meta", {})))


def serialize_network(net: TemporalNetwork) -> dict:
    cache = net.cache()
    if not cache.uniform:
        raise NetworkError("only integer-grid networks have a file representation")
    doc = {
        "horizon": net.horizon,
        "nodes": net.node_count,
        "edges": [
            {
                "id": e.id,
                "u": e.u,
                "v": e.v,
                "weights": [fraction_str(v) for _, v in e.weights.samples],
                "absent": [
                    [fraction_str(a), fraction_str(b)] for a, b in e.weights.absence
                ],
            }
            for e in net.edges
        ],
    }
    if net.meta:
        doc["meta"] = net.meta
    return doc
