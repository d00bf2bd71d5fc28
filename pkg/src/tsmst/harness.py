"""Workload generation, brute-force oracles, and benchmarking.

Random networks follow the usual recipe: build a random spanning tree
first so the graph is connected, then add random extra edges and draw an
integer weight per edge per time instant.  The enumeration oracle shares
only weight evaluation with the solvers, so it genuinely cross-checks
them.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .eio import STATS_FIELDS, eio
from .geometry import find_intersections
from .model import (
    NetworkError,
    TemporalEdge,
    TemporalNetwork,
    WeightSeries,
    perturb_degenerate,
    validate,
)
from .static_mst import kruskal_at
from .tso import TsmstResult, split_times, tso

__all__ = [
    "GenSpec",
    "OracleReport",
    "OracleSample",
    "gen_random",
    "gen_trajectory",
    "oracle_enumerate",
    "verify",
    "bench",
    "BENCH_FIELDS",
]

ORACLE_NODE_LIMIT = 9


@dataclass(frozen=True)
class GenSpec:
    nodes: int
    edges: int
    horizon: int
    seed: int
    weight_range: tuple[int, int] = (1, 10_000)
    kind: str = "random-series"  # or "trajectory"
    absence_count: int = 0


@dataclass(frozen=True)
class OracleSample:
    time: Fraction
    min_cost: Fraction
    optimal_masks: tuple[int, ...]

    @property
    def strict(self) -> bool:
        return len(self.optimal_masks) == 1


@dataclass
class OracleReport:
    match: bool
    samples_checked: int
    first_divergence: tuple[Fraction, object, object] | None = None
    notes: list[str] = field(default_factory=list)


def _random_topology(rng: random.Random, n: int, m: int) -> list[tuple[int, int]]:
    if not (n - 1 <= m <= n * (n - 1) // 2):
        raise NetworkError(f"cannot place {m} edges on {n} nodes")
    nodes = list(range(n))
    rng.shuffle(nodes)
    links = []
    for i in range(1, n):
        links.append((nodes[rng.randrange(i)], nodes[i]))
    used = {(min(u, v), max(u, v)) for u, v in links}
    while len(links) < m:
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in used:
            continue
        used.add(key)
        links.append((u, v))
    return links


def _inject_absences(
    rng: random.Random, links: Sequence[tuple[int, int]], spec: GenSpec
) -> dict[int, list[tuple[Fraction, Fraction]]]:
    """Absence windows on non-tree edges only, so connectivity never breaks.

    The first n-1 links form the generator's spanning tree and stay fully
    present; that tree need not resemble any MST, so absent edges still
    exercise tree-edge replacement in the solvers.
    """
    n_tree = spec.nodes - 1
    extras = list(range(n_tree, len(links)))
    if not extras or spec.horizon < 3:
        return {}
    rng.shuffle(extras)
    grid = 4 * (spec.horizon - 1)
    gaps: dict[int, list[tuple[Fraction, Fraction]]] = {}
    for e in extras[: spec.absence_count]:
        lo = rng.randrange(5, grid - 1)
        hi = rng.randrange(lo + 1, grid)
        a = 1 + Fraction(lo, 4)
        b = 1 + Fraction(hi, 4)
        if a <= 1 or b >= spec.horizon:
            continue
        gaps[e] = [(a, b)]
    return gaps


def gen_random(spec: GenSpec) -> TemporalNetwork:
    """Seed-deterministic random network, degeneracy-perturbed if needed."""
    if spec.kind == "trajectory":
        return _gen_random_trajectory(spec)
    rng = random.Random(spec.seed)
    links = _random_topology(rng, spec.nodes, spec.edges)
    lo, hi = spec.weight_range
    gaps = _inject_absences(rng, links, spec)
    edges = []
    for i, (u, v) in enumerate(links):
        values = [rng.randint(lo, hi) for _ in range(spec.horizon)]
        series = WeightSeries.from_values(values, gaps.get(i, ()))
        edges.append(TemporalEdge(i, u, v, series))
    net = TemporalNetwork(
        spec.nodes,
        tuple(edges),
        spec.horizon,
        {"seed": spec.seed, "generator": spec.kind},
    )
    return perturb_degenerate(net)


Position = tuple[int, int]


def gen_trajectory(
    positions: Sequence[Sequence[Position]], radius: int
) -> TemporalNetwork:
    """Network induced by node trajectories sampled at integer instants.

    ``positions[v][k]`` is node v's integer grid position at instant k+1;
    motion is linear between instants.  Nodes within ``radius`` share an
    edge weighted by squared Euclidean distance, sampled per instant and
    interpolated linearly in between (squared distance of linear motion is
    quadratic; the linear resampling keeps the model piecewise linear).
    Full segments spent beyond the radius become absence intervals.
    """
    n = len(positions)
    horizon = len(positions[0])
    if any(len(p) != horizon for p in positions):
        raise NetworkError("all nodes need one position per instant")
    r2 = radius * radius
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            dists = [
                (positions[u][k][0] - positions[v][k][0]) ** 2
                + (positions[u][k][1] - positions[v][k][1]) ** 2
                for k in range(horizon)
            ]
            if all(d > r2 for d in dists):
                continue
            gaps = []
            run_start = None
            for k in range(horizon - 1):
                if dists[k] > r2 and dists[k + 1] > r2:
                    if run_start is None:
                        run_start = k + 1
                elif run_start is not None:
                    gaps.append((Fraction(run_start), Fraction(k + 1)))
                    run_start = None
            if run_start is not None:
                gaps.append((Fraction(run_start), Fraction(horizon)))
            series = WeightSeries.from_values(dists, gaps)
            edges.append(TemporalEdge(len(edges), u, v, series))
    net = TemporalNetwork(n, tuple(edges), horizon, {"generator": "trajectory"})
    report = validate(net)
    if report.connectivity_failures:
        raise NetworkError(
            f"trajectories disconnect the network at t={report.connectivity_failures[0]}"
        )
    return perturb_degenerate(net)


def _gen_random_trajectory(spec: GenSpec) -> TemporalNetwork:
    rng = random.Random(spec.seed)
    side = max(3, spec.nodes)
    positions = [
        [
            (rng.randrange(side), rng.randrange(side))
            for _ in range(spec.horizon)
        ]
        for _ in range(spec.nodes)
    ]
    net = gen_trajectory(positions, radius=2 * side)
    net.meta["seed"] = spec.seed
    return net


# ---------------------------------------------------------------------------
# Oracles


def _spanning_tree_masks(
    node_count: int, edges: list[tuple[int, int, int]]
) -> list[int]:
    """All spanning trees by recursive edge contraction/deletion."""

    def recurse(nodes: int, work: list[tuple[int, int, int]]) -> list[int]:
        if nodes == 1:
            return [0]
        if len(work) < nodes - 1:
            return []
        eid, u, v = work[0]
        rest = work[1:]
        # contract (u, v) -> u
        contracted = []
        for e, a, b in rest:
            a2 = u if a == v else a
            b2 = u if b == v else b
            if a2 != b2:
                contracted.append((e, a2, b2))
        with_edge = [mask | 1 << eid for mask in recurse(nodes - 1, contracted)]
        # deletion branch only if the rest still connects everything
        seen = {u, v}
        for e, a, b in rest:
            seen.add(a)
            seen.add(b)
        parent = {x: x for x in seen}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        comps = len(seen)
        for e, a, b in rest:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
                comps -= 1
        without_edge = recurse(nodes, rest) if comps == 1 else []
        return with_edge + without_edge

    # relabel nodes densely; contraction assumes ids are plain hashables
    return recurse(node_count, edges)


def oracle_enumerate(
    net: TemporalNetwork, times: Sequence[Fraction]
) -> list[OracleSample]:
    """Minimum-cost spanning tree at each time, by full enumeration."""
    if net.node_count > ORACLE_NODE_LIMIT:
        raise NetworkError(
            f"enumeration oracle limited to {ORACLE_NODE_LIMIT} nodes"
        )
    tree_cache: dict[frozenset[int], list[int]] = {}
    samples = []
    for t in times:
        present = frozenset(net.present_edges(t))
        if present not in tree_cache:
            tree_cache[present] = _spanning_tree_masks(
                net.node_count,
                [(e.id, e.u, e.v) for e in net.edges if e.id in present],
            )
        trees = tree_cache[present]
        weights = {e: net.edges[e].weights.value_at(t) for e in present}
        best_cost = None
        best: list[int] = []
        for mask in trees:
            cost = sum(weights[e] for e in present if mask >> e & 1)
            if best_cost is None or cost < best_cost:
                best_cost = cost
                best = [mask]
            elif cost == best_cost:
                best.append(mask)
        if best_cost is None:
            raise NetworkError(f"no spanning tree at t={t}")
        samples.append(OracleSample(t, best_cost, tuple(sorted(best))))
    return samples


def verify(
    net: TemporalNetwork,
    result: TsmstResult,
    samples_per_interval: int = 5,
    seed: int = 0,
) -> OracleReport:
    """Structural and oracle checks of a solver result."""
    report = OracleReport(match=True, samples_checked=0)

    def fail(t: Fraction, expected: object, got: object) -> None:
        if report.match:
            report.match = False
            report.first_divergence = (t, expected, got)

    intervals = result.intervals
    end = Fraction(net.horizon)
    if not intervals:
        fail(Fraction(1), "non-empty partition", "no intervals")
        return report
    if intervals[0].start != 1 or intervals[-1].end != end:
        fail(intervals[0].start, f"cover [1, {end}]", "partial cover")
    for a, b in zip(intervals, intervals[1:]):
        if a.end != b.start:
            fail(a.end, "contiguous intervals", (a.end, b.start))
        if a.tree.mask == b.tree.mask:
            fail(a.end, "distinct adjacent trees", "repeated tree")
            report.notes.append("maximality violation")
    for item in intervals:
        if item.tree.edge_count != net.node_count - 1:
            fail(item.start, f"{net.node_count - 1} tree edges", item.tree.edge_count)
            report.notes.append("spanning violation")

    bounds = [Fraction(1), *split_times(net, find_intersections(net)), end]
    for item in intervals:
        for a, b in zip(bounds, bounds[1:]):
            if a < item.start or b > item.end:
                continue
            mid = (a + b) / 2
            expected = kruskal_at(net, mid)
            report.samples_checked += 1
            if expected.mask != item.tree.mask:
                fail(mid, expected.edge_ids(), item.tree.edge_ids())

    if net.node_count <= 7:
        rng = random.Random(seed)
        for item in intervals:
            span = item.end - item.start
            for _ in range(samples_per_interval):
                t = item.start + span * Fraction(rng.randrange(1, 1024), 1024)
                sample = oracle_enumerate(net, [t])[0]
                report.samples_checked += 1
                if item.tree.mask not in sample.optimal_masks:
                    fail(t, sample.optimal_masks, item.tree.mask)
    return report


# ---------------------------------------------------------------------------
# Benchmarking

BENCH_FIELDS = (
    "algo",
    "nodes",
    "edges",
    "horizon",
    "seed",
    "events",
    "only-tree",
    "only-non-tree",
    "different-bcc",
    "no-order-change",
    "intervals",
    "wall_time",
)


def bench(specs: Sequence[GenSpec], algos: Sequence[str]) -> list[dict]:
    """One row per (spec, algo); timing covers solving only, not generation."""
    rows = []
    for spec in specs:
        net = gen_random(spec)
        for algo in algos:
            start = time.perf_counter()
            if algo == "tso":
                result = tso(net)
            elif algo == "eio":
                result = eio(net, collect_stats=True)
            else:
                raise NetworkError(f"unknown algorithm {algo!r}")
            elapsed = time.perf_counter() - start
            stats = result.metadata.get("stats", {})
            rows.append(
                {
                    "algo": algo,
                    "nodes": spec.nodes,
                    "edges": spec.edges,
                    "horizon": spec.horizon,
                    "seed": spec.seed,
                    "events": result.metadata["event_count"],
                    **{name: stats.get(name, 0) for name in STATS_FIELDS[:-1]},
                    "intervals": len(result.intervals),
                    "wall_time": round(elapsed, 6),
                }
            )
    return rows
