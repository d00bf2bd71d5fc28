"""Incremental TSMST solver.

Builds the MST once at the start of the horizon, then walks the
intersection events in time order.  Most events are pruned by cheap
structural filters (tree-only, non-tree-only, cross-component, unchanged
relative order); the few survivors patch the tree by edge exchange.
Edge absence boundaries are merged into the same time-ordered stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .geometry import EventGroup, IntersectionEvent, find_intersections, group_events
from .model import NetworkError, TemporalNetwork
from .static_mst import (
    SpanningTree,
    biconnected_components,
    build_edge_table,
    modified_reverse_delete,
)
from .tso import TimeSubIntervalMST, TsmstResult, _require_valid

__all__ = [
    "Disposition",
    "FilterOutcome",
    "EioState",
    "eio",
    "apply_filters",
    "exchange",
    "handle_absence",
    "STATS_FIELDS",
]


class Disposition(Enum):
    PRUNED_ALL_TREE = "only-tree"
    PRUNED_ALL_NONTREE = "only-non-tree"
    PRUNED_CROSS_BCC = "different-bcc"
    PRUNED_MIXED_GROUPS = "mixed-groups"
    PRUNED_SAME_ORDER = "no-order-change"
    ACTIVE = "active"


STATS_FIELDS = (
    "only-tree",
    "only-non-tree",
    "different-bcc",
    "no-order-change",
    "total",
)


@dataclass(frozen=True)
class FilterOutcome:
    disposition: Disposition
    active_groups: tuple[tuple[int, ...], ...] = ()


class _WeightKeys:
    """Sort keys (weight, one-sided slope, id) for the edges at one time.

    On a uniform integer grid without absences the weight at t = p/q is
    computed as the integer q*w, so the hot comparisons never touch
    Fraction arithmetic; otherwise exact rational evaluation is used.
    The keys for the most recent time are memoised because every event,
    exchange and absence update at one boundary asks for the same time.
    """

    def __init__(self, net: TemporalNetwork) -> None:
        self._net = net
        cache = net.cache()
        self._values = None
        if not cache.has_absence and cache.int_values is not None:
            self._values = cache.int_values
        self._t: Fraction | None = None
        self._memo: tuple | None = None

    def at(self, t: Fraction):
        """(after_key, before_key): ascending weight just after / before t."""
        if t != self._t:
            self._t = t
            self._memo = self._build(t)
        return self._memo

    def _build(self, t: Fraction):
        values = self._values
        if values is None:
            edges = self._net.edges

            def after(e: int):
                series = edges[e].weights
                return (series.interpolate(t), series.slope_right(t), e)

            def before(e: int):
                series = edges[e].weights
                return (series.interpolate(t), -series.slope_left(t), e)

            return after, before
        horizon = self._net.horizon
        p, q = t.numerator, t.denominator
        k = horizon - 2 if t == horizon else p // q - 1
        r = p - (k + 1) * q
        at_sample = r == 0 and k > 0

        def after(e: int):
            row = values[e]
            a, b = row[k], row[k + 1]
            return (a * (q - r) + b * r, b - a, e)

        def before(e: int):
            row = values[e]
            a, b = row[k], row[k + 1]
            left = a - row[k - 1] if at_sample else b - a
            return (a * (q - r) + b * r, -left, e)

        return after, before


@dataclass
class EioState:
    net: TemporalNetwork
    tree_mask: int
    boundary: Fraction
    fcycle_masks: list[int]
    bcc: dict[int, int]
    bcc_dirty: bool = False
    absent: set[int] = field(default_factory=set)
    fast_path: bool = True
    keys: _WeightKeys | None = None
    adj: list[list[tuple[int, int]]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.keys is None:
            self.keys = _WeightKeys(self.net)
        if not self.adj:
            self.adj = [[] for _ in range(self.net.node_count)]
            for e in range(self.net.m):
                if self.tree_mask >> e & 1:
                    edge = self.net.edges[e]
                    self.adj[edge.u].append((edge.v, e))
                    self.adj[edge.v].append((edge.u, e))

    @property
    def tree(self) -> SpanningTree:
        return SpanningTree(self.tree_mask, self.net.m)

    def tree_add(self, e: int) -> None:
        self.tree_mask |= 1 << e
        u, v = self.net.edges[e].endpoints
        self.adj[u].append((v, e))
        self.adj[v].append((u, e))

    def tree_remove(self, e: int) -> None:
        self.tree_mask &= ~(1 << e)
        u, v = self.net.edges[e].endpoints
        self.adj[u].remove((v, e))
        self.adj[v].remove((u, e))

    def cycle(self, nontree_edge: int) -> list[int]:
        """Fundamental cycle of a non-tree edge w.r.t. the current tree."""
        if self.tree_mask >> nontree_edge & 1:
            raise NetworkError(f"edge {nontree_edge} is already in the tree")
        src, dst = self.net.edges[nontree_edge].endpoints
        prev: dict[int, tuple[int, int]] = {src: (-1, -1)}
        frontier = [src]
        while dst not in prev:
            if not frontier:
                raise NetworkError(f"no tree path between {src} and {dst}")
            nxt = []
            for node in frontier:
                for nbr, e in self.adj[node]:
                    if nbr not in prev:
                        prev[nbr] = (node, e)
                        nxt.append(nbr)
            frontier = nxt
        cycle = [nontree_edge]
        node = dst
        while node != src:
            node, e = prev[node]
            cycle.append(e)
        return cycle

    def refresh_bcc(self) -> None:
        if self.bcc_dirty:
            self.bcc = biconnected_components(self.net, self.absent)
            self.bcc_dirty = False

    def clone(self) -> "EioState":
        return EioState(
            self.net,
            self.tree_mask,
            self.boundary,
            list(self.fcycle_masks),
            dict(self.bcc),
            self.bcc_dirty,
            set(self.absent),
            self.fast_path,
            self.keys,
            [list(entries) for entries in self.adj],
        )


def _classify(state: EioState, event: IntersectionEvent) -> FilterOutcome:
    """One event through the filter cascade; exchanges are not applied here."""
    ids = sorted(event.edge_ids)
    mask = state.tree_mask
    in_tree = [bool(mask >> e & 1) for e in ids]
    if all(in_tree):
        return FilterOutcome(Disposition.PRUNED_ALL_TREE)
    if not any(in_tree):
        return FilterOutcome(Disposition.PRUNED_ALL_NONTREE)
    state.refresh_bcc()
    labels = [state.bcc.get(e, -1) for e in ids]
    if len(set(labels)) == len(ids):
        return FilterOutcome(Disposition.PRUNED_CROSS_BCC)
    groups: dict[int, list[int]] = {}
    for e, label in zip(ids, labels):
        groups.setdefault(label, []).append(e)
    active: list[tuple[int, ...]] = []
    order_checked = False
    after_key, before_key = state.keys.at(event.time)
    for label in sorted(groups, key=lambda lb: min(groups[lb])):
        members = groups[label]
        flags = [bool(mask >> e & 1) for e in members]
        if all(flags) or not any(flags):
            continue
        order_checked = True
        if sorted(members, key=before_key) == sorted(members, key=after_key):
            continue
        active.append(tuple(members))
    if active:
        return FilterOutcome(Disposition.ACTIVE, tuple(active))
    if order_checked:
        return FilterOutcome(Disposition.PRUNED_SAME_ORDER)
    return FilterOutcome(Disposition.PRUNED_MIXED_GROUPS)


def exchange(state: EioState, group: tuple[int, ...], t: Fraction) -> None:
    """Patch the tree for one active per-component edge group at time t.

    Fast path: a two-edge group sharing exactly one recorded fcycle is
    swapped directly, after verifying against the current tree that the
    tree edge really is the heaviest on the non-tree edge's fundamental
    cycle (the fcycle table is never updated after exchanges, so its hint
    can go stale).  Otherwise each non-tree edge is added in decreasing
    after-the-event weight order and the heaviest edge of its fundamental
    cycle is deleted.
    """
    after_key, _ = state.keys.at(t)
    if state.fast_path and len(group) == 2:
        a, b = group
        shared = state.fcycle_masks[a] & state.fcycle_masks[b]
        if shared.bit_count() == 1:
            in_a = bool(state.tree_mask >> a & 1)
            in_b = bool(state.tree_mask >> b & 1)
            if in_a != in_b:
                te, nt = (a, b) if in_a else (b, a)
                cycle = state.cycle(nt)
                if max(cycle, key=after_key) == te:
                    state.tree_remove(te)
                    state.tree_add(nt)
                    return
    nontree = [e for e in sorted(group, key=after_key, reverse=True)
               if not state.tree_mask >> e & 1]
    for e in nontree:
        if state.tree_mask >> e & 1:
            continue
        cycle = state.cycle(e)
        heaviest = max(cycle, key=after_key)
        if heaviest != e:
            state.tree_add(e)
            state.tree_remove(heaviest)
    if state.tree_mask.bit_count() != state.net.node_count - 1:
        raise AssertionError("edge exchange unbalanced the tree")


def apply_filters(group: EventGroup, state: EioState) -> list[FilterOutcome]:
    """Filter outcome for every event of one time group, in value order.

    Exchanges triggered by earlier events of the group are simulated on a
    scratch copy so that later classifications see the updated tree; the
    caller's state is untouched.
    """
    scratch = state.clone()
    outcomes = []
    for event in group.events:
        outcome = _classify(scratch, event)
        outcomes.append(outcome)
        for members in outcome.active_groups:
            exchange(scratch, members, event.time)
    return outcomes


def handle_absence(
    state: EioState, boundary: str, edges: list[int], t: Fraction
) -> None:
    """Update the tree when edges vanish ("start") or reappear ("end") at t.

    Vanishing tree edges are replaced by scanning the present non-tree
    edges in increasing weight and swapping in the first one whose
    fundamental cycle covers an absent tree edge.  A reappearing edge is
    added outright and the heaviest edge of the created cycle deleted.
    Bi-connected component labels are marked stale and recomputed lazily
    at the next intersection point.
    """
    net = state.net
    after_key, _ = state.keys.at(t)
    if boundary == "start":
        state.absent.update(edges)
        absent_tree = {e for e in edges if state.tree_mask >> e & 1}
        if absent_tree:
            candidates = sorted(
                (
                    e.id
                    for e in net.edges
                    if e.id not in state.absent
                    and not state.tree_mask >> e.id & 1
                ),
                key=after_key,
            )
            for cand in candidates:
                if not absent_tree:
                    break
                hit = sorted(set(state.cycle(cand)) & absent_tree)
                if hit:
                    state.tree_remove(hit[0])
                    state.tree_add(cand)
                    absent_tree.remove(hit[0])
            if absent_tree:
                raise NetworkError(
                    f"absence at t={t} disconnects the network (edges {sorted(absent_tree)})"
                )
    elif boundary == "end":
        for e in edges:
            state.absent.discard(e)
        for e in sorted(edges, key=after_key):
            cycle = state.cycle(e)
            heaviest = max(cycle, key=after_key)
            if heaviest != e:
                state.tree_add(e)
                state.tree_remove(heaviest)
    else:
        raise ValueError(f"unknown boundary kind {boundary!r}")
    state.bcc_dirty = True


def _event_stream(net: TemporalNetwork, groups: list[EventGroup]):
    """Time-ordered (time, kind, payload) items.

    At equal times absence starts come before intersections and absence
    ends after, so absent edges never take part in an exchange at the
    same instant.
    """
    end = Fraction(net.horizon)
    items: list[tuple[Fraction, int, object]] = []
    for g in groups:
        if 1 < g.time < end:
            items.append((g.time, 1, g))
    starts: dict[Fraction, list[int]] = {}
    ends: dict[Fraction, list[int]] = {}
    for edge in net.edges:
        for a, b in edge.weights.absence:
            starts.setdefault(a, []).append(edge.id)
            ends.setdefault(b, []).append(edge.id)
    for t, ids in starts.items():
        if 1 < t < end:
            items.append((t, 0, sorted(ids)))
    for t, ids in ends.items():
        if 1 < t < end:
            items.append((t, 2, sorted(ids)))
    items.sort(key=lambda item: (float(item[0]), item[0], item[1]))
    return items


def eio(
    net: TemporalNetwork,
    *,
    fast_path: bool = True,
    collect_stats: bool = False,
) -> TsmstResult:
    """TSMST by filtering intersection events and exchanging edges."""
    _require_valid(net)
    events = find_intersections(net)
    groups = group_events(events)
    stream = _event_stream(net, groups)
    # Build the starting MST strictly inside the first interval: at t=1
    # itself two edges may tie in weight, and the id tie-break need not
    # match the order that holds just after the start of the horizon.
    first_bound = stream[0][0] if stream else Fraction(net.horizon)
    start_mid = (1 + first_bound) / 2
    start_absent = {e.id for e in net.edges if e.weights.is_absent(start_mid)}
    tree, fcycle_table = modified_reverse_delete(net, start_mid)
    bcc = biconnected_components(net, start_absent)
    edge_table = build_edge_table(net, bcc, fcycle_table)
    state = EioState(
        net,
        tree.mask,
        Fraction(1),
        [entry.fcycles for entry in edge_table],
        bcc,
        absent=set(start_absent),
        fast_path=fast_path,
    )
    counters = {name: 0 for name in STATS_FIELDS}
    intervals: list[TimeSubIntervalMST] = []
    prev_mask = state.tree_mask

    i = 0
    while i < len(stream):
        t = stream[i][0]
        while i < len(stream) and stream[i][0] == t:
            _, kind, payload = stream[i]
            if kind == 0:
                handle_absence(state, "start", payload, t)
            elif kind == 2:
                handle_absence(state, "end", payload, t)
            else:
                for event in payload.events:
                    outcome = _classify(state, event)
                    counters["total"] += 1
                    if outcome.disposition is Disposition.ACTIVE:
                        for members in outcome.active_groups:
                            exchange(state, members, t)
                    elif outcome.disposition is Disposition.PRUNED_MIXED_GROUPS:
                        # cross-component pruning extended to grouped edges
                        counters["different-bcc"] += 1
                    else:
                        counters[outcome.disposition.value] += 1
            i += 1
        if state.tree_mask != prev_mask:
            intervals.append(
                TimeSubIntervalMST(state.boundary, t, SpanningTree(prev_mask, net.m))
            )
            state.boundary = t
            prev_mask = state.tree_mask
    intervals.append(
        TimeSubIntervalMST(
            state.boundary, Fraction(net.horizon), SpanningTree(prev_mask, net.m)
        )
    )
    metadata = {
        "algorithm": "eio",
        "event_count": len(events),
        "perturbed": bool(net.meta.get("perturbed", False)),
    }
    if collect_stats:
        metadata["stats"] = dict(counters)
    return TsmstResult(tuple(intervals), metadata)
