"""Minimum spanning tree machinery at a fixed time instant.

Kruskal with an explicit (weight, edge id) order, the modified
reverse-delete construction that also records one fundamental cycle per
deleted edge, bi-connected component labelling, and the per-edge lookup
table used by the incremental solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import NetworkError, TemporalNetwork, as_fraction

__all__ = [
    "SpanningTree",
    "FcycleEntry",
    "EdgeTableEntry",
    "UnionFind",
    "kruskal_at",
    "modified_reverse_delete",
    "biconnected_components",
    "fundamental_cycle",
    "total_cost",
    "build_edge_table",
]


@dataclass(frozen=True)
class SpanningTree:
    """Edge membership as a bit vector: bit e set iff edge e is in the tree."""

    mask: int
    size: int

    def __contains__(self, edge_id: int) -> bool:
        return bool(self.mask >> edge_id & 1)

    def edge_ids(self) -> list[int]:
        return [e for e in range(self.size) if self.mask >> e & 1]

    @property
    def edge_count(self) -> int:
        return self.mask.bit_count()


@dataclass(frozen=True)
class FcycleEntry:
    fcycle_id: int
    member_edges: tuple[int, ...]


@dataclass(frozen=True)
class EdgeTableEntry:
    edge_id: int
    endpoints: tuple[int, int]
    bcc_id: int
    fcycles: int  # bit vector over fcycle ids


class UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def _sorted_present(net: TemporalNetwork, t: Fraction) -> list[int]:
    """Edge ids present at t, ascending by (weight at t, id)."""
    cache = net.cache()
    m = net.m
    if cache.int_values is not None and not cache.has_absence:
        p, q = t.numerator, t.denominator
        k = net.horizon - 2 if t == net.horizon else p // q - 1
        r = p - (k + 1) * q
        values = cache.int_values
        # common scale q keeps the keys integral on integer-valued series
        s = q - r
        pairs = [(row[k] * s + row[k + 1] * r, e) for e, row in enumerate(values)]
    else:
        pairs = [
            (e.weights.value_at(t), e.id)
            for e in net.edges
            if not e.weights.is_absent(t)
        ]
    pairs.sort()
    return [e for _, e in pairs]


def kruskal_at(net: TemporalNetwork, t: Fraction) -> SpanningTree:
    """The unique MST at time t under the (weight, edge id) order."""
    t = as_fraction(t)
    mask = 0
    picked = 0
    uf = UnionFind(net.node_count)
    target = net.node_count - 1
    edges = net.edges
    for e in _sorted_present(net, t):
        edge = edges[e]
        if uf.union(edge.u, edge.v):
            mask |= 1 << e
            picked += 1
            if picked == target:
                break
    if picked != target:
        raise NetworkError(f"network disconnected at t={t}")
    return SpanningTree(mask, net.m)


def _dfs_tree(
    net: TemporalNetwork, present: set[int]
) -> tuple[dict[int, tuple[int, int]], dict[int, int], set[int]]:
    """Iterative DFS from node 0, children in ascending node id.

    Returns (parent edge per node as (parent_node, edge_id), discovery
    order, set of tree edge ids).
    """
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(net.node_count)}
    for e in present:
        edge = net.edges[e]
        adj[edge.u].append((edge.v, e))
        adj[edge.v].append((edge.u, e))
    for lst in adj.values():
        lst.sort()
    parent: dict[int, tuple[int, int]] = {}
    disc: dict[int, int] = {}
    tree_edges: set[int] = set()
    stack = [(0, -1)]
    while stack:
        node, via = stack.pop()
        if node in disc:
            continue
        disc[node] = len(disc)
        if via >= 0:
            tree_edges.add(via)
        for nbr, e in reversed(adj[node]):
            if nbr not in disc:
                parent.setdefault(nbr, (node, e))
                stack.append((nbr, e))
    # stack-based DFS can record a tentative parent that another branch
    # reaches first; recompute parents from the realized tree edges
    parent = {}
    for e in tree_edges:
        edge = net.edges[e]
        child, par = (
            (edge.u, edge.v) if disc[edge.u] > disc[edge.v] else (edge.v, edge.u)
        )
        parent[child] = (par, e)
    return parent, disc, tree_edges


def modified_reverse_delete(
    net: TemporalNetwork, t: Fraction
) -> tuple[SpanningTree, list[FcycleEntry]]:
    """Reverse-delete via repeated DFS, recording each deleted cycle.

    Each pass picks the lowest-id non-tree edge of the current DFS tree,
    walks parent pointers to close its cycle, deletes the cycle's heaviest
    edge and records the cycle.  Ends with n-1 edges and exactly m'-n+1
    recorded fcycles, where m' counts the edges present at t.
    """
    t = as_fraction(t)
    present = {e.id for e in net.edges if not e.weights.is_absent(t)}
    weights = {e: net.edges[e].weights.value_at(t) for e in present}
    table: list[FcycleEntry] = []
    target = net.node_count - 1
    while len(present) > target:
        parent, disc, tree_edges = _dfs_tree(net, present)
        if len(disc) != net.node_count:
            raise NetworkError(f"network disconnected at t={t}")
        nontree = sorted(present - tree_edges)
        if not nontree:
            break
        ne = nontree[0]
        edge = net.edges[ne]
        # the later-discovered endpoint descends from the earlier one
        low, high = (
            (edge.u, edge.v) if disc[edge.u] > disc[edge.v] else (edge.v, edge.u)
        )
        cycle = [ne]
        node = low
        while node != high:
            node, e = parent[node]
            cycle.append(e)
        heaviest = max(cycle, key=lambda e: (weights[e], e))
        table.append(FcycleEntry(len(table), tuple(sorted(cycle))))
        present.remove(heaviest)
    if len(present) != target:
        raise NetworkError(f"network disconnected at t={t}")
    parent, disc, tree_edges = _dfs_tree(net, present)
    if len(disc) != net.node_count:
        raise NetworkError(f"network disconnected at t={t}")
    mask = 0
    for e in present:
        mask |= 1 << e
    return SpanningTree(mask, net.m), table


def biconnected_components(
    net: TemporalNetwork, absent: frozenset[int] | set[int] = frozenset()
) -> dict[int, int]:
    """Label every present edge with its bi-connected component.

    Two edges share a label iff they lie on a common cycle; bridges get
    singleton labels.  Classical linear-time DFS with an edge stack.
    """
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(net.node_count)}
    for edge in net.edges:
        if edge.id in absent:
            continue
        adj[edge.u].append((edge.v, edge.id))
        adj[edge.v].append((edge.u, edge.id))
    labels: dict[int, int] = {}
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    counter = 0
    next_label = 0
    edge_stack: list[int] = []
    for root in range(net.node_count):
        if root in disc:
            continue
        stack: list[tuple[int, int, int]] = [(root, -1, 0)]
        while stack:
            node, parent_edge, idx = stack.pop()
            if idx == 0:
                disc[node] = low[node] = counter
                counter += 1
            advanced = False
            while idx < len(adj[node]):
                nbr, e = adj[node][idx]
                idx += 1
                if e == parent_edge:
                    continue
                if nbr not in disc:
                    edge_stack.append(e)
                    stack.append((node, parent_edge, idx))
                    stack.append((nbr, e, 0))
                    advanced = True
                    break
                if disc[nbr] < disc[node] and e not in labels:
                    edge_stack.append(e)
                    low[node] = min(low[node], disc[nbr])
            if advanced:
                continue
            if parent_edge >= 0:
                par = stack[-1][0]
                low[par] = min(low[par], low[node])
                if low[node] >= disc[par]:
                    while True:
                        e = edge_stack.pop()
                        labels[e] = next_label
                        if e == parent_edge:
                            break
                    next_label += 1
    return labels


def fundamental_cycle(
    net: TemporalNetwork, tree: SpanningTree, nontree_edge: int
) -> list[int]:
    """The unique cycle closed by adding a non-tree edge to the tree."""
    if nontree_edge in tree:
        raise NetworkError(f"edge {nontree_edge} is already in the tree")
    return [nontree_edge, *tree_path(net, tree.mask, *net.edges[nontree_edge].endpoints)]


def tree_path(net: TemporalNetwork, tree_mask: int, src: int, dst: int) -> list[int]:
    """Edge ids along the tree path from src to dst (BFS over tree edges)."""
    adj: dict[int, list[tuple[int, int]]] = {}
    for e in range(net.m):
        if tree_mask >> e & 1:
            edge = net.edges[e]
            adj.setdefault(edge.u, []).append((edge.v, e))
            adj.setdefault(edge.v, []).append((edge.u, e))
    prev: dict[int, tuple[int, int]] = {src: (-1, -1)}
    frontier = [src]
    while frontier and dst not in prev:
        nxt = []
        for node in frontier:
            for nbr, e in adj.get(node, ()):
                if nbr not in prev:
                    prev[nbr] = (node, e)
                    nxt.append(nbr)
        frontier = nxt
    if dst not in prev:
        raise NetworkError(f"no tree path between {src} and {dst}")
    path = []
    node = dst
    while node != src:
        node, e = prev[node][0], prev[node][1]
        path.append(e)
    return path


def total_cost(net: TemporalNetwork, tree: SpanningTree, t: Fraction) -> Fraction:
    """Sum of member edge weights at time t; absent members raise."""
    t = as_fraction(t)
    return sum(
        (net.edges[e].weights.value_at(t) for e in tree.edge_ids()), Fraction(0)
    )


def build_edge_table(
    net: TemporalNetwork,
    bcc: dict[int, int],
    fcycles: list[FcycleEntry],
) -> list[EdgeTableEntry]:
    masks = [0] * net.m
    for entry in fcycles:
        for e in entry.member_edges:
            masks[e] |= 1 << entry.fcycle_id
    return [
        EdgeTableEntry(e.id, e.endpoints, bcc.get(e.id, -1), masks[e.id])
        for e in net.edges
    ]
