"""Undirected graphs: maximal cliques, induced subgraphs, separation queries.

Nodes are dense 0-based integers. Cliques are returned in a canonical
order (each clique sorted ascending, cliques sorted lexicographically) so
that every table derived from them downstream is deterministic.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

from .errors import InputError

Clique = tuple[int, ...]
Edge = tuple[int, int]


class UndirectedGraph:
    """Immutable simple graph (symmetric adjacency, no self-loops)."""

    __slots__ = ("node_count", "edges", "_neighbors")

    def __init__(self, node_count: int, edges: Iterable[Sequence[int]]):
        if node_count < 0:
            raise InputError("node_count must be nonnegative")
        canon: set[Edge] = set()
        for e in edges:
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise InputError(f"self-loop at node {i}")
            if not (0 <= i < node_count and 0 <= j < node_count):
                raise InputError(f"edge ({i},{j}) references an unknown node")
            canon.add((min(i, j), max(i, j)))
        self.node_count = node_count
        self.edges: frozenset[Edge] = frozenset(canon)
        nbrs: list[set[int]] = [set() for _ in range(node_count)]
        for i, j in self.edges:
            nbrs[i].add(j)
            nbrs[j].add(i)
        self._neighbors: tuple[frozenset[int], ...] = tuple(frozenset(s) for s in nbrs)

    @property
    def nodes(self) -> range:
        return range(self.node_count)

    def neighbors(self, i: int) -> frozenset[int]:
        return self._neighbors[i]

    def adjacent(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, UndirectedGraph)
            and self.node_count == other.node_count
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.node_count, self.edges))

    def __repr__(self) -> str:
        return f"UndirectedGraph(node_count={self.node_count}, edges={sorted(self.edges)})"


def maximal_cliques(g: UndirectedGraph) -> tuple[Clique, ...]:
    """All maximal cliques of ``g``, canonically ordered.

    Bron-Kerbosch with pivoting.  Isolated nodes appear as singleton
    cliques, so the result covers every node and every edge.
    """
    out: list[frozenset[int]] = []

    def expand(r: set[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            out.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda u: len(g.neighbors(u) & p))
        for v in sorted(p - g.neighbors(pivot)):
            nv = g.neighbors(v)
            expand(r | {v}, p & nv, x & nv)
            p.remove(v)
            x.add(v)

    expand(set(), set(g.nodes), set())
    return tuple(sorted(tuple(sorted(c)) for c in out))


def induced_subgraph(
    g: UndirectedGraph, keep: Iterable[int]
) -> tuple[UndirectedGraph, dict[int, int]]:
    """Subgraph on ``keep`` with nodes relabeled contiguously.

    Returns the new graph and the old->new node id mapping (ascending
    old ids map to 0,1,2,...).
    """
    keep_sorted = sorted(set(int(v) for v in keep))
    for v in keep_sorted:
        if not 0 <= v < g.node_count:
            raise InputError(f"unknown node id {v}")
    mapping = {old: new for new, old in enumerate(keep_sorted)}
    kept = set(keep_sorted)
    edges = [(mapping[i], mapping[j]) for i, j in g.edges if i in kept and j in kept]
    return UndirectedGraph(len(keep_sorted), edges), mapping


def separates(
    g: UndirectedGraph, a: Iterable[int], b: Iterable[int], c: Iterable[int]
) -> bool:
    """True iff deleting ``c`` breaks every path from ``a`` to ``b``."""
    sa, sb, sc = set(a), set(b), set(c)
    for s in (sa, sb, sc):
        for v in s:
            if not 0 <= v < g.node_count:
                raise InputError(f"unknown node id {v}")
    if sa & sb or sa & sc or sb & sc:
        raise InputError("separation query requires pairwise disjoint node sets")
    blocked = sc
    seen = set(sa)
    queue = deque(sa)
    while queue:
        v = queue.popleft()
        for w in g.neighbors(v):
            if w in blocked or w in seen:
                continue
            if w in sb:
                return False
            seen.add(w)
            queue.append(w)
    return True
