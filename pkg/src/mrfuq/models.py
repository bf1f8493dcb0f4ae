"""Log-linear models over maximal cliques and their exact enumeration.

Everything is computed in log space.  Configurations are indexed in mixed
radix with node 0 least significant; a clique's local configurations use
the same convention restricted to its own (ascending) nodes.  Enumeration
walks fixed-size index blocks in a fixed order, so all accumulations are
deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import CapacityError, InputError
from .graphs import Clique, UndirectedGraph, induced_subgraph, maximal_cliques

DEFAULT_ENUM_CAP = 1 << 24
BLOCK = 1 << 16

QoI = Callable[[np.ndarray], np.ndarray]  # (B, n) states -> (B,) values
Configuration = tuple[int, ...]


def state_strides(cards: np.ndarray) -> np.ndarray:
    """Mixed-radix strides; node 0 least significant."""
    return np.concatenate(([1], np.cumprod(cards[:-1]))).astype(np.int64)


def state_blocks(cards: np.ndarray, block: int = BLOCK) -> Iterator[np.ndarray]:
    """Yield (B, n) int matrices covering all joint configurations in order."""
    n_states = int(np.prod(cards, dtype=np.int64)) if len(cards) else 1
    strides = state_strides(cards)
    for start in range(0, n_states, block):
        idx = np.arange(start, min(start + block, n_states), dtype=np.int64)
        yield (idx[:, None] // strides[None, :]) % cards[None, :]


def local_index(states: np.ndarray, nodes: Sequence[int], cards: np.ndarray) -> np.ndarray:
    """Flat mixed-radix index of ``states`` restricted to ``nodes``."""
    idx = np.zeros(states.shape[0], dtype=np.int64)
    stride = 1
    for v in nodes:
        idx += states[:, v].astype(np.int64) * stride
        stride *= int(cards[v])
    return idx


def substitute_table(
    nodes: Sequence[int],
    table: np.ndarray,
    cards: np.ndarray,
    context: Mapping[int, int],
) -> tuple[tuple[int, ...], np.ndarray]:
    """Partially evaluate a table at the context values.

    Returns the remaining (free) nodes and the sliced table, still flat in
    the mixed-radix order of the remaining nodes.
    """
    shape = [int(cards[v]) for v in nodes]
    # Mixed radix with the first node least significant == Fortran order.
    grid = np.reshape(np.asarray(table, dtype=float), shape, order="F")
    slicer = tuple(context[v] if v in context else slice(None) for v in nodes)
    kept = tuple(v for v in nodes if v not in context)
    return kept, np.ravel(grid[slicer], order="F").copy()


@dataclass(frozen=True)
class Factor:
    """One clique factor: potential(x) = exp(weight * table[local index])."""

    clique: Clique
    weight: float
    table: np.ndarray  # flat, length prod(cards[clique])

    def log_potential(self, states: np.ndarray, cards: np.ndarray) -> np.ndarray:
        return self.weight * self.table[local_index(states, self.clique, cards)]


class LogLinearModel:
    """MRF factorized over the maximal cliques of its graph.

    ``factors`` must carry exactly one factor per maximal clique, in the
    canonical clique order.  The induced distribution is strictly positive
    by construction.
    """

    def __init__(
        self,
        graph: UndirectedGraph,
        cardinalities: Sequence[int],
        factors: Sequence[Factor],
    ):
        if len(cardinalities) != graph.node_count:
            raise InputError("one cardinality required per node")
        cards = np.asarray(cardinalities, dtype=np.int64)
        if np.any(cards < 2):
            raise InputError("node cardinalities must be >= 2")
        cliques = maximal_cliques(graph)
        got = tuple(f.clique for f in factors)
        if got != cliques:
            raise InputError(
                f"factors must cover the maximal cliques {cliques} in canonical "
                f"order, got {got}"
            )
        for f in factors:
            size = int(np.prod(cards[list(f.clique)]))
            if f.table.shape != (size,):
                raise InputError(
                    f"feature table on clique {f.clique} must have {size} entries"
                )
        self.graph = graph
        self.cards = cards
        self.factors = tuple(factors)

    @property
    def n_nodes(self) -> int:
        return self.graph.node_count

    @property
    def n_states(self) -> int:
        return int(np.prod(self.cards, dtype=np.int64))

    def log_weight(self, states: np.ndarray) -> np.ndarray:
        out = np.zeros(states.shape[0], dtype=float)
        for f in self.factors:
            out += f.log_potential(states, self.cards)
        return out

    def validate_configuration(self, x: Configuration) -> np.ndarray:
        arr = np.asarray(x, dtype=np.int64)
        if arr.shape != (self.n_nodes,) or np.any(arr < 0) or np.any(arr >= self.cards):
            raise InputError(f"invalid configuration {x}")
        return arr


class ReducedModel:
    """A model conditioned on a context over a node subset.

    The reduced potentials are the base potentials with the context slots
    substituted; configurations range over the free nodes only (relabeled
    0..k-1 in ascending original order).
    """

    def __init__(self, base: LogLinearModel, context: Mapping[int, int]):
        ctx = {int(v): int(s) for v, s in context.items()}
        for v, s in ctx.items():
            if not 0 <= v < base.n_nodes:
                raise InputError(f"unknown context node {v}")
            if not 0 <= s < base.cards[v]:
                raise InputError(f"invalid context value {s} for node {v}")
        if len(ctx) == base.n_nodes:
            raise InputError("context must leave at least one free node")
        self.base = base
        self.context = ctx
        self.context_nodes = tuple(sorted(ctx))
        free = [v for v in range(base.n_nodes) if v not in ctx]
        self.free_nodes = tuple(free)
        self._free_index = {v: i for i, v in enumerate(free)}
        self.cards = base.cards[free]
        self.free_graph, self.free_mapping = induced_subgraph(base.graph, free)
        terms: list[tuple[tuple[int, ...], np.ndarray]] = []
        const = 0.0
        for f in base.factors:
            kept, table = substitute_table(f.clique, f.table, base.cards, ctx)
            table = f.weight * table
            if kept:
                terms.append((tuple(self._free_index[v] for v in kept), table))
            else:
                const += float(table[0])
        self.terms = tuple(terms)
        self.const = const

    @property
    def n_nodes(self) -> int:
        return len(self.free_nodes)

    @property
    def n_states(self) -> int:
        return int(np.prod(self.cards, dtype=np.int64))

    def log_weight(self, states: np.ndarray) -> np.ndarray:
        out = np.full(states.shape[0], self.const, dtype=float)
        for nodes, table in self.terms:
            out += table[local_index(states, nodes, self.cards)]
        return out

    def validate_configuration(self, x: Configuration) -> np.ndarray:
        arr = np.asarray(x, dtype=np.int64)
        if arr.shape != (self.n_nodes,) or np.any(arr < 0) or np.any(arr >= self.cards):
            raise InputError(f"invalid configuration {x}")
        return arr


# Any object with .cards, .n_states, .log_weight(states) works with the
# enumeration helpers below (LogLinearModel, ReducedModel, the Ising Gibbs
# distribution, tilted distributions, ...).
Distribution = LogLinearModel | ReducedModel


def check_capacity(m, cap: int | None = None) -> None:
    cap = DEFAULT_ENUM_CAP if cap is None else cap
    if m.n_states > cap:
        raise CapacityError(m.n_states, cap)


def log_partition(m, cap: int | None = None) -> float:
    """log Z by full enumeration with log-sum-exp accumulation."""
    check_capacity(m, cap)
    parts = [logsumexp(m.log_weight(s)) for s in state_blocks(m.cards)]
    return float(logsumexp(parts))


def probability(m, x: Configuration, cap: int | None = None) -> float:
    arr = m.validate_configuration(x)
    return float(math.exp(m.log_weight(arr[None, :])[0] - log_partition(m, cap)))


def expectation(m, f: QoI, cap: int | None = None) -> float:
    """Exact enumerated mean of f under m."""
    check_capacity(m, cap)
    log_z = log_partition(m, cap)
    total = 0.0
    for s in state_blocks(m.cards):
        total += float(np.dot(np.exp(m.log_weight(s) - log_z), np.asarray(f(s), dtype=float)))
    return total


def log_expectation_exp(m, g: QoI, cap: int | None = None) -> float:
    """log E_m[exp(g)], stable for large g."""
    check_capacity(m, cap)
    log_z = log_partition(m, cap)
    parts = [
        logsumexp(m.log_weight(s) - log_z + np.asarray(g(s), dtype=float))
        for s in state_blocks(m.cards)
    ]
    return float(logsumexp(parts))


def reduce(m: LogLinearModel, context: Mapping[int, int]) -> LogLinearModel | ReducedModel:
    """Condition ``m`` on a context; empty context returns ``m`` unchanged."""
    if not context:
        return m
    return ReducedModel(m, context)


def clique_class_partition(
    m: LogLinearModel, context_nodes: Iterable[int]
) -> tuple[tuple[Clique, ...], tuple[Clique, ...]]:
    """Split the maximal cliques by whether they touch the context nodes.

    Note: a figure caption in the source material merges context-touching
    cliques before listing them; this follows the set definition instead,
    so each returned clique is a maximal clique of the base graph.
    """
    ctx = set(int(v) for v in context_nodes)
    for v in ctx:
        if not 0 <= v < m.n_nodes:
            raise InputError(f"unknown node id {v}")
    touching = tuple(c for c in maximal_cliques(m.graph) if ctx & set(c))
    free = tuple(c for c in maximal_cliques(m.graph) if not ctx & set(c))
    return touching, free


def indicator(predicate: Callable[[np.ndarray], np.ndarray]) -> QoI:
    """QoI from a vectorized boolean predicate over state blocks."""

    def f(states: np.ndarray) -> np.ndarray:
        return predicate(states).astype(float)

    return f


def indicator_of_assignment(assignment: Mapping[int, int]) -> QoI:
    """Indicator of {x : x[v] == s for all (v, s) in assignment}."""
    items = sorted((int(v), int(s)) for v, s in assignment.items())

    def f(states: np.ndarray) -> np.ndarray:
        ok = np.ones(states.shape[0], dtype=bool)
        for v, s in items:
            ok &= states[:, v] == s
        return ok.astype(float)

    return f
