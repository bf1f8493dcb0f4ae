"""Relating a baseline model to an alternative.

The alternative's potential product is rewritten as the baseline's product
times an excess factor.  For structure changes (added edges) every new
maximal clique is classified by how it relates to the baseline cliques:
a union of several of them, a strict superset of at least one, or neither.
Baseline cliques that stop being maximal are absorbed into exactly one new
clique, so the rewrite is exact configuration by configuration.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.special import logsumexp

from .errors import InputError, UnsupportedPerturbationError
from .graphs import Clique
from .models import (
    Configuration,
    LogLinearModel,
    local_index,
    log_partition,
    state_blocks,
    substitute_table,
)


class PType(enum.Enum):
    TYPE_I = "I"
    TYPE_II = "II"
    TYPE_III = "III"


@dataclass(frozen=True)
class PerturbationReport:
    ptype: PType
    # Type I: cliques whose (weight, table) changed.
    changed_cliques: tuple[Clique, ...] = ()
    # Type II: new maximal cliques that are unions of >= 2 base cliques /
    # strict supersets of >= 1 base clique, each with the base cliques it
    # absorbs; plus entirely new cliques.
    b_union: tuple[tuple[Clique, tuple[Clique, ...]], ...] = ()
    b_superset: tuple[tuple[Clique, tuple[Clique, ...]], ...] = ()
    b_new: tuple[Clique, ...] = ()


@dataclass(frozen=True)
class ExcessFactor:
    """Sum-of-terms representation of log Phi over a configuration space."""

    cards: np.ndarray
    terms: tuple[tuple[tuple[int, ...], np.ndarray], ...]
    const: float = 0.0

    def evaluate(self, states: np.ndarray) -> np.ndarray:
        out = np.full(states.shape[0], self.const, dtype=float)
        for nodes, table in self.terms:
            out += table[local_index(states, nodes, self.cards)]
        return out

    def evaluate_one(self, x: Configuration) -> float:
        arr = np.asarray(x, dtype=np.int64)[None, :]
        return float(self.evaluate(arr))

    def with_context(self, context: Mapping[int, int]) -> "ExcessFactor":
        """Substitute context values uniformly into every term."""
        if not context:
            return self
        free = [v for v in range(len(self.cards)) if v not in context]
        free_index = {v: i for i, v in enumerate(free)}
        terms = []
        const = self.const
        for nodes, table in self.terms:
            kept, sub = substitute_table(nodes, table, self.cards, context)
            if kept:
                terms.append((tuple(free_index[v] for v in kept), sub))
            else:
                const += float(sub[0])
        return ExcessFactor(self.cards[free], tuple(terms), const)

    @classmethod
    def empty(cls, cards: np.ndarray) -> "ExcessFactor":
        return cls(np.asarray(cards, dtype=np.int64), (), 0.0)


def _tables_differ(a, b) -> bool:
    return a.weight != b.weight or not np.array_equal(a.table, b.table)


def classify(base: LogLinearModel, alt: LogLinearModel) -> PerturbationReport:
    """Classify how ``alt`` relates to ``base``.

    Different node sets/cardinalities, or edge sets where the baseline's is
    not a subset of the alternative's, are reported as Type III (no
    decomposition).  Ties between the union and superset cases go to the
    union case.
    """
    if base.n_nodes != alt.n_nodes or not np.array_equal(base.cards, alt.cards):
        return PerturbationReport(PType.TYPE_III)
    if base.graph.edges == alt.graph.edges:
        changed = tuple(
            fb.clique
            for fb, fa in zip(base.factors, alt.factors)
            if _tables_differ(fb, fa)
        )
        return PerturbationReport(PType.TYPE_I, changed_cliques=changed)
    if not base.graph.edges < alt.graph.edges:
        return PerturbationReport(PType.TYPE_III)

    base_cliques = set(f.clique for f in base.factors)
    alt_only = [f.clique for f in alt.factors if f.clique not in base_cliques]
    b_union, b_superset, b_new = [], [], []
    for c in alt_only:
        cs = set(c)
        contained = tuple(b for b in sorted(base_cliques) if set(b) <= cs)
        covered = set().union(*map(set, contained)) if contained else set()
        if contained and covered == cs:
            b_union.append((c, contained))
        elif contained:
            b_superset.append((c, contained))
        else:
            b_new.append(c)
    return PerturbationReport(
        PType.TYPE_II,
        b_union=tuple(b_union),
        b_superset=tuple(b_superset),
        b_new=tuple(b_new),
    )


def excess_factor(
    base: LogLinearModel,
    alt: LogLinearModel,
    report: PerturbationReport | None = None,
    context: Mapping[int, int] | None = None,
) -> ExcessFactor:
    """Build log Phi with alt potentials = base potentials * exp(Phi).

    The identity holds exactly per configuration: terms are weighted
    feature tables combined with the same arithmetic used by the models.
    A base clique absorbed by the alternative is subtracted inside exactly
    one containing new clique (the first in canonical order), so nothing
    is double counted.  A context, when given, is substituted uniformly
    into every term.
    """
    if report is None:
        report = classify(base, alt)
    if report.ptype is PType.TYPE_III:
        raise UnsupportedPerturbationError(
            "Type III perturbation: node sets differ or edges were removed"
        )
    cards = base.cards
    terms: list[tuple[tuple[int, ...], np.ndarray]] = []

    base_by_clique = {f.clique: f for f in base.factors}
    alt_by_clique = {f.clique: f for f in alt.factors}

    # Common cliques with changed potentials contribute Type-I style terms.
    for c, fb in base_by_clique.items():
        fa = alt_by_clique.get(c)
        if fa is not None and _tables_differ(fb, fa):
            terms.append((c, fa.weight * fa.table - fb.weight * fb.table))

    # New maximal cliques: add their potential, minus the absorbed base
    # potentials (each base clique claimed once).
    claimed: set[Clique] = set()
    for fa in alt.factors:
        if fa.clique in base_by_clique:
            continue
        table = fa.weight * fa.table.copy()
        cs = set(fa.clique)
        pos = {v: i for i, v in enumerate(fa.clique)}
        big = next(state_blocks(cards[list(fa.clique)], block=len(fa.table)))
        for b, fb in base_by_clique.items():
            if b in claimed or b in alt_by_clique or not set(b) <= cs:
                continue
            claimed.add(b)
            # Broadcast the absorbed table onto the bigger clique's space.
            idx = np.zeros(len(fa.table), dtype=np.int64)
            stride = 1
            for v in b:
                idx += big[:, pos[v]].astype(np.int64) * stride
                stride *= int(cards[v])
            table -= fb.weight * fb.table[idx]
        terms.append((fa.clique, table))

    ef = ExcessFactor(cards.copy(), tuple(terms), 0.0)
    if context:
        ef = ef.with_context(context)
    return ef


def log_mean_exp(base, ef: ExcessFactor, cap: int | None = None) -> float:
    """log E_base[exp(Phi)], the log partition-function ratio."""
    log_z = log_partition(base, cap)
    parts = [
        logsumexp(base.log_weight(s) - log_z + ef.evaluate(s))
        for s in state_blocks(base.cards)
    ]
    return float(logsumexp(parts))


def partition_ratio(base, ef: ExcessFactor, cap: int | None = None) -> float:
    """E_base[exp(Phi)]; times Z_base it equals the alternative's Z."""
    return math.exp(log_mean_exp(base, ef, cap))


def likelihood_ratio(base, ef: ExcessFactor, x: Configuration, cap: int | None = None) -> float:
    """dq_alt/dq_base at x, via exp(Phi(x)) / E_base[exp(Phi)]."""
    base.validate_configuration(x)
    return math.exp(ef.evaluate_one(x) - log_mean_exp(base, ef, cap))
