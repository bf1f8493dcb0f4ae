"""Closed-form diagnostic-network bounds and their concrete realization.

The four-variable network has maximal cliques {0,1} and {1,2,3}.  The
closed forms depend on the model only through a handful of scalars: the
baseline probability of the clique event B_c (p_i), of the enlarged-clique
event B_ct (p_ii), their overlap (p_u), the probability of the event of
interest (p_a), the clique weight w_c and the relative weight change a.

``realize_*`` builds an explicit model with those scalars so every closed
form can be cross-checked against the generic enumeration engine.
Construction (see README): B_c = {y0=1, y1=1} with the weight-w_c factor
on clique {0,1} equal to its indicator; the {1,2,3} feature table is a sum
of single-node indicator terms that dial the marginals of y1 (fixing p_i),
y2 (fixing p_a via A = {y2=1}) and y3 (fixing p_ii / p_u through B_ct).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import BoundReport, minimize_ratio
from .errors import InputError
from .graphs import UndirectedGraph, maximal_cliques
from .models import Factor, LogLinearModel, QoI, indicator_of_assignment

MEDICAL_EDGES = ((0, 1), (1, 2), (1, 3), (2, 3))


@dataclass(frozen=True)
class DiagnosticsScenario:
    p_i: float  # baseline probability of B_c
    p_a: float  # baseline probability of the event of interest
    w_c: float  # baseline weight on the changed/absorbed clique
    a: float = 0.0  # relative weight change in [-1, 1]
    p_ii: float = 0.0  # baseline probability of B_ct (enlarged clique event)
    p_u: float = 0.0  # baseline probability of the overlap B_c & B_ct

    def __post_init__(self):
        for name in ("p_i", "p_a", "p_ii", "p_u"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InputError(f"{name}={v} is not a probability")
        if not -1.0 <= self.a <= 1.0:
            raise InputError(f"a={self.a} must lie in [-1, 1]")
        if self.p_u > min(self.p_i, self.p_ii) + 1e-12:
            raise InputError("p_u cannot exceed min(p_i, p_ii)")
        if self.p_i + self.p_ii - self.p_u > 1.0 + 1e-12:
            raise InputError("p_i + p_ii - p_u cannot exceed 1")


# --- closed-form moments -------------------------------------------------

def type1_mean_phi(s: DiagnosticsScenario) -> float:
    return math.exp(s.a * s.w_c) * s.p_i + 1.0 - s.p_i


def type1_kl(s: DiagnosticsScenario) -> float:
    e = type1_mean_phi(s)
    aw = s.a * s.w_c
    return aw * math.exp(aw) * s.p_i / e - math.log(e)


def type2_mean_phi_disjoint(s: DiagnosticsScenario) -> float:
    w, a = s.w_c, s.a
    return (
        math.exp((1 + a) * w) * s.p_ii
        + math.exp(-w) * s.p_i
        + 1.0
        - s.p_i
        - s.p_ii
    )


def type2_kl_disjoint(s: DiagnosticsScenario) -> float:
    w, a = s.w_c, s.a
    e = type2_mean_phi_disjoint(s)
    num = -w * math.exp(-w) * s.p_i + (1 + a) * w * math.exp((1 + a) * w) * s.p_ii
    return num / e - math.log(e)


def type2_partition_overlap(s: DiagnosticsScenario) -> float:
    """E_base[Phi] when B_c and B_ct overlap with probability p_u."""
    w, a, pu = s.w_c, s.a, s.p_u
    return (
        math.exp((1 + a) * w) * (s.p_ii - pu)
        + math.exp(-w) * (s.p_i - pu)
        + math.exp(a * w) * pu
        + 1.0
        - s.p_i
        - s.p_ii
        + pu
    )


def type2_kl_overlap(s: DiagnosticsScenario) -> float:
    w, a, pu = s.w_c, s.a, s.p_u
    e = type2_partition_overlap(s)
    num = (
        (1 + a) * w * math.exp((1 + a) * w) * (s.p_ii - pu)
        - w * math.exp(-w) * (s.p_i - pu)
        + a * w * math.exp(a * w) * pu
    )
    return num / e - math.log(e)


# --- closed-form bounds ---------------------------------------------------

def _indicator_bound(p_a: float, kl: float, direction: str) -> BoundReport:
    """Optimize (log(p_a e^{+-lam} + 1 - p_a) + kl)/lam over lam > 0."""
    if direction not in ("upper", "lower"):
        raise InputError(f"direction must be 'upper' or 'lower', got {direction!r}")
    sign = 1.0 if direction == "upper" else -1.0
    if kl <= 0.0:
        return BoundReport(direction, p_a, 0.0, max(kl, 0.0), "zero", None)
    if p_a in (0.0, 1.0):
        return BoundReport(direction, p_a, 0.0, kl, "zero", None)
    la, l1a = math.log(p_a), math.log1p(-p_a)

    def num(lam: float) -> float:
        return float(np.logaddexp(la + sign * lam, l1a)) + kl

    fmax = 1.0 if direction == "upper" else 0.0
    res = minimize_ratio(num, math.inf, fmax)
    return BoundReport(direction, sign * res.value, res.lambda_star, kl,
                       res.endpoint, res.trace)


def type1_bounds(s: DiagnosticsScenario, direction: str) -> BoundReport:
    """Weight-change bound on the perturbed probability of the event."""
    return _indicator_bound(s.p_a, type1_kl(s), direction)


def type2_bounds_disjoint(s: DiagnosticsScenario, direction: str) -> BoundReport:
    """Added-edge bound (disjoint clique events) on the event probability."""
    if s.p_u != 0.0:
        raise InputError(
            "type2_bounds_disjoint requires p_u = 0; use the overlap "
            "partition/KL formulas for overlapping events"
        )
    return _indicator_bound(s.p_a, type2_kl_disjoint(s), direction)


def type2_bounds_overlap(s: DiagnosticsScenario, direction: str) -> BoundReport:
    return _indicator_bound(s.p_a, type2_kl_overlap(s), direction)


# --- explicit realization -------------------------------------------------

def _logit(p: float, what: str) -> float:
    if not 0.0 < p < 1.0:
        raise InputError(f"{what}={p} must lie strictly inside (0, 1) to realize a model")
    return math.log(p / (1.0 - p))


def _sigma(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def _table_123(t1: float, t2: float, t3: float, t4: float = 0.0) -> np.ndarray:
    # Nodes (1, 2, 3); index = y1 + 2*y2 + 4*y3.
    table = np.zeros(8)
    for idx in range(8):
        y1, y2, y3 = idx & 1, (idx >> 1) & 1, (idx >> 2) & 1
        table[idx] = t1 * y1 + t2 * y2 + t3 * y3 + t4 * y1 * y3
    return table


def _base_model(s: DiagnosticsScenario, t3: float, t4: float) -> LogLinearModel:
    g = UndirectedGraph(4, MEDICAL_EDGES)
    sig_w = _sigma(s.w_c)
    if not s.p_i < sig_w:
        raise InputError(
            f"realization requires p_i < sigma(w_c) = {sig_w:.4f}; got p_i={s.p_i}"
        )
    s1 = s.p_i / sig_w
    # Marginal of y1: odds include the y0 factor and the y3 interaction.
    t1 = (
        _logit(s1, "p(y1=1)")
        - math.log1p(math.exp(s.w_c))
        - math.log1p(math.exp(t3 + t4))
        + math.log(2.0)
        + math.log1p(math.exp(t3))
    )
    t2 = _logit(s.p_a, "p_a")
    f01 = Factor((0, 1), s.w_c, np.array([0.0, 0.0, 0.0, 1.0]))  # 1_{y0=1,y1=1}
    f123 = Factor((1, 2, 3), 1.0, _table_123(t1, t2, t3, t4))
    return LogLinearModel(g, [2, 2, 2, 2], [f01, f123])


def event_of_interest() -> QoI:
    """Indicator of A = {y2 = 1}; its baseline probability is p_a."""
    return indicator_of_assignment({2: 1})


def realize_type1(s: DiagnosticsScenario) -> tuple[LogLinearModel, LogLinearModel]:
    """Baseline and weight-scaled alternative realizing (p_i, p_a, w_c, a)."""
    base = _base_model(s, t3=0.0, t4=0.0)
    alt_factors = [
        Factor((0, 1), (1.0 + s.a) * s.w_c, base.factors[0].table.copy()),
        base.factors[1],
    ]
    alt = LogLinearModel(base.graph, [2, 2, 2, 2], alt_factors)
    return base, alt


def _bct_table_disjoint() -> np.ndarray:
    # Nodes (0, 1, 3); index = y0 + 2*y1 + 4*y3.  B_ct = {y3=1} minus B_c.
    table = np.zeros(8)
    for idx in range(8):
        y0, y1, y3 = idx & 1, (idx >> 1) & 1, (idx >> 2) & 1
        table[idx] = float(y3 == 1 and not (y0 == 1 and y1 == 1))
    return table


def realize_type2_disjoint(s: DiagnosticsScenario) -> tuple[LogLinearModel, LogLinearModel]:
    """Baseline and added-edge alternative with disjoint B_c, B_ct.

    B_ct = {y3=1} \\ B_c, so p_ii = p(y3=1) (1 - p_i); y3's marginal dials
    p_ii.  Requires p_ii < 1 - p_i strictly.
    """
    if s.p_u != 0.0:
        raise InputError("disjoint realization requires p_u = 0")
    if not s.p_ii < 1.0 - s.p_i:
        raise InputError("disjoint realization requires p_ii < 1 - p_i strictly")
    t3 = _logit(s.p_ii / (1.0 - s.p_i), "p(y3=1)") if s.p_ii > 0 else -math.inf
    if s.p_ii == 0.0:
        # Empty B_ct: any finite marginal works; keep y3 at 1/2.
        t3 = 0.0
    base = _base_model(s, t3=t3, t4=0.0)
    g_alt = UndirectedGraph(4, MEDICAL_EDGES + ((0, 3),))
    table = _bct_table_disjoint()
    if s.p_ii == 0.0:
        table = np.zeros(8)
    alt_factors = [
        Factor((0, 1, 3), (1.0 + s.a) * s.w_c, table),
        base.factors[1],
    ]
    alt = LogLinearModel(g_alt, [2, 2, 2, 2], alt_factors)
    return base, alt


def realize_type2_overlap(s: DiagnosticsScenario) -> tuple[LogLinearModel, LogLinearModel]:
    """Added-edge alternative with overlapping events, p_u = p(B_c & B_ct).

    B_ct = ({y0=1,y1=1} | {y1=0}) & {y3=1}; a y1-y3 interaction term in the
    {1,2,3} table splits p(y3=1 | y1) so p_u and p_ii dial independently.
    Requires 0 < p_u < p_i and p_ii - p_u < 1 - p_i/sigma(w_c) strictly.
    """
    if not 0.0 < s.p_u < s.p_i:
        raise InputError("overlap realization requires 0 < p_u < p_i strictly")
    s1 = s.p_i / _sigma(s.w_c)
    s31 = s.p_u / s.p_i
    if not s.p_ii - s.p_u < 1.0 - s1:
        raise InputError(
            f"overlap realization requires p_ii - p_u < {1.0 - s1:.4f} strictly"
        )
    s30 = (s.p_ii - s.p_u) / (1.0 - s1)
    t3 = _logit(s30, "p(y3=1|y1=0)")
    t4 = _logit(s31, "p(y3=1|y1=1)") - t3
    base = _base_model(s, t3=t3, t4=t4)
    g_alt = UndirectedGraph(4, MEDICAL_EDGES + ((0, 3),))
    table = np.zeros(8)
    for idx in range(8):
        y0, y1, y3 = idx & 1, (idx >> 1) & 1, (idx >> 2) & 1
        table[idx] = float(y3 == 1 and ((y0 == 1 and y1 == 1) or y1 == 0))
    alt_factors = [
        Factor((0, 1, 3), (1.0 + s.a) * s.w_c, table),
        base.factors[1],
    ]
    alt = LogLinearModel(g_alt, [2, 2, 2, 2], alt_factors)
    return base, alt


# --- tilted-event graph classification ------------------------------------

@dataclass(frozen=True)
class TiltClassification:
    ptype: str  # "I" or "II"
    support: tuple[int, ...]
    added_edges: tuple[tuple[int, int], ...]
    graph: UndirectedGraph


def tilted_event_graph(base: LogLinearModel, event) -> TiltClassification:
    """Minimal graph carrying the exponential tilt by an event indicator.

    ``event`` is a collection of full configurations.  The indicator's
    support nodes must form a clique in the tilted model's graph; if they
    already sit inside one maximal clique of the base graph the tilt is a
    weight change (Type I), otherwise the missing edges are added (Type II).
    """
    configs = {tuple(int(v) for v in x) for x in event}
    if not configs:
        raise InputError("event must be nonempty")
    cards = [int(c) for c in base.cards]
    member = np.zeros(cards, order="F", dtype=bool)
    for x in configs:
        base.validate_configuration(x)
        member[x] = True
    support = []
    for v in range(base.n_nodes):
        ref = np.take(member, [0], axis=v)
        if not np.array_equal(member, np.broadcast_to(ref, member.shape)):
            support.append(v)
    support_t = tuple(support)
    missing = tuple(
        (i, j)
        for k, i in enumerate(support_t)
        for j in support_t[k + 1:]
        if not base.graph.adjacent(i, j)
    )
    inside = any(set(support_t) <= set(c) for c in maximal_cliques(base.graph))
    if inside or not support_t:
        return TiltClassification("I", support_t, (), base.graph)
    graph = UndirectedGraph(
        base.n_nodes, tuple(base.graph.edges) + missing
    )
    return TiltClassification("II", support_t, missing, graph)


# --- figure sweeps ---------------------------------------------------------

def type1_curve(s: DiagnosticsScenario, a_values) -> list[tuple[float, float, float, float]]:
    rows = []
    for a in a_values:
        sa = DiagnosticsScenario(s.p_i, s.p_a, s.w_c, a=float(a))
        lo = type1_bounds(sa, "lower").value
        up = type1_bounds(sa, "upper").value
        rows.append((float(a), lo, up, s.p_a))
    return rows


def type2_curve(
    s: DiagnosticsScenario, sweep: str, values
) -> list[tuple[float, float, float, float]]:
    """Sweep 'p_ii' at fixed a, or 'a' at fixed p_ii, for the disjoint case."""
    if sweep not in ("a", "p_ii"):
        raise InputError(f"sweep must be 'a' or 'p_ii', got {sweep!r}")
    rows = []
    for v in values:
        v = float(v)
        if sweep == "p_ii":
            sv = DiagnosticsScenario(s.p_i, s.p_a, s.w_c, a=s.a, p_ii=v)
        else:
            sv = DiagnosticsScenario(s.p_i, s.p_a, s.w_c, a=v, p_ii=s.p_ii)
        lo = type2_bounds_disjoint(sv, "lower").value
        up = type2_bounds_disjoint(sv, "upper").value
        rows.append((v, lo, up, s.p_a))
    return rows
