"""Request -> response handlers; pure functions over the core package.

The FastAPI app and the CLI both call these, so local and remote runs
produce identical payloads.
"""

from __future__ import annotations

import math

import numpy as np

from .. import engine, medical, modelfile, perturbations
from ..errors import InputError, PreconditionError
from ..ising import (
    KacKernel,
    KacScalePerturbation,
    LatticeSystem,
    LongRangePerturbation,
    LongRangeTail,
    PiecewiseConstantKacKernel,
    ScaledKernel,
    SubtractedTail,
    TruncationPerturbation,
    exact_magnetization,
    finite_size_band,
    long_range_kappa_bound,
    nearest_neighbor,
    norm1_kl_upper,
    perturbed_system,
    phase_band,
    sample_kappa_values,
)
from ..models import QoI, expectation, indicator_of_assignment
from . import schemas as sc


def _parse_qoi(spec: str, n_nodes: int) -> QoI:
    kind, _, rest = spec.partition(":")
    if kind == "indicator":
        assignment = {}
        for tok in rest.split(","):
            try:
                node, value = tok.split("=")
                assignment[int(node)] = int(value)
            except ValueError:
                raise InputError(f"bad indicator token {tok!r}") from None
        for v in assignment:
            if not 0 <= v < n_nodes:
                raise InputError(f"qoi references unknown node {v}")
        return indicator_of_assignment(assignment)
    if kind == "mean":
        try:
            node = int(rest)
        except ValueError:
            raise InputError(f"bad node id {rest!r}") from None
        if not 0 <= node < n_nodes:
            raise InputError(f"qoi references unknown node {node}")
        return lambda states: states[:, node].astype(float)
    raise InputError(f"unknown qoi kind {kind!r}; use 'indicator:...' or 'mean:NODE'")


def _side(report: engine.BoundReport) -> sc.BoundSide:
    lam = None if report.endpoint else report.lambda_star
    return sc.BoundSide(value=report.value, lambda_star=lam, endpoint=report.endpoint)


def handle_bound(req: sc.BoundRequest) -> sc.BoundResponse:
    base, _ = modelfile.parse(req.base_model_text)
    f = _parse_qoi(req.qoi, base.n_nodes)
    cap = req.enum_cap
    base_mean = expectation(base, f, cap)
    sides: dict[str, sc.BoundSide] = {}
    if req.alt_model_text is not None:
        alt, _ = modelfile.parse(req.alt_model_text)
        report = perturbations.classify(base, alt)
        ef = perturbations.excess_factor(base, alt, report)
        kl = engine.kl_divergence(base, ef, cap)
        for d in req.directions:
            sides[d] = _side(engine.uq_bound_model(base, ef, f, d, cap=cap))
        return sc.BoundResponse(
            ptype=report.ptype.value, kl=kl, base_expectation=base_mean, **sides
        )
    if req.eta is None:
        raise InputError("provide either alt_model_text or eta")
    for d in req.directions:
        sides[d] = _side(engine.uq_bound_eta(base, f, req.eta, d, cap=cap))
    return sc.BoundResponse(kl=req.eta, base_expectation=base_mean, **sides)


def handle_medical(req: sc.MedicalRequest) -> sc.MedicalResponse:
    base = medical.DiagnosticsScenario(
        req.p_i, req.p_a, req.w_c, a=req.a, p_ii=req.p_ii
    )
    if req.family == "type1":
        rows = medical.type1_curve(base, req.values)
    else:
        rows = medical.type2_curve(base, req.sweep, req.values)
    return sc.MedicalResponse(
        rows=[
            sc.MedicalRow(parameter=p, lower=lo, upper=up, baseline=b)
            for p, lo, up, b in rows
        ]
    )


def _band_perturbation(spec: sc.PerturbationSpec):
    if spec.kind == "kac":
        return KacScalePerturbation(spec.a)
    if spec.kind == "truncation":
        return TruncationPerturbation(spec.epsilon, spec.j_inf)
    return LongRangePerturbation(spec.a, spec.gamma)


def handle_ising_band(req: sc.IsingBandRequest) -> sc.IsingBandResponse:
    pert = _band_perturbation(req.perturbation)
    band = phase_band(
        req.beta, req.h_values, req.j_total, pert, req.h_tilde_offset, req.method
    )
    exact_tail = None
    if req.perturbation.kind == "truncation":
        base_kernel = KacKernel(1, req.perturbation.gamma)
        exact_tail = SubtractedTail(base_kernel, req.perturbation.epsilon).lattice_abs_sum()
    rows = [
        sc.BandRow(
            h=h, m_baseline_minus=bm, m_baseline_plus=bp, lower=lo, upper=up,
            lambda_star_lower=ll, lambda_star_upper=lu,
        )
        for h, bm, bp, lo, up, ll, lu in zip(
            band.h_grid, band.baseline_minus, band.baseline_plus,
            band.lower, band.upper, band.lambda_lower, band.lambda_upper,
        )
    ]
    return sc.IsingBandResponse(
        method=band.method, budget=band.budget, exact_tail=exact_tail, rows=rows
    )


def _finite_kernels(req: sc.IsingFiniteRequest):
    if req.kernel == "kac":
        base = KacKernel(req.dimension, req.gamma)
    elif req.kernel == "pwc":
        base = PiecewiseConstantKacKernel(req.dimension, req.gamma)
    else:
        base = nearest_neighbor(req.dimension)
    spec = req.perturbation
    if spec.kind == "kac":
        f_kernel = ScaledKernel(base, spec.a)
        range_f = base.range_length
    elif spec.kind == "truncation":
        if not isinstance(base, KacKernel):
            raise InputError("truncation perturbs the smooth Kac kernel")
        f_kernel = SubtractedTail(base, spec.epsilon)
        range_f = base.range_length
    else:
        if req.dimension != 1:
            raise InputError("the long-range perturbation is one-dimensional")
        f_kernel = LongRangeTail(spec.a, req.gamma)
        range_f = f_kernel.cutoff
    return base, f_kernel, range_f


def handle_ising_finite(req: sc.IsingFiniteRequest) -> sc.IsingFiniteResponse:
    base_kernel, f_kernel, range_f = _finite_kernels(req)
    sys = LatticeSystem(
        req.dimension, req.side, base_kernel, req.beta, req.h, req.boundary
    )
    h_tilde = req.h + req.h_tilde_offset
    if req.mc:
        raise PreconditionError(
            "Monte Carlo band estimation is not wired into the service; "
            "use the library's metropolis helpers for demo runs"
        )
    report = finite_size_band(
        sys, f_kernel, h_tilde, req.method, range_f=range_f, cap=req.enum_cap
    )
    f_sum = f_kernel.lattice_abs_sum()
    return sc.IsingFiniteResponse(
        lower=report.lower,
        upper=report.upper,
        lambda_star_lower=report.lambda_lower,
        lambda_star_upper=report.lambda_upper,
        method=report.method,
        budget_term=report.budget_term,
        prefactor=report.prefactor,
        baseline_magnetization=report.baseline_magnetization,
        perturbed_magnetization=report.perturbed_magnetization,
        bracketed=report.bracketed,
        norm1_kl_per_site=norm1_kl_upper(req.beta, req.h, h_tilde, f_sum),
    )


def handle_ising_coarse(req: sc.IsingCoarseRequest) -> sc.IsingCoarseResponse:
    from ..ising import coarse_grain_check

    rows = []
    for gamma in req.gammas:
        rep = coarse_grain_check(
            gamma, box_side=req.box_side, h=req.h, n_samples=req.n_samples,
            seed=req.seed,
        )
        rows.append(
            sc.CoarseRow(
                gamma=rep.gamma,
                block_side=rep.block_side,
                box_side=rep.box_side,
                delta1=rep.delta1,
                max_cross_block_gap=rep.max_cross_block_gap,
                delta1_holds=rep.delta1_holds,
                delta2=rep.delta2,
                max_same_block_gap=rep.max_same_block_gap,
                delta2_holds=rep.delta2_holds,
                max_energy_ratio=max(rep.energy_ratios),
            )
        )
    return sc.IsingCoarseResponse(rows=rows)


def handle_ising_longrange(req: sc.IsingLongRangeRequest) -> sc.IsingLongRangeResponse:
    base = PiecewiseConstantKacKernel(1, req.gamma)
    sys = LatticeSystem(1, req.side, base, req.beta, req.h, req.boundary)
    tail = LongRangeTail(req.a, req.gamma)
    rep = long_range_kappa_bound(sys, req.a, req.gamma)
    sampled = sample_kappa_values(sys, tail, req.n_samples, req.seed)
    max_kappa = float(np.max(np.abs(sampled))) if sampled.size else 0.0
    band = finite_size_band(
        sys, tail, sys.h, "theorem", range_f=tail.cutoff, cap=req.enum_cap
    )
    return sc.IsingLongRangeResponse(
        tail_sum=rep.tail_sum,
        c_constant=rep.c_constant,
        kappa_bound=rep.kappa_bound,
        max_sampled_kappa=max_kappa,
        dominated=max_kappa <= rep.kappa_bound + 1e-12,
        lower=band.lower,
        upper=band.upper,
        perturbed_magnetization=band.perturbed_magnetization,
        bracketed=band.bracketed,
    )
