"""Pydantic request/response models for the compute service.

These are the wire contract shared by the HTTP endpoints and the CLI
(which calls the same handlers in process by default).
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class BoundSide(BaseModel):
    value: float
    lambda_star: Optional[float] = None  # None when an analytic endpoint
    endpoint: Optional[str] = None  # "zero" | "infinity" | None


class BoundRequest(BaseModel):
    base_model_text: str
    alt_model_text: Optional[str] = None
    eta: Optional[float] = Field(default=None, ge=0)
    qoi: str = Field(description="e.g. 'indicator:2=1,0=0' or 'mean:3'")
    directions: list[Literal["lower", "upper"]] = ["lower", "upper"]
    enum_cap: Optional[int] = None


class BoundResponse(BaseModel):
    ptype: Optional[str] = None  # "I" | "II" (model mode only)
    kl: float
    base_expectation: float
    lower: Optional[BoundSide] = None
    upper: Optional[BoundSide] = None


class MedicalRow(BaseModel):
    parameter: float
    lower: float
    upper: float
    baseline: float


class MedicalRequest(BaseModel):
    family: Literal["type1", "type2"]
    p_i: float = 0.2
    p_a: float = 0.3
    w_c: float = 1.5
    sweep: Literal["a", "p_ii"] = "a"
    values: list[float]
    a: float = 0.0  # fixed a for the p_ii sweep
    p_ii: float = 0.3  # fixed p_ii for the type2 a sweep


class MedicalResponse(BaseModel):
    rows: list[MedicalRow]


class PerturbationSpec(BaseModel):
    kind: Literal["kac", "truncation", "longrange"]
    a: float = 0.1
    epsilon: float = 0.05
    j_inf: float = 1.0
    gamma: float = 0.25


class IsingBandRequest(BaseModel):
    beta: float = 1.1
    j_total: float = 1.0
    h_values: list[float]
    perturbation: PerturbationSpec
    h_tilde_offset: float = 0.0
    method: Literal["theorem", "norm1"] = "theorem"


class BandRow(BaseModel):
    h: float
    m_baseline_minus: float
    m_baseline_plus: float
    lower: float
    upper: float
    lambda_star_lower: float
    lambda_star_upper: float


class IsingBandResponse(BaseModel):
    method: str
    budget: float
    exact_tail: Optional[float] = None  # truncation: lattice tail for comparison
    rows: list[BandRow]


class IsingFiniteRequest(BaseModel):
    dimension: int = 1
    side: int = 12
    kernel: Literal["kac", "pwc", "nn"] = "kac"
    gamma: float = 0.25
    beta: float = 1.1
    h: float = 0.0
    boundary: Literal["free", "plus", "minus"] = "free"
    perturbation: PerturbationSpec
    h_tilde_offset: float = 0.0
    method: Literal["theorem", "norm1"] = "theorem"
    enum_cap: Optional[int] = None
    mc: bool = False
    seed: int = 0


class IsingFiniteResponse(BaseModel):
    lower: float
    upper: float
    lambda_star_lower: float
    lambda_star_upper: float
    method: str
    budget_term: float
    prefactor: float
    baseline_magnetization: float
    perturbed_magnetization: Optional[float] = None
    bracketed: Optional[bool] = None
    norm1_kl_per_site: float


class IsingCoarseRequest(BaseModel):
    gammas: list[float] = [0.25, 0.0625]
    box_side: Optional[int] = None
    h: float = 0.0
    n_samples: int = 8
    seed: int = 0


class CoarseRow(BaseModel):
    gamma: float
    block_side: int
    box_side: int
    delta1: float
    max_cross_block_gap: float
    delta1_holds: bool
    delta2: float
    max_same_block_gap: float
    delta2_holds: bool
    max_energy_ratio: float


class IsingCoarseResponse(BaseModel):
    rows: list[CoarseRow]


class IsingLongRangeRequest(BaseModel):
    a: float = 1.0
    gamma: float = 0.125
    side: int = 12
    beta: float = 1.0
    h: float = 0.0
    boundary: Literal["free", "plus", "minus"] = "plus"
    n_samples: int = 64
    seed: int = 0
    enum_cap: Optional[int] = None


class IsingLongRangeResponse(BaseModel):
    tail_sum: float
    c_constant: float
    kappa_bound: float
    max_sampled_kappa: float
    dominated: bool
    lower: float
    upper: float
    perturbed_magnetization: Optional[float] = None
    bracketed: Optional[bool] = None


class HealthResponse(BaseModel):
    status: str
    version: str
