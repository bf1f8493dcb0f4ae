"""Spin systems on lattices: exact finite boxes, mean-field pressure,
coarse-graining checks and magnetization uncertainty bands."""

from .bands import (
    FiniteBandReport,
    KacScalePerturbation,
    LongRangeKappaReport,
    LongRangePerturbation,
    PhaseBand,
    TruncationPerturbation,
    finite_size_band,
    long_range_kappa_bound,
    phase_band,
    sample_kappa_values,
)
from .coarse import CoarseGrainReport, coarse_grain_check
from .kernels import (
    KacKernel,
    Kernel,
    LongRangeTail,
    PiecewiseConstantKacKernel,
    ScaledKernel,
    SubtractedTail,
    SumKernel,
    TableKernel,
    TruncatedKernel,
    nearest_neighbor,
)
from .lattice import (
    GibbsDistribution,
    IsingExcess,
    LatticeSystem,
    boundary_site_count,
    boundary_sum_bounds,
    cgf_magnetization,
    exact_magnetization,
    excess_factor_ising,
    finite_pressure,
    hamiltonian,
    log_partition_lattice,
    mc_pressure,
    mean_spin_qoi,
    metropolis_magnetization,
    norm1_kl_upper,
    perturbed_system,
    rmrf_clique_potentials,
    total_spin_qoi,
)
from .meanfield import entropy, lp_magnetization_branches, lp_pressure, mean_field_potential
