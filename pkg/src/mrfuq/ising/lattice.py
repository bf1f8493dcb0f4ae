"""Finite spin systems: Hamiltonians, Gibbs measures, pressures, excess
factors for perturbed interactions, and the norm-1 divergence bound.

Spins live on a d-dimensional box of side L.  Boundary conditions are
all-plus, all-minus, free, or an explicit table of spins within the
interaction range; for the infinite-range 1/r^2 tail the all-plus/minus
boundary fields are summed in closed form.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from ..errors import CapacityError, InputError, PreconditionError
from ..engine import QoILinearForm
from ..graphs import UndirectedGraph, maximal_cliques
from ..models import (
    Factor,
    LogLinearModel,
    ReducedModel,
    check_capacity,
    log_partition,
    reduce as reduce_model,
    state_blocks,
)
from ..perturbations import ExcessFactor
from .kernels import Kernel, SumKernel, Offset

Site = tuple[int, ...]


def box_sites(dimension: int, side: int) -> list[Site]:
    return list(itertools.product(range(side), repeat=dimension))


def boundary_site_count(dimension: int, side: int) -> int:
    """Sites of the box with a unit neighbor outside (|boundary|)."""
    if side <= 2:
        return side ** dimension
    return side ** dimension - (side - 2) ** dimension


class LatticeSystem:
    """Ising box with a kernel, inverse temperature, field and boundary."""

    def __init__(
        self,
        dimension: int,
        side: int,
        kernel: Kernel,
        beta: float,
        h: float,
        boundary: str | Mapping[Site, int] = "free",
    ):
        if dimension != kernel.dimension:
            raise InputError("kernel dimension does not match the lattice")
        if side < 1:
            raise InputError("side must be >= 1")
        if beta <= 0:
            raise InputError("beta must be positive")
        self.dimension = dimension
        self.side = side
        self.kernel = kernel
        self.beta = float(beta)
        self.h = float(h)
        self.boundary = boundary
        self.sites = box_sites(dimension, side)
        self.site_index = {s: i for i, s in enumerate(self.sites)}
        self.n = len(self.sites)
        self.coupling = self._coupling_matrix(kernel)
        self.boundary_field = self._boundary_field(kernel)

    # -- construction helpers ------------------------------------------

    def _coupling_matrix(self, kernel: Kernel) -> np.ndarray:
        k = np.zeros((self.n, self.n))
        for i, x in enumerate(self.sites):
            for j in range(i + 1, self.n):
                y = self.sites[j]
                v = kernel.value(tuple(a - b for a, b in zip(x, y)))
                if v != 0.0:
                    k[i, j] = k[j, i] = v
        return k

    def _inside(self, site: Site) -> bool:
        return all(0 <= c < self.side for c in site)

    def _boundary_spin(self, site: Site) -> int:
        if self.boundary == "free":
            return 0
        if self.boundary == "plus":
            return 1
        if self.boundary == "minus":
            return -1
        try:
            return int(self.boundary[site])
        except KeyError:
            raise InputError(
                f"explicit boundary is missing site {site} within interaction range"
            ) from None

    def _boundary_field(self, kernel: Kernel) -> np.ndarray:
        b = np.zeros(self.n)
        if self.boundary == "free":
            return b
        if isinstance(kernel, SumKernel):
            for part in kernel.parts:
                b += self._boundary_field(part)
            return b
        if math.isfinite(kernel.range_length):
            for i, x in enumerate(self.sites):
                for off, v in kernel.support_offsets():
                    y = tuple(a + o for a, o in zip(x, off))
                    if not self._inside(y):
                        b[i] += v * self._boundary_spin(y)
            return b
        if self.dimension != 1 or self.boundary not in ("plus", "minus"):
            raise PreconditionError(
                "infinite-range kernels support all-plus/all-minus boundaries "
                "in one dimension only"
            )
        sigma_bar = 1.0 if self.boundary == "plus" else -1.0
        for i, x in enumerate(self.sites):
            tail = kernel.tail_boundary_sum(x[0], self.side)
            if tail is None:
                raise PreconditionError("kernel cannot sum its boundary tail")
            b[i] = sigma_bar * tail
        return b

    # -- energies --------------------------------------------------------

    def energy(self, spins: np.ndarray, h_override: float | None = None) -> np.ndarray:
        """Hamiltonian of +-1 spin rows (B, n), boundary term included."""
        h = self.h if h_override is None else h_override
        s = np.asarray(spins, dtype=float)
        pair = -0.5 * np.einsum("bi,ij,bj->b", s, self.coupling, s)
        site = -(s @ (self.boundary_field + h))
        return pair + site

    def energy_one(self, spins: Iterable[int], h_override: float | None = None) -> float:
        arr = np.asarray(list(spins), dtype=float)[None, :]
        if arr.shape[1] != self.n:
            raise InputError(f"expected {self.n} spins")
        return float(self.energy(arr, h_override)[0])


def hamiltonian(sys: LatticeSystem, sigma: Iterable[int]) -> float:
    """Energy of one +-1 configuration given the system's boundary."""
    return sys.energy_one(sigma)


class GibbsDistribution:
    """exp(-beta H) over {0,1}^n states (0 -> spin -1, 1 -> spin +1)."""

    def __init__(self, sys: LatticeSystem, h_override: float | None = None):
        self.sys = sys
        self.h_override = h_override
        self.cards = np.full(sys.n, 2, dtype=np.int64)

    @property
    def n_states(self) -> int:
        return 1 << self.sys.n

    def log_weight(self, states: np.ndarray) -> np.ndarray:
        spins = 2.0 * states - 1.0
        return -self.sys.beta * self.sys.energy(spins, self.h_override)

    def validate_configuration(self, x):
        arr = np.asarray(x, dtype=np.int64)
        if arr.shape != (self.sys.n,) or np.any(arr < 0) or np.any(arr > 1):
            raise InputError(f"invalid configuration {x}")
        return arr


def total_spin_qoi(states: np.ndarray) -> np.ndarray:
    return (2.0 * states - 1.0).sum(axis=1)


def mean_spin_qoi(states: np.ndarray) -> np.ndarray:
    return (2.0 * states - 1.0).mean(axis=1)


def log_partition_lattice(
    sys: LatticeSystem, h_override: float | None = None, cap: int | None = None
) -> float:
    return log_partition(GibbsDistribution(sys, h_override), cap)


def finite_pressure(
    sys: LatticeSystem, h_override: float | None = None, cap: int | None = None
) -> float:
    """log Z / (beta |Delta|), exactly by enumeration."""
    h = sys.h if h_override is None else h_override
    return log_partition_lattice(sys, h, cap) / (sys.beta * sys.n)


def cgf_magnetization(sys: LatticeSystem, lam: float, cap: int | None = None) -> float:
    """CGF of |Delta| m(sigma): a pure field shift h -> h + lam/beta."""
    return log_partition_lattice(sys, sys.h + lam / sys.beta, cap) - log_partition_lattice(
        sys, None, cap
    )


def exact_magnetization(
    sys: LatticeSystem, h_override: float | None = None, cap: int | None = None
) -> float:
    dist = GibbsDistribution(sys, h_override)
    check_capacity(dist, cap)
    log_z = log_partition(dist, cap)
    total = 0.0
    for s in state_blocks(dist.cards):
        total += float(np.dot(np.exp(dist.log_weight(s) - log_z), mean_spin_qoi(s)))
    return total


# -- MRF construction -------------------------------------------------------

def rmrf_clique_potentials(
    sys: LatticeSystem, cap: int | None = None
) -> LogLinearModel | ReducedModel:
    """Factorized model whose probabilities equal the Gibbs measure.

    Builds the interaction graph over the box plus the boundary shell,
    assigns each pair/site energy term to one maximal clique containing
    it, and conditions on the boundary spins.  The product of clique
    potentials equals exp(-beta H(sigma | boundary)) by construction; the
    per-clique split of shared terms is a bookkeeping choice.
    """
    if not math.isfinite(sys.kernel.range_length):
        raise PreconditionError("rMRF construction needs a finite-range kernel")
    offsets = sys.kernel.support_offsets()
    shell: list[Site] = []
    if sys.boundary != "free":
        seen = set()
        for x in sys.sites:
            for off, _ in offsets:
                y = tuple(a + o for a, o in zip(x, off))
                if not sys._inside(y) and y not in seen:
                    seen.add(y)
                    shell.append(y)
        shell.sort()
    nodes = sys.sites + shell
    index = {s: i for i, s in enumerate(nodes)}
    edges = []
    for i, x in enumerate(nodes):
        for j in range(i + 1, len(nodes)):
            y = nodes[j]
            if sys.kernel.value(tuple(a - b for a, b in zip(x, y))) != 0.0:
                edges.append((i, j))
    graph = UndirectedGraph(len(nodes), edges)
    cliques = maximal_cliques(graph)

    # Assign each energy term to the first clique containing its nodes.
    clique_of_pair: dict[tuple[int, int], int] = {}
    clique_of_site: dict[int, int] = {}
    for ci, c in enumerate(cliques):
        cs = set(c)
        for i, j in itertools.combinations(sorted(cs), 2):
            clique_of_pair.setdefault((i, j), ci)
        for i in cs:
            clique_of_site.setdefault(i, ci)

    in_delta = [i < sys.n for i in range(len(nodes))]
    tables = [np.zeros(1 << len(c)) for c in cliques]
    spins_cache: dict[int, np.ndarray] = {}

    def local_spins(ci: int) -> np.ndarray:
        if ci not in spins_cache:
            k = len(cliques[ci])
            states = next(state_blocks(np.full(k, 2, dtype=np.int64), block=1 << k))
            spins_cache[ci] = 2.0 * states - 1.0
        return spins_cache[ci]

    def add_pair(i: int, j: int, coeff: float) -> None:
        lo, hi = min(i, j), max(i, j)
        ci = clique_of_pair[(lo, hi)]
        c = cliques[ci]
        sp = local_spins(ci)
        tables[ci] += coeff * sp[:, c.index(lo)] * sp[:, c.index(hi)]

    def add_site(i: int, coeff: float) -> None:
        ci = clique_of_site[i]
        c = cliques[ci]
        sp = local_spins(ci)
        tables[ci] += coeff * sp[:, c.index(i)]

    # log weight = -beta H(sigma | boundary): pair terms once per unordered
    # pair touching the box, field on box sites only, nothing on
    # shell-shell interactions (they are constants of the conditional law).
    for (i, j) in graph.edges:
        if in_delta[i] or in_delta[j]:
            x, y = nodes[i], nodes[j]
            v = sys.kernel.value(tuple(a - b for a, b in zip(x, y)))
            add_pair(i, j, sys.beta * v)
    for i in range(sys.n):
        add_site(i, sys.beta * sys.h)

    factors = [Factor(c, 1.0, t) for c, t in zip(cliques, tables)]
    base = LogLinearModel(graph, [2] * len(nodes), factors)
    if not shell:
        return base
    context = {index[s]: (sys._boundary_spin(s) + 1) // 2 for s in shell}
    reduced = reduce_model(base, context)
    check_capacity(reduced, cap)
    return reduced


# -- excess factors ----------------------------------------------------------

@dataclass(frozen=True)
class IsingExcess:
    """log Phi for a perturbed interaction/field, plus its linear split."""

    excess: ExcessFactor
    linear_form: QoILinearForm | None
    c_coefficient: float
    kappa_excess: ExcessFactor


def excess_factor_ising(
    sys: LatticeSystem, pert: Kernel, h_tilde: float | None = None
) -> IsingExcess:
    """Excess factor of the system with kernel J + pert and field h_tilde.

    log Phi(sigma) = beta sum_x sigma(x) [ (h~ - h) + 1/2 sum_{y in box}
    F(x,y) sigma(y) + sum_{y outside} F(x,y) sigma_bar(y) ]; the linear
    form splits off C = beta (h~ - h) against f = |Delta| m and is
    rejected (None) when |C| >= 1.
    """
    h_tilde = sys.h if h_tilde is None else float(h_tilde)
    dh = h_tilde - sys.h
    pert_sys = LatticeSystem(
        sys.dimension, sys.side, pert, sys.beta, 0.0, sys.boundary
    )
    cards = np.full(sys.n, 2, dtype=np.int64)
    kappa_terms: list[tuple[tuple[int, ...], np.ndarray]] = []
    pair_spins = np.array([[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0], [1.0, 1.0]])
    for i in range(sys.n):
        for j in range(i + 1, sys.n):
            v = pert_sys.coupling[i, j]
            if v != 0.0:
                table = sys.beta * v * pair_spins[:, 0] * pair_spins[:, 1]
                kappa_terms.append(((i, j), table))
    site_spins = np.array([-1.0, 1.0])
    for i in range(sys.n):
        b = pert_sys.boundary_field[i]
        if b != 0.0:
            kappa_terms.append(((i,), sys.beta * b * site_spins))
    kappa = ExcessFactor(cards, tuple(kappa_terms), 0.0)

    full_terms = list(kappa_terms)
    if dh != 0.0:
        for i in range(sys.n):
            full_terms.append(((i,), sys.beta * dh * site_spins))
    full = ExcessFactor(cards, tuple(full_terms), 0.0)

    c = sys.beta * dh
    lf = None
    if abs(c) < 1.0:
        lf = QoILinearForm(c, kappa.evaluate)
    return IsingExcess(full, lf, c, kappa)


def perturbed_system(
    sys: LatticeSystem, pert: Kernel, h_tilde: float | None = None
) -> LatticeSystem:
    h_tilde = sys.h if h_tilde is None else float(h_tilde)
    return LatticeSystem(
        sys.dimension, sys.side, SumKernel(sys.kernel, pert), sys.beta, h_tilde,
        sys.boundary,
    )


# -- divergence bounds -------------------------------------------------------

def norm1_kl_upper(beta: float, h: float, h_tilde: float, f_abs_sum: float) -> float:
    """2 beta (|h~ - h| + sum_x |F(0,x)|): interaction-norm KL bound per site."""
    return 2.0 * beta * (abs(h_tilde - h) + f_abs_sum)


def boundary_sum_bounds(
    dimension: int,
    side: int,
    f_kernel: Kernel,
    which: str,
    range_f: float | None = None,
) -> tuple[float, float]:
    """Exact box-to-exterior interaction sum and its area/volume bound.

    ``which`` is "inside-range" (F supported within its range R_F; bound
    R_F |boundary| sum|F|, switching to the volume form when the box is
    smaller than the range) or "outside-range" (bound R_F |box| sum|F|).
    """
    if which not in ("inside-range", "outside-range"):
        raise InputError(f"which must be 'inside-range' or 'outside-range', got {which!r}")
    sites = box_sites(dimension, side)
    inside = lambda y: all(0 <= c < side for c in y)
    if math.isfinite(f_kernel.range_length):
        offsets = f_kernel.support_offsets()
        exact = 0.0
        for x in sites:
            for off, v in offsets:
                y = tuple(a + o for a, o in zip(x, off))
                if not inside(y):
                    exact += v
        f_sum = f_kernel.lattice_abs_sum()
    else:
        if dimension != 1:
            raise InputError("infinite-range exact sums are one-dimensional only")
        exact = sum(f_kernel.tail_boundary_sum(x[0], side) for x in sites)
        f_sum = f_kernel.lattice_abs_sum()
    r_f = f_kernel.range_length if range_f is None else float(range_f)
    if not math.isfinite(r_f):
        raise InputError("provide a finite range_f for infinite-range kernels")
    n_box = side ** dimension
    n_boundary = boundary_site_count(dimension, side)
    if which == "inside-range":
        if side > r_f:
            bound = r_f * n_boundary * f_sum
        else:
            bound = r_f * n_box * f_sum
    else:
        bound = r_f * n_box * f_sum
    return exact, bound


# -- Monte Carlo (optional demo path) ----------------------------------------

def metropolis_magnetization(
    sys: LatticeSystem,
    sweeps: int = 2000,
    burn_in: int = 500,
    seed: int = 0,
    h_override: float | None = None,
) -> float:
    """Single-site Metropolis estimate of E[m]; demo-scale plumbing."""
    rng = np.random.default_rng(seed)
    h = sys.h if h_override is None else h_override
    field = sys.boundary_field + h
    spins = rng.choice([-1.0, 1.0], size=sys.n)
    total = 0.0
    kept = 0
    for sweep in range(sweeps):
        for _ in range(sys.n):
            i = rng.integers(sys.n)
            local = sys.coupling[i] @ spins + field[i]
            d_e = 2.0 * spins[i] * local
            if d_e <= 0 or rng.random() < math.exp(-sys.beta * d_e):
                spins[i] = -spins[i]
        if sweep >= burn_in:
            total += spins.mean()
            kept += 1
    return total / max(kept, 1)


def mc_pressure(
    sys: LatticeSystem,
    h_grid_points: int = 21,
    sweeps: int = 1500,
    burn_in: int = 300,
    seed: int = 0,
) -> float:
    """Pressure by thermodynamic integration dP/dh = E[m] from a large-h
    reference where all spins align; Monte Carlo demo path."""
    h_ref = abs(sys.h) + 6.0 / sys.beta + 2.0 * float(np.abs(sys.coupling).sum(axis=1).max())
    all_up = np.ones((1, sys.n))
    p_ref = -sys.energy(all_up, h_ref)[0] * sys.beta / (sys.beta * sys.n)
    hs = np.linspace(sys.h, h_ref, h_grid_points)
    ms = [
        metropolis_magnetization(sys, sweeps, burn_in, seed + k, h_override=float(hk))
        for k, hk in enumerate(hs)
    ]
    integral = float(np.trapz(ms, hs))
    return float(p_ref - integral)
