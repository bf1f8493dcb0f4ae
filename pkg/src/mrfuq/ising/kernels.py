"""Translation-invariant spin-spin interaction kernels on Z^d.

A kernel is evaluated on integer offsets; symmetry J(r) = J(-r) and
translational invariance hold by construction.  Scaled kernels follow
J_gamma(x, y) = gamma^d J(gamma x, gamma y) for a macroscopic profile J
supported on |r| <= 1 (Euclidean norm).
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Iterable, Iterator, Mapping

import numpy as np
from scipy.special import polygamma

from ..errors import InputError

Offset = tuple[int, ...]


def _norm(offset: Offset) -> float:
    return math.sqrt(sum(c * c for c in offset))


def _box_offsets(d: int, reach: int) -> Iterator[Offset]:
    for off in itertools.product(range(-reach, reach + 1), repeat=d):
        if any(off):
            yield off


class Kernel:
    """Base class; subclasses define value(offset) and range_length."""

    dimension: int
    range_length: float  # offsets beyond this norm have value 0 (inf allowed)

    def value(self, offset: Offset) -> float:
        raise NotImplementedError

    def support_offsets(self) -> list[tuple[Offset, float]]:
        """Nonzero offsets; only valid for finite-range kernels."""
        if not math.isfinite(self.range_length):
            raise InputError("kernel has infinite range; no finite support list")
        reach = int(math.floor(self.range_length))
        out = []
        for off in _box_offsets(self.dimension, reach):
            v = self.value(off)
            if v != 0.0:
                out.append((off, v))
        return out

    def lattice_abs_sum(self) -> float:
        """sum_{x != 0} |J(0, x)| (summability constant)."""
        return sum(abs(v) for _, v in self.support_offsets())

    def tail_boundary_sum(self, x: int, side: int) -> float | None:
        """For infinite-range 1-D kernels: sum over all lattice sites outside
        [0, side) of the kernel at distance from x.  None if not applicable."""
        return None


class TableKernel(Kernel):
    """Explicit finite table of offset -> strength (symmetrized)."""

    def __init__(self, dimension: int, entries: Mapping[Offset, float]):
        self.dimension = dimension
        table: dict[Offset, float] = {}
        for off, v in entries.items():
            off = tuple(int(c) for c in off)
            if len(off) != dimension:
                raise InputError(f"offset {off} has wrong dimension")
            if not any(off):
                raise InputError("offset 0 (self-interaction) is not allowed")
            neg = tuple(-c for c in off)
            for key in (off, neg):
                if key in table and table[key] != float(v):
                    raise InputError(f"conflicting values for offset {key}")
                table[key] = float(v)
        self._table = table
        self.range_length = max((_norm(o) for o in table), default=0.0)

    def value(self, offset: Offset) -> float:
        return self._table.get(tuple(offset), 0.0)


def nearest_neighbor(dimension: int, strength: float = 1.0) -> TableKernel:
    entries = {}
    for axis in range(dimension):
        off = tuple(1 if k == axis else 0 for k in range(dimension))
        entries[off] = strength
    return TableKernel(dimension, entries)


def quartic_profile(u: float) -> float:
    """Smooth even bump on [-1, 1] with unit integral in one dimension."""
    if abs(u) > 1.0:
        return 0.0
    return (15.0 / 16.0) * (1.0 - u * u) ** 2


QUARTIC_J_TOTAL = 1.0
QUARTIC_J_INF = 15.0 / 16.0
# max over u of |d/du (15/16)(1-u^2)^2| = (15/16) * 8 / (3 sqrt(3))
QUARTIC_DJ_INF = (15.0 / 16.0) * 8.0 / (3.0 * math.sqrt(3.0))


class KacKernel(Kernel):
    """gamma-scaled kernel from a macroscopic radial profile on [0, 1]."""

    def __init__(
        self,
        dimension: int,
        gamma: float,
        profile: Callable[[float], float] = quartic_profile,
        j_total: float = QUARTIC_J_TOTAL,
        j_inf: float = QUARTIC_J_INF,
        dj_inf: float = QUARTIC_DJ_INF,
    ):
        if gamma <= 0 or gamma > 1:
            raise InputError(f"gamma must lie in (0, 1], got {gamma}")
        self.dimension = dimension
        self.gamma = float(gamma)
        self.profile = profile
        self.j_total = float(j_total)
        self.j_inf = float(j_inf)
        self.dj_inf = float(dj_inf)
        self.range_length = 1.0 / gamma

    def value(self, offset: Offset) -> float:
        r = self.gamma * _norm(offset)
        if r > 1.0 or not any(offset):
            return 0.0
        return self.gamma ** self.dimension * self.profile(r)


class PiecewiseConstantKacKernel(Kernel):
    """gamma^d on 0 < |x - y| <= (2 gamma)^{-1}; profile 1_{|u| <= 1/2}."""

    def __init__(self, dimension: int, gamma: float):
        if gamma <= 0 or gamma > 1:
            raise InputError(f"gamma must lie in (0, 1], got {gamma}")
        self.dimension = dimension
        self.gamma = float(gamma)
        self.j_total = 1.0  # one-dimensional profile integral
        self.j_inf = 1.0
        self.range_length = 1.0 / (2.0 * gamma)

    def value(self, offset: Offset) -> float:
        if not any(offset):
            return 0.0
        return self.gamma ** self.dimension if _norm(offset) <= self.range_length else 0.0


class TruncatedKernel(Kernel):
    """Base Kac kernel cut to macroscopic radius 1 - epsilon."""

    def __init__(self, base: KacKernel, epsilon: float):
        if not 0.0 < epsilon < 1.0:
            raise InputError(f"epsilon must lie in (0, 1), got {epsilon}")
        self.base = base
        self.epsilon = float(epsilon)
        self.dimension = base.dimension
        self.gamma = base.gamma
        self.range_length = (1.0 - epsilon) / base.gamma

    def value(self, offset: Offset) -> float:
        if _norm(offset) > self.range_length:
            return 0.0
        return self.base.value(offset)


class SubtractedTail(Kernel):
    """The (negative) difference truncated - base: lives beyond 1 - epsilon."""

    def __init__(self, base: KacKernel, epsilon: float):
        self.base = base
        self.epsilon = float(epsilon)
        self.dimension = base.dimension
        self.inner = (1.0 - epsilon) / base.gamma
        self.range_length = base.range_length

    def value(self, offset: Offset) -> float:
        r = _norm(offset)
        if r <= self.inner:
            return 0.0
        return -self.base.value(offset)


class LongRangeTail(Kernel):
    """One-dimensional a / r^2 beyond the piecewise-constant Kac range."""

    def __init__(self, a: float, gamma: float):
        if a <= 0:
            raise InputError(f"a must be positive, got {a}")
        self.dimension = 1
        self.a = float(a)
        self.gamma = float(gamma)
        self.cutoff = 1.0 / (2.0 * gamma)
        self.range_length = math.inf

    def value(self, offset: Offset) -> float:
        r = abs(offset[0])
        if r <= self.cutoff:
            return 0.0
        return self.a / (r * r)

    def min_offset(self) -> int:
        return int(math.floor(self.cutoff)) + 1

    def lattice_abs_sum(self) -> float:
        # 2a * sum_{y >= min_offset} 1/y^2, exactly via the trigamma function.
        return 2.0 * self.a * float(polygamma(1, self.min_offset()))

    def tail_boundary_sum(self, x: int, side: int) -> float:
        """sum over y < 0 and y >= side of value(x - y), for x in [0, side).

        Distances to the right start at side - x, to the left at x + 1;
        only distances past the cutoff contribute, and polygamma(1, N)
        equals sum_{r >= N} 1/r^2 exactly.
        """
        m = self.min_offset()
        right = float(polygamma(1, max(side - x, m)))
        left = float(polygamma(1, max(x + 1, m)))
        return self.a * (right + left)


class SumKernel(Kernel):
    """Pointwise sum of kernels (perturbed interaction J + F)."""

    def __init__(self, *parts: Kernel):
        dims = {k.dimension for k in parts}
        if len(dims) != 1:
            raise InputError("kernels must share a dimension")
        self.parts = parts
        self.dimension = dims.pop()
        self.range_length = max(k.range_length for k in parts)

    def value(self, offset: Offset) -> float:
        return sum(k.value(offset) for k in self.parts)

    def lattice_abs_sum(self) -> float:
        if math.isfinite(self.range_length):
            return super().lattice_abs_sum()
        raise InputError("infinite-range sum kernel: use part sums")

    def tail_boundary_sum(self, x: int, side: int) -> float | None:
        totals = []
        for k in self.parts:
            t = k.tail_boundary_sum(x, side)
            if t is None:
                return None
            totals.append(t)
        return sum(totals)


class ScaledKernel(Kernel):
    def __init__(self, base: Kernel, factor: float):
        self.base = base
        self.factor = float(factor)
        self.dimension = base.dimension
        self.range_length = base.range_length if factor != 0.0 else 0.0

    def value(self, offset: Offset) -> float:
        return self.factor * self.base.value(offset)
