"""Mean-field free energy, pressure and magnetization.

The variational pressure is p(beta, h, J) = -inf_m { -h m - J m^2 / 2
- I(m)/beta } over m in [-1, 1], with I the spin entropy.  Minimizers
solve m = tanh(beta (J m + h)); below the critical coupling the solution
is unique, above it at h = 0 the two symmetric minimizers are returned.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from ..errors import InputError

_GRID = np.linspace(-1.0 + 1e-12, 1.0 - 1e-12, 4001)


def entropy(m):
    """Binary spin entropy I(m), continuously extended to m = +-1."""
    m = np.asarray(m, dtype=float)
    if np.any(np.abs(m) > 1.0 + 1e-15):
        raise InputError("entropy is defined on [-1, 1]")
    p = np.clip((1.0 - m) / 2.0, 0.0, 1.0)
    q = np.clip((1.0 + m) / 2.0, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -np.where(p > 0, p * np.log(p), 0.0) - np.where(q > 0, q * np.log(q), 0.0)
    return out if out.ndim else float(out)


def mean_field_potential(m, beta: float, h: float, j_total: float):
    """phi(m) = -J m^2 / 2 - h m - I(m)/beta."""
    m_arr = np.asarray(m, dtype=float)
    if np.any(np.abs(m_arr) > 1.0 + 1e-15):
        raise InputError(f"magnetization {m} outside [-1, 1]")
    out = -0.5 * j_total * m_arr**2 - h * m_arr - entropy(m_arr) / beta
    return out if out.ndim else float(out)


@lru_cache(maxsize=1 << 18)
def lp_pressure(beta: float, h: float, j_total: float) -> tuple[float, tuple[float, ...]]:
    """Variational pressure and its global minimizer(s).

    The objective's derivative diverges to +inf/-inf at the endpoints, so
    all global minimizers are interior stationary points; they are found
    by a sign scan of m - tanh(beta (J m + h)) refined with brentq.
    """
    if beta <= 0:
        raise InputError("beta must be positive")

    def stat(m):
        return m - math.tanh(beta * (j_total * m + h))

    vals = _GRID - np.tanh(beta * (j_total * _GRID + h))
    roots = [float(_GRID[k]) for k in np.nonzero(vals == 0.0)[0]]
    for k in np.nonzero(vals[:-1] * vals[1:] < 0)[0]:
        roots.append(float(brentq(stat, _GRID[k], _GRID[k + 1], rtol=8.9e-16)))
    if not roots:  # flat tanh edge cases; fall back to the grid minimum
        roots = [float(_GRID[int(np.argmin(mean_field_potential(_GRID, beta, h, j_total)))])]
    objective = [float(mean_field_potential(m, beta, h, j_total)) for m in roots]
    best = min(objective)
    minimizers = tuple(
        sorted(m for m, v in zip(roots, objective) if v <= best + 1e-12)
    )
    return -best, minimizers


def lp_magnetization_branches(beta: float, h: float, j_total: float) -> tuple[float, float]:
    """(minus branch, plus branch) global minimizers; equal when unique."""
    _, mins = lp_pressure(beta, h, j_total)
    return mins[0], mins[-1]
