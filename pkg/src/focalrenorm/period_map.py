"""The period map ``T(v)`` of orbits launched from ``x = 0`` with speed ``v``.

Each half-orbit ``0 -> a`` (``a`` a turning point) is mapped to ``phi in [0, pi/2]``
by ``x = a sin(phi)``.  Writing ``V(a) - V(x) = (a - x) Q(a, x)`` the integrand
becomes ``sqrt(2) |a| sqrt(1 + sin phi) / sqrt(a Q(a, a sin phi))``, which is
smooth at both ends, so Gauss-Legendre converges spectrally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import potentials as pot
from .errors import BandError

TWO_PI = 2.0 * math.pi
GL_START = 64
GL_MAX = 1024
QUAD_TOL = 1e-12


@dataclass(frozen=True)
class TurningPoints:
    x_min: float
    x_max: float


@lru_cache(maxsize=None)
def _gauss_legendre(order: int):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    # map [-1, 1] -> [0, pi/2]
    return 0.25 * math.pi * (nodes + 1.0), 0.25 * math.pi * weights


def _turning_point(p, level, side):
    barrier = p.barriers[1] if side > 0 else p.barriers[0]

    def g(x):
        return pot.eval_potential(p, x, 0) - level

    if math.isfinite(barrier):
        hi = barrier
    else:
        hi = side * max(1.0, 2.0 * math.sqrt(2.0 * level))
        while g(hi) <= 0.0:
            hi *= 2.0
    if g(hi) <= 0.0:
        raise BandError(f"no turning point below the barrier of {p.descriptor}")
    return brentq(g, 0.0, hi, xtol=1e-16, rtol=8.9e-16, maxiter=200)


def turning_points(p, v: float) -> TurningPoints:
    """Roots ``x_min <= 0 <= x_max`` of ``V(x) = v**2 / 2`` adjacent to 0."""
    p = pot.make_potential(p)
    pot.check_band(p, v)
    if v == 0.0:
        return TurningPoints(0.0, 0.0)
    level = 0.5 * float(v) ** 2
    return TurningPoints(_turning_point(p, level, -1), _turning_point(p, level, +1))


def _half_period(p, a):
    prev = None
    order = GL_START
    while order <= GL_MAX:
        phi, w = _gauss_legendre(order)
        s = np.sin(phi)
        q = a * pot.gap_quotient(p, a, a * s)
        val = math.sqrt(2.0) * abs(a) * float(np.sum(w * np.sqrt((1.0 + s) / q)))
        if prev is not None and abs(val - prev) <= QUAD_TOL:
            return val
        prev = val
        order *= 2
    return prev


def period(p, v: float) -> float:
    """Minimal period of ``x(v; .)``; ``T(0) = 2 pi`` by continuity."""
    p = pot.make_potential(p)
    v = float(v)
    if v == 0.0:
        pot.check_band(p, v)
        return TWO_PI
    tp = turning_points(p, v)
    return _half_period(p, tp.x_max) + _half_period(p, tp.x_min)


def periods(p, v) -> np.ndarray:
    p = pot.make_potential(p)
    return np.array([period(p, float(w)) for w in np.ravel(v)]).reshape(np.shape(v))


def physical_period(p, nu: float) -> float:
    """Period in physical time for physical launch velocity ``nu``."""
    p = pot.make_potential(p)
    return period(p, nu / (p.mu * p.omega)) / p.omega


def period_expansion_check(p, v_grid) -> float:
    """Least-squares ``v**2`` coefficient of ``T(v) - 2 pi``.

    The fit carries a ``v**4`` column so the quartic term does not bias the
    quadratic one; the quadratic coefficient should approach ``-3 pi ell / 4``.
    """
    p = pot.make_potential(p)
    v = np.asarray(v_grid, dtype=float)
    dt = periods(p, v) - TWO_PI
    design = np.column_stack((v**2, v**4))
    coef, *_ = np.linalg.lstsq(design, dt, rcond=None)
    return float(coef[0])
