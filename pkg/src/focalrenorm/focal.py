"""Focal-decomposition indices: how many trajectories from ``(0, 0)`` reach ``(t, x)``.

The asymptotic index counts roots ``v in (-1, 1)`` of ``X_ell(v; t) = x``
exactly, by splitting ``(-1, 1)`` into monotone branches of ``X_ell(.; t)``.
Numeric and renormalised indices shoot over a velocity grid and count sign
changes of ``x(v; t) - x``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import dynamics, potentials as pot
from .errors import DomainError
from .renorm import renormalized_trajectory

SIGMA_INF = np.iinfo(np.int64).max  # index of the origin, where every v is a root
TANGENCY_TOL = 1e-9
SCAN_TOL = 1e-7


@dataclass(frozen=True)
class FocalGrid:
    """``index[i, j]`` and ``near_boundary[i, j]`` belong to ``(t_axis[i], x_axis[j])``."""

    t_axis: np.ndarray
    x_axis: np.ndarray
    index: np.ndarray
    near_boundary: np.ndarray

    def column(self, t_pos: int):
        return self.index[t_pos]


# --- asymptotic decomposition ---------------------------------------------------


def _critical_u(t: float) -> np.ndarray:
    """Roots ``u = v**2 in (0, 1)`` of ``sin(t(u-1)) + 2 t u cos(t(u-1))``.

    ``d/dv X_ell = ell * F(v**2)`` with ``F`` above.  Between consecutive zeros of
    ``cos(t(u-1))`` the ratio ``F / cos = tan(t(u-1)) + 2 t u`` is strictly
    increasing, so each such piece holds at most one root and a sign test
    brackets it.
    """

    def F(u):
        th = t * (u - 1.0)
        return math.sin(th) + 2.0 * t * u * math.cos(th)

    cuts = [0.0]
    j = int(math.floor(t / math.pi - 0.5))
    while j >= 0:
        u_j = 1.0 - (j + 0.5) * math.pi / t
        if 0.0 < u_j < 1.0:
            cuts.append(u_j)
        j -= 1
    cuts.append(1.0)
    roots = []
    for lo, hi in zip(cuts, cuts[1:]):
        f_lo, f_hi = F(lo), F(hi)
        if f_lo == 0.0 and lo > 0.0:
            roots.append(lo)
        elif f_lo * f_hi < 0.0:
            roots.append(brentq(F, lo, hi, xtol=1e-15, rtol=8.9e-16))
    return np.array([u for u in roots if 0.0 < u < 1.0])


def branch_values(ell: int, t: float) -> np.ndarray:
    """Values of ``X_ell(.; t)`` at ``-1``, the interior extrema (ascending in ``v``), and ``+1``."""
    u = _critical_u(t) if t > 0 else np.zeros(0)
    r = np.sqrt(u)
    v = np.concatenate((-r[::-1], r))
    vals = v * np.sin(ell * t * (v * v - 1.0))
    return np.concatenate(([0.0], vals, [0.0]))


def _count_from_branches(y: np.ndarray, x):
    """Crossings of level(s) ``x`` by the piecewise-monotone curve through ``y``."""
    x = np.asarray(x, dtype=float)
    d = y[:, None] - x[None, :] if x.ndim else (y - x)[:, None]
    counts = np.sum(d[:-1] * d[1:] < 0.0, axis=0)
    interior = y[1:-1]
    if interior.size:
        gap = np.abs(interior[:, None] - np.atleast_1d(x)[None, :])
        flags = np.any(gap < TANGENCY_TOL, axis=0)
    else:
        flags = np.zeros(np.atleast_1d(x).shape, dtype=bool)
    return counts, flags


def asymptotic_index(ell: int, t: float, x: float, return_flag: bool = False):
    """Number of ``v in (-1, 1)`` with ``X_ell(v; t) = x``; ``SIGMA_INF`` at the origin.

    Tangential contacts (``x`` equal to a branch extremum) are not counted and
    the cell is flagged.
    """
    if ell not in (-1, 1):
        raise DomainError("ell must be +1 or -1")
    if t < 0 or abs(x) > 1:
        raise DomainError("need t >= 0 and |x| <= 1")
    if t == 0.0:
        idx, flag = (SIGMA_INF, False) if x == 0.0 else (0, False)
    else:
        counts, flags = _count_from_branches(branch_values(ell, t), x)
        idx, flag = int(counts[0]), bool(flags[0])
    return (idx, flag) if return_flag else idx


def asymptotic_grid(ell: int, t_range=(0.0, 3 * math.pi), x_range=(-1.0, 1.0),
                    resolution=(512, 256)) -> FocalGrid:
    nt, nx = resolution
    if nt < 2 or nx < 2:
        raise DomainError("resolution must be at least 2 in each axis")
    t_axis = np.linspace(*t_range, nt)
    x_axis = np.linspace(*x_range, nx)
    index = np.zeros((nt, nx), dtype=np.int64)
    flags = np.zeros((nt, nx), dtype=bool)
    for i, t in enumerate(t_axis):
        if t == 0.0:
            index[i] = np.where(x_axis == 0.0, SIGMA_INF, 0)
            continue
        index[i], flags[i] = _count_from_branches(branch_values(ell, t), x_axis)
    return FocalGrid(t_axis, x_axis, index, flags)


def brute_force_index(ell: int, t: float, x: float, samples: int = 10**6) -> int:
    """Sign changes of ``X_ell(v; t) - x`` on an open uniform ``v`` grid (test oracle)."""
    v = np.linspace(-1.0, 1.0, samples + 2)[1:-1]
    d = v * np.sin(ell * t * (v * v - 1.0)) - x
    s = np.sign(d)
    return int(np.count_nonzero(s == 0) + np.count_nonzero(s[:-1] * s[1:] < 0))


# --- shooting -----------------------------------------------------------------


def _scan(y: np.ndarray, x_levels: np.ndarray):
    """Root counts and near-boundary flags of sampled curve ``y`` against each level."""
    d = y[:, None] - x_levels[None, :]
    s = np.sign(d)
    counts = np.count_nonzero(s == 0, axis=0) + np.count_nonzero(s[:-1] * s[1:] < 0, axis=0)
    # an exact zero is a resolved root; only near misses are ambiguous
    flags = np.any((np.abs(d) < SCAN_TOL) & (d != 0.0), axis=0)
    if y.size >= 3:
        # a discrete extremum close to a level may hide (or fake) a root pair
        dy = np.diff(y)
        turn = np.flatnonzero(dy[:-1] * dy[1:] < 0) + 1
        if turn.size:
            curv = np.abs(y[turn + 1] - 2 * y[turn] + y[turn - 1])
            slack = np.maximum(SCAN_TOL, 2.0 * curv)
            near = np.abs(y[turn][:, None] - x_levels[None, :]) < slack[:, None]
            flags |= np.any(near, axis=0)
    return counts, flags


def _refine_count(fun, v, y, x):
    """Bisection-refine every bracket of ``fun(v) - x`` and merge roots closer than 1e-9."""
    d = y - x
    roots = list(v[d == 0.0])
    for i in np.flatnonzero(d[:-1] * d[1:] < 0):
        roots.append(brentq(lambda w: fun(w) - x, v[i], v[i + 1], xtol=1e-13))
    roots.sort()
    merged = [r for k, r in enumerate(roots) if k == 0 or r - roots[k - 1] > 1e-9]
    return len(merged)


def _check_band_interval(p, v_band, units):
    lo, hi = v_band
    limit = pot.periodic_band(p, physical=(units == "physical"))
    if not (-limit < lo < hi < limit):
        raise DomainError(f"v_band {v_band} must lie inside (-{limit:.6g}, {limit:.6g})")


def _to_norm(p, t, x, v, units):
    """``(t, x, v)`` in normalised coordinates."""
    if units == "physical":
        xn, tn, vn = pot.to_normalized(p, x, t, v)
        return tn, xn, vn
    if units != "normalized":
        raise DomainError(f"unknown units {units!r}")
    return np.asarray(t, dtype=float), np.asarray(x, dtype=float), np.asarray(v, dtype=float)


def numeric_index(p, t: float, x: float, v_band=(-0.5, 0.5), samples: int = 2001,
                  units: str = "normalized", return_flag: bool = False, refine: bool = True):
    """Number of launch velocities in ``v_band`` whose trajectory passes through ``(t, x)``.

    ``units="physical"`` reads ``t``, ``x`` and ``v_band`` in the potential's
    physical coordinates ``(tau, q, nu)``.
    """
    p = pot.make_potential(p)
    _check_band_interval(p, v_band, units)
    if t <= 0:
        raise DomainError("t must be positive")
    tn, xn, vb = _to_norm(p, t, x, np.asarray(v_band, dtype=float), units)
    tn, xn = float(tn), float(xn)
    v = np.linspace(vb[0], vb[1], samples)
    y = dynamics.flow(p, v, tn)(tn)[0]
    counts, flags = _scan(y, np.array([xn]))
    count = int(counts[0])
    if refine and count:

        def shoot(w):
            return float(dynamics.positions_at(p, [w], [tn])[0])

        count = _refine_count(shoot, v, y, xn)
    return (count, bool(flags[0])) if return_flag else count


def numeric_grid(p, t_axis, x_axis, v_band, samples: int = 2001,
                 units: str = "normalized") -> FocalGrid:
    """Shooting indices on a ``(t, x)`` lattice from a single vector integration."""
    p = pot.make_potential(p)
    _check_band_interval(p, v_band, units)
    t_axis = np.asarray(t_axis, dtype=float)
    x_axis = np.asarray(x_axis, dtype=float)
    tn_axis, xn_axis, vb = _to_norm(p, t_axis, x_axis, np.asarray(v_band, dtype=float), units)
    v = np.linspace(vb[0], vb[1], samples)
    f = dynamics.flow(p, v, float(np.max(tn_axis)), tol=1e-10)
    index = np.zeros((t_axis.size, x_axis.size), dtype=np.int64)
    flags = np.zeros(index.shape, dtype=bool)
    for i, tn in enumerate(tn_axis):
        if tn <= 0.0:
            index[i] = np.where(xn_axis == 0.0, SIGMA_INF, 0)
            continue
        index[i], flags[i] = _scan(f(tn)[0], xn_axis)
    return FocalGrid(t_axis, x_axis, index, flags)


def _open_grid(resolution):
    return np.linspace(-1.0, 1.0, resolution + 2)[1:-1]


def renormalized_index(p, n: int, t: float, x: float, resolution: int = 2001,
                       return_flag: bool = False):
    """Root count of ``v -> x_n(v; t) - x`` on ``resolution`` interior points of ``(-1, 1)``."""
    p = pot.make_potential(p)
    if resolution < 2:
        raise DomainError("resolution must be >= 2")
    v = _open_grid(resolution)
    y = renormalized_trajectory(p, n, v, t)
    counts, flags = _scan(y, np.array([float(x)]))
    return (int(counts[0]), bool(flags[0])) if return_flag else int(counts[0])


def renormalized_grid(p, n: int, t_axis, x_axis, resolution: int = 401,
                      threads: int = 1) -> FocalGrid:
    p = pot.make_potential(p)
    t_axis = np.asarray(t_axis, dtype=float)
    x_axis = np.asarray(x_axis, dtype=float)
    v = _open_grid(resolution)

    def column(t):
        if t <= 0.0:
            return np.where(x_axis == 0.0, SIGMA_INF, 0), np.zeros(x_axis.size, dtype=bool)
        return _scan(renormalized_trajectory(p, n, v, t), x_axis)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            cols = list(pool.map(column, t_axis))
    else:
        cols = [column(t) for t in t_axis]
    index = np.array([c[0] for c in cols], dtype=np.int64).reshape(t_axis.size, x_axis.size)
    flags = np.array([c[1] for c in cols], dtype=bool).reshape(index.shape)
    return FocalGrid(t_axis, x_axis, index, flags)
