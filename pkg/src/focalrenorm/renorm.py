"""Renormalised trajectories and their universal limit.

    x_n(v; t) = (-1)^n x(G v; n pi - ell t) / G,    G = sqrt(8 t / (3 pi n))

converges to ``X_ell(v; t) = v sin(ell t (v^2 - 1))``.  Long times are never
integrated directly: ``n pi - ell t`` is reduced modulo the period ``T(G v)``
first, and quartic potentials use their closed-form solution.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import dynamics, potentials as pot
from .errors import DomainError, WindowError
from .period_map import TWO_PI, period

K_WINDOW = 0.1
FLOW_TOL = 1e-12


@dataclass(frozen=True)
class ScalingContext:
    n: int
    t: float
    ell: int
    Gamma: float
    gamma: float
    valid_window: float

    @property
    def remainder_scale(self) -> float:
        """``t / n``, the small parameter of the scaling estimates."""
        return self.t / self.n


def scaling_parameter(n: int, t: float) -> float:
    if n < 1 or t < 0:
        raise DomainError("need n >= 1 and t >= 0")
    return math.sqrt(8.0 * t / (3.0 * math.pi * n))


def valid_window(p, n: int, k: float = K_WINDOW) -> float:
    """Largest admissible ``t`` for step ``n``.

    ``k * n``, capped where ``G**2`` would reach half of ``v_max**2``.
    """
    p = pot.make_potential(p)
    cap = 0.5 * p.v_max**2 * 3.0 * math.pi * n / 8.0
    return min(k * n, cap)


def _check_window(p, n, t, k):
    if n < 1:
        raise DomainError("n must be >= 1")
    if t < 0:
        raise WindowError("t must be non-negative")
    w = valid_window(p, n, k)
    if t > w:
        raise WindowError(f"t = {t:g} exceeds the window {w:.6g} for n = {n}")
    return w


def scaling_velocity(p, n: int, t: float, k: float = K_WINDOW) -> float:
    """Positive ``gamma`` with ``T(gamma) = 2 pi - 2 ell t / n``."""
    p = pot.make_potential(p)
    _check_window(p, n, t, k)
    if t == 0:
        return 0.0
    target = TWO_PI - 2.0 * p.ell * t / n

    # solve in s = gamma^2: T is close to linear there, which keeps the
    # relative accuracy of small roots
    def f(s):
        return period(p, math.sqrt(s)) - target

    guess = 8.0 * t / (3.0 * math.pi * n)
    cap = p.v_max**2 * (1.0 - 1e-9) if math.isfinite(p.v_max) else 1e6
    f0 = f(0.0)
    if f0 == 0.0:
        return 0.0
    # walk outward from the leading-order guess so the bracket stays on the
    # branch of T attached to v = 0 (T turns back up near a separatrix)
    hi = min(2.0 * guess, cap)
    fhi = f(hi)
    while f0 * fhi > 0 and hi < cap:
        hi = min(2.0 * hi, cap)
        fhi = f(hi)
    if f0 * fhi > 0:
        raise WindowError(
            f"target period {target:.6g} is outside the range of T for {p.descriptor}; t too large for n"
        )
    s = brentq(f, 0.0, hi, xtol=1e-300, rtol=8.9e-16, maxiter=500)
    return math.sqrt(s)


def scaling_context(p, n: int, t: float, k: float = K_WINDOW) -> ScalingContext:
    p = pot.make_potential(p)
    w = _check_window(p, n, t, k)
    return ScalingContext(n, float(t), p.ell, scaling_parameter(n, t),
                          scaling_velocity(p, n, t, k), w)


def phase_remainder(ell: int, v, t):
    out = -ell * np.asarray(t, dtype=float) * (1.0 - np.square(v))
    return float(out) if np.ndim(out) == 0 else out


def asymptotic_trajectory(ell: int, v, t):
    """``X_ell(v; t) = v sin(ell t (v^2 - 1))``."""
    v = np.asarray(v, dtype=float)
    out = v * np.sin(ell * np.asarray(t, dtype=float) * (v * v - 1.0))
    return float(out) if out.ndim == 0 else out


def _positions(p, w, s, reduce_time=True):
    """``x(w_i; s)`` for an array of launch velocities and one time ``s``."""
    out = np.zeros(w.shape)
    live = w != 0.0
    if not np.any(live):
        return out
    if p.is_quartic:
        for i in np.flatnonzero(live):
            out[i] = dynamics.exact_quartic_solution(p.ell, w[i], s)
        return out
    wl = w[live]
    if reduce_time:
        # period is even in w for even potentials
        if p.is_even:
            mags, inv = np.unique(np.abs(wl), return_inverse=True)
            per = np.array([period(p, m) for m in mags])[inv]
        else:
            per = np.array([period(p, x) for x in wl])
        times = np.fmod(s, per)
    else:
        times = np.full(wl.shape, s)
    out[live] = dynamics.positions_at(p, wl, times, tol=FLOW_TOL)
    return out


def renormalized_trajectory(p, n: int, v, t: float, k: float = K_WINDOW,
                            reduce_time: bool = True, sign: bool = True):
    """``x_n(v; t)`` for scalar or array ``v`` in ``[-1, 1]``.

    ``sign=False`` drops the ``(-1)^n`` factor; ``reduce_time=False`` integrates
    straight to ``n pi - ell t`` (only sensible for small ``n``).
    """
    p = pot.make_potential(p)
    scalar = np.ndim(v) == 0
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if np.any(np.abs(v) > 1.0):
        raise DomainError("v must lie in [-1, 1]")
    t = float(t)
    _check_window(p, n, t, k)
    if t == 0.0:
        out = np.zeros(v.shape)
    else:
        G = scaling_parameter(n, t)
        w = G * v
        pot.check_band(p, w)
        x = _positions(p, w, n * math.pi - p.ell * t, reduce_time)
        out = x / G
        if sign and n % 2:
            out = -out
    return float(out[0]) if scalar else out


@dataclass
class ConvergenceTable:
    potential: str
    eps: float
    rows: list  # (n, sup_error, window)
    cells: list  # (n, v, t, x_n, X, abs_err)

    @property
    def errors(self) -> dict:
        return {n: e for n, e, _ in self.rows}


def default_v_grid():
    return np.round(np.linspace(-1.0, 1.0, 21), 12)


def convergence_experiment(p, eps: float, n_list, v_grid=None, t_samples: int = 64,
                           k: float = K_WINDOW, threads: int = 1) -> ConvergenceTable:
    """Sup-norm error of ``x_n - X_ell`` on ``v_grid x [0, k n^(1/3 - eps)]`` for each ``n``."""
    p = pot.make_potential(p)
    if not 0.0 < eps < 1.0 / 3.0:
        raise DomainError("eps must lie in (0, 1/3)")
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise DomainError("n_list must be increasing")
    v = default_v_grid() if v_grid is None else np.asarray(v_grid, dtype=float)
    if t_samples < 1:
        raise DomainError("t_samples must be positive")

    jobs = []
    windows = {}
    for n in n_list:
        windows[n] = k * n ** (1.0 / 3.0 - eps)
        for t in np.linspace(0.0, windows[n], t_samples):
            jobs.append((n, float(t)))

    def run(job):
        n, t = job
        xn = renormalized_trajectory(p, n, v, t, k=k)
        return xn

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    cells = []
    sup = {n: 0.0 for n in n_list}
    for (n, t), xn in zip(jobs, results):
        X = asymptotic_trajectory(p.ell, v, t)
        err = np.abs(xn - X)
        sup[n] = max(sup[n], float(np.max(err)) if err.size else 0.0)
        cells.extend(zip([n] * v.size, v.tolist(), [t] * v.size, xn.tolist(), X.tolist(),
                         err.tolist()))
    rows = [(n, sup[n], windows[n]) for n in n_list]
    return ConvergenceTable(p.descriptor, eps, rows, cells)
