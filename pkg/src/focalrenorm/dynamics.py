"""Trajectories ``x(v; t)`` with ``x(0) = 0`` and ``x'(0) = v``.

Quartic potentials have closed-form elliptic solutions; everything else is
integrated numerically, either with an adaptive Dormand-Prince 5(4) pair
(accuracy) or with velocity Verlet (long-time energy behaviour).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import potentials as pot
from .elliptic import complete_k, jacobi_eval
from .errors import BandError, DomainError, IntegrationError

DEFAULT_TOL = 1e-10
DEFAULT_STEP = 1e-3
MAX_T_END = 1e4
DRIFT_FACTOR = 1e3

_J = {1: 0.5, -1: -0.25}


@dataclass(frozen=True)
class QuarticSolutionParams:
    a: float
    b: float
    A: float
    lam: float
    m: float
    ell: int

    @property
    def period(self) -> float:
        """Minimal period ``4 K(m) / lambda`` of the closed-form solution."""
        return 4.0 * complete_k(self.m) / self.lam


@dataclass(frozen=True)
class TrajectorySample:
    t: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    energy: np.ndarray


# --- closed forms for V = x^2/2 + ell x^4/4 ------------------------------------


def quartic_params(ell: int, v: float) -> QuarticSolutionParams:
    """Coefficients ``a, b, A, lambda, m`` of the elliptic solution."""
    ell = pot._check_ell(ell)
    v = float(v)
    disc = 1.0 + 2.0 * ell * v * v
    if ell == -1 and not abs(v) < math.sqrt(0.5):
        raise BandError(f"|v| = {abs(v):g} outside the periodic band |v| < sqrt(1/2)")
    if disc <= 0:
        raise DomainError("1 + 2*ell*v^2 must be positive")
    s = math.sqrt(disc)
    a2 = 1.0 + s
    b2 = 2.0 * v * v / (1.0 + s)  # = ell*(s - 1), free of cancellation
    a, b = math.sqrt(a2), math.sqrt(b2)
    sgn = math.copysign(1.0, v) if v else 0.0
    if ell == 1:
        r2 = a2 + b2
        return QuarticSolutionParams(a, b, sgn * a * b / math.sqrt(r2),
                                     math.sqrt(0.5 * r2), b2 / r2, 1)
    return QuarticSolutionParams(a, b, sgn * b, a / math.sqrt(2.0), b2 / a2, -1)


def _quartic_state(ell, v, t):
    par = quartic_params(ell, v)
    t = np.asarray(t, dtype=float)
    if par.A == 0.0:
        zero = np.zeros_like(t)
        return zero, zero
    quarter = complete_k(par.m)
    u = np.fmod(par.lam * t, 4.0 * quarter)
    tri = jacobi_eval(u, par.m)
    if ell == 1:
        x = par.A * tri.sn / tri.dn
        xdot = par.A * par.lam * tri.cn / tri.dn**2
    else:
        x = par.A * tri.sn
        xdot = par.A * par.lam * tri.cn * tri.dn
    return x, xdot


def exact_quartic_solution(ell: int, v: float, t):
    """``A sd(lambda t; m)`` for ``ell = +1`` and ``A sn(lambda t; m)`` for ``ell = -1``."""
    x, _ = _quartic_state(ell, v, t)
    return float(x) if np.ndim(x) == 0 else x


def exact_quartic_velocity(ell: int, v: float, t):
    _, xdot = _quartic_state(ell, v, t)
    return float(xdot) if np.ndim(xdot) == 0 else xdot


def closed_form_sample(ell: int, v: float, t) -> TrajectorySample:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x, xdot = _quartic_state(ell, v, t)
    energy = 0.5 * xdot**2 + 0.5 * x**2 + 0.25 * ell * x**4
    return TrajectorySample(t, x, xdot, energy)


# --- expansions ---------------------------------------------------------------


def e_factor(ell: int, v):
    return 1.0 + _J[ell] * np.square(v)


def g_factor(ell: int, t):
    t = np.asarray(t, dtype=float)
    s, c = np.sin(t), np.cos(t)
    out = t * c + ell * (s * c * c + 2.0 * s)
    return float(out) if out.ndim == 0 else out


def third_order_approx(ell: int, v, t):
    """``v sin(e t) - v^3 g(e t) / 8`` with ``e = e_ell(v)``."""
    phase = e_factor(ell, v) * np.asarray(t, dtype=float)
    out = v * np.sin(phase) - 0.125 * v**3 * g_factor(ell, phase)
    return float(out) if np.ndim(out) == 0 else out


# --- numerical integration --------------------------------------------------


def energy(p, x, xdot):
    return 0.5 * np.square(xdot) + pot.eval_potential(p, x, 0)


def _check_t_end(t_end):
    if not 0.0 <= t_end <= MAX_T_END:
        raise DomainError(
            f"t_end must lie in [0, {MAX_T_END:g}]; reduce long times modulo the period"
        )


def integrate(p, v: float, t_end: float, mode: str = "adaptive", tol: float | None = None,
              t_eval=None, step: float = DEFAULT_STEP) -> TrajectorySample:
    """Integrate ``x'' = -V'(x)`` from ``x = 0``, ``x' = v`` up to ``t_end``.

    ``adaptive`` uses an embedded RK 5(4) pair with relative tolerance ``tol``;
    ``symplectic`` uses velocity Verlet with fixed ``step``.  Samples are taken
    at ``t_eval`` when given, otherwise at the accepted steps.
    """
    p = pot.make_potential(p)
    t_end = float(t_end)
    _check_t_end(t_end)
    v = float(v)
    if t_end == 0.0:
        return TrajectorySample(np.zeros(1), np.zeros(1), np.array([v]), np.array([0.5 * v * v]))
    if mode == "adaptive":
        tol = DEFAULT_TOL if tol is None else tol
        sol = solve_ivp(
            _rhs(p), (0.0, t_end), [0.0, v], method="RK45", rtol=tol,
            atol=tol * max(abs(v), 1e-300), t_eval=t_eval, dense_output=False,
        )
        if not sol.success:
            raise IntegrationError(sol.message)
        t, x, xdot = sol.t, sol.y[0], sol.y[1]
    elif mode == "symplectic":
        tol = step * step if tol is None else tol
        t, x, xdot = _verlet(p, v, t_end, step, t_eval)
    else:
        raise DomainError(f"unknown integration mode {mode!r}")
    e = energy(p, x, xdot)
    drift = float(np.max(np.abs(e - 0.5 * v * v)))
    if drift > DRIFT_FACTOR * tol * max(0.5 * v * v, 1e-300) and drift > 1e-15:
        raise IntegrationError(f"energy drift {drift:.3g} exceeds budget for tol={tol:g}")
    return TrajectorySample(t, x, xdot, e)


def _rhs(p):
    def rhs(_t, y):
        n = y.shape[0] // 2
        return np.concatenate((y[n:], pot.force(p, y[:n])))
    return rhs


def _verlet(p, v, t_end, step, t_eval):
    n_steps = max(1, int(math.ceil(t_end / step)))
    h = t_end / n_steps
    t = np.linspace(0.0, t_end, n_steps + 1)
    x = np.empty(n_steps + 1)
    xd = np.empty(n_steps + 1)
    x[0], xd[0] = 0.0, v
    a = pot.force(p, 0.0)
    for i in range(n_steps):
        half = xd[i] + 0.5 * h * a
        x[i + 1] = x[i] + h * half
        a = pot.force(p, x[i + 1])
        xd[i + 1] = half + 0.5 * h * a
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        return t_eval, np.interp(t_eval, t, x), np.interp(t_eval, t, xd)
    return t, x, xd


def flow(p, v, t_end: float, tol: float = 1e-12):
    """Dense solution for a vector of initial velocities integrated together.

    Returns a callable ``f(t) -> (x, xdot)`` giving arrays shaped like ``v``
    for scalar ``t``.  Used for grid sweeps where many trajectories share a
    time horizon.
    """
    p = pot.make_potential(p)
    v = np.atleast_1d(np.asarray(v, dtype=float))
    t_end = float(t_end)
    _check_t_end(t_end)
    n = v.size
    if t_end == 0.0 or not np.any(v):
        return lambda t: (np.zeros(n), v.copy())
    scale = max(float(np.max(np.abs(v))), 1e-300)
    sol = solve_ivp(
        _rhs(p), (0.0, t_end), np.concatenate((np.zeros(n), v)), method="RK45",
        rtol=tol, atol=tol * scale, dense_output=True,
    )
    if not sol.success:
        raise IntegrationError(sol.message)
    dense = sol.sol

    def evaluate(t):
        y = dense(t)
        return y[:n], y[n:]

    return evaluate


def positions_at(p, v, times, tol: float = 1e-12):
    """``x(v_i; times_i)`` for paired arrays, integrating all trajectories at once."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    times = np.broadcast_to(np.asarray(times, dtype=float), v.shape)
    if v.size == 0:
        return np.zeros(0)
    x_all, _ = flow(p, v, float(np.max(times)), tol=tol)(times)
    if x_all.ndim == 1:
        return x_all
    return x_all[np.arange(v.size), np.arange(v.size)]
