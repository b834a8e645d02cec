"""Jacobi elliptic functions and the complete elliptic integral of the first kind.

All routines take the *parameter* ``m = k**2`` and are restricted to ``0 <= m < 1``.
Evaluation uses the descending Landen (arithmetic-geometric mean) scheme, which
is uniformly accurate on that range and vectorises over ``u``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

MAX_ITER = 32
AGM_TOL = 1e-15
MAX_ARG = 1e8


@dataclass(frozen=True)
class EllipticTriple:
    sn: np.ndarray | float
    cn: np.ndarray | float
    dn: np.ndarray | float


def _check_m(m):
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)) or np.any(m < 0.0) or np.any(m >= 1.0):
        raise DomainError(f"parameter m must lie in [0, 1), got {m}")
    return m


def _check_u(u):
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise DomainError("argument u must be finite")
    if np.any(np.abs(u) > MAX_ARG):
        raise DomainError(f"|u| > {MAX_ARG:g}; reduce the argument modulo the period first")
    return u


def _agm_ladder(m):
    """Return the AGM sequences (a_n, c_n) for parameter array ``m``."""
    a = np.ones_like(m)
    b = np.sqrt(1.0 - m)
    c = np.sqrt(m)
    a_seq, c_seq = [a], [c]
    for _ in range(MAX_ITER):
        if np.all(np.abs(c) <= AGM_TOL * a):
            break
        a, b, c = 0.5 * (a + b), np.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    else:
        raise DomainError("AGM iteration did not converge")
    return a_seq, c_seq


def jacobi_eval(u, m) -> EllipticTriple:
    """Evaluate ``sn``, ``cn``, ``dn`` at argument ``u`` with parameter ``m``.

    ``u`` and ``m`` broadcast against each other. Scalars in give scalars out.
    """
    scalar = np.ndim(u) == 0 and np.ndim(m) == 0
    u = _check_u(u)
    m = _check_m(m)
    u, m = np.broadcast_arrays(u, m)
    a_seq, c_seq = _agm_ladder(m)
    n = len(a_seq) - 1
    phi = (2.0**n) * a_seq[-1] * u
    for k in range(n, 0, -1):
        ratio = c_seq[k] / a_seq[k]
        phi = 0.5 * (phi + np.arcsin(ratio * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    # sqrt form avoids the 0/0 of cos(phi0)/cos(phi1 - phi0) at quarter periods
    dn = np.sqrt(1.0 - m * sn * sn)
    if scalar:
        return EllipticTriple(float(sn), float(cn), float(dn))
    return EllipticTriple(sn, cn, dn)


def jacobi_sd(u, m):
    """``sd(u; m) = sn(u; m) / dn(u; m)``; bounded by ``1/sqrt(1 - m)``."""
    tri = jacobi_eval(u, m)
    return tri.sn / tri.dn


def complete_k(m):
    """Complete elliptic integral of the first kind, ``K(m) = pi / (2 AGM(1, sqrt(1-m)))``."""
    scalar = np.ndim(m) == 0
    m = _check_m(m)
    a_seq, _ = _agm_ladder(m)
    k = 0.5 * np.pi / a_seq[-1]
    return float(k) if scalar else k
