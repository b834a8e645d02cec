"""One-dimensional potentials and the dimensionless change of coordinates.

A :class:`PotentialSpec` stores a physical potential together with its
equilibrium data and the *normalised* potential

    V(x) = (U(mu*x + q*) - U(q*)) / (mass * mu**2 * omega**2)

which has ``V(0) = V'(0) = 0``, ``V''(0) = 1`` and ``V''''(0) = 6*ell``.
Everything downstream works with ``V`` unless a function says otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P

from .errors import DomainError

MAX_ORDER = 5
PENDULUM_SCALE = math.sqrt(6.0)  # mu for 1 - cos(q) with unit mass
DEFAULT_C5 = 0.1


@dataclass(frozen=True)
class PotentialSpec:
    """A potential with its equilibrium data.

    ``coeffs`` holds the ascending coefficients of the normalised potential
    when it is a polynomial; it is ``None`` for the pendulum, which is
    evaluated in closed form.  ``barriers`` are the nearest critical points
    of the normalised potential on each side of 0 (``-inf``/``inf`` if none).
    """

    kind: str
    descriptor: str
    q_star: float
    mass: float
    omega: float
    mu: float
    ell: int
    v_max: float
    barriers: tuple[float, float]
    coeffs: tuple[float, ...] | None = None
    physical_coeffs: tuple[float, ...] | None = None
    perturbation: tuple[float, ...] = field(default=())

    @property
    def is_even(self) -> bool:
        if self.coeffs is None:
            return True
        return all(c == 0.0 for c in self.coeffs[1::2])

    @property
    def is_quartic(self) -> bool:
        return self.kind == "quartic"


# --- construction -----------------------------------------------------------


def quartic(ell: int) -> PotentialSpec:
    ell = _check_ell(ell)
    coeffs = (0.0, 0.0, 0.5, 0.0, 0.25 * ell)
    return _from_normalised_poly("quartic", f"quartic:{ell:+d}", coeffs, ell)


def perturbed(ell: int, c5: float = DEFAULT_C5, c6: float = 0.0,
              c7: float = 0.0, c8: float = 0.0) -> PotentialSpec:
    ell = _check_ell(ell)
    pert = (float(c5), float(c6), float(c7), float(c8))
    coeffs = (0.0, 0.0, 0.5, 0.0, 0.25 * ell) + pert
    terms = ",".join(f"c{k}={c:g}" for k, c in zip(range(5, 9), pert) if c)
    desc = f"perturbed:{ell:+d}" + (f":{terms}" if terms else "")
    return _from_normalised_poly("perturbed", desc, _trim(coeffs), ell, perturbation=pert)


def pendulum() -> PotentialSpec:
    """``U(q) = 1 - cos q`` with unit mass: ``q* = 0``, ``omega = 1``, ``mu = sqrt 6``."""
    edge = math.pi / PENDULUM_SCALE
    return PotentialSpec(
        kind="pendulum",
        descriptor="pendulum",
        q_star=0.0,
        mass=1.0,
        omega=1.0,
        mu=PENDULUM_SCALE,
        ell=-1,
        v_max=math.sqrt(2.0 / 3.0),
        barriers=(-edge, edge),
    )


def polynomial(coeffs, mass: float = 1.0) -> PotentialSpec:
    """Physical polynomial potential ``U(q) = sum a_k q**k`` (ascending coefficients).

    The equilibrium is the local minimum of ``U`` closest to ``q = 0``.
    """
    coeffs = [float(c) for c in coeffs]
    if mass <= 0:
        raise DomainError("mass must be positive")
    U = Polynomial(coeffs)
    dU, d2U, d4U = U.deriv(1), U.deriv(2), U.deriv(4)
    minima = [r for r in _real_roots(dU) if d2U(r) > 0]
    if not minima:
        raise DomainError("polynomial has no local minimum with U'' > 0")
    q_star = min(minima, key=abs)
    for _ in range(3):  # Newton polish of the root
        slope = d2U(q_star)
        q_star -= dU(q_star) / slope
    u2, u3, u4 = float(d2U(q_star)), float(U.deriv(3)(q_star)), float(d4U(q_star))
    scale = max(1.0, max(abs(c) for c in coeffs))
    if u2 <= 0:
        raise DomainError("U''(q*) must be positive")
    if abs(u3) > 1e-9 * scale:
        raise DomainError("U'''(q*) must vanish; the quartic term must lead the anharmonicity")
    if abs(u4) <= 1e-12 * scale:
        raise DomainError("U''''(q*) vanishes: isochronous-degenerate at fourth order")
    omega = math.sqrt(u2 / mass)
    mu = math.sqrt(6.0 * u2 / abs(u4))
    ell = 1 if u4 > 0 else -1
    V = U(Polynomial([q_star, mu])) / (mass * mu**2 * omega**2)
    norm = list(V.coef)
    norm[0] = 0.0
    norm[1] = 0.0  # exact equilibrium at x = 0 after the Newton polish
    if len(norm) > 3:
        norm[3] = 0.0
    desc = "poly:" + ",".join(f"{c:g}" for c in coeffs)
    return _from_normalised_poly(
        "polynomial", desc, _trim(norm), ell,
        q_star=q_star, mass=mass, omega=omega, mu=mu, physical=tuple(coeffs),
    )


def make_potential(descriptor) -> PotentialSpec:
    """Build a potential from a CLI-style descriptor.

    Accepted forms: ``quartic:+1``, ``quartic:-1``, ``pendulum``,
    ``perturbed:+1:c5=0.1`` (any of ``c5..c8``), ``poly:a0,a1,a2,...``.
    A :class:`PotentialSpec` is passed through unchanged.
    """
    if isinstance(descriptor, PotentialSpec):
        return descriptor
    text = str(descriptor).strip()
    head, _, rest = text.partition(":")
    head = head.lower()
    if head == "pendulum" and not rest:
        return pendulum()
    if head == "quartic":
        return quartic(_parse_ell(rest))
    if head == "perturbed":
        ell_txt, _, terms = rest.partition(":")
        kw = {}
        if terms:
            for item in terms.split(","):
                key, eq, val = item.partition("=")
                key = key.strip().lower()
                if not eq or key not in ("c5", "c6", "c7", "c8"):
                    raise DomainError(f"bad perturbation term {item!r}")
                kw[key] = float(val)
        else:
            kw["c5"] = DEFAULT_C5
        kw.setdefault("c5", 0.0)
        return perturbed(_parse_ell(ell_txt), **kw)
    if head == "poly":
        try:
            coeffs = [float(c) for c in rest.split(",") if c.strip()]
        except ValueError as exc:
            raise DomainError(f"bad polynomial coefficients {rest!r}") from exc
        if len(coeffs) < 5:
            raise DomainError("polynomial needs at least degree 4")
        return polynomial(coeffs)
    raise DomainError(f"unknown potential descriptor {descriptor!r}")


# --- evaluation ---------------------------------------------------------------


def eval_potential(p: PotentialSpec, x, order: int = 0):
    """``order``-th derivative of the normalised potential at ``x``."""
    if order not in range(MAX_ORDER + 1):
        raise DomainError(f"order must be in 0..{MAX_ORDER}")
    x = np.asarray(x, dtype=float)
    if p.coeffs is not None:
        out = np.asarray(P.polyval(x, _deriv_coeffs(p.coeffs, order)))
    else:
        s = PENDULUM_SCALE
        sx = s * x
        if order == 0:
            # 1 - cos(y) = 2 sin^2(y/2) keeps relative accuracy near 0
            out = 2.0 * np.sin(0.5 * sx) ** 2 / 6.0
        else:
            # d^k/dx^k of -cos(sx)/6 cycles through sin/cos
            phase = [np.sin, np.cos, lambda y: -np.sin(y), lambda y: -np.cos(y)]
            out = s**order / 6.0 * phase[(order - 1) % 4](sx)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=256)
def _deriv_coeffs(coeffs, order):
    return P.polyder(np.array(coeffs), order) if order else np.array(coeffs)


def force(p: PotentialSpec, x):
    """``-V'(x)``, vectorised."""
    return -eval_potential(p, x, 1)


def gap_quotient(p: PotentialSpec, a, x):
    """``(V(a) - V(x)) / (a - x)`` evaluated without cancellation (``V'(a)`` at ``x == a``)."""
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    if p.coeffs is not None:
        total = np.zeros(np.broadcast(a, x).shape)
        h = np.zeros_like(total)
        xpow = np.ones_like(total)
        for c in p.coeffs[1:]:
            h = a * h + xpow  # h_k = (a^k - x^k) / (a - x)
            xpow = xpow * x
            total = total + c * h
        return total
    s = PENDULUM_SCALE
    half = 0.5 * s * (a - x)
    return (1.0 / 3.0) * np.sin(0.5 * s * (a + x)) * 0.5 * s * np.sinc(half / np.pi)


# --- coordinates and bands ------------------------------------------------


def to_physical(p: PotentialSpec, x, t, v):
    """Map dimensionless ``(x, t, v)`` to physical ``(q, tau, nu)``."""
    return (p.mu * np.asarray(x) + p.q_star, np.asarray(t) / p.omega,
            p.mu * p.omega * np.asarray(v))


def to_normalized(p: PotentialSpec, q, tau, nu):
    """Inverse of :func:`to_physical`."""
    return ((np.asarray(q) - p.q_star) / p.mu, p.omega * np.asarray(tau),
            np.asarray(nu) / (p.mu * p.omega))


def periodic_band(p: PotentialSpec, physical: bool = False) -> float:
    """Largest ``|v|`` whose orbit stays below the lowest adjacent barrier."""
    return p.mu * p.omega * p.v_max if physical else p.v_max


def check_band(p: PotentialSpec, v) -> None:
    from .errors import BandError

    vmax = np.max(np.abs(v)) if np.size(v) else 0.0
    if not vmax < p.v_max:
        raise BandError(
            f"|v| = {vmax:g} is outside the periodic band |v| < {p.v_max:.6g} of {p.descriptor}"
        )


# --- helpers ------------------------------------------------------------------


def _check_ell(ell) -> int:
    ell = int(ell)
    if ell not in (-1, 1):
        raise DomainError("ell must be +1 or -1")
    return ell


def _parse_ell(text: str) -> int:
    try:
        return _check_ell(int(text.strip()))
    except ValueError as exc:
        raise DomainError(f"bad sign {text!r}; expected +1 or -1") from exc


def _trim(coeffs):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0.0:
        coeffs.pop()
    return tuple(float(c) for c in coeffs)


def _real_roots(poly: Polynomial):
    if poly.degree() < 1:
        return []
    roots = poly.roots()
    return [float(r.real) for r in np.atleast_1d(roots)
            if abs(r.imag) <= 1e-9 * (1.0 + abs(r.real))]


def _from_normalised_poly(kind, desc, coeffs, ell, *, q_star=0.0, mass=1.0, omega=1.0,
                          mu=1.0, physical=None, perturbation=()):
    V = Polynomial(coeffs)
    _check_normalisation(V, ell)
    crit = [r for r in _real_roots(V.deriv()) if abs(r) > 1e-12]
    right = min((r for r in crit if r > 0), default=math.inf)
    left = max((r for r in crit if r < 0), default=-math.inf)
    levels = [float(V(b)) for b in (left, right) if math.isfinite(b)]
    v_max = math.sqrt(2.0 * min(levels)) if levels else math.inf
    return PotentialSpec(
        kind=kind,
        descriptor=desc,
        q_star=float(q_star),
        mass=float(mass),
        omega=float(omega),
        mu=float(mu),
        ell=ell,
        v_max=v_max,
        barriers=(left, right),
        coeffs=tuple(float(c) for c in coeffs),
        physical_coeffs=physical if physical is not None else tuple(float(c) for c in coeffs),
        perturbation=perturbation,
    )


def _check_normalisation(V: Polynomial, ell: int) -> None:
    vals = [V(0.0), V.deriv(1)(0.0), V.deriv(2)(0.0), V.deriv(4)(0.0)]
    want = [0.0, 0.0, 1.0, 6.0 * ell]
    if any(abs(g - w) > 1e-8 for g, w in zip(vals, want)):
        raise DomainError(f"normalisation failed: V(0), V'(0), V''(0), V''''(0) = {vals}")
