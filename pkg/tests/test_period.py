import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from focalrenorm import complete_k, dynamics as dyn, potentials as pot
from focalrenorm import period_map as pm
from focalrenorm.errors import DomainError

from conftest import TWO_PI


def first_return(p, v):
    """Time of the first upward crossing of x=0 after t=0, via an integration event."""
    def crossing(_t, y):
        return y[0]
    crossing.direction = 1.0

    def rhs(_t, y):
        return [y[1], float(pot.force(p, y[0]))]

    sol = solve_ivp(rhs, (0, 20), [0.0, v], method="DOP853", rtol=1e-13, atol=1e-15,
                    events=crossing)
    hits = sol.t_events[0]
    return float(hits[hits > 1.0][0])


def quartic_turning(ell, v):
    return math.sqrt(-ell + ell * math.sqrt(1 + 2 * ell * v * v))


def test_turning_point_examples():
    tp = pm.turning_points(pot.quartic(1), 0.3)
    assert tp.x_max == pytest.approx(quartic_turning(1, 0.3), abs=1e-13)
    assert tp.x_max == pytest.approx(0.293731, abs=1e-6)
    tp = pm.turning_points(pot.quartic(-1), 0.3)
    assert tp.x_max == pytest.approx(math.sqrt(1 - math.sqrt(0.82)), abs=1e-13)


def test_turning_points_level(builtin):
    v = 0.3
    tp = pm.turning_points(builtin, v)
    assert tp.x_min < 0 < tp.x_max
    for x in (tp.x_min, tp.x_max):
        assert pot.eval_potential(builtin, x) == pytest.approx(0.5 * v * v, abs=1e-12)
    if builtin.is_even:
        assert tp.x_min == pytest.approx(-tp.x_max, abs=1e-12)


def test_turning_points_outside_band():
    with pytest.raises(DomainError):
        pm.turning_points(pot.quartic(-1), 0.8)


def test_rest_period(builtin):
    assert pm.period(builtin, 0.0) == TWO_PI


@pytest.mark.parametrize("nu", [0.2, 0.5, 1.0])
def test_pendulum_physical_period(nu):
    assert pm.physical_period(pot.pendulum(), nu) == pytest.approx(4 * complete_k(nu * nu / 4), abs=1e-10)


@pytest.mark.parametrize("ell", [1, -1])
def test_small_velocity_period(ell):
    v = 0.05
    T = pm.period(pot.quartic(ell), v)
    assert abs(T - (TWO_PI - 0.75 * math.pi * ell * v * v)) <= 5 * v**3


@pytest.mark.parametrize("ell", [1, -1])
def test_period_against_elliptic_closed_form(ell):
    for v in (0.1, 0.4, 0.65):
        assert pm.period(pot.quartic(ell), v) == pytest.approx(dyn.quartic_params(ell, v).period, abs=1e-11)


@pytest.mark.parametrize("v", [0.1, 0.3])
def test_period_equals_first_return(builtin, v):
    assert pm.period(builtin, v) == pytest.approx(first_return(builtin, v), abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.001, 0.6))
def test_period_even(v):
    for p in (pot.quartic(-1), pot.pendulum()):
        assert pm.period(p, v) == pytest.approx(pm.period(p, -v), abs=1e-12)


def test_monotone_trend():
    v = np.linspace(0.01, 0.5, 50)
    up = pm.periods(pot.quartic(1), v)
    down = pm.periods(pot.quartic(-1), v)
    assert np.all(np.diff(up) < 0)
    assert np.all(np.diff(down) > 0)


@pytest.mark.parametrize("ell", [1, -1])
def test_perturbed_remainder(ell):
    p = pot.perturbed(ell, c5=0.1)
    for v in (0.2, 0.1, 0.05):
        assert abs(pm.period(p, v) - (TWO_PI - 0.75 * math.pi * ell * v * v)) <= 5 * v**3


GRID = np.linspace(0.01, 0.1, 10)


@pytest.mark.parametrize("desc,expected", [
    ("quartic:+1", -0.75 * math.pi), ("quartic:-1", 0.75 * math.pi), ("pendulum", 0.75 * math.pi),
])
def test_expansion_fit(desc, expected):
    c = pm.period_expansion_check(pot.make_potential(desc), GRID)
    assert c == pytest.approx(expected, rel=1e-2)


def test_periods_vectorised():
    p = pot.pendulum()
    v = [0.0, 0.2, -0.2]
    np.testing.assert_array_equal(pm.periods(p, v), [pm.period(p, x) for x in v])
