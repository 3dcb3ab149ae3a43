import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy.integrate import solve_ivp

from nodaltransfer.edelbaum import edelbaum_cost, edelbaum_history
from nodaltransfer.model import DAY, OrbitState, rad, rate_rad_per_s
from nodaltransfer.problem import TransferProblem
from nodaltransfer.singular import (ALPHA, ALPHA2, SingularDomainError, SingularParams,
                                   critical_inclinations, level_at_zero, level_minimum,
                                   single_arc_raan_costate, singular_accel, singular_accel_derivative,
                                   singular_accel_from_beta, singular_accel_tau, singular_beta,
                                   singular_cost_quadrature, singular_pomega_zero_transfer,
                                   singular_residual, singular_velocity, variation_table)

F = 3.5e-3


def steering_identity(inc, beta):
    return 7 * math.cos(inc) * math.cos(beta) + 2 / math.pi * math.sin(inc) * math.sin(beta)


def test_alpha():
    assert ALPHA2 == pytest.approx(49 * math.pi**2 / 4, rel=1e-15)
    assert ALPHA == pytest.approx(-3.5 * math.pi)


def test_existence_flag():
    assert SingularParams(0.5, 1.0, -1.0, F).exists
    assert not SingularParams(2.0, 1.0, -1.0, F).exists
    assert not SingularParams(-0.5, 1.0, -1.0, F).exists


def test_beta_limits():
    assert singular_beta(rad(89.9999)) == pytest.approx(0.0, abs=1e-4)
    assert math.tan(singular_beta(rad(45.0))) == pytest.approx(ALPHA, rel=1e-12)


@pytest.mark.parametrize("inc", [45.0, 98.0])
def test_steering_identity_examples(inc):
    i = rad(inc)
    assert abs(steering_identity(i, singular_beta(i))) < 1e-12
    assert abs(singular_residual(i, singular_beta(i))) < 1e-12


@given(st.floats(0.01, math.pi - 0.01))
def test_steering_identity_identity(inc):
    assume(abs(inc - 0.5 * math.pi) > 1e-6)
    assert abs(steering_identity(inc, singular_beta(inc))) < 1e-12


def test_critical_inclinations():
    i_s1, i_s2, i_m1, i_m2 = (math.degrees(x) for x in critical_inclinations())
    assert i_s1 == pytest.approx(77.07, abs=0.01)
    assert i_s2 == pytest.approx(102.93, abs=0.01)
    assert i_m1 == pytest.approx(85.46, abs=0.01)
    assert i_m2 == pytest.approx(94.54, abs=0.01)
    assert i_s1 + i_s2 == pytest.approx(180.0, abs=1e-12)


def test_level_at_minimum():
    p = SingularParams.normalized(0.5, 1.0, F)
    i_m1 = critical_inclinations()[2]
    assert singular_accel(i_m1, p) == pytest.approx(0.5 * F, rel=1e-12)
    assert level_minimum(p) == pytest.approx(0.5 * F, rel=1e-12)


def test_level_at_zero():
    p = SingularParams(0.3, 1.0, -2.0, F)
    f0 = (0.3 / -2.0) * ALPHA2 / (ALPHA2 - 7)
    assert singular_accel(0.0, p) == pytest.approx(f0, rel=1e-12)
    assert level_at_zero(p) == pytest.approx(f0, rel=1e-12)
    q = SingularParams.normalized(-0.4, 1.0, F)
    assert level_at_zero(q) == pytest.approx(0.4 * F, rel=1e-12)


def test_derivative_vanishes_at_minimum():
    p = SingularParams.normalized(0.5, 1.0, F)
    tau_m = math.sqrt(4 * ALPHA2 - 7) / math.sqrt(3)
    assert abs(singular_accel_derivative(tau_m, p)) < 1e-10
    h = 1e-6
    fd = (singular_accel_tau(tau_m + h, p) - singular_accel_tau(tau_m - h, p)) / (2 * h)
    assert abs(fd) < 1e-10


@given(st.floats(-30.0, 30.0))
def test_derivative_matches_difference(tau):
    p = SingularParams.normalized(0.5, 1.0, F)
    tau_s2 = (ALPHA2 - 7) / 6
    assume(abs(tau * tau - tau_s2) > 2.0)
    h = 1e-5 * max(1.0, abs(tau))
    fd = (singular_accel_tau(tau + h, p) - singular_accel_tau(tau - h, p)) / (2 * h)
    d = singular_accel_derivative(tau, p)
    assert d == pytest.approx(fd, rel=1e-5, abs=1e-12)


def test_variation_sign_pattern():
    p = SingularParams.normalized(0.5, 1.0, F)
    rows = variation_table(p, 10_000)
    assert [r[2] for r in rows] == [-1, -1, 1, -1, 1, 1]
    # diverges on both sides of the poles
    assert rows[0][4] < -0.1 and rows[1][3] > 1.0
    assert rows[4][4] > 1.0 and rows[5][3] < -0.1


def test_poles_diverge():
    p = SingularParams.normalized(0.5, 1.0, F)
    i_s1 = critical_inclinations()[0]
    near, nearer = singular_accel(i_s1 + 1e-3, p), singular_accel(i_s1 + 1e-5, p)
    assert nearer > 50 * near > 0
    near, nearer = singular_accel(i_s1 - 1e-3, p), singular_accel(i_s1 - 1e-5, p)
    assert nearer < 50 * near < 0


@given(st.floats(0.05, 3.09))
def test_unreduced_relation_scale(inc):
    assume(min(abs(inc - x) for x in critical_inclinations()) > 1e-3)
    assume(abs(inc - 0.5 * math.pi) > 1e-3)
    p = SingularParams.normalized(0.5, 1.0, F)
    a = singular_accel(inc, p)
    b = singular_accel_from_beta(inc, singular_beta(inc), p)
    assert b == pytest.approx(-7.0 * a, rel=1e-9)


@pytest.mark.parametrize("inc_deg", [60.0, 98.0, 110.0])
def test_unreduced_level_keeps_switching_zero(inc_deg):
    """Oracle: propagate state and costates under the level and watch S."""
    from nodaltransfer.model import EARTH
    from nodaltransfer.propagator import Costate, _rhs, optimal_beta, switching_function
    inc = rad(inc_deg)
    rate = math.copysign(RATE, -math.cos(inc))
    v = singular_velocity(inc, rate)
    b = singular_beta(inc)
    p_raan = 1e-4 / rate
    p = SingularParams(p_raan, rate, -1.0, F)
    y0 = [v, inc, 0.0, -math.cos(b), math.sin(b) * math.pi * v / 2.0, p_raan]

    def rhs(t, y):
        return list(_rhs(tuple(y), singular_accel_from_beta(y[1], singular_beta(y[1]), p), EARTH.k))

    sol = solve_ivp(rhs, (0.0, 2 * DAY), y0, method="DOP853", rtol=1e-12, atol=1e-14, dense_output=True)
    for t in np.linspace(0.0, 2 * DAY, 9):
        y = sol.sol(t)
        c = Costate(y[3], y[4], y[5])
        assert abs(switching_function(c, y[0], optimal_beta(c, y[0]))) < 1e-9
        assert y[0] == pytest.approx(singular_velocity(y[1], rate), rel=1e-10)


def test_accel_rejects_polar():
    p = SingularParams.normalized(0.5, 1.0, F)
    with pytest.raises(SingularDomainError):
        singular_accel(0.5 * math.pi, p)


RATE = rate_rad_per_s(1.28)
I0, I1 = rad(98.0), rad(99.0)


def test_cost_zero_path():
    assert singular_cost_quadrature(I0, I0, RATE) == 0.0


def test_cost_node_doubling():
    a = singular_cost_quadrature(I0, I1, RATE, nodes=200)
    b = singular_cost_quadrature(I0, I1, RATE, nodes=400)
    assert abs(a - b) / b < 1e-8
    assert singular_cost_quadrature(I0, I1, RATE) == pytest.approx(b, rel=1e-9)


def test_cost_domain_errors():
    with pytest.raises(SingularDomainError):
        singular_cost_quadrature(rad(100.0), rad(105.0), RATE)
    with pytest.raises(SingularDomainError):
        singular_cost_quadrature(rad(85.0), rad(95.0), RATE)
    with pytest.raises(SingularDomainError):
        singular_cost_quadrature(rad(60.0), rad(70.0), RATE)


def propagate_singular(i0, i1, rate, duration):
    """Time-domain integration of the averaged dynamics under the singular laws."""
    p = single_arc_raan_costate(i0, i1, rate, duration, F)
    v0 = singular_velocity(i0, rate)

    def rhs(t, y):
        v, inc, _ = y
        f = singular_accel(inc, p)
        b = singular_beta(inc)
        return [-f * math.cos(b), 2 / (math.pi * v) * f * math.sin(b), f]

    def reached(t, y):
        return y[1] - i1

    reached.terminal = True
    sol = solve_ivp(rhs, (0.0, 10 * duration), [v0, i0, 0.0], method="DOP853", events=reached,
                    rtol=1e-12, atol=1e-12)
    return sol, p


def test_cost_matches_propagation():
    sol, p = propagate_singular(I0, I1, RATE, 100 * DAY)
    assert sol.status == 1
    t_end = sol.t_events[0][0]
    assert t_end == pytest.approx(100 * DAY, rel=1e-6)
    v_end = sol.y_events[0][0][0]
    assert v_end == pytest.approx(singular_velocity(I1, RATE), rel=1e-8)
    j = sol.y_events[0][0][2]
    assert j == pytest.approx(singular_cost_quadrature(I0, I1, RATE), rel=1e-6)


def test_cost_independent_of_level_profile():
    a, _ = propagate_singular(I0, I1, RATE, 100 * DAY)
    b, _ = propagate_singular(I0, I1, RATE, 40 * DAY)
    assert a.y_events[0][0][2] == pytest.approx(b.y_events[0][0][2], rel=1e-6)


def _pomega_zero_problem(raan_deg=95.0, days=100.0):
    s = OrbitState.from_altitude(800e3, rad(98.0))
    e = OrbitState.from_altitude(900e3, rad(99.0), rad(raan_deg), days * DAY)
    return TransferProblem(s, e, F)


def test_pomega_zero_transfer():
    prob = _pomega_zero_problem()
    x = singular_pomega_zero_transfer(prob)
    assert x.raan_final == pytest.approx(prob.raan_target, abs=1e-10)
    s, e = prob.start, prob.target
    assert x.delta_v == pytest.approx(edelbaum_cost(s.v, e.v, s.inc, e.inc), rel=1e-12)
    assert prob.t0 <= x.coast_start <= x.coast_end <= prob.tf


def test_pomega_zero_cost_formula():
    from nodaltransfer.edelbaum import edelbaum_beta0
    prob = _pomega_zero_problem()
    s, e = prob.start, prob.target
    b0 = edelbaum_beta0(s.v, e.v, s.inc, e.inc)
    root = math.sqrt(e.v**2 - (s.v * math.sin(b0))**2)
    # both signs chosen so the impulse is nonnegative
    candidates = [sr * root + sc * s.v * math.cos(b0) for sr in (1, -1) for sc in (1, -1)]
    j = singular_pomega_zero_transfer(prob).delta_v
    assert min(abs(j - c) for c in candidates if c >= 0) < 1e-9 * j


def test_pomega_zero_no_coast_limit():
    from nodaltransfer.edelbaum import edelbaum_state_at, edelbaum_transfer
    s = OrbitState.from_altitude(800e3, rad(98.0))
    vf, if_ = OrbitState.from_altitude(900e3, rad(99.0)).v, rad(99.0)
    x = edelbaum_transfer(s.v, s.inc, vf, if_, F)

    def rhs(t, y):
        v, inc, _ = edelbaum_state_at(x, min(t, x.duration))
        return [-1.0431758400225292e-33 * v**7 * math.cos(inc)]

    raan = solve_ivp(rhs, (0.0, x.duration), [0.0], rtol=1e-13, atol=1e-15).y[0, -1]
    y = singular_pomega_zero_transfer(TransferProblem(s, OrbitState(vf, if_, raan, x.duration), F))
    assert y.coast_end == y.coast_start
    assert y.burn_time == pytest.approx(x.duration, rel=1e-12)


def test_pomega_zero_arc_invariants():
    s = OrbitState.from_altitude(800e3, rad(98.0))
    from nodaltransfer.edelbaum import edelbaum_transfer
    x = edelbaum_transfer(s.v, s.inc, 7400.0, rad(99.0), F)
    t = np.linspace(0.0, x.duration, 50)
    v, inc, beta = edelbaum_history(x, t)
    assert np.allclose(v * np.sin(beta), s.v * math.sin(x.beta0), rtol=1e-12)
    assert np.allclose(inc - s.inc, 2 / math.pi * (beta - x.beta0), atol=1e-14)


def test_pomega_zero_infeasible(app_problem):
    with pytest.raises(SingularDomainError):
        singular_pomega_zero_transfer(app_problem)
    s = OrbitState.from_altitude(800e3, rad(98.0))
    e = OrbitState.from_altitude(900e3, rad(99.0), t=0.1 * DAY)
    with pytest.raises(SingularDomainError):
        singular_pomega_zero_transfer(TransferProblem(s, e, F))
