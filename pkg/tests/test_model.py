import math

import pytest
from hypothesis import given, strategies as st

from nodaltransfer.model import (DAY, EARTH, GravityModel, OrbitState, PropellantBudget,
                                 altitude_from_velocity, days, deg, delta_v_from_propellant,
                                 precession_rate, propellant_mass, rad, rate_deg_per_day, seconds,
                                 velocity_from_altitude, wrap_deg)

# 3*j2*re^2/(2*mu^3) evaluated by hand with the Earth constants
K_EARTH = 1.0431758400225292e-33


def test_k_constant():
    assert EARTH.k == pytest.approx(K_EARTH, rel=1e-12)
    g = GravityModel(mu=1.0, re=2.0, j2=3.0)
    assert g.k == pytest.approx(3 * 3.0 * 4.0 / 2.0, rel=1e-12)


def test_k_close_to_reference_value():
    assert abs(EARTH.k - 1.0425e-33) / 1.0425e-33 < 2e-3


@pytest.mark.parametrize("field", ["mu", "re", "j2"])
def test_gravity_rejects_nonpositive(field):
    kw = dict(mu=EARTH.mu, re=EARTH.re, j2=EARTH.j2)
    kw[field] = 0.0
    with pytest.raises(ValueError):
        GravityModel(**kw)


def test_orbit_state_validation():
    with pytest.raises(ValueError):
        OrbitState(v=0.0, inc=0.1)
    with pytest.raises(ValueError):
        OrbitState(v=7000.0, inc=-0.01)
    with pytest.raises(ValueError):
        OrbitState(v=7000.0, inc=math.pi + 0.01)
    OrbitState(v=7000.0, inc=math.pi)


def test_radius_altitude_consistent():
    s = OrbitState.from_altitude(800e3, rad(98.0))
    assert s.radius() == pytest.approx(EARTH.mu / s.v**2, rel=1e-14)
    assert s.altitude() == pytest.approx(800e3, rel=1e-12)
    assert s.radius() == pytest.approx(EARTH.re + s.altitude(), rel=1e-14)


def test_precession_reference_rates():
    assert rate_deg_per_day(precession_rate(7450.0, rad(98.0))) == pytest.approx(0.917, abs=0.005)
    assert rate_deg_per_day(precession_rate(7398.6, rad(99.0))) == pytest.approx(0.982, abs=0.005)


def test_precession_zero_at_polar():
    assert precession_rate(7450.0, math.pi / 2) == 0.0
    assert precession_rate(3000.0, rad(90.0)) == 0.0


def test_velocity_from_altitude():
    assert velocity_from_altitude(800e3) == pytest.approx(7450.0, abs=2.0)
    assert velocity_from_altitude(900e3) == pytest.approx(7398.6, abs=2.0)
    assert velocity_from_altitude(0.0) == pytest.approx(math.sqrt(EARTH.mu / EARTH.re), rel=1e-15)


def test_velocity_from_altitude_rejects_below_center():
    with pytest.raises(ValueError):
        velocity_from_altitude(-EARTH.re)


def test_propellant_mass():
    assert propellant_mass(0.0, 1000.0, 20000.0) == 0.0
    assert propellant_mass(1e7, 1000.0, 20000.0) == pytest.approx(1000.0, rel=1e-12)
    mc = propellant_mass(598.1, 1000.0, 20000.0)
    assert mc == pytest.approx(29.462269746530545, rel=1e-12)
    # inverse of the rocket equation
    assert 20000.0 * math.log(1000.0 / (1000.0 - mc)) == pytest.approx(598.1, rel=1e-12)
    assert delta_v_from_propellant(mc, 1000.0, 20000.0) == pytest.approx(598.1, rel=1e-12)
    with pytest.raises(ValueError):
        propellant_mass(-1.0, 1000.0, 20000.0)


def test_budget():
    b = PropellantBudget.from_delta_v(598.1, 1000.0, 20000.0)
    assert 0 <= b.mc < b.m0
    assert b.final_mass == pytest.approx(1000.0 - b.mc)
    assert PropellantBudget.from_delta_v(0.0, 1000.0, 20000.0).mc == 0.0


@given(st.floats(1000.0, 12000.0), st.floats(0.0, math.pi))
def test_precession_sign(v, inc):
    r = precession_rate(v, inc)
    c = math.cos(inc)
    if abs(c) < 1e-15:
        assert abs(r) < 1e-20
    else:
        assert math.copysign(1.0, r) == -math.copysign(1.0, c)


@given(st.floats(-1e4, 1e4))
def test_angle_roundtrip(x):
    assert deg(rad(x)) == pytest.approx(x, rel=1e-9, abs=1e-12)


@given(st.floats(-1e4, 1e4))
def test_day_roundtrip(x):
    assert days(seconds(x)) == pytest.approx(x, rel=1e-9, abs=1e-12)
    assert seconds(1.0) == DAY


@given(st.floats(100e3, 40000e3))
def test_altitude_roundtrip(h):
    assert altitude_from_velocity(velocity_from_altitude(h)) == pytest.approx(h, rel=1e-9)


@given(st.floats(-1e3, 1e3))
def test_wrap_deg(a):
    w = wrap_deg(a)
    assert 0.0 <= w <= 360.0
    assert math.remainder(w - math.degrees(a), 360.0) == pytest.approx(0.0, abs=1e-8)


def test_drifted_state():
    s = OrbitState.from_altitude(800e3, rad(98.0), raan=0.1, t=0.0)
    d = s.drifted(10 * DAY)
    assert d.raan == pytest.approx(0.1 + s.precession_rate() * 10 * DAY, rel=1e-14)
    assert (d.v, d.inc, d.t) == (s.v, s.inc, 10 * DAY)
