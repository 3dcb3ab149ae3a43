import time

import numpy as np
import pytest

from nodaltransfer.edelbaum import edelbaum_cost_gradient, edelbaum_transfer
from nodaltransfer.model import DAY, OrbitState, rad, rate_deg_per_day
from nodaltransfer.problem import TransferProblem
from nodaltransfer.propagator import burn_raw
from nodaltransfer.shooting import (ShootingError, ShootingOptions, ShootingUnknowns, build_solution,
                                    shooting_residual, solve_shooting, verify_extremal)

F = 3.5e-3


def test_unknowns_roundtrip():
    u = ShootingUnknowns(-0.6, -9000.0, -800.0, 1.0, 2.0)
    assert ShootingUnknowns.from_array(u.as_array()) == u
    lam = u.adjoint()
    assert (lam.p_v, lam.p_i, lam.p_raan, lam.p0) == (0.6, 9000.0, 800.0, -1.0)


def test_unknowns_order(app_problem):
    with pytest.raises(ValueError):
        ShootingUnknowns(-0.6, -9000.0, -800.0, 50 * DAY, 10 * DAY).schedule(app_problem)
    with pytest.raises(ValueError):
        shooting_residual(ShootingUnknowns(-0.6, -9000.0, -800.0, -DAY, 10 * DAY), app_problem)


def test_converged_matches_reference(app_solution):
    u = app_solution.unknowns
    assert u.p_v0 == pytest.approx(-0.644, abs=5e-4)
    assert u.p_i0 == pytest.approx(-9215.9, abs=0.5)
    assert u.p_raan0 == pytest.approx(-816.97, abs=0.05)
    assert u.t1 / DAY == pytest.approx(1.092, abs=5e-4)
    assert u.t2 / DAY == pytest.approx(99.114, abs=5e-4)
    assert app_solution.delta_v == pytest.approx(598.1, abs=0.1)


def test_converged_residuals_native(app_solution):
    r = app_solution.residual
    assert abs(r[0]) <= 1e-5
    assert all(abs(x) <= 1e-5 for x in r[1:])
    assert app_solution.scaled_norm < 1e-8


def test_switching_zero_at_t1(app_solution):
    t1 = app_solution.unknowns.t1
    pts = [p for p in app_solution.trajectory if p.t == t1]
    assert pts and all(abs(p.s) < 1e-6 for p in pts)


def test_delta_v_identities(app_solution, app_problem):
    u = app_solution.unknowns
    dv = F * ((u.t1 - app_problem.t0) + (app_problem.tf - u.t2))
    assert app_solution.delta_v == pytest.approx(dv, rel=1e-15)
    # trapezoid of f over the samples is exact for a piecewise-constant level
    t = np.array([p.t for p in app_solution.trajectory])
    f = np.array([p.f for p in app_solution.trajectory])
    integral = float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(t)))
    assert integral == pytest.approx(app_solution.delta_v, rel=1e-9)


def test_certificate(app_solution):
    c = verify_extremal(app_solution)
    assert c.ok, c.violations
    assert c.hamiltonian_drift < 1e-6 and c.p_raan_drift < 1e-6
    assert c.sign_pattern_ok
    assert rate_deg_per_day(c.coast_rate) == pytest.approx(1.287, abs=0.002)
    assert c.rate_mismatch < 1e-3
    assert not c.edelbaum_equivalent


def test_corrupted_costate_flagged(app_problem, app_solution):
    u = app_solution.unknowns
    bad = ShootingUnknowns(u.p_v0, u.p_i0 * 1.05, u.p_raan0, u.t1, u.t2)
    c = verify_extremal(build_solution(app_problem, bad))
    assert any("hamiltonian" in v for v in c.violations)


def test_runtime(app_problem, app_guess):
    t = time.perf_counter()
    solve_shooting(app_problem, app_guess)
    assert time.perf_counter() - t < 10.0


def test_perturbed_guess_robustness(app_problem, app_solution):
    rng = np.random.default_rng(17)
    ref = app_solution.unknowns
    reference = np.array([-0.644, -9215.9, -816.97, 1.092 * DAY, 99.114 * DAY])
    for _ in range(8):
        x = reference * (1 + rng.uniform(-0.1, 0.1, 5))
        x[4] = min(x[4], app_problem.tf)
        sol = solve_shooting(app_problem, ShootingUnknowns.from_array(x))
        assert sol.scaled_norm < 1e-8
        assert sol.unknowns.p_i0 == pytest.approx(ref.p_i0, rel=1e-5)
        assert sol.delta_v == pytest.approx(app_solution.delta_v, rel=1e-6)


def _edelbaum_problem():
    """Target placed at the end of an Edelbaum minimum-time burn filling the window."""
    s = OrbitState.from_altitude(800e3, rad(98.0))
    vf, if_ = 7600.0, rad(98.6)
    x = edelbaum_transfer(s.v, s.inc, vf, if_, F)
    (pv, pi), _ = edelbaum_cost_gradient(s.v, vf, s.inc, if_)
    u = ShootingUnknowns(pv, pi, 0.0, 0.0, 0.0)
    y = burn_raw((s.v, s.inc, s.raan, -pv, -pi, 0.0), F, x.duration, 1.0431758400225292e-33)
    target = OrbitState(y[0], y[1], y[2], x.duration)
    return TransferProblem(s, target, F), u, x


def test_edelbaum_boundary_residual_zero():
    prob, u, x = _edelbaum_problem()
    r = shooting_residual(u, prob, scaled=False)
    assert np.all(np.abs(r[:3]) < 1e-9)
    assert abs(r[0] / prob.start.v) < 1e-12
    assert abs(prob.target.v - x.vf) / x.vf < 1e-6
    assert abs(r[3]) < 1e-12


def test_edelbaum_equivalence_certificate():
    prob, u, _ = _edelbaum_problem()
    c = verify_extremal(build_solution(prob, u))
    assert c.edelbaum_equivalent
    assert c.hamiltonian_drift < 1e-6


def test_coast_only():
    s = OrbitState.from_altitude(700e3, rad(97.0), 0.3)
    prob = TransferProblem(s, s.drifted(30 * DAY), F)
    sol = solve_shooting(prob, ShootingUnknowns(-0.5, 0.0, 0.0, 0.0, 30 * DAY))
    assert sol.delta_v == 0.0
    assert sol.boundary
    assert (sol.unknowns.t1, sol.unknowns.t2) == (prob.t0, prob.tf)
    assert verify_extremal(sol).ok


def test_failure_reports_residual(app_problem):
    with pytest.raises(ShootingError) as info:
        solve_shooting(app_problem, ShootingUnknowns(-0.644, -9215.9, -816.97, 1.092 * DAY, 99.114 * DAY),
                       options=ShootingOptions(max_iter=0))
    assert info.value.residual is not None and len(info.value.residual) == 5


def test_window_monotone(app_problem, app_solution):
    u = app_solution.unknowns
    longer = app_problem.with_target(app_problem.target.drifted(app_problem.tf + 5 * DAY))
    later = app_problem.with_start(app_problem.start.drifted(app_problem.t0 + 5 * DAY))
    sol_l = solve_shooting(longer, u)
    sol_s = solve_shooting(later, ShootingUnknowns(u.p_v0, u.p_i0, u.p_raan0, u.t1 + 5 * DAY, u.t2))
    assert sol_l.delta_v <= app_solution.delta_v
    assert sol_s.delta_v >= app_solution.delta_v
