"""Split Edelbaum Strategy: two analytic Edelbaum burns around a drift coast.

The drift orbit ``(v_d, i_d)`` is chosen to minimise the summed Edelbaum
impulse while natural precession over the whole window meets the final
RAAN. The minimisation is done as nested scalar problems: an inner root
solve for the drift inclination that satisfies the RAAN constraint, and an
outer bounded Brent search on the drift velocity.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .edelbaum import edelbaum_cost, edelbaum_cost_gradient, edelbaum_history, edelbaum_transfer
from .model import GravityModel, precession_rate, velocity_from_altitude
from .problem import TransferProblem

log = logging.getLogger(__name__)

SesProblem = TransferProblem


class SesInfeasible(ValueError):
    """No drift orbit meets the RAAN target inside the window."""


@dataclass(frozen=True)
class SesOptions:
    nodes: int = 64               # Simpson intervals per burn leg
    alt_min: float = 150e3        # drift-orbit search bracket (m)
    alt_max: float = 2000e3
    xtol_v: float = 1e-7          # m/s
    xtol_i: float = 1e-14         # rad


DEFAULT_OPTIONS = SesOptions()


@dataclass(frozen=True)
class SesSolution:
    v_d: float
    i_d: float
    t1: float
    t2: float
    delta_v: float
    raan_residual: float
    dv1: float = 0.0
    dv2: float = 0.0
    raan_t1: float = 0.0
    raan_t2: float = 0.0
    raan_rate_d: float = 0.0
    guess: tuple[float, float] | None = None


def _leg_precession(v0, i0, v1, i1, f, g, nodes):
    """RAAN accumulated along one Edelbaum leg, and the leg duration."""
    if edelbaum_cost(v0, v1, i0, i1) == 0.0:
        return 0.0, 0.0
    xfer = edelbaum_transfer(v0, i0, v1, i1, f)
    n = nodes + nodes % 2
    t = np.linspace(0.0, xfer.duration, n + 1)
    v, inc, _ = edelbaum_history(xfer, t)
    return float(integrate.simpson(-g.k * v**7 * np.cos(inc), x=t)), xfer.duration


def ses_schedule(v_d: float, i_d: float, problem: SesProblem, opts: SesOptions = DEFAULT_OPTIONS):
    """Switching dates and RAAN history for a drift orbit.

    Returns ``(t1, t2, raan_t1, raan_t2, raan_tf)``.

    Raises:
        SesInfeasible: when the two burns do not fit in the window.
    """
    s, e, g = problem.start, problem.target, problem.g
    q1, d1 = _leg_precession(s.v, s.inc, v_d, i_d, problem.f_max, g, opts.nodes)
    q2, d2 = _leg_precession(v_d, i_d, e.v, e.inc, problem.f_max, g, opts.nodes)
    t1 = problem.t0 + d1
    t2 = problem.tf - d2
    if t2 < t1:
        raise SesInfeasible(f"burns need {(d1 + d2) / 86400:.3f} d, window too short")
    raan1 = s.raan + q1
    raan2 = raan1 + precession_rate(v_d, i_d, g) * (t2 - t1)
    return t1, t2, raan1, raan2, raan2 + q2


def raan_at_tf(v_d: float, i_d: float, problem: SesProblem, opts: SesOptions = DEFAULT_OPTIONS) -> float:
    return ses_schedule(v_d, i_d, problem, opts)[4]


def ses_cost(v_d: float, i_d: float, problem: SesProblem) -> float:
    s, e = problem.start, problem.target
    return edelbaum_cost(s.v, v_d, s.inc, i_d) + edelbaum_cost(v_d, e.v, i_d, e.inc)


def _velocity_bracket(problem: SesProblem, opts: SesOptions) -> tuple[float, float]:
    return velocity_from_altitude(opts.alt_max, problem.g), velocity_from_altitude(opts.alt_min, problem.g)


def analytic_drift_inclination(v_d: float, rate: float, g: GravityModel) -> float | None:
    """Inclination giving precession ``rate`` at ``v_d``; None if unreachable."""
    c = -rate / (g.k * v_d**7)
    if abs(c) > 1.0:
        return None
    return math.acos(c)


def guess_gradient(v_d: float, problem: SesProblem) -> float:
    """Total derivative of the split cost along the analytic drift-rate constraint."""
    s, e = problem.start, problem.target
    i_d = analytic_drift_inclination(v_d, problem.mean_rate, problem.g)
    _, (pv1, pi1) = edelbaum_cost_gradient(s.v, v_d, s.inc, i_d)
    (pv2, pi2), _ = edelbaum_cost_gradient(v_d, e.v, i_d, e.inc)
    return (pv1 + pv2) + (pi1 + pi2) * 7.0 / (v_d * math.tan(i_d))


def ses_initial_guess(problem: SesProblem, opts: SesOptions = DEFAULT_OPTIONS,
                      grid: int = 400) -> tuple[float, float]:
    """Drift orbit from the analytic drift-rate constraint (quadratures dropped).

    Solves the 1-D stationarity condition of the split cost by bracketing on
    a velocity grid; falls back to the grid minimum when no sign change is
    found.

    Raises:
        SesInfeasible: if the mean drift rate is out of reach in the bracket.
    """
    g, rate = problem.g, problem.mean_rate
    lo, hi = _velocity_bracket(problem, opts)
    vs = []
    for v in np.linspace(lo, hi, grid):
        i_d = analytic_drift_inclination(float(v), rate, g)
        # |cos I_d| -> 1 makes dI/dV blow up
        if i_d is not None and abs(math.tan(i_d)) > 1e-9:
            vs.append(float(v))
    if not vs:
        raise SesInfeasible(
            f"drift rate {math.degrees(rate) * 86400:.4f} deg/day unattainable in the altitude bracket"
        )

    def cost(v):
        return ses_cost(v, analytic_drift_inclination(v, rate, g), problem)

    grads = [guess_gradient(v, problem) for v in vs]
    best = None
    for j in range(len(vs) - 1):
        if grads[j] < 0 < grads[j + 1]:
            v = optimize.brentq(guess_gradient, vs[j], vs[j + 1], args=(problem,), xtol=1e-10)
            if best is None or cost(v) < cost(best):
                best = v
        elif grads[j] == 0.0:
            best = vs[j] if best is None or cost(vs[j]) < cost(best) else best
    if best is None:
        log.warning("no stationary point bracketed, using grid minimum")
        best = min(vs, key=cost)
    return best, analytic_drift_inclination(best, rate, g)


def _inclination_bounds(problem: SesProblem) -> tuple[float, float]:
    eps = 1e-9
    if problem.mean_rate >= 0:
        return 0.5 * math.pi + eps, math.pi - eps
    return eps, 0.5 * math.pi - eps


def _constraint(i_d, v_d, problem, opts):
    try:
        return raan_at_tf(v_d, i_d, problem, opts) - problem.raan_target
    except SesInfeasible:
        return None


def solve_drift_inclination(v_d: float, problem: SesProblem, opts: SesOptions = DEFAULT_OPTIONS) -> float:
    """Drift inclination meeting the final RAAN exactly at a given drift velocity.

    The search stays on the side of 90 deg selected by the sign of the
    required mean drift rate.

    Raises:
        SesInfeasible: no root found on the admissible side.
    """
    lo, hi = _inclination_bounds(problem)
    i_start = analytic_drift_inclination(v_d, problem.mean_rate, problem.g)
    if i_start is None:
        i_start = hi if problem.mean_rate >= 0 else lo
    i_start = min(max(i_start, lo), hi)
    r0 = _constraint(i_start, v_d, problem, opts)
    if r0 is None:
        # burns too long from there: restart between the endpoint inclinations
        mid = 0.5 * (problem.start.inc + problem.target.inc)
        i_start = min(max(mid, lo), hi)
        r0 = _constraint(i_start, v_d, problem, opts)
        if r0 is None:
            raise SesInfeasible(f"no feasible drift inclination at v_d={v_d:.3f}")
    if r0 == 0.0:
        return i_start
    # final RAAN grows with the drift inclination
    direction = 1.0 if r0 < 0 else -1.0
    step = math.radians(0.01)
    a, ra = i_start, r0
    while True:
        b = min(max(a + direction * step, lo), hi)
        if b == a:
            raise SesInfeasible(f"RAAN target not bracketed at v_d={v_d:.3f}")
        rb = _constraint(b, v_d, problem, opts)
        if rb is None:
            raise SesInfeasible(f"RAAN target needs burns longer than the window at v_d={v_d:.3f}")
        if rb == 0.0:
            return b
        if (rb > 0) != (ra > 0):
            break
        a, ra = b, rb
        step *= 2.0
    return optimize.brentq(lambda x: _constraint(x, v_d, problem, opts), min(a, b), max(a, b),
                           xtol=opts.xtol_i, rtol=4 * np.finfo(float).eps)


def reduced_cost(v_d: float, problem: SesProblem, opts: SesOptions = DEFAULT_OPTIONS) -> float:
    """Split impulse with the drift inclination eliminated; inf if infeasible."""
    try:
        i_d = solve_drift_inclination(v_d, problem, opts)
    except SesInfeasible:
        return math.inf
    return ses_cost(v_d, i_d, problem)


def _feasible_interval(v_guess: float, problem: SesProblem, opts: SesOptions) -> tuple[float, float]:
    """Velocity interval around the guess on which the inner solve succeeds."""
    lo, hi = _velocity_bracket(problem, opts)
    ends = []
    for direction, limit in ((-1.0, lo), (1.0, hi)):
        v_ok, step = v_guess, 1.0
        while True:
            v = v_ok + direction * step
            if (v - limit) * direction >= 0:
                v = limit
            if math.isinf(reduced_cost(v, problem, opts)):
                a, b = v_ok, v
                for _ in range(30):
                    m = 0.5 * (a + b)
                    if math.isinf(reduced_cost(m, problem, opts)):
                        b = m
                    else:
                        a = m
                ends.append(a)
                break
            v_ok = v
            if v == limit:
                ends.append(v)
                break
            step *= 2.0
    return min(ends), max(ends)


def _is_pure_drift(problem: SesProblem) -> bool:
    s, e = problem.start, problem.target
    drift = s.raan + s.precession_rate(problem.g) * problem.duration
    return s.v == e.v and s.inc == e.inc and abs(drift - problem.raan_target) < 1e-12


def solve_ses(problem: SesProblem, opts: SesOptions = DEFAULT_OPTIONS) -> SesSolution:
    """Minimum split-Edelbaum impulse meeting the final RAAN.

    Raises:
        SesInfeasible: infeasible window or unreachable RAAN target.
    """
    s, e = problem.start, problem.target
    if _is_pure_drift(problem):
        rate = s.precession_rate(problem.g)
        return SesSolution(s.v, s.inc, problem.t0, problem.tf, 0.0,
                           s.raan + rate * problem.duration - problem.raan_target,
                           raan_t1=s.raan, raan_t2=problem.raan_target,
                           raan_rate_d=rate, guess=(s.v, s.inc))
    v_guess, i_guess = ses_initial_guess(problem, opts)
    if math.isinf(reduced_cost(v_guess, problem, opts)):
        raise SesInfeasible("initial drift orbit infeasible once burn precession is included")
    a, b = _feasible_interval(v_guess, problem, opts)
    res = optimize.minimize_scalar(reduced_cost, bounds=(a, b), args=(problem, opts),
                                   method="bounded",
                                   options={"xatol": opts.xtol_v, "maxiter": 500})
    v_d = float(res.x)
    i_d = solve_drift_inclination(v_d, problem, opts)
    t1, t2, r1, r2, rf = ses_schedule(v_d, i_d, problem, opts)
    dv1 = edelbaum_cost(s.v, v_d, s.inc, i_d)
    dv2 = edelbaum_cost(v_d, e.v, i_d, e.inc)
    return SesSolution(v_d, i_d, t1, t2, dv1 + dv2, rf - problem.raan_target, dv1, dv2,
                       r1, r2, precession_rate(v_d, i_d, problem.g), (v_guess, i_guess))


def scan_raan_branches(problem: SesProblem, n_range, opts: SesOptions = DEFAULT_OPTIONS,
                       workers: int | None = None):
    """Solve every RAAN revolution branch; feasible results sorted by impulse.

    Returns a list of ``(n, SesSolution)``.

    Raises:
        SesInfeasible: if every branch is infeasible.
    """
    branches = list(n_range)

    def one(n):
        try:
            return n, solve_ses(problem.with_branch(n), opts)
        except SesInfeasible as exc:
            log.info("branch %d infeasible: %s", n, exc)
            return n, None

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = [r for r in pool.map(one, branches) if r[1] is not None]
    if not results:
        raise SesInfeasible(f"all RAAN branches {branches} infeasible")
    return sorted(results, key=lambda r: r[1].delta_v)
