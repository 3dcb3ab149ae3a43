"""Indirect single shooting on the burn-coast-burn extremal.

Unknowns are the initial cost sensitivities (p_v0, p_i0, p_raan0) and the
two switching dates. The residual stacks the final-state errors and the
switching function at both switching dates. A damped Newton iteration with
a forward-difference Jacobian drives it to zero in scaled variables.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from .problem import TransferProblem
from .propagator import (DEFAULT_STEP, Costate, DegenerateControl, ExtremalPoint, ThrustSchedule,
                         optimal_beta, propagate_schedule, schedule_final_raw, switching_function)
from .sensitivity import CostateGuess
from .ses import _is_pure_drift

log = logging.getLogger(__name__)


class ShootingError(RuntimeError):
    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


@dataclass(frozen=True)
class ShootingUnknowns:
    """Initial cost sensitivities dJ/dX(t0) and switching dates (s)."""
    p_v0: float
    p_i0: float
    p_raan0: float
    t1: float
    t2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.p_v0, self.p_i0, self.p_raan0, self.t1, self.t2])

    @classmethod
    def from_array(cls, x) -> "ShootingUnknowns":
        return cls(*(float(v) for v in x))

    def adjoint(self) -> Costate:
        return Costate(-self.p_v0, -self.p_i0, -self.p_raan0, -1.0)

    def schedule(self, problem: TransferProblem) -> ThrustSchedule:
        return ThrustSchedule(problem.t0, self.t1, self.t2, problem.tf)


@dataclass(frozen=True)
class ShootingOptions:
    step: float = DEFAULT_STEP
    tol: float = 1e-8            # scaled residual norm
    max_iter: int = 50
    fd_step: float = 1e-7        # relative, on scaled unknowns
    max_halvings: int = 20


@dataclass(frozen=True)
class SequenceRow:
    label: str
    t: float
    v: float
    inc: float
    raan: float
    raan_rate: float
    impulse: float


@dataclass
class TransferSolution:
    problem: TransferProblem
    unknowns: ShootingUnknowns
    residual: np.ndarray          # native units (m/s, rad, rad, -, -)
    scaled_norm: float
    delta_v: float
    trajectory: list[ExtremalPoint]
    sequences: list[SequenceRow]
    iterations: int = 0
    boundary: bool = False
    history: list[float] = field(default_factory=list)

    @property
    def final(self) -> ExtremalPoint:
        return self.trajectory[-1]


def _raw_residual(x, problem: TransferProblem, step: float):
    u = ShootingUnknowns.from_array(x)
    lam = u.adjoint()
    sched = u.schedule(problem)
    s = problem.start
    y0 = (s.v, s.inc, s.raan, lam.p_v, lam.p_i, lam.p_raan)
    y1, y2, yf = schedule_final_raw(y0, sched, problem.f_max, problem.g.k, step)
    e = problem.target

    def sw(y):
        c = Costate(y[3], y[4], y[5])
        return switching_function(c, y[0], optimal_beta(c, y[0]))

    r = np.array([yf[0] - e.v, yf[1] - e.inc, yf[2] - problem.raan_target, sw(y1), sw(y2)])
    if not np.all(np.isfinite(r)):
        raise FloatingPointError("nonfinite residual")
    return r


def shooting_residual(u: ShootingUnknowns, problem: TransferProblem,
                      step: float = DEFAULT_STEP, scaled: bool = True) -> np.ndarray:
    """Final-state errors and switching values; scaled unless ``scaled=False``.

    Scaling divides the velocity error by the initial velocity; angles and
    switching values are left as is.

    Raises:
        ValueError: if the schedule is out of order.
        ShootingError: if the propagation fails.
    """
    u.schedule(problem)  # order check
    try:
        r = _raw_residual(u.as_array(), problem, step)
    except (DegenerateControl, FloatingPointError, OverflowError, ZeroDivisionError) as exc:
        raise ShootingError(f"residual evaluation failed: {exc}") from exc
    if scaled:
        r[0] /= problem.start.v
    return r


def _ordered(x, problem) -> bool:
    return problem.t0 <= x[3] <= x[4] <= problem.tf


def _clip_dates(x, problem):
    x = x.copy()
    x[3] = min(max(x[3], problem.t0), problem.tf)
    x[4] = min(max(x[4], x[3]), problem.tf)
    return x


def solve_shooting(problem: TransferProblem, guess: CostateGuess | ShootingUnknowns,
                   t1: float | None = None, t2: float | None = None,
                   options: ShootingOptions = ShootingOptions()) -> TransferSolution:
    """Damped Newton on the 5-dimensional shooting function.

    ``guess`` is either a sensitivity-based ``CostateGuess`` (its SES
    reference supplies the switching dates unless given) or explicit
    unknowns.

    Raises:
        ShootingError: on iteration limit, singular Jacobian or propagation
            failure that backtracking cannot recover.
    """
    if _is_pure_drift(problem):
        return coast_only_solution(problem)
    if isinstance(guess, CostateGuess):
        ref = guess.reference
        t1 = t1 if t1 is not None else (ref.t1 if ref else problem.t0)
        t2 = t2 if t2 is not None else (ref.t2 if ref else problem.tf)
        x0 = np.array([guess.p_v0, guess.p_i0, guess.p_raan0, t1, t2])
    else:
        x0 = guess.as_array()
    if not np.all(np.isfinite(x0)):
        raise ShootingError("nonfinite guess")
    x0 = _clip_dates(x0, problem)

    scale = np.abs(x0[:3])
    scale[scale == 0.0] = 1.0
    scale = np.concatenate([scale, [problem.duration] * 2])
    offset = np.array([0.0, 0.0, 0.0, problem.t0, problem.t0])
    rscale = np.array([problem.start.v, 1.0, 1.0, 1.0, 1.0])
    step = options.step

    def fun(z):
        x = offset + z * scale
        return _raw_residual(x, problem, step) / rscale

    def safe(z):
        try:
            return fun(z)
        except (DegenerateControl, FloatingPointError, OverflowError, ZeroDivisionError, ValueError):
            return None

    z = (x0 - offset) / scale
    r = safe(z)
    if r is None:
        raise ShootingError("propagation failed at the initial guess")
    norm = float(np.linalg.norm(r))
    history = [norm]
    it = 0
    while norm >= options.tol:
        if it >= options.max_iter:
            raise ShootingError(f"no convergence in {it} iterations (|F|={norm:.3e})", r)
        it += 1
        jac = np.empty((5, 5))
        for j in range(5):
            h = options.fd_step * max(1.0, abs(z[j]))
            zp = z.copy()
            zp[j] += h
            if j >= 3 and not _ordered(offset + zp * scale, problem):
                zp[j] -= 2.0 * h
                h = -h
            rp = safe(zp)
            if rp is None:
                raise ShootingError("propagation failed while building the Jacobian", r)
            jac[:, j] = (rp - r) / h
        try:
            dz = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as exc:
            raise ShootingError(f"singular Jacobian: {exc}", r) from exc
        lam = 1.0
        for _ in range(options.max_halvings + 1):
            zn = z + lam * dz
            xn = offset + zn * scale
            if _ordered(xn, problem):
                rn = safe(zn)
                if rn is not None and np.linalg.norm(rn) < norm:
                    break
            lam *= 0.5
        else:
            raise ShootingError(f"line search failed at iteration {it} (|F|={norm:.3e})", r)
        z, r, norm = zn, rn, float(np.linalg.norm(rn))
        history.append(norm)
        log.debug("newton %d: |F|=%.3e lambda=%g", it, norm, lam)

    u = ShootingUnknowns.from_array(offset + z * scale)
    return build_solution(problem, u, step, iterations=it, history=history)


def build_solution(problem: TransferProblem, u: ShootingUnknowns, step: float = DEFAULT_STEP,
                   iterations: int = 0, history=None) -> TransferSolution:
    raw = shooting_residual(u, problem, step, scaled=False)
    scaled = raw.copy()
    scaled[0] /= problem.start.v
    traj = propagate_schedule(problem, u.adjoint(), u.schedule(problem), step)
    dv = problem.f_max * ((u.t1 - problem.t0) + (problem.tf - u.t2))
    boundary = u.t1 == problem.t0 or u.t2 == problem.tf
    return TransferSolution(problem, u, raw, float(np.linalg.norm(scaled)), dv, traj,
                            sequence_table(problem, u, traj), iterations, boundary, list(history or []))


def sequence_table(problem: TransferProblem, u: ShootingUnknowns,
                   traj: list[ExtremalPoint]) -> list[SequenceRow]:
    """State, precession and cumulated impulse at t0, t1, t2 and tf."""
    g, f = problem.g, problem.f_max
    rows = []
    for label, t, dv in (("t0", problem.t0, 0.0),
                         ("t1", u.t1, f * (u.t1 - problem.t0)),
                         ("t2", u.t2, f * (u.t1 - problem.t0)),
                         ("tf", problem.tf, f * ((u.t1 - problem.t0) + (problem.tf - u.t2)))):
        p = min(traj, key=lambda q: abs(q.t - t))
        st = p.state
        rows.append(SequenceRow(label, t, st.v, st.inc, st.raan, st.precession_rate(g), dv))
    return rows


@dataclass(frozen=True)
class Certificate:
    hamiltonian_drift: float
    p_raan_drift: float
    sign_pattern_ok: bool
    fs_min: float
    coast_rate: float | None
    drift_rate_from_h: float | None
    rate_mismatch: float | None
    edelbaum_equivalent: bool
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_extremal(sol: TransferSolution, h_tol: float = 1e-6, rate_tol: float = 1e-3) -> Certificate:
    """Check the necessary conditions along a converged trajectory.

    Hamiltonian drift is taken over every sample, both sides of each
    switching date included, so a switching residual ``S`` shows up as a
    jump ``f S``.
    """
    traj = sol.trajectory
    hs = np.array([p.h for p in traj])
    h0 = hs[0]
    drift = float(np.max(np.abs(hs - h0)) / (1.0 + abs(h0)))
    prs = np.array([p.costate.p_raan for p in traj])
    pr_drift = float(np.max(np.abs(prs - prs[0])) / (1.0 + abs(prs[0])))
    problem, u = sol.problem, sol.unknowns
    fs = np.array([p.f * p.s for p in traj])
    fs_min = float(fs.min())

    eps = 1e-9 * problem.duration
    pattern = True
    for p in traj:
        inside_burn = (problem.t0 + eps < p.t < u.t1 - eps) or (u.t2 + eps < p.t < problem.tf - eps)
        inside_coast = u.t1 + eps < p.t < u.t2 - eps
        if (inside_burn and p.s <= 0) or (inside_coast and p.s >= 0):
            pattern = False
            break

    coast = [p for p in traj if u.t1 <= p.t <= u.t2 and p.f == 0.0]
    coast_rate = coast[0].state.precession_rate(problem.g) if coast else None
    pr = prs[0]
    rate_h = h0 / pr if pr != 0.0 else None
    mismatch = None
    if coast_rate is not None and rate_h is not None:
        mismatch = abs(rate_h - coast_rate) / abs(coast_rate)

    violations = []
    if drift > h_tol:
        violations.append(f"hamiltonian drift {drift:.3e}")
    if pr_drift > h_tol:
        violations.append(f"p_raan drift {pr_drift:.3e}")
    if not pattern:
        violations.append("switching sign pattern not +/-/+")
    if fs_min < -1e-9:
        violations.append(f"f*S negative ({fs_min:.3e})")
    if mismatch is not None and mismatch > rate_tol:
        violations.append(f"coast rate differs from H/p_raan by {mismatch:.3e}")
    edel = pr == 0.0 and u.t1 == u.t2
    return Certificate(drift, pr_drift, pattern, fs_min, coast_rate, rate_h, mismatch, edel,
                       tuple(violations))


def coast_only_solution(problem: TransferProblem) -> TransferSolution:
    """Boundary solution for endpoints joined by pure drift (no thrust)."""
    s, e = problem.start, problem.target
    drift = s.drifted(problem.tf, problem.g)
    if not (s.v == e.v and s.inc == e.inc and abs(drift.raan - problem.raan_target) < 1e-12):
        raise ShootingError("endpoints are not connected by a pure drift")
    # p_raan = 0 and |p_v| < 1 keep S < 0 throughout: a certified coast
    u = ShootingUnknowns(-0.5, 0.0, 0.0, problem.t0, problem.tf)
    traj = propagate_schedule(problem, u.adjoint(), u.schedule(problem))
    res = np.array([traj[-1].state.v - e.v, traj[-1].state.inc - e.inc,
                    traj[-1].state.raan - problem.raan_target, 0.0, 0.0])
    return TransferSolution(problem, u, res, float(np.linalg.norm(res)), 0.0, traj,
                            sequence_table(problem, u, traj), 0, True)

