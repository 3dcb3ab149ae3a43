"""State/costate propagation along burn-coast-burn extremals.

Burns are integrated with fixed-step RK4, the thrust direction being
re-evaluated from the costates at every derivative call. Coasts use the
exact closed form (V, I frozen, RAAN and costate derivatives constant).

Costates here follow the maximum principle with a nonpositive cost
multiplier ``p0``: the thrust direction maximises the Hamiltonian
``H = p0 f + p_v dV/dt + p_i dI/dt + p_raan dRAAN/dt``.
"""
import math
from dataclasses import dataclass

from .model import DAY, EARTH, GravityModel, OrbitState
from .problem import TransferProblem

TWO_OVER_PI = 2.0 / math.pi
DEFAULT_STEP = 0.005 * DAY


class DegenerateControl(ValueError):
    """Thrust direction undefined: velocity and inclination costates both zero."""


@dataclass(frozen=True)
class Costate:
    p_v: float
    p_i: float
    p_raan: float
    p0: float = -1.0


@dataclass(frozen=True)
class ExtremalPoint:
    state: OrbitState
    costate: Costate
    f: float
    beta: float
    s: float
    h: float

    @property
    def t(self) -> float:
        return self.state.t


@dataclass(frozen=True)
class ThrustSchedule:
    """Burn on [t0, t1], coast on [t1, t2], burn on [t2, tf]."""
    t0: float
    t1: float
    t2: float
    tf: float

    def __post_init__(self):
        if not self.t0 <= self.t1 <= self.t2 <= self.tf:
            raise ValueError(f"schedule out of order: {self}")


def optimal_beta(costate: Costate, v: float) -> float:
    """Thrust out-of-plane angle maximising the Hamiltonian."""
    y = TWO_OVER_PI / v * costate.p_i
    x = -costate.p_v
    if x == 0.0 and y == 0.0:
        raise DegenerateControl("p_v and p_i both zero")
    return math.atan2(y, x)


def switching_function(costate: Costate, v: float, beta: float) -> float:
    return costate.p0 - costate.p_v * math.cos(beta) + costate.p_i * TWO_OVER_PI / v * math.sin(beta)


def hamiltonian(state: OrbitState, costate: Costate, f: float, g: GravityModel = EARTH) -> float:
    beta = optimal_beta(costate, state.v)
    return f * switching_function(costate, state.v, beta) + costate.p_raan * state.precession_rate(g)


def extremal_point(state: OrbitState, costate: Costate, f: float, g: GravityModel = EARTH) -> ExtremalPoint:
    beta = optimal_beta(costate, state.v)
    s = switching_function(costate, state.v, beta)
    return ExtremalPoint(state, costate, f, beta, s, f * s + costate.p_raan * state.precession_rate(g))


# --- raw 6-vector machinery: (V, I, RAAN, p_v, p_i, p_raan) ---

def _rhs(y, f, k, p0=-1.0):
    v, inc, _, pv, pi, pr = y
    a = TWO_OVER_PI / v * pi
    b = -pv
    # optimal direction without trig: cos = b/n, sin = a/n
    n = math.hypot(a, b)
    if n == 0.0:
        raise DegenerateControl("p_v and p_i both zero")
    cb, sb = b / n, a / n
    kv6 = k * v**6
    ci, si = math.cos(inc), math.sin(inc)
    return (
        -f * cb,
        TWO_OVER_PI / v * f * sb,
        -kv6 * v * ci,
        7.0 * pr * kv6 * ci + TWO_OVER_PI / (v * v) * pi * f * sb,
        -pr * kv6 * v * si,
        0.0,
    )


def _rk4_step(y, f, k, h):
    k1 = _rhs(y, f, k)
    y2 = tuple(a + 0.5 * h * b for a, b in zip(y, k1))
    k2 = _rhs(y2, f, k)
    y3 = tuple(a + 0.5 * h * b for a, b in zip(y, k2))
    k3 = _rhs(y3, f, k)
    y4 = tuple(a + h * b for a, b in zip(y, k3))
    k4 = _rhs(y4, f, k)
    return tuple(a + h / 6.0 * (b + 2.0 * c + 2.0 * d + e) for a, b, c, d, e in zip(y, k1, k2, k3, k4))


def _n_steps(duration, step):
    return max(1, math.ceil(duration / step - 1e-9))


def burn_raw(y, f, duration, k, step=DEFAULT_STEP, samples=None):
    """Integrate a burn of ``duration``; optionally append (dt, y) samples."""
    if duration <= 0.0:
        return y
    n = _n_steps(duration, step)
    h = duration / n
    for j in range(n):
        y = _rk4_step(y, f, k, h)
        if samples is not None:
            samples.append(((j + 1) * h, y))
    return y


def coast_raw(y, duration, k):
    v, inc, raan, pv, pi, pr = y
    kv6 = k * v**6
    ci, si = math.cos(inc), math.sin(inc)
    return (
        v,
        inc,
        raan - kv6 * v * ci * duration,
        pv + 7.0 * pr * kv6 * ci * duration,
        pi - pr * kv6 * v * si * duration,
        pr,
    )


def _pack(state: OrbitState, costate: Costate):
    return (state.v, state.inc, state.raan, costate.p_v, costate.p_i, costate.p_raan)


def _unpack(y, t, f, p0, g) -> ExtremalPoint:
    v, inc = y[0], y[1]
    if not v > 0 or not math.isfinite(v):
        raise FloatingPointError(f"propagation diverged (V={v})")
    # inclination may overshoot [0, pi] on wild Newton iterates; keep the raw value
    state = OrbitState.__new__(OrbitState)
    object.__setattr__(state, "v", v)
    object.__setattr__(state, "inc", inc)
    object.__setattr__(state, "raan", y[2])
    object.__setattr__(state, "t", t)
    return extremal_point(state, Costate(y[3], y[4], y[5], p0), f, g)


def propagate_burn(start: ExtremalPoint, f: float, t_end: float, g: GravityModel = EARTH,
                   step: float = DEFAULT_STEP) -> list[ExtremalPoint]:
    """Samples (start included) of a constant-level burn up to ``t_end``."""
    if t_end < start.t:
        raise ValueError("t_end precedes the start epoch")
    if f < 0:
        raise ValueError("acceleration level must be nonnegative")
    p0 = start.costate.p0
    if p0 != -1.0:
        raise ValueError("burn propagation assumes the normalised multiplier p0 = -1")
    y = _pack(start.state, start.costate)
    samples = []
    burn_raw(y, f, t_end - start.t, g.k, step, samples)
    out = [_unpack(y, start.t, f, p0, g)]
    out += [_unpack(yy, start.t + dt, f, p0, g) for dt, yy in samples]
    return out


def propagate_coast(start: ExtremalPoint, t_end: float, g: GravityModel = EARTH) -> ExtremalPoint:
    if t_end < start.t:
        raise ValueError("t_end precedes the start epoch")
    y = coast_raw(_pack(start.state, start.costate), t_end - start.t, g.k)
    return _unpack(y, t_end, 0.0, start.costate.p0, g)


def schedule_final_raw(y0, sched: ThrustSchedule, f_max: float, k: float, step: float = DEFAULT_STEP):
    """Fast path for the shooting loop: states at t1, t2 and tf."""
    y1 = burn_raw(y0, f_max, sched.t1 - sched.t0, k, step)
    y2 = coast_raw(y1, sched.t2 - sched.t1, k)
    yf = burn_raw(y2, f_max, sched.tf - sched.t2, k, step)
    return y1, y2, yf


def propagate_schedule(problem: TransferProblem, costate0: Costate, sched: ThrustSchedule,
                       step: float = DEFAULT_STEP, coast_samples: int = 100) -> list[ExtremalPoint]:
    """Full burn/coast/burn trajectory sampled at every RK4 step.

    Switching dates appear twice, once with each acceleration level, so the
    jump in ``f`` (and in ``H`` through ``f S``) is visible in the samples.
    """
    g, f_max = problem.g, problem.f_max
    start = extremal_point(problem.start, costate0, f_max if sched.t1 > sched.t0 else 0.0, g)
    traj = propagate_burn(start, f_max, sched.t1, g, step) if sched.t1 > sched.t0 else [start]
    at1 = traj[-1]
    coast0 = _unpack(_pack(at1.state, at1.costate), sched.t1, 0.0, at1.costate.p0, g)
    traj.append(coast0)
    n = max(1, coast_samples) if sched.t2 > sched.t1 else 0
    for j in range(1, n + 1):
        traj.append(propagate_coast(coast0, sched.t1 + (sched.t2 - sched.t1) * j / n, g))
    at2 = traj[-1]
    if sched.tf > sched.t2:
        burn2 = _unpack(_pack(at2.state, at2.costate), sched.t2, f_max, at2.costate.p0, g)
        traj.extend(propagate_burn(burn2, f_max, sched.tf, g, step))
    return traj
