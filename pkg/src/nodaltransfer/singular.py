"""Singular-arc analysis: steering and acceleration laws, critical
inclinations, cost quadratures and the constant-level construction used
when the RAAN costate vanishes.

Analysis only; the main solver never inserts singular arcs.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .edelbaum import edelbaum_cost, edelbaum_history, edelbaum_transfer
from .model import EARTH, GravityModel, precession_rate
from .problem import TransferProblem

ALPHA = -3.5 * math.pi
ALPHA2 = ALPHA * ALPHA
POLE_GUARD = math.radians(0.1)


class SingularDomainError(ValueError):
    """Point outside the domain of the singular laws (pole, polar orbit, ...)."""


@dataclass(frozen=True)
class SingularParams:
    p_raan: float
    raan_rate_d: float   # rad/s
    p0: float
    f_max: float
    alpha: float = field(default=ALPHA, init=False)

    @property
    def product(self) -> float:
        return self.p_raan * self.raan_rate_d

    @property
    def exists(self) -> bool:
        """Existence window of a singular arc around the minimum level."""
        return 0.0 < self.product < 1.0

    @classmethod
    def normalized(cls, p_raan: float, raan_rate_d: float, f_max: float) -> "SingularParams":
        """Cost multiplier chosen so the minimum level is ``|p_raan * rate| * f_max``."""
        if p_raan * raan_rate_d > 0:
            p0 = -(7.0 / 9.0) * (ALPHA2 - 1.0) / ALPHA2 / f_max
        else:
            p0 = -ALPHA2 / (ALPHA2 - 7.0) / f_max
        return cls(p_raan, raan_rate_d, p0, f_max)


def singular_beta(inc: float) -> float:
    """Out-of-plane angle on a singular arc, branch in (-pi/2, pi/2).

    Polar orbits give 0 (planar transfer).

    Raises:
        SingularDomainError: at 0 or 180 deg, where cos(beta) would vanish.
    """
    c, s = math.cos(inc), math.sin(inc)
    if abs(s) < 1e-15:
        raise SingularDomainError("equatorial inclination: cos(beta) = 0 on the singular arc")
    if abs(c) < 1e-15:
        return 0.0
    return math.atan(ALPHA / (s / c))


def singular_residual(inc: float, beta: float) -> float:
    """Left side of 7 cos I cos b + (2/pi) sin I sin b = 0."""
    return 7.0 * math.cos(inc) * math.cos(beta) + (2.0 / math.pi) * math.sin(inc) * math.sin(beta)


def _accel_tau(tau, p: SingularParams):
    den = 6.0 * tau * tau - (ALPHA2 - 7.0)
    return -p.product / (p.p0 * ALPHA2) * (tau * tau + ALPHA2) ** 2 / den


def singular_accel(inc: float, p: SingularParams) -> float:
    """Singular acceleration level as a function of inclination.

    Raises:
        SingularDomainError: at the pole tan^2 I = (alpha^2 - 7)/6 or at 90 deg.
    """
    c = math.cos(inc)
    if abs(c) < 1e-15:
        raise SingularDomainError("polar orbit: tan I undefined")
    tau = math.sin(inc) / c
    if 6.0 * tau * tau - (ALPHA2 - 7.0) == 0.0:
        raise SingularDomainError("acceleration pole")
    return _accel_tau(tau, p)


def singular_accel_tau(tau: float, p: SingularParams) -> float:
    return _accel_tau(tau, p)


def singular_accel_from_beta(inc: float, beta: float, p: SingularParams) -> float:
    """Level from the unreduced relation in (I, beta).

    Substituting ``tan(beta) = alpha / tan(I)`` gives ``-7`` times the tau
    form of ``singular_accel``. This unreduced level is the one that keeps
    the switching function identically zero under the costate dynamics
    (``p0`` and ``p_raan`` in the maximum-principle sign convention).
    """
    sb, cb = math.sin(beta), math.cos(beta)
    si, ci = math.sin(inc), math.cos(inc)
    return -7.0 * p.product / (p.p0 * sb * sb * (1.0 + 2.0 * sb * cb / (math.pi * si * ci)))


def singular_accel_derivative(tau: float, p: SingularParams) -> float:
    """d level / d tan I, closed form."""
    den = 6.0 * tau * tau - (ALPHA2 - 7.0)
    return (-p.product / (p.p0 * ALPHA2)
            * 4.0 * tau * (3.0 * tau * tau - 4.0 * ALPHA2 + 7.0) * (tau * tau + ALPHA2) / den**2)


def critical_inclinations() -> tuple[float, float, float, float]:
    """(I_s1, I_s2, I_m1, I_m2): pole and minimum-level inclinations (rad)."""
    tau_s = math.sqrt((ALPHA2 - 7.0) / 6.0)
    tau_m = math.sqrt((4.0 * ALPHA2 - 7.0) / 3.0)
    i_s, i_m = math.atan(tau_s), math.atan(tau_m)
    return i_s, math.pi - i_s, i_m, math.pi - i_m


def level_at_zero(p: SingularParams) -> float:
    return p.product / p.p0 * ALPHA2 / (ALPHA2 - 7.0)


def level_minimum(p: SingularParams) -> float:
    return -(7.0 / 9.0) * p.product / p.p0 * (ALPHA2 - 1.0) / ALPHA2


def variation_table(p: SingularParams, n: int = 10_000):
    """Sign of dF/dI and end behaviour on each interval between the critical
    inclinations, sampled on an ``n``-point grid.

    Returns a list of ``(lo, hi, slope_sign, f_lo, f_hi)`` per interval, the
    level values being taken at the first/last grid point inside it.
    """
    i_s1, i_s2, i_m1, i_m2 = critical_inclinations()
    edges = [0.0, i_s1, i_m1, 0.5 * math.pi, i_m2, i_s2, math.pi]
    grid = np.linspace(0.0, math.pi, n)
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        pts = grid[(grid > lo + 1e-9) & (grid < hi - 1e-9)]
        vals = np.array([singular_accel(float(x), p) for x in pts])
        d = np.diff(vals)
        sign = int(np.sign(d[0])) if np.all(np.sign(d) == np.sign(d[0])) else 0
        out.append((lo, hi, sign, float(vals[0]), float(vals[-1])))
    return out


def _adaptive_simpson(fun, a, b, tol, depth=50):
    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = fun(lm), fun(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return (rec(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))

    fa, fb, fm = fun(a), fun(b), fun(0.5 * (a + b))
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, depth)


def _check_path(i0, if_):
    lo, hi = min(i0, if_), max(i0, if_)
    for bad, name in ((0.5 * math.pi, "polar inclination"),) + tuple(
            (x, "acceleration pole") for x in critical_inclinations()[:2]):
        if lo - POLE_GUARD < bad < hi + POLE_GUARD:
            raise SingularDomainError(f"path [{math.degrees(lo):.3f}, {math.degrees(hi):.3f}] deg "
                                      f"crosses or touches the {name} at {math.degrees(bad):.2f} deg")


def singular_velocity(inc: float, raan_rate_d: float, g: GravityModel = EARTH) -> float:
    """Velocity keeping the precession rate at ``raan_rate_d``.

    Raises:
        SingularDomainError: if the rate has the wrong sign for this inclination.
    """
    ratio = -raan_rate_d / (g.k * math.cos(inc))
    if not ratio > 0:
        raise SingularDomainError("negative radicand: drift rate sign incompatible with inclination")
    return ratio ** (1.0 / 7.0)


def singular_cost_integrand(inc: float, raan_rate_d: float, g: GravityModel = EARTH) -> float:
    return singular_velocity(inc, raan_rate_d, g) / 7.0 * math.sqrt(math.tan(inc) ** 2 + ALPHA2)


def singular_cost_quadrature(i0: float, if_: float, raan_rate_d: float, g: GravityModel = EARTH,
                             tol: float = 1e-12, nodes: int | None = None) -> float:
    """Impulse of a single singular arc between two inclinations (m/s).

    Adaptive Simpson by default; ``nodes`` switches to composite Simpson
    with that many intervals.

    Raises:
        SingularDomainError: path crosses 90 deg or an acceleration pole, or
            the drift rate sign does not match the inclination side.
    """
    if i0 == if_:
        return 0.0
    _check_path(i0, if_)
    a, b = min(i0, if_), max(i0, if_)

    def fun(x):
        return singular_cost_integrand(x, raan_rate_d, g)

    if nodes is not None:
        n = nodes + nodes % 2
        x = np.linspace(a, b, n + 1)
        y = np.array([fun(float(v)) for v in x])
        w = np.ones(n + 1)
        w[1:-1:2], w[2:-1:2] = 4.0, 2.0
        return float((b - a) / (3.0 * n) * np.dot(w, y))
    return abs(_adaptive_simpson(fun, a, b, tol * (b - a)))


def single_arc_raan_costate(i0: float, if_: float, raan_rate_d: float, duration: float,
                            f_max: float, g: GravityModel = EARTH) -> SingularParams:
    """RAAN costate for which one singular arc joins ``i0`` to ``if_`` in ``duration``.

    Inclination rate scales linearly with ``p_raan`` under the normalised
    cost multiplier, so the unit-costate travel time gives the answer.

    Raises:
        SingularDomainError: unreachable inclination or level outside [0, f_max].
    """
    _check_path(i0, if_)
    unit = SingularParams.normalized(1.0, raan_rate_d, f_max)
    direction = math.copysign(1.0, if_ - i0)

    def inv_rate(x):
        beta = singular_beta(x)
        f = singular_accel(x, unit)
        idot = 2.0 / (math.pi * singular_velocity(x, raan_rate_d, g)) * f * math.sin(beta)
        if idot * direction <= 0:
            raise SingularDomainError("singular steering moves the inclination the other way")
        return 1.0 / abs(idot)

    a, b = min(i0, if_), max(i0, if_)
    t_unit = _adaptive_simpson(inv_rate, a, b, 1e-9 * (b - a) * inv_rate(0.5 * (a + b)))
    p = SingularParams.normalized(t_unit / duration, raan_rate_d, f_max)
    levels = [singular_accel(float(x), p) for x in np.linspace(a, b, 201)]
    if min(levels) < 0 or max(levels) > f_max * (1 + 1e-12):
        raise SingularDomainError("singular level leaves [0, f_max] along the arc")
    return p


# --- constant-level construction for a vanishing RAAN costate ---

@dataclass(frozen=True)
class PomegaZeroTransfer:
    f: float
    coast_start: float   # s
    coast_end: float     # s
    delta_v: float       # m/s, f times total burn time
    raan_final: float

    @property
    def burn_time(self) -> float:
        return self.delta_v / self.f


def _pomega_zero_raan(x, xfer, coast, problem, nodes=512):
    """Final RAAN when the coast is inserted after fraction ``x`` of the burn."""
    k = problem.g.k
    tb = xfer.duration
    tc = x * tb

    def quad(a, b):
        if b <= a:
            return 0.0
        t = np.linspace(a, b, nodes + 1)
        v, inc, _ = edelbaum_history(xfer, t)
        y = -k * v**7 * np.cos(inc)
        w = np.ones(nodes + 1)
        w[1:-1:2], w[2:-1:2] = 4.0, 2.0
        return float((b - a) / (3.0 * nodes) * np.dot(w, y))

    v, inc, _ = edelbaum_history(xfer, np.array([tc]))
    return (problem.start.raan + quad(0.0, tc)
            + precession_rate(float(v[0]), float(inc[0]), problem.g) * coast + quad(tc, tb))


def singular_pomega_zero_transfer(problem: TransferProblem, f: float | None = None) -> PomegaZeroTransfer:
    """Constant-level Edelbaum arc with one inserted coast meeting all final conditions.

    Raises:
        SingularDomainError: the burn does not fit or no coast position hits the RAAN.
    """
    s, e = problem.start, problem.target
    f = problem.f_max if f is None else f
    dv = edelbaum_cost(s.v, e.v, s.inc, e.inc)
    if dv == 0.0:
        raise SingularDomainError("coincident endpoints: pure coast, no singular arc")
    xfer = edelbaum_transfer(s.v, s.inc, e.v, e.inc, f)
    coast = problem.duration - xfer.duration
    if coast < -1e-9 * problem.duration:
        raise SingularDomainError(f"burn of {xfer.duration:.1f} s exceeds the window")
    coast = max(coast, 0.0)

    def resid(x):
        return _pomega_zero_raan(x, xfer, coast, problem) - problem.raan_target

    r0, r1 = resid(0.0), resid(1.0)
    if coast == 0.0:
        # minimum-time burn: the coast position is immaterial
        if abs(r0) > 1e-8:
            raise SingularDomainError("no coast left to meet the final RAAN")
        x = 0.0
    elif r0 == 0.0:
        x = 0.0
    elif r1 == 0.0:
        x = 1.0
    elif (r0 > 0) == (r1 > 0):
        raise SingularDomainError("no coast position meets the final RAAN")
    else:
        x = optimize.brentq(resid, 0.0, 1.0, xtol=1e-15)
    tc = problem.t0 + x * xfer.duration
    # impulse as integral of the level over the burn time
    return PomegaZeroTransfer(f, tc, tc + coast, f * xfer.duration,
                              resid(x) + problem.raan_target)
