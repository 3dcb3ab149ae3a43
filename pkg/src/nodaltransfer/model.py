"""Gravity model, averaged circular-orbit state and unit helpers.

Everything is SI internally (m, s, rad). Degrees, days and kilometres only
appear at the I/O boundary through the helpers at the bottom of this module.
"""
import math
from dataclasses import dataclass, field, replace

DAY = 86400.0  # s


@dataclass(frozen=True)
class GravityModel:
    """Central body with the first zonal harmonic only."""
    mu: float = 3.986005e14   # m^3/s^2
    re: float = 6378137.0     # m
    j2: float = 1.08266e-3
    k: float = field(init=False)  # s^6/m^7

    def __post_init__(self):
        if self.mu <= 0 or self.re <= 0 or self.j2 <= 0:
            raise ValueError(
                f"gravity constants must be positive, got mu={self.mu}, re={self.re}, j2={self.j2}"
            )
        object.__setattr__(self, "k", 1.5 * self.j2 * self.re**2 / self.mu**3)


EARTH = GravityModel()


@dataclass(frozen=True)
class OrbitState:
    """Averaged circular orbit at an epoch.

    ``raan`` is kept unwrapped: accumulated precession matters, not the
    angle modulo 2*pi.
    """
    v: float           # m/s
    inc: float         # rad
    raan: float = 0.0  # rad
    t: float = 0.0     # s

    def __post_init__(self):
        if not self.v > 0:
            raise ValueError(f"velocity must be positive, got {self.v}")
        if not 0.0 <= self.inc <= math.pi:
            raise ValueError(f"inclination must lie in [0, pi], got {self.inc}")

    def radius(self, g: GravityModel = EARTH) -> float:
        return g.mu / self.v**2

    def altitude(self, g: GravityModel = EARTH) -> float:
        return self.radius(g) - g.re

    def precession_rate(self, g: GravityModel = EARTH) -> float:
        return precession_rate(self.v, self.inc, g)

    def drifted(self, t: float, g: GravityModel = EARTH) -> "OrbitState":
        """Same orbit at date ``t`` after natural precession only."""
        return replace(self, raan=self.raan + self.precession_rate(g) * (t - self.t), t=t)

    @classmethod
    def from_altitude(cls, h: float, inc: float, raan: float = 0.0, t: float = 0.0,
                      g: GravityModel = EARTH) -> "OrbitState":
        return cls(velocity_from_altitude(h, g), inc, raan, t)


@dataclass(frozen=True)
class PropellantBudget:
    delta_v: float  # m/s
    m0: float       # kg
    ve: float       # m/s
    mc: float       # kg

    @classmethod
    def from_delta_v(cls, delta_v: float, m0: float, ve: float) -> "PropellantBudget":
        return cls(delta_v, m0, ve, propellant_mass(delta_v, m0, ve))

    @property
    def final_mass(self) -> float:
        return self.m0 - self.mc


def precession_rate(v: float, inc: float, g: GravityModel = EARTH) -> float:
    """Secular J2 RAAN rate of a circular orbit, -k V^7 cos I (rad/s)."""
    if inc == 0.5 * math.pi:
        return 0.0  # cos(pi/2) is 6e-17 in floating point
    return -g.k * v**7 * math.cos(inc)


def velocity_from_altitude(h: float, g: GravityModel = EARTH) -> float:
    r = g.re + h
    if r <= 0:
        raise ValueError(f"altitude {h} m gives a nonpositive radius")
    return math.sqrt(g.mu / r)


def altitude_from_velocity(v: float, g: GravityModel = EARTH) -> float:
    if v <= 0:
        raise ValueError(f"velocity must be positive, got {v}")
    return g.mu / v**2 - g.re


def propellant_mass(delta_v: float, m0: float, ve: float) -> float:
    """Propellant consumed for a velocity impulse (rocket equation).

    Raises:
        ValueError: on negative impulse or nonpositive mass/exhaust velocity.
    """
    if delta_v < 0:
        raise ValueError(f"delta_v must be nonnegative, got {delta_v}")
    if m0 <= 0 or ve <= 0:
        raise ValueError("m0 and ve must be positive")
    return -m0 * math.expm1(-delta_v / ve)


def delta_v_from_propellant(mc: float, m0: float, ve: float) -> float:
    if not 0 <= mc < m0:
        raise ValueError(f"propellant mass must lie in [0, m0), got {mc}")
    return ve * math.log(m0 / (m0 - mc))


# --- I/O unit helpers ---

def deg(x: float) -> float:
    return math.degrees(x)


def rad(x: float) -> float:
    return math.radians(x)


def days(t: float) -> float:
    return t / DAY


def seconds(d: float) -> float:
    return d * DAY


def rate_deg_per_day(rate: float) -> float:
    return math.degrees(rate) * DAY


def rate_rad_per_s(rate: float) -> float:
    return math.radians(rate) / DAY


def wrap_deg(angle: float) -> float:
    """Display helper: radians, any real -> degrees in [0, 360)."""
    return math.degrees(angle) % 360.0
