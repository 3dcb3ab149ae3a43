"""Mission configuration (INI file) and problem construction.

Schema (angles in degrees, dates in days)::

    [initial]              ; one of altitude_km / velocity_m_s
    altitude_km = 800
    inclination_deg = 98
    raan_deg = 0
    epoch_day = 0          ; date at which raan_deg is given

    [target]               ; same keys; raan extrapolated to tf by precession
    altitude_km = 900
    inclination_deg = 99
    raan_deg = 30
    epoch_day = 0

    [window]
    t0_day = 0
    tf_day = 100

    [vehicle]
    f_max = 3.5e-3         ; m/s^2
    mass_kg = 1000         ; optional, with exhaust_velocity_m_s
    exhaust_velocity_m_s = 20000

    [solver]               ; all optional
    step_day = 0.005
    tol = 1e-8
    branch = 0
    scan_branches = -1..1
    ses_nodes = 64
    alt_min_km = 150
    alt_max_km = 2000

    [sensitivity]          ; optional perturbation sizes
    altitude_km = 50
    inclination_deg = 0.1
    raan_deg = 5
    final_date_day = 5
"""
import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from .model import DAY, EARTH, GravityModel, OrbitState, precession_rate, velocity_from_altitude
from .problem import TWO_PI, TransferProblem
from .sensitivity import Perturbations
from .ses import SesOptions


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class OrbitSpec:
    inclination: float       # rad
    raan: float              # rad at epoch
    epoch: float             # s
    altitude: float | None = None
    velocity: float | None = None

    def __post_init__(self):
        if (self.altitude is None) == (self.velocity is None):
            raise ConfigError("give exactly one of altitude_km / velocity_m_s per orbit")

    def speed(self, g: GravityModel = EARTH) -> float:
        return self.velocity if self.velocity is not None else velocity_from_altitude(self.altitude, g)

    def at(self, t: float, g: GravityModel = EARTH) -> OrbitState:
        v = self.speed(g)
        return OrbitState(v, self.inclination, self.raan + precession_rate(v, self.inclination, g) * (t - self.epoch), t)


def parse_branch_range(text: str) -> range:
    """``"A..B"`` (inclusive) to a range."""
    try:
        a, b = text.split("..")
        a, b = int(a), int(b)
    except ValueError as exc:
        raise ConfigError(f"branch range must look like A..B, got {text!r}") from exc
    if b < a:
        raise ConfigError(f"empty branch range {text!r}")
    return range(a, b + 1)


@dataclass(frozen=True)
class MissionConfig:
    initial: OrbitSpec
    target: OrbitSpec
    t0: float
    tf: float
    f_max: float
    mass: float | None = None
    exhaust_velocity: float | None = None
    step: float = 0.005 * DAY
    tol: float = 1e-8
    branch: int = 0
    scan_branches: range | None = None
    ses: SesOptions = field(default_factory=SesOptions)
    perturbations: Perturbations = field(default_factory=Perturbations)
    g: GravityModel = EARTH

    def __post_init__(self):
        if not self.tf > self.t0:
            raise ConfigError("tf must follow t0")
        if not self.f_max > 0:
            raise ConfigError("f_max must be positive")
        if (self.mass is None) != (self.exhaust_velocity is None):
            raise ConfigError("mass_kg and exhaust_velocity_m_s go together")

    def problem(self, branch: int | None = None) -> TransferProblem:
        return TransferProblem(self.initial.at(self.t0, self.g), self.target.at(self.tf, self.g),
                               self.f_max, self.g, self.branch if branch is None else branch)


def resolve_target_raan(cfg: MissionConfig, branch: int | None = None) -> float:
    """Target RAAN at the final date (rad), revolution branch included."""
    n = cfg.branch if branch is None else branch
    return cfg.target.at(cfg.tf, cfg.g).raan + TWO_PI * n


def _orbit(sec: configparser.SectionProxy) -> OrbitSpec:
    alt = sec.getfloat("altitude_km")
    vel = sec.getfloat("velocity_m_s")
    return OrbitSpec(math.radians(sec.getfloat("inclination_deg")),
                     math.radians(sec.getfloat("raan_deg", 0.0)),
                     sec.getfloat("epoch_day", 0.0) * DAY,
                     None if alt is None else alt * 1e3, vel)


def load_config(path: str | Path) -> MissionConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if not cp.read(path):
        raise ConfigError(f"cannot read config {path}")
    return config_from_parser(cp)


def config_from_string(text: str) -> MissionConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.read_string(text)
    return config_from_parser(cp)


def config_from_parser(cp: configparser.ConfigParser) -> MissionConfig:
    for name in ("initial", "target", "window", "vehicle"):
        if name not in cp:
            raise ConfigError(f"missing section [{name}]")
    try:
        solver = cp["solver"] if "solver" in cp else {}
        sens = cp["sensitivity"] if "sensitivity" in cp else None
        ses = SesOptions(
            nodes=int(solver.get("ses_nodes", 64)),
            alt_min=float(solver.get("alt_min_km", 150)) * 1e3,
            alt_max=float(solver.get("alt_max_km", 2000)) * 1e3,
        )
        pert = Perturbations()
        if sens is not None:
            pert = Perturbations(
                sens.getfloat("altitude_km", 50.0) * 1e3,
                math.radians(sens.getfloat("inclination_deg", 0.1)),
                math.radians(sens.getfloat("raan_deg", 5.0)),
                sens.getfloat("final_date_day", 5.0) * DAY,
            )
        scan = solver.get("scan_branches")
        veh = cp["vehicle"]
        return MissionConfig(
            initial=_orbit(cp["initial"]),
            target=_orbit(cp["target"]),
            t0=cp["window"].getfloat("t0_day", 0.0) * DAY,
            tf=cp["window"].getfloat("tf_day") * DAY,
            f_max=veh.getfloat("f_max"),
            mass=veh.getfloat("mass_kg"),
            exhaust_velocity=veh.getfloat("exhaust_velocity_m_s"),
            step=float(solver.get("step_day", 0.005)) * DAY,
            tol=float(solver.get("tol", 1e-8)),
            branch=int(solver.get("branch", 0)),
            scan_branches=parse_branch_range(scan) if scan else None,
            ses=ses,
            perturbations=pert,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config value: {exc}") from exc
