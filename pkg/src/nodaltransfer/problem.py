"""Transfer problem definition shared by the SES, sensitivity and shooting layers."""
import math
from dataclasses import dataclass, replace

from .model import EARTH, GravityModel, OrbitState

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TransferProblem:
    """Fixed-endpoint, fixed-duration transfer.

    ``target`` is the final orbit at the final date, its RAAN already
    extrapolated to that date. ``raan_branch`` adds whole revolutions to it.
    """
    start: OrbitState
    target: OrbitState
    f_max: float
    g: GravityModel = EARTH
    raan_branch: int = 0

    def __post_init__(self):
        if not self.target.t > self.start.t:
            raise ValueError("final date must follow the initial date")
        if not self.f_max > 0:
            raise ValueError(f"f_max must be positive, got {self.f_max}")

    @property
    def t0(self) -> float:
        return self.start.t

    @property
    def tf(self) -> float:
        return self.target.t

    @property
    def duration(self) -> float:
        return self.tf - self.t0

    @property
    def raan_target(self) -> float:
        return self.target.raan + TWO_PI * self.raan_branch

    @property
    def mean_rate(self) -> float:
        """Drift rate needed if the whole RAAN change happened on the coast."""
        return (self.raan_target - self.start.raan) / self.duration

    def with_branch(self, n: int) -> "TransferProblem":
        return replace(self, raan_branch=n)

    def with_start(self, start: OrbitState) -> "TransferProblem":
        return replace(self, start=start)

    def with_target(self, target: OrbitState) -> "TransferProblem":
        return replace(self, target=target)
