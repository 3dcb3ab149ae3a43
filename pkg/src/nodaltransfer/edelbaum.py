"""Closed-form Edelbaum minimum-time transfer between circular orbits.

Constant acceleration ``f``, out-of-plane angle steered so that
``V sin(beta)`` stays constant while ``V cos(beta)`` decreases linearly at
rate ``f``. The inclination follows ``I - I0 = (2/pi)(beta - beta0)``.
"""
import math
from dataclasses import dataclass

HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class EdelbaumTransfer:
    v0: float
    i0: float
    vf: float
    if_: float
    f: float         # m/s^2
    beta0: float     # rad
    delta_v: float   # m/s
    duration: float  # s

    @property
    def betaf(self) -> float:
        return self.beta0 + HALF_PI * (self.if_ - self.i0)


def edelbaum_beta0(v0: float, vf: float, i0: float, if_: float) -> float:
    """Initial out-of-plane angle; 0 for coincident endpoints."""
    theta = HALF_PI * (if_ - i0)
    y = vf * math.sin(theta)
    x = v0 - vf * math.cos(theta)
    if x == 0.0 and y == 0.0:
        return 0.0
    return math.atan2(y, x)


def edelbaum_cost(v0: float, vf: float, i0: float, if_: float) -> float:
    theta = HALF_PI * (if_ - i0)
    # (v0 - vf)^2 + 4 v0 vf sin^2(theta/2): no cancellation for small theta
    return math.sqrt((v0 - vf) ** 2 + 4.0 * v0 * vf * math.sin(0.5 * theta) ** 2)


def edelbaum_transfer(v0: float, i0: float, vf: float, if_: float, f: float) -> EdelbaumTransfer:
    if f <= 0:
        raise ValueError(f"acceleration must be positive, got {f}")
    dv = edelbaum_cost(v0, vf, i0, if_)
    return EdelbaumTransfer(v0, i0, vf, if_, f, edelbaum_beta0(v0, vf, i0, if_), dv, dv / f)


def edelbaum_state_at(xfer: EdelbaumTransfer, t: float) -> tuple[float, float, float]:
    """(V, I, beta) at time ``t`` after the start of the transfer.

    Raises:
        ValueError: if ``t`` lies outside ``[0, duration]``.
    """
    tol = 1e-9 * max(xfer.duration, 1.0)
    if t < -tol or t > xfer.duration + tol:
        raise ValueError(f"t={t} outside transfer window [0, {xfer.duration}]")
    vs = xfer.v0 * math.sin(xfer.beta0)
    vc = xfer.v0 * math.cos(xfer.beta0) - xfer.f * t
    beta = math.atan2(vs, vc)
    return math.hypot(vs, vc), xfer.i0 + (beta - xfer.beta0) / HALF_PI, beta


def edelbaum_history(xfer: EdelbaumTransfer, t):
    """Vectorised ``edelbaum_state_at`` over an array of times (no range check)."""
    import numpy as np

    t = np.asarray(t, dtype=float)
    vs = xfer.v0 * math.sin(xfer.beta0)
    vc = xfer.v0 * math.cos(xfer.beta0) - xfer.f * t
    beta = np.arctan2(vs, vc)
    return np.hypot(vs, vc), xfer.i0 + (beta - xfer.beta0) / HALF_PI, beta


def edelbaum_cost_gradient(v0: float, vf: float, i0: float, if_: float):
    """Analytic partials of the transfer cost.

    Returns ``((dv0, di0), (dvf, dif))``: derivatives of the impulse with
    respect to the initial and final velocity/inclination. Zero for a
    zero-length transfer, where the cost is not differentiable.
    """
    dv = edelbaum_cost(v0, vf, i0, if_)
    if dv == 0.0:
        return (0.0, 0.0), (0.0, 0.0)
    theta = HALF_PI * (if_ - i0)
    dtheta = v0 * vf * math.sin(theta) / dv
    return (
        ((v0 - vf * math.cos(theta)) / dv, -HALF_PI * dtheta),
        ((vf - v0 * math.cos(theta)) / dv, HALF_PI * dtheta),
    )


def edelbaum_costates(xfer: EdelbaumTransfer):
    """Endpoint cost sensitivities ``((dV/dv0, dV/di0), (dV/dvf, dV/dif))``."""
    return edelbaum_cost_gradient(xfer.v0, xfer.vf, xfer.i0, xfer.if_)
