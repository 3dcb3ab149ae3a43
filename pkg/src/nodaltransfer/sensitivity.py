"""Costate and Hamiltonian estimates from finite differences of the SES cost.

Sensitivities are reported as cost gradients ``dJ*/dX(t0)``. The adjoint
used for propagation is their negative (see ``CostateGuess.adjoint``).
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .model import DAY, velocity_from_altitude
from .problem import TransferProblem
from .propagator import Costate
from .ses import DEFAULT_OPTIONS, SesInfeasible, SesOptions, SesSolution, _is_pure_drift, solve_ses

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Perturbations:
    altitude: float = 50e3                 # m
    inclination: float = math.radians(0.1)
    raan: float = math.radians(5.0)
    final_date: float = 5.0 * DAY

    def scaled(self, factor: float) -> "Perturbations":
        return Perturbations(self.altitude * factor, self.inclination * factor,
                             self.raan * factor, self.final_date * factor)


@dataclass(frozen=True)
class SensitivityRow:
    """One line of the sensitivity table: plus/minus variations and costs."""
    name: str
    step_plus: float
    step_minus: float
    cost_plus: float
    cost_minus: float
    derivative: float
    one_sided: bool = False


@dataclass(frozen=True)
class CostateGuess:
    p_v0: float     # dJ/dV0
    p_i0: float     # dJ/dI0, per rad
    p_raan0: float  # dJ/dRAAN0, per rad
    h0: float       # m/s per s
    reference: SesSolution | None = None
    rows: tuple[SensitivityRow, ...] = ()
    provenance: Perturbations = field(default_factory=Perturbations)

    @property
    def flagged(self) -> bool:
        return any(r.one_sided for r in self.rows)

    def adjoint(self) -> Costate:
        """Maximum-principle costate (p0 = -1) matching these sensitivities."""
        return Costate(-self.p_v0, -self.p_i0, -self.p_raan0, -1.0)


def _shift_start(problem: TransferProblem, **changes) -> TransferProblem:
    return problem.with_start(replace(problem.start, **changes))


def _difference(name, ref_cost, plus, minus, x_plus, x_minus, solve) -> SensitivityRow:
    """Central difference, falling back to one side if a perturbed solve fails."""
    def cost(p):
        try:
            return solve(p).delta_v
        except SesInfeasible as exc:
            log.warning("%s: perturbed SES failed (%s)", name, exc)
            return None

    with ThreadPoolExecutor(max_workers=2) as pool:
        cp, cm = pool.map(cost, (plus, minus))
    if cp is not None and cm is not None:
        return SensitivityRow(name, x_plus, x_minus, cp, cm, (cp - cm) / (x_plus - x_minus))
    if cp is not None:
        return SensitivityRow(name, x_plus, 0.0, cp, ref_cost, (cp - ref_cost) / x_plus, True)
    if cm is not None:
        return SensitivityRow(name, 0.0, x_minus, ref_cost, cm, (ref_cost - cm) / -x_minus, True)
    raise SesInfeasible(f"{name}: both perturbed SES solves failed")


def _velocity_row(problem, ref, d, solve):
    s, g = problem.start, problem.g
    h = s.altitude(g)
    # altitude up means velocity down
    v_lo = velocity_from_altitude(h + d.altitude, g)
    v_hi = velocity_from_altitude(h - d.altitude, g)
    return _difference("velocity", ref.delta_v,
                       _shift_start(problem, v=v_hi), _shift_start(problem, v=v_lo),
                       v_hi - s.v, v_lo - s.v, solve)


def _inclination_row(problem, ref, d, solve):
    i = problem.start.inc
    return _difference("inclination", ref.delta_v,
                       _shift_start(problem, inc=i + d.inclination),
                       _shift_start(problem, inc=i - d.inclination),
                       d.inclination, -d.inclination, solve)


def _raan_row(problem, ref, d, solve):
    r = problem.start.raan
    return _difference("raan", ref.delta_v,
                       _shift_start(problem, raan=r + d.raan), _shift_start(problem, raan=r - d.raan),
                       d.raan, -d.raan, solve)


def _final_date_problem(problem: TransferProblem, dt: float) -> TransferProblem:
    return problem.with_target(problem.target.drifted(problem.tf + dt, problem.g))


def _final_date_row(problem, ref, d, solve):
    return _difference("final_date", ref.delta_v,
                       _final_date_problem(problem, d.final_date),
                       _final_date_problem(problem, -d.final_date),
                       d.final_date, -d.final_date, solve)


def estimate_costates(problem: TransferProblem, perturbations: Perturbations = Perturbations(),
                      opts: SesOptions = DEFAULT_OPTIONS) -> CostateGuess:
    """SES cost sensitivities to the initial state plus the Hamiltonian estimate.

    Raises:
        SesInfeasible: if the reference SES, or both sides of a perturbation, fail.
    """
    def solve(p):
        return solve_ses(p, opts)

    ref = solve(problem)
    d = perturbations
    if _is_pure_drift(problem):
        # zero impulse sits on a kink of the cost; no gradient to estimate
        return CostateGuess(0.0, 0.0, 0.0, 0.0, ref, (), d)
    with ThreadPoolExecutor(max_workers=4) as pool:
        futs = [pool.submit(fn, problem, ref, d, solve)
                for fn in (_velocity_row, _inclination_row, _raan_row, _final_date_row)]
        rows = tuple(f.result() for f in futs)
    return CostateGuess(rows[0].derivative, rows[1].derivative, rows[2].derivative,
                        _hamiltonian(rows[3].derivative, rows[2].derivative, problem),
                        ref, rows, d)


def _hamiltonian(dj_dtf: float, p_raan: float, problem: TransferProblem) -> float:
    return -dj_dtf + p_raan * problem.target.precession_rate(problem.g)


def estimate_hamiltonian(problem: TransferProblem, perturbations: Perturbations = Perturbations(),
                         opts: SesOptions = DEFAULT_OPTIONS) -> float:
    """``-dJ*/dtf + p_raan * RAAN rate of the target`` from SES re-solves (m/s per s)."""
    return estimate_costates(problem, perturbations, opts).h0


def final_date_derivative(problem: TransferProblem, dt: float = 5.0 * DAY,
                          opts: SesOptions = DEFAULT_OPTIONS) -> float:
    """Total derivative of the SES cost with the final date, target drifting."""
    ref = solve_ses(problem, opts)
    return _final_date_row(problem, ref, Perturbations(final_date=dt),
                           lambda p: solve_ses(p, opts)).derivative


def initial_date_derivative(problem: TransferProblem, dt: float = 5.0 * DAY,
                            opts: SesOptions = DEFAULT_OPTIONS) -> float:
    """Total derivative of the SES cost with the initial date.

    The shifted start keeps V and I and moves the RAAN by natural precession.
    """
    def shifted(delta):
        return problem.with_start(problem.start.drifted(problem.t0 + delta, problem.g))

    ref = solve_ses(problem, opts)
    return _difference("initial_date", ref.delta_v, shifted(dt), shifted(-dt), dt, -dt,
                       lambda p: solve_ses(p, opts)).derivative
