"""Stage orchestration: SES -> sensitivities -> shooting -> certificate."""
import logging
import math

import numpy as np
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import reports
from .config import MissionConfig
from .edelbaum import edelbaum_costates, edelbaum_history, edelbaum_transfer
from .model import DAY, PropellantBudget, rate_deg_per_day
from .problem import TransferProblem
from .ses import SesInfeasible, SesSolution, _is_pure_drift, scan_raan_branches, solve_ses
from .sensitivity import CostateGuess, estimate_costates
from .shooting import (Certificate, ShootingError, ShootingOptions, TransferSolution,
                       coast_only_solution, solve_shooting, verify_extremal)
from .singular import (SingularDomainError, SingularParams, critical_inclinations,
                       singular_accel, singular_cost_quadrature, singular_pomega_zero_transfer,
                       variation_table)

log = logging.getLogger(__name__)

MODES = ("edelbaum", "ses", "ocp", "singular-analysis")

EXIT_OK, EXIT_ERROR, EXIT_SES_ONLY = 0, 1, 2


class StageError(RuntimeError):
    def __init__(self, stage: str, msg: str, residual=None):
        super().__init__(f"[{stage}] {msg}")
        self.stage = stage
        self.residual = residual


@dataclass
class PipelineResult:
    mode: str
    problem: TransferProblem
    status: int = EXIT_OK
    ses: SesSolution | None = None
    branches: list = field(default_factory=list)
    guess: CostateGuess | None = None
    solution: TransferSolution | None = None
    certificate: Certificate | None = None
    edelbaum: dict | None = None
    singular: dict | None = None
    error: str | None = None
    residual: object = None
    files: list[Path] = field(default_factory=list)

    @property
    def delta_v(self) -> float | None:
        if self.solution is not None:
            return self.solution.delta_v
        if self.ses is not None:
            return self.ses.delta_v
        if self.edelbaum is not None:
            return self.edelbaum["delta_v_m_s"]
        return None


def _pick_branch(cfg: MissionConfig, result: PipelineResult) -> TransferProblem:
    problem = result.problem
    if cfg.scan_branches is None:
        try:
            result.ses = solve_ses(problem, cfg.ses)
        except SesInfeasible as exc:
            raise StageError("ses", str(exc)) from exc
        return problem
    try:
        ranked = scan_raan_branches(problem, cfg.scan_branches, cfg.ses)
    except SesInfeasible as exc:
        raise StageError("ses", str(exc)) from exc
    result.branches = ranked
    n, best = ranked[0]
    result.ses = best
    return problem.with_branch(n)


def _edelbaum_stage(problem: TransferProblem) -> dict:
    s, e = problem.start, problem.target
    x = edelbaum_transfer(s.v, s.inc, e.v, e.inc, problem.f_max)
    (dv0, di0), (dvf, dif) = edelbaum_costates(x)
    return {"transfer": x, "delta_v_m_s": x.delta_v, "duration_day": x.duration / DAY,
            "beta0_deg": math.degrees(x.beta0), "fits_window": x.duration <= problem.duration,
            "cost_gradient": {"dv0": dv0, "di0_per_rad": di0, "dvf": dvf, "dif_per_rad": dif}}


def _singular_stage(problem: TransferProblem, product: float = 0.5) -> dict:
    i_s1, i_s2, i_m1, i_m2 = critical_inclinations()
    out = {"critical_inclinations_deg": {"I_s1": math.degrees(i_s1), "I_s2": math.degrees(i_s2),
                                         "I_m1": math.degrees(i_m1), "I_m2": math.degrees(i_m2)},
           "existence_window": "0 < p_raan * raan_rate_d < 1",
           "profile_product": product}
    p = SingularParams.normalized(product, 1.0, problem.f_max)
    out["variation"] = [{"from_deg": math.degrees(lo), "to_deg": math.degrees(hi), "slope": sgn,
                         "f_start": a, "f_end": b} for lo, hi, sgn, a, b in variation_table(p, 2000)]
    s, e = problem.start, problem.target
    rate = s.precession_rate(problem.g)
    try:
        out["single_arc_cost_m_s"] = singular_cost_quadrature(s.inc, e.inc, rate, problem.g)
    except SingularDomainError as exc:
        out["single_arc_cost_m_s"] = None
        out["single_arc_note"] = str(exc)
    try:
        pz = singular_pomega_zero_transfer(problem)
        out["pomega_zero"] = {"f_m_s2": pz.f, "coast_start_day": pz.coast_start / DAY,
                              "coast_end_day": pz.coast_end / DAY, "delta_v_m_s": pz.delta_v}
    except SingularDomainError as exc:
        out["pomega_zero"] = None
        out["pomega_zero_note"] = str(exc)
    profile = []
    for j in range(1, 1800):
        inc = math.radians(j * 0.1)
        try:
            profile.append((math.degrees(inc), singular_accel(inc, p) / problem.f_max))
        except SingularDomainError:
            continue
    out["profile"] = profile
    return out


def run_pipeline(cfg: MissionConfig, mode: str = "ocp", out_dir: str | Path | None = None,
                 branch: int | None = None, scan=None, step: float | None = None,
                 tol: float | None = None) -> PipelineResult:
    """Run the stages selected by ``mode`` and emit reports into ``out_dir``."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if branch is not None:
        cfg = replace(cfg, branch=branch, scan_branches=None)
    if scan is not None:
        cfg = replace(cfg, scan_branches=scan)
    if step is not None:
        cfg = replace(cfg, step=step)
    if tol is not None:
        cfg = replace(cfg, tol=tol)
    result = PipelineResult(mode, cfg.problem())
    try:
        _run(cfg, mode, result)
    except StageError as exc:
        log.error("%s", exc)
        result.error = str(exc)
        result.residual = exc.residual
        if result.ses is not None and mode == "ocp":
            result.status = EXIT_SES_ONLY
        else:
            result.status = EXIT_ERROR
    if out_dir is not None:
        emit(result, cfg, Path(out_dir))
    return result


def _run(cfg: MissionConfig, mode: str, result: PipelineResult):
    if mode == "edelbaum":
        result.edelbaum = _edelbaum_stage(result.problem)
        return
    if mode == "singular-analysis":
        result.singular = _singular_stage(result.problem)
        return
    problem = _pick_branch(cfg, result)
    result.problem = problem
    if mode == "ses":
        return
    if _is_pure_drift(problem):
        result.solution = coast_only_solution(problem)
        result.certificate = verify_extremal(result.solution)
        return
    try:
        result.guess = estimate_costates(problem, cfg.perturbations, cfg.ses)
    except SesInfeasible as exc:
        raise StageError("sensitivity", str(exc)) from exc
    opts = ShootingOptions(step=cfg.step, tol=cfg.tol)
    try:
        result.solution = solve_shooting(problem, result.guess, options=opts)
    except ShootingError as exc:
        raise StageError("shooting", str(exc), exc.residual) from exc
    result.certificate = verify_extremal(result.solution)


def emit(result: PipelineResult, cfg: MissionConfig, out: Path):
    out.mkdir(parents=True, exist_ok=True)
    problem, g = result.problem, result.problem.g

    def add(name):
        result.files.append(out / name)
        return out / name

    if result.edelbaum is not None:
        e = dict(result.edelbaum)
        x = e.pop("transfer")
        reports.write_json(add("edelbaum.json"), e)
        t = np.linspace(0.0, x.duration, 201)
        v, inc, beta = edelbaum_history(x, t)
        reports._write_csv(add("edelbaum_history.csv"),
                           ["t_day", "V_m_s", "I_deg", "beta_deg"],
                           ([a / DAY, b, math.degrees(c), math.degrees(d)]
                            for a, b, c, d in zip(t, v, inc, beta)))
    if result.singular is not None:
        s = dict(result.singular)
        profile = s.pop("profile")
        reports.write_json(add("singular_analysis.json"), s)
        reports._write_csv(add("singular_profile.csv"), ["inclination_deg", "f_over_f_max"], profile,
                           f"singular level, p_raan*raan_rate_d = {s['profile_product']}")
    if result.ses is not None:
        reports._write_csv(add("ses_sequences.csv"), reports.SEQUENCE_HEADER,
                           reports.ses_sequence_rows(problem, result.ses))
        sd = {"v_d_m_s": result.ses.v_d, "i_d_deg": math.degrees(result.ses.i_d),
              "t1_day": result.ses.t1 / DAY, "t2_day": result.ses.t2 / DAY,
              "delta_v_m_s": result.ses.delta_v, "raan_residual_rad": result.ses.raan_residual,
              "drift_rate_deg_day": rate_deg_per_day(result.ses.raan_rate_d),
              "raan_branch": problem.raan_branch}
        if result.ses.guess:
            sd["initial_guess"] = {"v_d_m_s": result.ses.guess[0],
                                   "i_d_deg": math.degrees(result.ses.guess[1])}
        if result.branches:
            sd["branches"] = [{"n": n, "delta_v_m_s": s.delta_v} for n, s in result.branches]
        reports.write_json(add("ses.json"), sd)
    if result.guess is not None:
        reports._write_csv(add("sensitivities.csv"), reports.SENSITIVITY_HEADER,
                           reports.sensitivity_rows(result.guess, problem))
    if result.solution is not None:
        sol = result.solution
        prop = None
        if cfg.mass is not None:
            b = PropellantBudget.from_delta_v(sol.delta_v, cfg.mass, cfg.exhaust_velocity)
            prop = {"m0_kg": b.m0, "ve_m_s": b.ve, "propellant_kg": b.mc, "final_mass_kg": b.final_mass}
        reports.write_json(add("solution.json"),
                           reports.solution_record(sol, cfg.step, result.certificate, prop))
        reports._write_csv(add("sequences.csv"), reports.SEQUENCE_HEADER,
                           reports.solution_sequence_rows(sol))
        reports.write_trajectory(add("trajectory.csv"), sol.trajectory, g)
        reports.write_trajectory(add("trajectory_display.csv"), sol.trajectory, g, display=True)
    if result.error is not None:
        err = {"error": result.error}
        if result.residual is not None:
            err["last_residual"] = [float(x) for x in result.residual]
        reports.write_json(add("error.json"), err)


def summary(result: PipelineResult) -> str:
    lines = [f"mode: {result.mode}"]
    if result.edelbaum is not None:
        e = result.edelbaum
        lines.append(f"Edelbaum min-time: dV = {e['delta_v_m_s']:.2f} m/s, "
                     f"duration = {e['duration_day']:.4f} d, beta0 = {e['beta0_deg']:.3f} deg")
    if result.singular is not None:
        ci = result.singular["critical_inclinations_deg"]
        lines.append("critical inclinations (deg): " + ", ".join(f"{k}={v:.2f}" for k, v in ci.items()))
        lines.append(f"existence window: {result.singular['existence_window']}")
    if result.ses is not None:
        s = result.ses
        lines.append(f"SES: V_d = {s.v_d:.1f} m/s, I_d = {math.degrees(s.i_d):.3f} deg, "
                     f"dV = {s.delta_v:.2f} m/s, t1 = {s.t1 / DAY:.3f} d, t2 = {s.t2 / DAY:.3f} d")
        lines.append(reports.format_table(reports.SEQUENCE_HEADER,
                                          reports.ses_sequence_rows(result.problem, s)))
    if result.guess is not None:
        q = result.guess
        lines.append(f"costate guess: p_v = {q.p_v0:.4f}, p_I = {q.p_i0:.1f} /rad, "
                     f"p_RAAN = {q.p_raan0:.2f} /rad, H = {q.h0 * DAY:.3f} m/s/day")
    if result.solution is not None:
        sol, u = result.solution, result.solution.unknowns
        lines.append(f"OCP: p_v0 = {u.p_v0:.4f}, p_i0 = {u.p_i0:.1f}, p_raan0 = {u.p_raan0:.2f}, "
                     f"t1 = {u.t1 / DAY:.3f} d, t2 = {u.t2 / DAY:.3f} d, dV = {sol.delta_v:.2f} m/s, "
                     f"|F| = {sol.scaled_norm:.2e}")
        lines.append(reports.format_table(reports.SEQUENCE_HEADER, reports.solution_sequence_rows(sol)))
    if result.certificate is not None:
        c = result.certificate
        lines.append("certificate: " + ("ok" if c.ok else "; ".join(c.violations)))
    if result.error:
        lines.append(f"error: {result.error}")
    return "\n".join(lines)
