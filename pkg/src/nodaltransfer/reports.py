"""Report tables, CSV and JSON emission.

Values are unit conversions of the solver's SI results, nothing is
recomputed here. Angles go out in degrees, dates in days.
"""
import csv
import json
import math
from pathlib import Path

from .model import DAY, GravityModel, OrbitState, altitude_from_velocity, rate_deg_per_day
from .problem import TransferProblem
from .propagator import ExtremalPoint
from .ses import SesSolution
from .sensitivity import CostateGuess
from .shooting import Certificate, ShootingUnknowns, TransferSolution

TRAJECTORY_VERSION = 1
SOLUTION_FORMAT = "nodaltransfer-solution"

TRAJECTORY_SI_HEADER = ["t_s", "V_m_s", "I_rad", "RAAN_rad", "f_m_s2", "beta_rad",
                        "p_v", "p_i_m_s_per_rad", "p_raan_m_s_per_rad", "S", "H_m_s2"]
TRAJECTORY_DISPLAY_HEADER = ["t_day", "altitude_km", "V_m_s", "I_deg", "RAAN_deg", "f_m_s2",
                             "beta_deg", "p_v", "p_i_m_s_per_rad", "p_raan_m_s_per_rad", "S",
                             "H_m_s_per_day"]
SEQUENCE_HEADER = ["point", "date_day", "altitude_km", "velocity_m_s", "inclination_deg",
                   "raan_deg", "precession_deg_day", "impulse_m_s"]


def _write_csv(path: Path, header, rows, comment=None):
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def trajectory_rows(traj: list[ExtremalPoint], display: bool = False, g: GravityModel | None = None):
    for p in traj:
        s, c = p.state, p.costate
        if display:
            yield [s.t / DAY, altitude_from_velocity(s.v, g) / 1e3, s.v, math.degrees(s.inc),
                   math.degrees(s.raan), p.f, math.degrees(p.beta), c.p_v, c.p_i, c.p_raan,
                   p.s, p.h * DAY]
        else:
            yield [s.t, s.v, s.inc, s.raan, p.f, p.beta, c.p_v, c.p_i, c.p_raan, p.s, p.h]


def write_trajectory(path, traj: list[ExtremalPoint], g: GravityModel, display: bool = False):
    header = TRAJECTORY_DISPLAY_HEADER if display else TRAJECTORY_SI_HEADER
    units = "display units" if display else "SI"
    _write_csv(Path(path), header, trajectory_rows(traj, display, g),
               f"nodaltransfer trajectory v{TRAJECTORY_VERSION} ({units})")


def read_trajectory(path) -> list[dict]:
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(lines)]


def _seq_row(label, t, v, inc, raan, rate, impulse, g):
    return [label, t / DAY, altitude_from_velocity(v, g) / 1e3, v, math.degrees(inc),
            math.degrees(raan), rate_deg_per_day(rate), impulse]


def ses_sequence_rows(problem: TransferProblem, sol: SesSolution) -> list[list]:
    """Rows t0, t1, t2, tf of the split strategy."""
    s, e, g = problem.start, problem.target, problem.g
    return [
        _seq_row("t0", problem.t0, s.v, s.inc, s.raan, s.precession_rate(g), 0.0, g),
        _seq_row("t1", sol.t1, sol.v_d, sol.i_d, sol.raan_t1, sol.raan_rate_d, sol.dv1, g),
        _seq_row("t2", sol.t2, sol.v_d, sol.i_d, sol.raan_t2, sol.raan_rate_d, sol.dv1, g),
        _seq_row("tf", problem.tf, e.v, e.inc, problem.raan_target + sol.raan_residual,
                 e.precession_rate(g), sol.delta_v, g),
    ]


def solution_sequence_rows(sol: TransferSolution) -> list[list]:
    g = sol.problem.g
    return [_seq_row(r.label, r.t, r.v, r.inc, r.raan, r.raan_rate, r.impulse, g) for r in sol.sequences]


def sensitivity_rows(guess: CostateGuess, problem: TransferProblem) -> list[list]:
    """Variation / cost / derivative per display unit / derivative per SI-angle unit."""
    g = problem.g
    h = problem.start.altitude(g)
    ref = guess.reference.delta_v if guess.reference else float("nan")
    rows = [["reference", "", "", ref, "", ""]]
    for r in guess.rows:
        if r.name == "velocity":
            # altitude change shown alongside the velocity change
            alt_p = altitude_from_velocity(problem.start.v + r.step_plus, g) - h
            alt_m = altitude_from_velocity(problem.start.v + r.step_minus, g) - h
            rows.append([r.name, f"{r.step_plus:+.1f} m/s ({alt_p / 1e3:+.0f} km)", "plus", r.cost_plus,
                         r.derivative, r.derivative])
            rows.append([r.name, f"{r.step_minus:+.1f} m/s ({alt_m / 1e3:+.0f} km)", "minus", r.cost_minus,
                         "", ""])
        elif r.name == "final_date":
            rows.append([r.name, f"{r.step_plus / DAY:+g} day", "plus", r.cost_plus,
                         r.derivative * DAY, r.derivative * DAY])
            rows.append([r.name, f"{r.step_minus / DAY:+g} day", "minus", r.cost_minus, "", ""])
        else:
            rows.append([r.name, f"{math.degrees(r.step_plus):+g} deg", "plus", r.cost_plus,
                         math.radians(r.derivative), r.derivative])
            rows.append([r.name, f"{math.degrees(r.step_minus):+g} deg", "minus", r.cost_minus, "", ""])
    return rows


SENSITIVITY_HEADER = ["quantity", "variation", "side", "cost_m_s", "derivative_per_deg",
                      "derivative_per_rad"]


def unknowns_dict(u: ShootingUnknowns) -> dict:
    return {"p_v0": u.p_v0, "p_i0_per_rad": u.p_i0, "p_raan0_per_rad": u.p_raan0,
            "t1_s": u.t1, "t2_s": u.t2, "t1_day": u.t1 / DAY, "t2_day": u.t2 / DAY}


def residual_dict(r) -> dict:
    return {"velocity_m_s": float(r[0]), "inclination_deg": math.degrees(r[1]),
            "raan_deg": math.degrees(r[2]), "switch_t1": float(r[3]), "switch_t2": float(r[4])}


def _state_dict(s: OrbitState) -> dict:
    return {"v_m_s": s.v, "inc_rad": s.inc, "raan_rad": s.raan, "t_s": s.t}


def problem_dict(p: TransferProblem) -> dict:
    return {"start": _state_dict(p.start), "target": _state_dict(p.target), "f_max_m_s2": p.f_max,
            "gravity": {"mu": p.g.mu, "re": p.g.re, "j2": p.g.j2}, "raan_branch": p.raan_branch}


def problem_from_dict(d: dict) -> TransferProblem:
    def st(x):
        return OrbitState(x["v_m_s"], x["inc_rad"], x["raan_rad"], x["t_s"])

    gr = d["gravity"]
    return TransferProblem(st(d["start"]), st(d["target"]), d["f_max_m_s2"],
                           GravityModel(gr["mu"], gr["re"], gr["j2"]), d["raan_branch"])


def certificate_dict(c: Certificate) -> dict:
    return {"ok": c.ok, "hamiltonian_drift": c.hamiltonian_drift, "p_raan_drift": c.p_raan_drift,
            "sign_pattern_ok": c.sign_pattern_ok, "fs_min": c.fs_min,
            "coast_rate_deg_day": None if c.coast_rate is None else rate_deg_per_day(c.coast_rate),
            "h_over_p_raan_deg_day": None if c.drift_rate_from_h is None else rate_deg_per_day(c.drift_rate_from_h),
            "edelbaum_equivalent": bool(c.edelbaum_equivalent), "violations": list(c.violations)}


def solution_record(sol: TransferSolution, step: float, cert: Certificate | None = None,
                    propellant: dict | None = None) -> dict:
    f = sol.final.state
    rec = {
        "format": SOLUTION_FORMAT,
        "version": 1,
        "problem": problem_dict(sol.problem),
        "step_s": step,
        "unknowns": unknowns_dict(sol.unknowns),
        "residual": residual_dict(sol.residual),
        "scaled_residual_norm": sol.scaled_norm,
        "iterations": sol.iterations,
        "delta_v_m_s": sol.delta_v,
        "final_state": _state_dict(f),
        "sequences": [dict(zip(SEQUENCE_HEADER, row)) for row in solution_sequence_rows(sol)],
    }
    if cert is not None:
        rec["certificate"] = certificate_dict(cert)
    if propellant is not None:
        rec["propellant"] = propellant
    return rec


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, default=float)
        fh.write("\n")


def load_solution(path):
    """Problem, unknowns and step from a solution record."""
    with open(path) as fh:
        rec = json.load(fh)
    if rec.get("format") != SOLUTION_FORMAT:
        raise ValueError(f"{path} is not a {SOLUTION_FORMAT} record")
    u = rec["unknowns"]
    return (problem_from_dict(rec["problem"]),
            ShootingUnknowns(u["p_v0"], u["p_i0_per_rad"], u["p_raan0_per_rad"], u["t1_s"], u["t2_s"]),
            rec["step_s"], rec)


def format_table(header, rows, floatfmt="{:.3f}") -> str:
    def cell(x):
        if isinstance(x, float):
            return floatfmt.format(x)
        return str(x)

    body = [[cell(x) for x in r] for r in rows]
    widths = [max(len(str(h)), *(len(r[j]) for r in body)) for j, h in enumerate(header)]
    lines = ["  ".join(str(h).rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in body]
    return "\n".join(lines)

