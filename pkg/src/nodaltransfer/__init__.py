"""Minimum-fuel low-thrust transfers between circular orbits under averaged
Edelbaum dynamics with J2 nodal precession."""
from .config import MissionConfig, load_config, resolve_target_raan
from .edelbaum import (EdelbaumTransfer, edelbaum_beta0, edelbaum_cost, edelbaum_costates,
                       edelbaum_state_at, edelbaum_transfer)
from .model import (DAY, EARTH, GravityModel, OrbitState, PropellantBudget, altitude_from_velocity,
                    precession_rate, propellant_mass, velocity_from_altitude)
from .pipeline import run_pipeline
from .problem import TransferProblem
from .propagator import (Costate, ExtremalPoint, ThrustSchedule, optimal_beta, propagate_burn,
                         propagate_coast, propagate_schedule, switching_function)
from .sensitivity import CostateGuess, estimate_costates, estimate_hamiltonian
from .ses import SesProblem, SesSolution, raan_at_tf, scan_raan_branches, ses_initial_guess, solve_ses
from .shooting import (ShootingUnknowns, TransferSolution, shooting_residual, solve_shooting,
                       verify_extremal)

__all__ = [
    "Costate",
    "CostateGuess",
    "DAY",
    "EARTH",
    "EdelbaumTransfer",
    "ExtremalPoint",
    "GravityModel",
    "MissionConfig",
    "OrbitState",
    "PropellantBudget",
    "SesProblem",
    "SesSolution",
    "ShootingUnknowns",
    "ThrustSchedule",
    "TransferProblem",
    "TransferSolution",
    "altitude_from_velocity",
    "edelbaum_beta0",
    "edelbaum_cost",
    "edelbaum_costates",
    "edelbaum_state_at",
    "edelbaum_transfer",
    "estimate_costates",
    "estimate_hamiltonian",
    "load_config",
    "optimal_beta",
    "precession_rate",
    "propagate_burn",
    "propagate_coast",
    "propagate_schedule",
    "propellant_mass",
    "raan_at_tf",
    "resolve_target_raan",
    "run_pipeline",
    "scan_raan_branches",
    "ses_initial_guess",
    "shooting_residual",
    "solve_ses",
    "solve_shooting",
    "switching_function",
    "velocity_from_altitude",
    "verify_extremal",
]

__version__ = "0.1.0"
