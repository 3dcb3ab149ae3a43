import math
from pathlib import Path

import pytest

from nodaltransfer.config import load_config
from nodaltransfer.sensitivity import estimate_costates
from nodaltransfer.ses import solve_ses
from nodaltransfer.shooting import solve_shooting

ROOT = Path(__file__).resolve().parent.parent
APP_CONFIG = ROOT / "configs" / "application.ini"


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


@pytest.fixture(scope="session")
def app_config():
    return load_config(APP_CONFIG)


@pytest.fixture(scope="session")
def app_problem(app_config):
    return app_config.problem()


@pytest.fixture(scope="session")
def app_ses(app_problem):
    return solve_ses(app_problem)


@pytest.fixture(scope="session")
def app_guess(app_problem):
    return estimate_costates(app_problem)


@pytest.fixture(scope="session")
def app_solution(app_problem, app_guess):
    return solve_shooting(app_problem, app_guess)


DEG = math.pi / 180.0


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
