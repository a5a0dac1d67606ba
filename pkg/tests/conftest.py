import numpy as np
import pytest

from lvniche.model import CompetitionModel
from lvniche.scenario import bundled_scenario

ALPHA_2 = [[1.0, 0.25], [1.0, 1.0]]
ALPHA_3 = [[1.0, 0.25, 0.25], [1.0, 1.0, 0.7], [1.0, 0.3, 1.0]]


@pytest.fixture
def unca():
    return CompetitionModel(["external", "unca"], [1.0, 1.0], [26.0, 32.0], ALPHA_2)


def nova_model(K3: float) -> CompetitionModel:
    return CompetitionModel(["external", "unca", "nova"], [1.0, 1.0, 1.0], [26.0, 32.0, K3], ALPHA_3)


@pytest.fixture
def nova():
    return nova_model


@pytest.fixture
def logistic():
    return CompetitionModel(["solo"], [1.0], [10.0], [[1.0]])


@pytest.fixture
def scenario():
    return bundled_scenario


def random_model(rng: np.random.Generator, n: int, alpha_max: float = 0.6) -> CompetitionModel:
    alpha = rng.uniform(0.0, alpha_max, size=(n, n))
    np.fill_diagonal(alpha, 1.0)
    return CompetitionModel(
        [f"s{i}" for i in range(n)],
        rng.uniform(0.2, 3.0, size=n),
        rng.uniform(5.0, 50.0, size=n),
        alpha,
    )


def random_feasible_model(rng: np.random.Generator, n: int) -> CompetitionModel:
    """Model whose interior equilibrium is a chosen all-positive vector."""
    alpha = rng.uniform(0.0, 0.6, size=(n, n))
    np.fill_diagonal(alpha, 1.0)
    N_star = rng.uniform(1.0, 30.0, size=n)
    return CompetitionModel(
        [f"s{i}" for i in range(n)], rng.uniform(0.2, 3.0, size=n), alpha @ N_star, alpha
    )


# -- acceptance reporting: one PASS/FAIL line per criterion at the end of the run

_CRITERIA: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    prev = _CRITERIA.get(number, (title, True))[1]
    if report.when == "call" or report.failed:
        _CRITERIA[number] = (title, prev and report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title}")
