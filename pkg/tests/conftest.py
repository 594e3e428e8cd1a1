import numpy as np
import pytest

from pywoo.benchmarks import MultiObjectiveProblem
from pywoo.core import Box


def single_objective(name, fn, low=-1.0, high=1.0, n=1, lipschitz=None):
    """Wrap a vectorised R^n -> R function as an m=1 problem."""
    return MultiObjectiveProblem(
        name=name, n=n, m=1, domain=Box.cube(low, high, n),
        batch=lambda X: fn(np.asarray(X, dtype=float))[:, None],
        lipschitz=lipschitz, ideal=np.zeros(1),
    )


@pytest.fixture
def abs_problem():
    return single_objective("abs", lambda X: np.abs(X[:, 0]), lipschitz=(1.0,))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance_log(request):
    """Collects one summary line per acceptance criterion."""
    return request.config.stash[ACCEPTANCE_KEY]


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
