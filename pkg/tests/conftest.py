import numpy as np
import pytest

from yamabeflow.analysis import random_tetrahedra


@pytest.fixture(scope="session")
def sample_tetrahedra():
    """The seeded 10^3 nondegenerate weight vectors shared by the sample-based checks."""
    return random_tetrahedra(1000, seed=2024)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
