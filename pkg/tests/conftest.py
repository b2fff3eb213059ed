"""Shared fixtures and the acceptance-summary terminal hook."""

import numpy as np
import pytest

from sparsepcm import make_fixture
from sparsepcm.cli import iris_path, load_csv

_ACCEPTANCE_LINES = []


def _record(line: str):
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # one pass/fail line per acceptance criterion, visible even though
    # pytest captures stdout of passing tests
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance summary")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_log():
    return _record


@pytest.fixture(scope="session")
def iris_data():
    return load_csv(iris_path(), label_column="species")


@pytest.fixture(scope="session")
def tiny_two_cluster_set():
    """The hard-coded 17-point set with two axis-aligned groups."""
    return make_fixture("experiment1")


@pytest.fixture(scope="session")
def two_blobs():
    return make_fixture("example1", seed=0)


@pytest.fixture()
def rng():
    return np.random.default_rng(42)
