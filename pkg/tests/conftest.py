import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"


class CountingOperator:
    def __init__(self, F):
        self.F = F
        self.calls = 0
        self.dim = getattr(F, "dim", None)

    def __call__(self, x):
        self.calls += 1
        return self.F(x)


class CountingSet:
    def __init__(self, K):
        self.K = K
        self.calls = 0

    def project(self, x, stepsize=None):
        self.calls += 1
        return self.K.project(x, stepsize)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture
def data_dir():
    return DATA


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
