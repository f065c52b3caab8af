from fractions import Fraction

import numpy as np
import pytest

from univdec.channels import DMC
from univdec.priors import IIDPrior

ACCEPTANCE_LINES = []


def random_probs(rng, k, den=10):
    w = rng.integers(1, den, size=k)
    return [Fraction(int(v), int(w.sum())) for v in w]


def random_prior(rng, n, k=2):
    return IIDPrior(random_probs(rng, k), n)


def random_dmc(rng, x_size=2, y_size=2):
    return DMC([random_probs(rng, y_size) for _ in range(x_size)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def record():
    def _record(criterion, passed, detail=""):
        line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}".rstrip()
        ACCEPTANCE_LINES.append(line)
        print(line)
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
