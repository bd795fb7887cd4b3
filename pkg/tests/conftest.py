import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from putlab import Mechanism, Prior, ProductSpace, randomized_response

settings.register_profile("putlab", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("putlab")

LOG = math.log


@pytest.fixture
def p4():
    """The running four-symbol example prior."""
    return Prior.of([0.4, 0.3, 0.2, 0.1])


@pytest.fixture
def rr75():
    return randomized_response(2, 0.75)


@pytest.fixture
def u2():
    return Prior.uniform(ProductSpace(2))


def random_mechanism(rng: np.random.Generator, m: int, n: int = 1, out: int | None = None) -> Mechanism:
    space = ProductSpace(m, n)
    return Mechanism(space, rng.dirichlet(np.ones(out or space.size), size=space.size))


def random_sorted_prior(rng: np.random.Generator, m: int, floor: float = 0.01) -> Prior:
    while True:
        p = np.sort(rng.dirichlet(np.ones(m)))[::-1]
        if p.min() >= floor:
            return Prior.of(p)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
