import numpy as np
import pytest
from hypothesis import strategies as st

from evaltk import FiniteSpace, RandomVariable

ACCEPTANCE_LINES = []


def random_space(rng, n):
    w = rng.random(n) + 1e-3
    probs = w / w.sum()
    probs[-1] = max(0.0, 1.0 - probs[:-1].sum())
    return FiniteSpace(tuple(range(n)), tuple(float(q) for q in probs))


@st.composite
def spaces(draw, min_size=1, max_size=12):
    n = draw(st.integers(min_size, max_size))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_space(np.random.default_rng(seed), n)


@st.composite
def nonneg_rvs(draw, space, max_value=10.0):
    vals = draw(st.lists(st.floats(0, max_value), min_size=len(space), max_size=len(space)))
    return RandomVariable(space, tuple(vals))


@pytest.fixture
def rng():
    return np.random.default_rng(20201019)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
