import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mvote.core import Election

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIG1 = Election(((0, 1, 2), (2, 0, 1), (0, 2, 1), (1, 0, 2)))
THM1 = Election(((0, 1, 2), (2, 1, 0)))
GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1))


@pytest.fixture
def fig1():
    return FIG1


@st.composite
def elections(draw, max_n=6, max_m=4, min_m=1):
    m = draw(st.integers(min_m, max_m))
    n = draw(st.integers(1, max_n))
    rankings = [tuple(draw(st.permutations(range(m)))) for _ in range(n)]
    return Election(tuple(rankings))


@st.composite
def weights(draw, size, allow_zero=True):
    low = 0 if allow_zero else 1
    raw = draw(st.lists(st.integers(low, 9), min_size=size, max_size=size).filter(lambda v: sum(v) > 0))
    total = sum(raw)
    return tuple(Fraction(v, total) for v in raw)


alphas = st.sampled_from(GRID)


# acceptance criteria report their verdicts here; printed after the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
