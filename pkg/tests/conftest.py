import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from polyberezin.fourier_symbols import FourierSymbol
from polyberezin.polydisc_kernels import PolydiscPoint, TorusPoint

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

coeff = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


@st.composite
def symbols(draw, dim=None, degree=3, max_terms=5, analytic=False):
    n = draw(st.integers(1, 3)) if dim is None else dim
    lo = 0 if analytic else -degree
    k = st.tuples(*[st.integers(lo, degree)] * n)
    coeffs = draw(st.dictionaries(k, coeff, max_size=max_terms))
    return FourierSymbol.from_dict(coeffs, n)


@st.composite
def points(draw, n, rmax=0.95):
    rs = draw(st.lists(st.floats(0.0, rmax), min_size=n, max_size=n))
    th = draw(st.lists(st.floats(0.0, 6.283), min_size=n, max_size=n))
    return PolydiscPoint(tuple(r * np.exp(1j * t) for r, t in zip(rs, th)))


@st.composite
def torus_points(draw, n):
    return TorusPoint(tuple(draw(st.lists(st.floats(0.0, 6.283), min_size=n, max_size=n))))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
