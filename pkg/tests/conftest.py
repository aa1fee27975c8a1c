import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qmobius.quaternion import Quaternion

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

coord = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)
quats = st.builds(Quaternion, coord, coord, coord, coord)


@st.composite
def unit_quats(draw):
    v = np.array(draw(st.tuples(coord, coord, coord, coord)))
    n = np.linalg.norm(v)
    if n < 1e-3:
        v, n = np.array([1.0, 0.0, 0.0, 0.0]), 1.0
    return Quaternion(*(v / n))


@st.composite
def ball_quats(draw, rmax=0.9):
    u = draw(unit_quats())
    r = draw(st.floats(min_value=0.0, max_value=rmax))
    return u * r


@st.composite
def imaginary_units(draw):
    v = np.array(draw(st.tuples(coord, coord, coord)))
    n = np.linalg.norm(v)
    if n < 1e-3:
        return Quaternion(0.0, 1.0, 0.0, 0.0)
    return Quaternion(0.0, *(v / n))


def qclose(p, q, tol=1e-12):
    return (Quaternion.coerce(p) - Quaternion.coerce(q)).norm() <= tol


@pytest.fixture
def rng():
    from qmobius.quaternion import make_rng
    return make_rng(1234)


SQRT2 = math.sqrt(2.0)


# one verdict line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
