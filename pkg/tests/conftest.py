import sys

import numpy as np
import pytest
from hypothesis import strategies as st

from lqcsym.su2 import Su2Element


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


finite = st.floats(-5.0, 5.0, allow_nan=False, allow_infinity=False)
vec3 = st.tuples(finite, finite, finite).map(np.array)


@st.composite
def unit_vectors(draw):
    v = np.array(draw(st.tuples(finite, finite, finite)))
    norm = np.linalg.norm(v)
    if norm < 1e-3:
        v, norm = np.array([0.0, 0.0, 1.0]), 1.0
    return v / norm


@st.composite
def su2_elements(draw):
    q = np.array(draw(st.tuples(finite, finite, finite, finite)))
    if np.linalg.norm(q) < 1e-3:
        q = np.array([1.0, 0.0, 0.0, 0.0])
    return Su2Element.from_array(q)


seeds = st.integers(0, 2**32 - 1)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, (ok, detail) in sorted(acceptance.RESULTS.items()):
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {detail}")
