import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from popalign.graph import InteractionMatrix

settings.register_profile("default", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("default")

K22 = InteractionMatrix(np.ones((2, 2), dtype=np.uint8))
K23 = InteractionMatrix(np.ones((2, 3), dtype=np.uint8))
PATH = InteractionMatrix.from_dense([[1, 1], [0, 1]])


def random_binary(rng, n_range=(2, 25), m_range=(2, 25), density=(0.05, 0.9)):
    """Random binary matrix with at least one edge."""
    while True:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        m = int(rng.integers(m_range[0], m_range[1] + 1))
        p = rng.uniform(*density)
        y = (rng.random((n, m)) < p).astype(np.uint8)
        if y.any():
            return InteractionMatrix(y)


@st.composite
def binary_matrices(draw, max_n=8, max_m=8, nonzero=True):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    y = draw(arrays(np.uint8, (n, m), elements=st.integers(0, 1)))
    if nonzero and not y.any():
        y[draw(st.integers(0, n - 1)), draw(st.integers(0, m - 1))] = 1
    return InteractionMatrix(y)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def random_suite():
    rng = np.random.default_rng(7)
    return [random_binary(rng) for _ in range(200)]


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
