import numpy as np
import pytest
from hypothesis import settings, strategies as st

from pprgm.graph import Graph

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])


@st.composite
def graphs(draw, min_n=1, max_n=40, min_edges=0):
    n = draw(st.integers(min_n, max_n))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    edges = draw(st.lists(pairs, min_size=min_edges, max_size=3 * n))
    return Graph.from_edges(n, np.array(edges, dtype=np.int64).reshape(-1, 2))


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star(k):
    return Graph.from_edges(k + 1, [(0, i) for i in range(1, k + 1)])


@pytest.fixture
def triangle():
    return complete(3)
