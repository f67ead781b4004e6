import numpy as np
import pytest
from hypothesis import strategies as st

from signednet.graph import SignedDigraph

ACCEPTANCE_LINES: list[str] = []


def graph(edges, labels=None) -> SignedDigraph:
    return SignedDigraph.from_edges(edges, labels=labels)


@st.composite
def signed_graphs(draw, min_n=2, max_n=24):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=min(len(pairs), 80)))
    signs = draw(st.lists(st.sampled_from([1, -1]), min_size=len(chosen), max_size=len(chosen)))
    src = np.array([p[0] for p in chosen], dtype=np.int64)
    dst = np.array([p[1] for p in chosen], dtype=np.int64)
    return SignedDigraph([f"n{i}" for i in range(n)], src, dst, np.array(signs, dtype=np.int8))


@pytest.fixture
def triangle():
    return graph([("a", "b", 1), ("b", "c", 1), ("c", "a", 1)])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
