import numpy as np
import pytest
from hypothesis import settings

from mpspectral.graph import MultipartiteGraph

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


def complete_bipartite(n1: int, n2: int) -> MultipartiteGraph:
    edges = [(i, n1 + j) for i in range(n1) for j in range(n2)]
    return MultipartiteGraph.from_edges(n1 + n2, edges, [0] * n1 + [1] * n2)


def random_multipartite(rng, sizes, p) -> MultipartiteGraph:
    z = np.repeat(np.arange(len(sizes)), sizes)
    n = z.size
    upper = np.triu(rng.random((n, n)) < p, k=1) & (z[:, None] != z[None, :])
    r, c = np.nonzero(upper)
    return MultipartiteGraph.from_edges(n, np.column_stack([r, c]), z, K=len(sizes))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
