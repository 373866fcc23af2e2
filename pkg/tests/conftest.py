import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from esagraph.graph_core import WeightedGraph  # noqa: E402


def random_graph(rng, n_min=2, n_max=30, *, potential=False, extra=0.3, connected=True):
    """Random graph: a random spanning tree (when connected) plus extra edges."""
    n = int(rng.integers(n_min, n_max + 1))
    edges = set()
    if connected:
        for v in range(1, n):
            edges.add((int(rng.integers(0, v)), v))
    m_extra = int(extra * n)
    for _ in range(m_extra):
        x, y = (int(t) for t in rng.integers(0, n, 2))
        if x != y:
            edges.add((min(x, y), max(x, y)))
    if not edges:
        edges.add((0, 1))
    e = np.array(sorted(edges), dtype=np.int64)
    omega = rng.uniform(0.3, 3.0, n)
    cond = rng.uniform(0.2, 5.0, len(e))
    pot = rng.uniform(-2.0, 2.0, n) if potential else None
    return WeightedGraph(n, e, omega, cond, pot)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def unit_path():
    def make(n):
        e = np.array([(i, i + 1) for i in range(n - 1)], dtype=np.int64).reshape(-1, 2)
        return WeightedGraph(n, e, np.ones(n), np.ones(len(e)))
    return make
