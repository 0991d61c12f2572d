import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_configs, brute_components, multigraphs
from graphreps.reliability import two_terminal_reliability


def brute(g, probs, s, t):
    total = 0.0
    for cfg in all_configs(g.edge_count):
        w = np.prod(np.where(cfg, probs, 1 - np.asarray(probs)))
        lab = brute_components(g, cfg)
        total += w * (lab[s] == lab[t])
    return total


@settings(max_examples=150, deadline=None)
@given(multigraphs(max_vertices=6, max_edges=9), st.data())
def test_matches_brute_force(g, data):
    probs = [data.draw(st.floats(0, 1)) for _ in range(g.edge_count)]
    s = data.draw(st.integers(0, g.vertex_count - 1))
    t = data.draw(st.integers(0, g.vertex_count - 1))
    got = two_terminal_reliability(g.vertex_count, g.edges, probs, s, t)
    assert got == pytest.approx(brute(g, probs, s, t), abs=1e-12)


def test_vectorized_parameter():
    edges = [(0, 1), (1, 2), (2, 0), (0, 1)]
    ps = np.linspace(0, 1, 7)
    got = two_terminal_reliability(3, edges, ps, 0, 2)
    assert got.shape == ps.shape
    for p, v in zip(ps, got):
        assert v == pytest.approx(two_terminal_reliability(3, edges, float(p), 0, 2))


def test_sure_edges():
    # path 0-1-2 with the first edge forced open behaves like a single edge
    assert two_terminal_reliability(3, [(0, 1), (1, 2)], 0.3, 0, 2, sure=[0]) == pytest.approx(0.3)


def test_series_parallel_values():
    p = 0.4
    assert two_terminal_reliability(3, [(0, 1), (1, 2)], p, 0, 2) == pytest.approx(p * p)
    assert two_terminal_reliability(2, [(0, 1), (0, 1)], p, 0, 1) == pytest.approx(1 - (1 - p) ** 2)
    assert two_terminal_reliability(2, [], p, 0, 1) == 0.0
    assert two_terminal_reliability(2, [(0, 1)], p, 1, 1) == 1.0
