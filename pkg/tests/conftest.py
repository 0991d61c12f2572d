import numpy as np
import pytest
from hypothesis import strategies as st

from graphreps.graph import Multigraph


def all_configs(n_edges):
    """Every edge configuration as a bool row, indexed by bitmask."""
    m = np.arange(1 << n_edges)
    return ((m[:, None] >> np.arange(n_edges)) & 1).astype(bool)


def brute_components(g, config):
    """Vertex partition by plain DFS, independent of the package's union-find."""
    adj = [[] for _ in range(g.vertex_count)]
    for e, (a, b) in enumerate(g.edges):
        if config[e]:
            adj[a].append(b)
            adj[b].append(a)
    label = [-1] * g.vertex_count
    for s in range(g.vertex_count):
        if label[s] >= 0:
            continue
        label[s] = s
        stack = [s]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if label[w] < 0:
                    label[w] = s
                    stack.append(w)
    return label


def brute_even(g):
    """All even subgraphs by scanning {0,1}^E."""
    out = []
    for cfg in all_configs(g.edge_count):
        deg = np.zeros(g.vertex_count, dtype=int)
        for e in np.flatnonzero(cfg):
            a, b = g.edges[e]
            deg[a] += 1
            deg[b] += 1
        if not np.any(deg % 2):
            out.append(cfg)
    return out


@st.composite
def multigraphs(draw, max_vertices=6, max_edges=9, loops=True):
    n = draw(st.integers(1, max_vertices))
    vert = st.integers(0, n - 1)
    edge = st.tuples(vert, vert)
    if not loops:
        edge = edge.filter(lambda e: e[0] != e[1])
    edges = draw(st.lists(edge, min_size=0 if loops or n == 1 else 1, max_size=max_edges))
    return Multigraph(n, edges)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)


