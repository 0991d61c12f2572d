import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_configs, brute_components, brute_even, multigraphs
from graphreps.graph import Multigraph, complete_graph, cycle_graph, path_graph, theta_gadget, tree_ball
from graphreps.models import (
    RC,
    ArborealGas,
    Bernoulli,
    DoubleCurrent,
    EdgeCapError,
    Loop,
    SingleCurrent,
    Sprinkled,
    arboreal_distribution,
    arboreal_two_point,
    connection_table,
    double_two_point,
    factorisation_check,
    fit_fk_parameter,
    fk_distribution,
    fk_parameter,
    loop_distribution,
    loop_partition,
    loop_two_point,
    model_distribution,
    model_two_point,
    rc_oracle_two_point,
    sprinkled_two_point,
    tv_distance,
    union,
)
from graphreps.trees import cycle_two_point


def two_c4_at_cut():
    return Multigraph(7, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (5, 6), (6, 0)])


# ------------------------------------------------------------ brute oracles


def brute_loop_two_point(g, x, u, v):
    num = den = 0.0
    for eta in brute_even(g):
        w = x ** int(eta.sum())
        den += w
        lab = brute_components(g, eta)
        num += w * (lab[u] == lab[v])
    return num / den


def brute_sprinkled(g, x, p, u, v, layers=1):
    """Sum over layers of even subgraphs and all Bernoulli subsets."""
    evens = brute_even(g)
    Z = sum(x ** int(e.sum()) for e in evens) ** layers
    total = 0.0
    for etas in itertools.product(evens, repeat=layers):
        w_eta = np.prod([x ** int(e.sum()) for e in etas]) / Z
        base = np.logical_or.reduce(etas)
        for s in all_configs(g.edge_count):
            w = w_eta * np.prod(np.where(s, p, 1 - p))
            lab = brute_components(g, base | s)
            total += w * (lab[u] == lab[v])
    return total


# ------------------------------------------------------------------- specs


def test_spec_validation():
    with pytest.raises(ValueError):
        Loop(1.5)
    with pytest.raises(ValueError):
        Bernoulli(-0.1)
    with pytest.raises(ValueError):
        ArborealGas(-1)
    ArborealGas(3.0)


# ---------------------------------------------------------------- loop sums


def test_partition_examples():
    x = 0.7
    assert loop_partition(tree_ball(3, 2), x) == 1.0
    assert loop_partition(cycle_graph(3), x) == pytest.approx(1 + x**6)
    n, m = 5, 2
    want = 1 + x ** (2 * n) + x ** (2 * m) + 4 * x ** (n + m) + x ** (2 * n + 2 * m)
    assert loop_partition(theta_gadget(n, m), x) == pytest.approx(want, rel=1e-14)


def test_loop_two_point_theta_formula():
    xs = np.linspace(0.05, 1, 40)
    g = theta_gadget(12, 2)
    n, m = 12, 2
    want = (xs ** (2 * m) + xs ** (2 * m + 2 * n)) / (
        1 + xs ** (2 * n) + xs ** (2 * m) + 4 * xs ** (n + m) + xs ** (2 * m + 2 * n)
    )
    assert np.allclose(loop_two_point(g, xs, *g.terminals), want, atol=1e-14, rtol=0)


def test_loop_two_point_paper_numbers():
    g = theta_gadget(12, 2)
    assert loop_two_point(g, 0.85, *g.terminals) >= 0.27
    assert loop_two_point(g, 0.965, *g.terminals) <= 0.245
    assert loop_two_point(g, 1.0, *g.terminals) == 0.25


def test_two_point_same_vertex_is_one():
    g = complete_graph(4)
    assert loop_two_point(g, 0.3, 2, 2) == 1.0
    assert model_two_point(g, DoubleCurrent(0.3), 1, 1) == 1.0
    assert model_two_point(g, ArborealGas(0.3), 1, 1) == 1.0


@settings(max_examples=40, deadline=None)
@given(multigraphs(max_edges=7), st.floats(0.05, 1.0), st.data())
def test_loop_two_point_brute(g, x, data):
    u = data.draw(st.integers(0, g.vertex_count - 1))
    v = data.draw(st.integers(0, g.vertex_count - 1))
    assert loop_two_point(g, x, u, v) == pytest.approx(brute_loop_two_point(g, x, u, v), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(multigraphs(max_vertices=4, max_edges=5), st.floats(0.05, 0.95), st.floats(0, 1), st.data())
def test_sprinkled_brute(g, x, p, data):
    u = data.draw(st.integers(0, g.vertex_count - 1))
    v = data.draw(st.integers(0, g.vertex_count - 1))
    assert sprinkled_two_point(g, x, p, u, v) == pytest.approx(brute_sprinkled(g, x, p, u, v), abs=1e-12)


@settings(max_examples=15, deadline=None)
@given(multigraphs(max_vertices=4, max_edges=5), st.floats(0.05, 0.95), st.data())
def test_double_brute(g, x, data):
    u = data.draw(st.integers(0, g.vertex_count - 1))
    v = data.draw(st.integers(0, g.vertex_count - 1))
    got = model_two_point(g, DoubleCurrent(x), u, v)
    assert got == pytest.approx(brute_sprinkled(g, x, x * x, u, v, layers=2), abs=1e-12)


def test_c4_double_enumeration_matches_closed_form():
    g = cycle_graph(2)
    for x in (0.2, 0.5, 0.9):
        for p in (0.0, 0.3, x):
            want = (x**4 + 2 * p**2 - p**4) / (1 + x**4)
            assert brute_sprinkled(g, x, p, 0, 2) == pytest.approx(want, abs=1e-12)
            assert sprinkled_two_point(g, x, p, 0, 2) == pytest.approx(want, abs=1e-12)


def test_sprinkled_reduces_to_loop():
    g = theta_gadget(3, 2)
    assert sprinkled_two_point(g, 0.6, 0.0, *g.terminals) == pytest.approx(loop_two_point(g, 0.6, *g.terminals))


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_cycle_closed_forms(n):
    g = cycle_graph(n)
    a, b = g.terminals
    xs = np.linspace(0.1, 0.95, 9)
    assert np.allclose(model_two_point(g, Loop(xs), a, b), xs ** (2 * n) / (1 + xs ** (2 * n)))
    assert np.allclose(model_two_point(g, RC(xs), a, b), 2 * xs**n / (1 + xs ** (2 * n)))
    for name, spec in (("single", SingleCurrent), ("double", DoubleCurrent)):
        assert np.allclose(model_two_point(g, spec(xs), a, b), cycle_two_point(name, xs, n), atol=1e-14)
    z = xs ** (2 * n)
    assert np.allclose(cycle_two_point("double", xs, n), 4 * z / (1 + z) ** 2)


def test_single_current_at_zero():
    g = theta_gadget(2, 2)
    assert model_two_point(g, SingleCurrent(0.0), *g.terminals) == 0.0


def test_bernoulli_single_edge():
    assert model_two_point(path_graph(1), Bernoulli(0.37), 0, 1) == pytest.approx(0.37)


def test_sprinkled_spec_composes():
    g = complete_graph(3)
    nested = model_two_point(g, Sprinkled(Loop(0.5), 0.5), 0, 1)
    assert nested == pytest.approx(model_two_point(g, RC(0.5), 0, 1))
    twice = Sprinkled(Sprinkled(Loop(0.5), 0.2), 0.3)
    assert model_two_point(g, twice, 0, 1) == pytest.approx(sprinkled_two_point(g, 0.5, 1 - 0.8 * 0.7, 0, 1))


# --------------------------------------------------------- distributions


@pytest.mark.parametrize(
    "spec", [Loop(0.4), RC(0.6), SingleCurrent(0.7), DoubleCurrent(0.5), Bernoulli(0.3), ArborealGas(1.7)]
)
def test_distributions_normalised(spec):
    for g in (complete_graph(4), theta_gadget(2, 1), two_c4_at_cut()):
        d = model_distribution(g, spec)
        assert abs(d.total - 1) < 1e-12 and d.probs.min() >= -1e-15


def test_distribution_two_point_agrees_with_sums():
    g = theta_gadget(2, 2)
    a, b = g.terminals
    for spec in (Loop(0.7), RC(0.7), SingleCurrent(0.7), DoubleCurrent(0.7)):
        via_dist = model_distribution(g, spec).probability(connection_table(g, a, b))
        assert via_dist == pytest.approx(model_two_point(g, spec, a, b), abs=1e-12)


def test_union_brute():
    g = complete_graph(3)
    a, b = loop_distribution(g, 0.5), fk_distribution(g, 0.3)
    want = np.zeros(8)
    for i in range(8):
        for j in range(8):
            want[i | j] += a.probs[i] * b.probs[j]
    assert np.allclose(union(a, b).probs, want, atol=1e-15)


def test_edge_cap():
    g = Multigraph(2, [(0, 1)] * 23)
    with pytest.raises(EdgeCapError):
        loop_distribution(g, 0.5)


def test_support_lists_nonzero_configs():
    d = loop_distribution(complete_graph(3), 0.5)
    assert [c.tolist() for c, _ in d.support] == [[False] * 3, [True] * 3]


# ------------------------------------------------------------------- oracles


@pytest.mark.parametrize("g", [complete_graph(3), cycle_graph(2), theta_gadget(2, 1), complete_graph(4)])
@pytest.mark.parametrize("x", [0.25, 0.5, 0.75])
def test_rc_equals_fk(g, x):
    assert tv_distance(model_distribution(g, RC(x)), fk_distribution(g, fk_parameter(x))) < 1e-10


def test_fk_parameter_recovered():
    for x in (0.25, 0.5, 0.75):
        assert fit_fk_parameter(complete_graph(3), x) == pytest.approx(2 * x / (1 + x), abs=1e-6)


def test_rc_oracle_limits():
    g = complete_graph(4)
    assert rc_oracle_two_point(g, 0.0, 0, 1) == 0.0
    assert rc_oracle_two_point(g, 0.5, 0, 1) == pytest.approx(model_two_point(g, RC(0.5), 0, 1))


@pytest.mark.parametrize("g", [complete_graph(3), cycle_graph(2), complete_graph(4), theta_gadget(2, 2)])
def test_two_point_identity(g):
    for x in (0.3, 0.6, 0.9):
        for u, v in itertools.combinations(range(g.vertex_count), 2):
            phi = rc_oracle_two_point(g, x, u, v)
            assert phi**2 == pytest.approx(model_two_point(g, DoubleCurrent(x), u, v), abs=1e-10)


def test_double_two_point_direct():
    g = complete_graph(4)
    assert double_two_point(g, 0.5, 0.25, 0, 1) == pytest.approx(model_two_point(g, DoubleCurrent(0.5), 0, 1))


# ----------------------------------------------------------------- arboreal


def test_arboreal_tree_is_bernoulli():
    g = tree_ball(3, 2)
    beta = 0.8
    d = arboreal_distribution(g, beta)
    assert np.allclose(d.edge_marginals(), beta / (1 + beta))
    ind = model_distribution(g, Bernoulli(beta / (1 + beta)))
    assert tv_distance(d, ind) < 1e-12


def test_arboreal_triangle_excludes_full():
    d = arboreal_distribution(complete_graph(3), 1.3)
    assert d.probs[7] == 0 and np.all(d.probs[:7] > 0)


def test_arboreal_two_point_vectorized():
    g = complete_graph(4)
    betas = np.array([0.2, 1.0, 3.0])
    vals = arboreal_two_point(g, betas, 0, 1)
    assert vals.shape == (3,)
    assert vals[1] == pytest.approx(arboreal_two_point(g, 1.0, 0, 1))


# ------------------------------------------------------------ factorisation


@pytest.mark.parametrize("spec", [Loop(0.7), DoubleCurrent(0.6), Bernoulli(0.4), RC(0.5), ArborealGas(0.9)])
def test_factorisation_two_c4(spec):
    assert factorisation_check(two_c4_at_cut(), spec) < 1e-12


def test_factorisation_two_triangles_arboreal():
    g = Multigraph(5, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])
    assert factorisation_check(g, ArborealGas(1.3)) < 1e-12


def test_factorisation_rejects_single_block():
    with pytest.raises(ValueError):
        factorisation_check(complete_graph(4), Loop(0.5))


# --------------------------------------------------------------- monotonicity


def test_rc_monotone_in_x():
    g = theta_gadget(3, 2)
    vals = model_two_point(g, RC(np.linspace(0.01, 0.99, 60)), *g.terminals)
    assert np.all(np.diff(vals) >= -1e-14)


def test_loop_not_monotone_on_theta():
    g = theta_gadget(12, 2)
    vals = loop_two_point(g, np.linspace(0.5, 1, 501), *g.terminals)
    # some x1 < x2 with f(x1) > f(x2) + 0.02
    assert (np.maximum.accumulate(vals) - vals).max() > 0.02


def test_sprinkling_monotone_in_p():
    g = theta_gadget(3, 2)
    vals = sprinkled_two_point(g, 0.6, np.linspace(0, 1, 30), *g.terminals)
    assert np.all(np.diff(vals) >= -1e-14)


def test_fkg_single_edge_events():
    g = complete_graph(4)
    d = fk_distribution(g, fk_parameter(0.6))
    omegas = np.arange(1 << g.edge_count)
    for e, f in itertools.combinations(range(g.edge_count), 2):
        A = (omegas >> e) & 1 == 1
        B = (omegas >> f) & 1 == 1
        assert d.probability(A & B) >= d.probability(A) * d.probability(B) - 1e-15
