"""Exact computations for the graphical representations of Ising on small
graphs.

Two enumeration regimes are used:

* sums over even subgraphs walk the cycle space (cost ``2**rank``), and the
  Bernoulli sprinkling on top is integrated out exactly by
  :func:`~graphreps.reliability.two_terminal_reliability`;
* full distributions over ``{0,1}^E`` (cost ``2**E``) for total-variation
  comparisons, the FK oracle, the arboreal gas and factorisation checks.

Parameters ``x``/``p`` of the two-point functions may be numpy arrays, in
which case the result is evaluated elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .cycles import DEFAULT_RANK_CAP, cycle_basis, even_masks, mask_to_config
from .graph import Multigraph, block_decomposition
from .reliability import two_terminal_reliability

__all__ = [
    "ModelSpec",
    "Loop",
    "RC",
    "SingleCurrent",
    "DoubleCurrent",
    "Bernoulli",
    "ArborealGas",
    "Sprinkled",
    "EdgeCapError",
    "DEFAULT_EDGE_CAP",
    "DOUBLE_RANK_CAP",
    "ExactDistribution",
    "single_current_sprinkle",
    "fk_parameter",
    "loop_partition",
    "loop_two_point",
    "sprinkled_two_point",
    "double_two_point",
    "model_two_point",
    "model_distribution",
    "loop_distribution",
    "bernoulli_distribution",
    "arboreal_distribution",
    "fk_distribution",
    "union",
    "rc_oracle_two_point",
    "arboreal_two_point",
    "connection_table",
    "tv_distance",
    "fit_fk_parameter",
    "factorisation_check",
]

DEFAULT_EDGE_CAP = 22
DOUBLE_RANK_CAP = 12


class EdgeCapError(ValueError):
    """Raised when a full-subset enumeration would exceed the edge cap."""

    def __init__(self, n_edges, cap):
        super().__init__(f"{n_edges} edges exceed subset-enumeration cap {cap}")
        self.n_edges = n_edges
        self.cap = cap


# ---------------------------------------------------------------- model specs


def _check_unit(name, value, lo_open=False):
    v = np.asarray(value, dtype=float)
    if np.any(np.isnan(v)) or np.any(v < 0) or np.any(v > 1):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


class ModelSpec:
    """Base class of the model descriptions below."""


@dataclass(frozen=True, eq=False)
class Loop(ModelSpec):
    """Loop O(1) model: weight ``x**|eta|`` on even subgraphs."""

    x: float

    def __post_init__(self):
        _check_unit("x", self.x)


@dataclass(frozen=True, eq=False)
class RC(ModelSpec):
    """FK-Ising, realised as loop O(1) sprinkled with Bernoulli(x)."""

    x: float

    def __post_init__(self):
        _check_unit("x", self.x)


@dataclass(frozen=True, eq=False)
class SingleCurrent(ModelSpec):
    """Traced single current: loop O(1) sprinkled with Bernoulli(1 - sqrt(1 - x^2))."""

    x: float

    def __post_init__(self):
        _check_unit("x", self.x)


@dataclass(frozen=True, eq=False)
class DoubleCurrent(ModelSpec):
    """Two independent loop O(1) layers sprinkled with Bernoulli(x^2)."""

    x: float

    def __post_init__(self):
        _check_unit("x", self.x)


@dataclass(frozen=True, eq=False)
class Bernoulli(ModelSpec):
    p: float

    def __post_init__(self):
        _check_unit("p", self.p)


@dataclass(frozen=True, eq=False)
class ArborealGas(ModelSpec):
    """Bernoulli percolation with weight ``beta**|omega|`` conditioned to be a forest."""

    beta: float

    def __post_init__(self):
        if np.any(np.asarray(self.beta, dtype=float) < 0):
            raise ValueError("beta must be nonnegative")


@dataclass(frozen=True, eq=False)
class Sprinkled(ModelSpec):
    """Union of ``base`` with an independent Bernoulli(p) configuration."""

    base: ModelSpec
    p: float

    def __post_init__(self):
        _check_unit("p", self.p)


def single_current_sprinkle(x):
    return 1 - np.sqrt(1 - np.asarray(x, dtype=float) ** 2)


def fk_parameter(x):
    """FK edge parameter (q = 2) matching loop parameter ``x``."""
    x = np.asarray(x, dtype=float)
    return 2 * x / (1 + x)


def _layers(spec: ModelSpec):
    """(x, number of loop layers, sprinkling p), or None for the arboreal gas."""
    if isinstance(spec, Loop):
        return spec.x, 1, 0.0
    if isinstance(spec, RC):
        return spec.x, 1, spec.x
    if isinstance(spec, SingleCurrent):
        return spec.x, 1, single_current_sprinkle(spec.x)
    if isinstance(spec, DoubleCurrent):
        return spec.x, 2, np.asarray(spec.x, dtype=float) ** 2
    if isinstance(spec, Bernoulli):
        return 0.0, 0, spec.p
    if isinstance(spec, Sprinkled):
        inner = _layers(spec.base)
        if inner is None:
            return None
        x, k, q = inner
        return x, k, 1 - (1 - np.asarray(q, dtype=float)) * (1 - np.asarray(spec.p, dtype=float))
    if isinstance(spec, ArborealGas):
        return None
    raise TypeError(f"unknown model spec {spec!r}")


# ------------------------------------------------------- even-subgraph sums


def _mask_connects(g: Multigraph, mask: int, u: int, v: int) -> bool:
    parent = list(range(g.vertex_count))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    e = 0
    while mask:
        if mask & 1:
            a, b = g.edges[e]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        mask >>= 1
        e += 1
    return find(u) == find(v)


@lru_cache(maxsize=128)
def _loop_spectrum(g: Multigraph, u: int, v: int, cap: int):
    """Edge counts of all even subgraphs and whether each joins u to v."""
    masks = even_masks(g, cap)
    ints = [int(m) for m in masks]
    sizes = np.array([m.bit_count() for m in ints], dtype=np.int64)
    joins = np.array([_mask_connects(g, m, u, v) for m in ints], dtype=bool)
    return ints, sizes, joins


def _powers(x, sizes):
    x = np.asarray(x, dtype=float)
    return x[..., None] ** sizes


def loop_partition(g: Multigraph, x, cap: int = DEFAULT_RANK_CAP):
    """Sum of ``x**|eta|`` over all even subgraphs."""
    masks = even_masks(g, cap)
    sizes = np.bitwise_count(masks) if isinstance(masks, np.ndarray) else np.array([m.bit_count() for m in masks])
    return _powers(x, sizes).sum(axis=-1)


def loop_two_point(g: Multigraph, x, u: int, v: int, cap: int = DEFAULT_RANK_CAP):
    """Loop O(1) probability that ``u`` and ``v`` are connected."""
    if u == v:
        return np.ones_like(np.asarray(x, dtype=float))[()]
    _, sizes, joins = _loop_spectrum(g, u, v, cap)
    w = _powers(x, sizes)
    return (w[..., joins].sum(axis=-1) / w.sum(axis=-1))[()]


def _reliability_given(g: Multigraph, mask: int, p, u: int, v: int):
    sure = [e for e in range(g.edge_count) if (mask >> e) & 1]
    return two_terminal_reliability(g.vertex_count, g.edges, p, u, v, sure=sure)


def sprinkled_two_point(g: Multigraph, x, p, u: int, v: int, cap: int = DEFAULT_RANK_CAP):
    """Two-point function of loop O(1) at ``x`` united with Bernoulli(p).

    Each even subgraph is contracted and the Bernoulli layer is summed out
    exactly by two-terminal reliability.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    if u == v:
        return np.ones(np.broadcast(x, p).shape)[()]
    if not np.any(p):
        return loop_two_point(g, x, u, v, cap) * np.ones(np.broadcast(x, p).shape)[()]
    ints, sizes, _ = _loop_spectrum(g, u, v, cap)
    w = _powers(x, sizes)
    num = 0.0
    for i, m in enumerate(ints):
        num = num + w[..., i] * _reliability_given(g, m, p, u, v)
    return (num / w.sum(axis=-1))[()]


def double_two_point(g: Multigraph, x, p, u: int, v: int, cap: int = DOUBLE_RANK_CAP):
    """Two-point function of two independent loop O(1) layers at ``x``
    united with Bernoulli(p).  Enumerates pairs of even subgraphs."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    if u == v:
        return np.ones(np.broadcast(x, p).shape)[()]
    ints, sizes, _ = _loop_spectrum(g, u, v, cap)
    # group pairs by their union; weight depends on |eta1| + |eta2|
    unions: dict[int, dict[int, int]] = {}
    for m1, k1 in zip(ints, sizes):
        for m2, k2 in zip(ints, sizes):
            bucket = unions.setdefault(m1 | m2, {})
            bucket[int(k1 + k2)] = bucket.get(int(k1 + k2), 0) + 1
    Z = _powers(x, sizes).sum(axis=-1)
    num = 0.0
    for m, bucket in unions.items():
        ks = np.array(list(bucket.keys()))
        cs = np.array(list(bucket.values()), dtype=float)
        weight = (_powers(x, ks) * cs).sum(axis=-1)
        num = num + weight * _reliability_given(g, m, p, u, v)
    return (num / Z**2)[()]


def model_two_point(g: Multigraph, spec: ModelSpec, u: int, v: int, cap: int = DEFAULT_RANK_CAP):
    """Exact probability that ``u`` and ``v`` are connected under ``spec``."""
    layers = _layers(spec)
    if layers is None:
        if isinstance(spec, ArborealGas):
            return arboreal_two_point(g, spec.beta, u, v)
        return model_distribution(g, spec).probability(connection_table(g, u, v))
    x, k, p = layers
    if k == 0:
        p = np.asarray(p, dtype=float)
        if u == v:
            return np.ones_like(p)[()]
        return np.asarray(two_terminal_reliability(g.vertex_count, g.edges, p, u, v) * np.ones_like(p))[()]
    if k == 1:
        return sprinkled_two_point(g, x, p, u, v, cap)
    return double_two_point(g, x, p, u, v, min(cap, DOUBLE_RANK_CAP))


# --------------------------------------------------------- full distributions


@dataclass(frozen=True, eq=False)
class ExactDistribution:
    """Probability vector over all ``2**n_edges`` edge configurations, indexed
    by bitmask (bit ``e`` is edge ``e``)."""

    probs: np.ndarray
    n_edges: int

    @property
    def total(self) -> float:
        return float(self.probs.sum())

    @property
    def support(self):
        return [(mask_to_config(int(i), self.n_edges), float(self.probs[i])) for i in np.flatnonzero(self.probs > 0)]

    def probability(self, event) -> float:
        """Probability of a boolean event vector over configurations."""
        return float(self.probs[np.asarray(event, dtype=bool)].sum())

    def edge_marginals(self) -> np.ndarray:
        omegas = np.arange(self.probs.size, dtype=np.int64)
        return np.array([self.probs[(omegas >> e) & 1 == 1].sum() for e in range(self.n_edges)])


def _check_edges(g: Multigraph, cap: int):
    if g.edge_count > cap:
        raise EdgeCapError(g.edge_count, cap)


def _popcounts(n_edges: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n_edges, dtype=np.uint64)).astype(np.int64)


@lru_cache(maxsize=8)
def _labels_table(g: Multigraph) -> np.ndarray:
    """Component label (smallest vertex id) of every vertex under every
    configuration; shape ``(2**E, V)``."""
    E, V = g.edge_count, g.vertex_count
    omegas = np.arange(1 << E, dtype=np.int64)
    labels = np.tile(np.arange(V, dtype=np.int32), (omegas.size, 1))
    open_ = [((omegas >> e) & 1).astype(bool) for e in range(E)]
    changed = True
    while changed:
        changed = False
        for e, (a, b) in enumerate(g.edges):
            if a == b:
                continue
            m = open_[e] & (labels[:, a] != labels[:, b])
            if m.any():
                lo = np.minimum(labels[m, a], labels[m, b])
                labels[m, a] = lo
                labels[m, b] = lo
                changed = True
    return labels


def _cluster_counts(g: Multigraph) -> np.ndarray:
    labels = _labels_table(g)
    return (labels == np.arange(g.vertex_count)).sum(axis=1)


def connection_table(g: Multigraph, u: int, v: int, cap: int = DEFAULT_EDGE_CAP) -> np.ndarray:
    """Boolean vector over all configurations: is ``u`` joined to ``v``?"""
    _check_edges(g, cap)
    labels = _labels_table(g)
    return labels[:, u] == labels[:, v]


def loop_distribution(g: Multigraph, x, cap: int = DEFAULT_EDGE_CAP) -> ExactDistribution:
    _check_edges(g, cap)
    masks = even_masks(g, g.edge_count).astype(np.int64)
    w = float(x) ** np.bitwise_count(masks.astype(np.uint64)).astype(np.int64)
    probs = np.zeros(1 << g.edge_count)
    probs[masks] = w / w.sum()
    return ExactDistribution(probs, g.edge_count)


def bernoulli_distribution(g: Multigraph, p, cap: int = DEFAULT_EDGE_CAP) -> ExactDistribution:
    _check_edges(g, cap)
    k = _popcounts(g.edge_count)
    p = float(p)
    return ExactDistribution(p**k * (1 - p) ** (g.edge_count - k), g.edge_count)


def arboreal_distribution(g: Multigraph, beta, cap: int = DEFAULT_EDGE_CAP) -> ExactDistribution:
    """Weight ``beta**|omega|`` on configurations without cycles."""
    _check_edges(g, cap)
    k = _popcounts(g.edge_count)
    forest = _cluster_counts(g) == g.vertex_count - k
    w = np.where(forest, float(beta) ** k, 0.0)
    return ExactDistribution(w / w.sum(), g.edge_count)


def fk_distribution(g: Multigraph, p, q: float = 2.0, cap: int = DEFAULT_EDGE_CAP) -> ExactDistribution:
    """Standard random-cluster weights ``p^|w| (1-p)^(E-|w|) q^kappa(w)``,
    kappa counting isolated vertices too."""
    _check_edges(g, cap)
    k = _popcounts(g.edge_count)
    p = float(p)
    w = p**k * (1 - p) ** (g.edge_count - k) * q ** _cluster_counts(g).astype(float)
    return ExactDistribution(w / w.sum(), g.edge_count)


def _zeta(f: np.ndarray, n: int, sign: int) -> np.ndarray:
    f = f.astype(float, copy=True)
    for i in range(n):
        view = f.reshape(-1, 2, 1 << i)
        view[:, 1, :] += sign * view[:, 0, :]
    return f


def union(a: ExactDistribution, b: ExactDistribution) -> ExactDistribution:
    """Law of ``omega1 | omega2`` for independent ``omega1 ~ a``, ``omega2 ~ b``
    (subset-sum transform, pointwise product, Moebius inversion)."""
    if a.n_edges != b.n_edges:
        raise ValueError("distributions live on different edge sets")
    n = a.n_edges
    fa, fb = _zeta(a.probs, n, +1), _zeta(b.probs, n, +1)
    probs = _zeta(fa * fb, n, -1)
    probs[np.abs(probs) < 1e-300] = 0.0
    return ExactDistribution(probs, n)


def model_distribution(g: Multigraph, spec: ModelSpec, cap: int = DEFAULT_EDGE_CAP) -> ExactDistribution:
    """Exact law of ``spec`` on ``g`` over all ``2**E`` configurations."""
    _check_edges(g, cap)
    if isinstance(spec, ArborealGas):
        return arboreal_distribution(g, spec.beta, cap)
    if isinstance(spec, Bernoulli):
        return bernoulli_distribution(g, spec.p, cap)
    if isinstance(spec, Sprinkled):
        return union(model_distribution(g, spec.base, cap), bernoulli_distribution(g, spec.p, cap))
    x, k, p = _layers(spec)
    dist = loop_distribution(g, x, cap)
    if k == 2:
        dist = union(dist, dist)
    if float(p) > 0:
        dist = union(dist, bernoulli_distribution(g, p, cap))
    return dist


def rc_oracle_two_point(g: Multigraph, x, u: int, v: int, cap: int = DEFAULT_EDGE_CAP) -> float:
    """FK-Ising two-point function from the standard FK weights at
    ``p = 2x / (1 + x)``; independent of the loop-based route."""
    if u == v:
        return 1.0
    return fk_distribution(g, fk_parameter(x), cap=cap).probability(connection_table(g, u, v, cap))


def arboreal_two_point(g: Multigraph, beta, u: int, v: int, cap: int = DEFAULT_EDGE_CAP):
    beta = np.asarray(beta, dtype=float)
    if u == v:
        return np.ones_like(beta)[()]
    conn = connection_table(g, u, v, cap)
    flat = [arboreal_distribution(g, b, cap).probability(conn) for b in beta.ravel()]
    return np.asarray(flat).reshape(beta.shape)[()]


def tv_distance(a: ExactDistribution, b: ExactDistribution) -> float:
    return 0.5 * float(np.abs(a.probs - b.probs).sum())


def fit_fk_parameter(g: Multigraph, x: float, grid: int = 201, tol: float = 1e-10) -> float:
    """FK parameter minimising the total-variation distance to the law of
    loop O(1) united with Bernoulli(x); coarse grid, then golden section."""
    target = model_distribution(g, RC(x))

    def tv(p):
        return tv_distance(target, fk_distribution(g, min(max(p, 0.0), 1.0)))

    ps = np.linspace(0, 1, grid)
    i = int(np.argmin([tv(p) for p in ps]))
    lo, hi = ps[max(i - 1, 0)], ps[min(i + 1, grid - 1)]
    res = minimize_scalar(tv, bracket=(lo, ps[i], hi), method="golden", tol=tol)
    return float(res.x)


def factorisation_check(g: Multigraph, spec: ModelSpec, cap: int = DEFAULT_EDGE_CAP) -> float:
    """Largest absolute difference between the joint law on ``g`` and the
    product of the laws computed separately on each biconnected block."""
    blocks = block_decomposition(g).blocks
    if len(blocks) < 2:
        raise ValueError("graph has a single block; factorisation is vacuous")
    joint = model_distribution(g, spec, cap)
    omegas = np.arange(1 << g.edge_count, dtype=np.int64)
    product = np.ones(omegas.size)
    for blk in blocks:
        sub = model_distribution(g.edge_subgraph(blk), spec, cap)
        idx = np.zeros_like(omegas)
        for j, e in enumerate(blk):
            idx |= ((omegas >> e) & 1) << j
        product *= sub.probs[idx]
    return float(np.abs(joint.probs - product).max())


def cycle_rank(g: Multigraph) -> int:
    return cycle_basis(g).rank
