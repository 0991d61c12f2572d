"""The group of even subgraphs over GF(2).

Edge configurations are boolean numpy arrays indexed by edge id.  Internally
the cycle basis also keeps every generator as a Python ``int`` bitmask (bit
``e`` is edge ``e``), which makes XOR and popcount cheap.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache, reduce
from operator import or_

import numpy as np

from .graph import Multigraph

__all__ = [
    "CycleBasis",
    "RankCapError",
    "DEFAULT_RANK_CAP",
    "cycle_basis",
    "is_even",
    "xor",
    "gf2_rank",
    "even_masks",
    "enumerate_even",
    "sample_ueg",
    "ueg_of_config",
    "ueg_edge_marginals",
    "halving_iso",
    "halving_iso_inverse",
    "mask_to_config",
    "config_to_mask",
    "config_to_hex",
    "config_from_hex",
]

DEFAULT_RANK_CAP = 24


class RankCapError(ValueError):
    """Raised when an exhaustive sum would exceed the configured rank cap."""

    def __init__(self, rank, cap):
        super().__init__(f"cycle rank {rank} exceeds enumeration cap {cap}")
        self.rank = rank
        self.cap = cap


@dataclass(frozen=True)
class CycleBasis:
    """Fundamental-cycle basis of the cycle space.

    ``masks[i]`` is generator ``i`` as an int bitmask; ``tree_edges`` are the
    spanning-forest edges in BFS discovery order.
    """

    masks: tuple[int, ...]
    n_edges: int
    tree_edges: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.masks)

    @property
    def generators(self) -> list[np.ndarray]:
        return [mask_to_config(m, self.n_edges) for m in self.masks]

    def matrix(self) -> np.ndarray:
        """``(rank, E)`` uint8 matrix whose rows are the generators."""
        out = np.zeros((self.rank, self.n_edges), dtype=np.uint8)
        for i, m in enumerate(self.masks):
            out[i] = mask_to_config(m, self.n_edges)
        return out


def mask_to_config(mask: int, n_edges: int) -> np.ndarray:
    return np.array([(mask >> e) & 1 for e in range(n_edges)], dtype=bool)


def config_to_mask(config) -> int:
    return sum(1 << int(e) for e in np.flatnonzero(np.asarray(config)))


def config_to_hex(config) -> str:
    """Hex string of the bit vector; edge 0 is the least significant bit."""
    n = len(config)
    width = max(1, -(-n // 4))
    return format(config_to_mask(config), f"0{width}x")


def config_from_hex(text: str, n_edges: int) -> np.ndarray:
    mask = int(text, 16)
    if mask >> n_edges:
        raise ValueError(f"hex config {text!r} has bits beyond edge {n_edges - 1}")
    return mask_to_config(mask, n_edges)


def _check_length(g: Multigraph, config) -> np.ndarray:
    config = np.asarray(config, dtype=bool)
    if config.shape != (g.edge_count,):
        raise ValueError(f"config has length {config.shape}, graph has {g.edge_count} edges")
    return config


def is_even(g: Multigraph, config) -> bool:
    config = _check_length(g, config)
    parity = np.zeros(g.vertex_count, dtype=np.int64)
    ends = g.endpoints[config]
    np.add.at(parity, ends[:, 0], 1)
    np.add.at(parity, ends[:, 1], 1)
    return not np.any(parity % 2)


def xor(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return a ^ b


def gf2_rank(rows) -> int:
    """Rank over GF(2) of int bitmask rows (Gaussian elimination)."""
    pivots: dict[int, int] = {}
    rank = 0
    for r in rows:
        r = int(r)
        while r:
            top = r.bit_length() - 1
            if top not in pivots:
                pivots[top] = r
                rank += 1
                break
            r ^= pivots[top]
    return rank


def _spanning_forest(g: Multigraph, open_mask=None):
    """BFS forest by vertex id.  Returns (parent vertex, parent edge, order)."""
    V = g.vertex_count
    adj = g.adjacency()
    parent = [-1] * V
    pedge = [-1] * V
    seen = [False] * V
    order = []
    for root in range(V):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w, e in adj[v]:
                if open_mask is not None and not open_mask[e]:
                    continue
                if not seen[w]:
                    seen[w] = True
                    parent[w] = v
                    pedge[w] = e
                    queue.append(w)
    return parent, pedge, order


@lru_cache(maxsize=256)
def cycle_basis(g: Multigraph) -> CycleBasis:
    """Fundamental cycles of the BFS spanning forest, one per non-forest edge,
    in edge-id order.  A self-loop is its own generator."""
    parent, pedge, order = _spanning_forest(g)
    depth = [0] * g.vertex_count
    for v in order:
        if parent[v] >= 0:
            depth[v] = depth[parent[v]] + 1
    tree = {e for e in pedge if e >= 0}
    masks = []
    for e, (a, b) in enumerate(g.edges):
        if e in tree:
            continue
        m = 1 << e
        while a != b:
            if depth[a] < depth[b]:
                a, b = b, a
            m ^= 1 << pedge[a]
            a = parent[a]
        masks.append(m)
    tree_edges = tuple(pedge[v] for v in order if pedge[v] >= 0)
    return CycleBasis(tuple(masks), g.edge_count, tree_edges)


def even_masks(g: Multigraph, cap: int = DEFAULT_RANK_CAP):
    """All even subgraphs as bitmasks, in reflected Gray-code order over the
    basis: entry ``i`` is the XOR of the generators selected by the bits of
    ``i ^ (i >> 1)``.

    Returns a ``uint64`` array when the graph has at most 64 edges, else a
    list of Python ints.
    """
    basis = cycle_basis(g)
    if basis.rank > cap:
        raise RankCapError(basis.rank, cap)
    if g.edge_count <= 64:
        seq = np.zeros(1, dtype=np.uint64)
        for m in basis.masks:
            seq = np.concatenate([seq, seq[::-1] ^ np.uint64(m)])
        return seq
    seq = [0]
    for m in basis.masks:
        seq = seq + [s ^ m for s in reversed(seq)]
    return seq


def enumerate_even(g: Multigraph, cap: int = DEFAULT_RANK_CAP):
    """Yield every even subgraph exactly once, successive ones differing by a
    single generator."""
    for m in even_masks(g, cap):
        yield mask_to_config(int(m), g.edge_count)


def sample_ueg(g: Multigraph, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Exact uniform even subgraph: XOR of a fair-coin subset of the basis.

    Returns one config, or a ``(size, E)`` array when ``size`` is given.
    """
    basis = cycle_basis(g)
    n = 1 if size is None else size
    if basis.rank == 0:
        out = np.zeros((n, g.edge_count), dtype=bool)
    else:
        coins = rng.integers(0, 2, size=(n, basis.rank), dtype=np.uint8)
        out = (coins.astype(np.int64) @ basis.matrix().astype(np.int64)) % 2 == 1
    return out[0] if size is None else out


def ueg_of_config(g: Multigraph, omega, rng: np.random.Generator) -> np.ndarray:
    """Uniform even subgraph of the open subgraph of ``omega``.

    Fair coins on the non-forest open edges, then forest edges are forced by
    peeling parities from the leaves.  This is the same bijection as XOR-ing
    the fundamental cycles of the open subgraph.
    """
    omega = _check_length(g, omega)
    parent, pedge, order = _spanning_forest(g, omega)
    tree = np.zeros(g.edge_count, dtype=bool)
    for e in pedge:
        if e >= 0:
            tree[e] = True
    free = np.flatnonzero(omega & ~tree)
    eta = np.zeros(g.edge_count, dtype=bool)
    if free.size == 0:
        return eta
    eta[free] = rng.integers(0, 2, size=free.size).astype(bool)
    parity = np.zeros(g.vertex_count, dtype=np.int64)
    ends = g.endpoints[eta]
    np.add.at(parity, ends[:, 0], 1)
    np.add.at(parity, ends[:, 1], 1)
    parity %= 2
    for v in reversed(order):
        if parity[v] and pedge[v] >= 0:
            eta[pedge[v]] = True
            parity[v] = 0
            parity[parent[v]] ^= 1
    return eta


def ueg_edge_marginals(g: Multigraph) -> np.ndarray:
    """Exact UEG edge marginals: 1/2 on edges lying in some cycle, else 0."""
    span = reduce(or_, cycle_basis(g).masks, 0)
    return np.where(mask_to_config(span, g.edge_count), 0.5, 0.0)


def halving_iso(g_half: Multigraph, edge_map, eta_half) -> np.ndarray:
    """Map an even subgraph of the halved graph to the original graph: an
    original edge is kept when its midpoint has degree 2."""
    eta_half = _check_length(g_half, eta_half)
    if not is_even(g_half, eta_half):
        raise ValueError("configuration is not even on the halved graph")
    edge_map = np.asarray(edge_map)
    return eta_half[edge_map[:, 0]] & eta_half[edge_map[:, 1]]


def halving_iso_inverse(edge_map, eta) -> np.ndarray:
    """Inverse of :func:`halving_iso`: both halves of every kept edge."""
    edge_map = np.asarray(edge_map)
    eta = np.asarray(eta, dtype=bool)
    out = np.zeros(edge_map.size, dtype=bool)
    out[edge_map[:, 0]] = eta
    out[edge_map[:, 1]] = eta
    return out
