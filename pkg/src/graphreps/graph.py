"""Finite multigraphs, the constructors used throughout the package, and
structural transforms (substitution, wiring, halving, block decomposition).

Edges are identified by their position in ``Multigraph.edges``.  Parallel
edges and self-loops are allowed; a self-loop contributes 2 to the degree of
its vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "Multigraph",
    "BlockPartition",
    "path_graph",
    "complete_graph",
    "cycle_graph",
    "theta_gadget",
    "tree_ball",
    "arc_chain",
    "substitute_edges",
    "wired_quotient",
    "halve_edges",
    "block_decomposition",
    "connected_components",
    "read_graph",
    "write_graph",
    "format_graph",
    "parse_graph",
]


@dataclass(frozen=True)
class Multigraph:
    """Immutable undirected multigraph.

    Parameters
    ----------
    vertex_count : int
        Vertices are ``0, ..., vertex_count - 1``.
    edges : tuple of (int, int)
        Edge ``i`` is ``edges[i]``.  ``u == v`` is a self-loop.
    terminals : (int, int) or None
        Distinguished pair ``(a, b)``.
    boundary : frozenset of int
        Boundary vertices (used by :func:`wired_quotient`).
    labels : tuple or None
        Optional per-edge provenance tags.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    terminals: tuple[int, int] | None = None
    boundary: frozenset[int] = field(default_factory=frozenset)
    labels: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        object.__setattr__(self, "boundary", frozenset(int(b) for b in self.boundary))
        if self.terminals is not None:
            object.__setattr__(self, "terminals", (int(self.terminals[0]), int(self.terminals[1])))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
        n = self.vertex_count
        if n < 0:
            raise ValueError("vertex_count must be nonnegative")
        for u, v in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
        if self.terminals is not None:
            a, b = self.terminals
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError("terminal outside the vertex range")
            if a == b and n > 1:
                raise ValueError("terminals must be distinct")
        if any(not 0 <= v < n for v in self.boundary):
            raise ValueError("boundary vertex outside the vertex range")
        if self.labels is not None and len(self.labels) != len(self.edges):
            raise ValueError("labels must have one entry per edge")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def endpoints(self) -> np.ndarray:
        """``(E, 2)`` integer array of edge endpoints."""
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per-vertex list of ``(neighbour, edge id)`` in edge-id order.

        Self-loops appear twice in the list of their vertex.
        """
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for e, (u, v) in enumerate(self.edges):
            adj[u].append((v, e))
            adj[v].append((u, e))
        return adj

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.vertex_count, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def has_self_loops(self) -> bool:
        return any(u == v for u, v in self.edges)

    def edge_subgraph(self, edge_ids) -> Multigraph:
        """Spanning subgraph keeping only ``edge_ids`` (renumbered in the given order)."""
        edge_ids = list(edge_ids)
        labels = None if self.labels is None else [self.labels[e] for e in edge_ids]
        return Multigraph(
            self.vertex_count,
            [self.edges[e] for e in edge_ids],
            terminals=self.terminals,
            boundary=self.boundary,
            labels=labels,
        )

    def with_terminals(self, a: int, b: int) -> Multigraph:
        return Multigraph(self.vertex_count, self.edges, (a, b), self.boundary, self.labels)

    def cycle_rank(self) -> int:
        """``|E| - |V| + #components``."""
        return self.edge_count - self.vertex_count + connected_components(self)[0]


@dataclass(frozen=True)
class BlockPartition:
    """Edge sets of the biconnected components, sorted by smallest edge id."""

    blocks: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.blocks)

    def block_of(self) -> dict[int, int]:
        return {e: i for i, blk in enumerate(self.blocks) for e in blk}


def connected_components(g: Multigraph, edge_mask=None) -> tuple[int, np.ndarray]:
    """Number of components and per-vertex labels, using only edges where
    ``edge_mask`` is true (all edges if omitted)."""
    parent = list(range(g.vertex_count))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for e, (u, v) in enumerate(g.edges):
        if edge_mask is not None and not edge_mask[e]:
            continue
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    labels = np.array([find(i) for i in range(g.vertex_count)], dtype=np.int64)
    return len(set(labels.tolist())), labels


# ---------------------------------------------------------------- constructors


def path_graph(n_edges: int) -> Multigraph:
    """Path with ``n_edges`` edges; terminals are its endpoints."""
    if n_edges < 1:
        raise ValueError("path needs at least one edge")
    return Multigraph(n_edges + 1, [(i, i + 1) for i in range(n_edges)], terminals=(0, n_edges))


def complete_graph(n: int) -> Multigraph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return Multigraph(n, edges, terminals=(0, 1) if n >= 2 else None)


def cycle_graph(n: int) -> Multigraph:
    """Cycle of length ``2n`` with antipodal terminals ``0`` and ``n``.

    ``n = 1`` gives two vertices joined by two parallel edges.
    """
    if n < 1:
        raise ValueError("cycle_graph needs n >= 1")
    k = 2 * n
    return Multigraph(k, [(i, (i + 1) % k) for i in range(k)], terminals=(0, n))


def theta_gadget(n: int, m: int, terminals: str = "auto") -> Multigraph:
    """Four internally disjoint paths between two hubs: two of length ``n``
    (outer) and two of length ``m`` (inner).

    Vertex 0 and 1 are the hubs.  The marked pair sits in the interior of the
    two inner paths, so the only even subgraphs joining them are the inner
    cycle and the whole graph.

    ``terminals`` selects the marked pair: ``"inner"`` (midpoints of the
    inner paths, needs ``m >= 2``), ``"outer"`` (midpoints of the outer
    paths, needs ``n >= 2``), ``"hubs"``, or ``"auto"``, which picks the
    first of inner/outer/hubs that exists.
    """
    if n < 1 or m < 1:
        raise ValueError("theta_gadget needs n, m >= 1")
    edges: list[tuple[int, int]] = []
    mids: list[int] = []
    nv = 2
    for length in (n, n, m, m):
        prev = 0
        for step in range(1, length):
            edges.append((prev, nv))
            if step == length // 2:
                mids.append(nv)
            prev = nv
            nv += 1
        edges.append((prev, 1))
        if length == 1:
            mids.append(-1)

    if terminals == "auto":
        terminals = "inner" if m >= 2 else ("outer" if n >= 2 else "hubs")
    if terminals == "inner":
        if m < 2:
            raise ValueError("inner terminals need m >= 2")
        term = (mids[2], mids[3])
    elif terminals == "outer":
        if n < 2:
            raise ValueError("outer terminals need n >= 2")
        term = (mids[0], mids[1])
    elif terminals == "hubs":
        term = (0, 1)
    else:
        raise ValueError(f"unknown terminal placement {terminals!r}")
    return Multigraph(nv, edges, terminals=term)


def tree_ball(d: int, radius: int) -> Multigraph:
    """Ball of the given radius around the root (vertex 0) of the d-regular
    tree.  Vertices are numbered in BFS order; the boundary is the sphere."""
    if d < 2:
        raise ValueError("tree_ball needs d >= 2")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    edges = []
    frontier = [0]
    nv = 1
    for depth in range(radius):
        nxt = []
        for v in frontier:
            for _ in range(d if depth == 0 else d - 1):
                edges.append((v, nv))
                nxt.append(nv)
                nv += 1
        frontier = nxt
    return Multigraph(nv, edges, boundary=frozenset(frontier))


def arc_chain(N: int) -> Multigraph:
    """Integers ``-N..N`` (vertex id ``k + N``) with nearest-neighbour path
    edges followed by the arcs ``(-k, k)`` for ``k = 1..N``."""
    if N < 1:
        raise ValueError("arc_chain needs N >= 1")
    edges = [(k + N, k + 1 + N) for k in range(-N, N)]
    labels = ["path"] * len(edges)
    for k in range(1, N + 1):
        edges.append((N - k, N + k))
        labels.append("arc")
    return Multigraph(2 * N + 1, edges, labels=labels)


# ------------------------------------------------------------------ transforms


def substitute_edges(base: Multigraph, gadget: Multigraph) -> Multigraph:
    """Replace every base edge ``(v, w)``, oriented from the smaller to the
    larger endpoint, by a fresh copy of ``gadget`` with terminal ``a`` glued
    to ``v`` and ``b`` glued to ``w``.

    Base vertices keep their ids; the remaining gadget vertices of copy ``i``
    are appended in gadget order.  Edge ``j`` of copy ``i`` gets id
    ``i * gadget.edge_count + j`` and label ``(i, j)``.
    """
    if gadget.terminals is None:
        raise ValueError("gadget has no terminals")
    if base.has_self_loops():
        raise ValueError("substitution base must not contain self-loops")
    a, b = gadget.terminals
    inner = [v for v in range(gadget.vertex_count) if v not in (a, b)]
    nv = base.vertex_count
    edges, labels = [], []
    for i, (u, w) in enumerate(base.edges):
        v0, v1 = min(u, w), max(u, w)
        vmap = {a: v0, b: v1}
        for x in inner:
            vmap[x] = nv
            nv += 1
        for j, (p, q) in enumerate(gadget.edges):
            edges.append((vmap[p], vmap[q]))
            labels.append((i, j))
    return Multigraph(nv, edges, terminals=base.terminals, boundary=base.boundary, labels=labels)


def wired_quotient(g: Multigraph) -> Multigraph:
    """Merge all boundary vertices into a single ghost vertex.

    Interior vertices keep their relative order; the ghost is the last vertex
    and the sole boundary vertex of the result.  Edge ids are unchanged.
    """
    if not g.boundary:
        raise ValueError("wired_quotient needs a nonempty boundary")
    interior = [v for v in range(g.vertex_count) if v not in g.boundary]
    ghost = len(interior)
    vmap = {v: i for i, v in enumerate(interior)}
    for v in g.boundary:
        vmap[v] = ghost
    terminals = None
    if g.terminals is not None:
        ta, tb = vmap[g.terminals[0]], vmap[g.terminals[1]]
        terminals = (ta, tb) if ta != tb or ghost == 0 else None
    return Multigraph(
        ghost + 1,
        [(vmap[u], vmap[v]) for u, v in g.edges],
        terminals=terminals,
        boundary=frozenset({ghost}),
        labels=g.labels,
    )


def halve_edges(g: Multigraph) -> tuple[Multigraph, np.ndarray]:
    """Subdivide every edge once.

    Edge ``e = (v, w)`` gets midpoint vertex ``V + e`` and is replaced by
    edges ``2e = (v, V+e)`` and ``2e+1 = (w, V+e)``.  A self-loop becomes a
    doubled edge to its midpoint.

    Returns the halved graph and the ``(E, 2)`` map from each original edge
    to its two half-edge ids.
    """
    V = g.vertex_count
    edges, labels = [], []
    for e, (v, w) in enumerate(g.edges):
        edges += [(v, V + e), (w, V + e)]
        labels += [(e, 0), (e, 1)]
    edge_map = np.arange(2 * g.edge_count, dtype=np.int64).reshape(-1, 2)
    half = Multigraph(V + g.edge_count, edges, g.terminals, g.boundary, labels)
    return half, edge_map


def block_decomposition(g: Multigraph) -> BlockPartition:
    """Partition the edges into biconnected components.

    Iterative Hopcroft-Tarjan with an edge stack.  Parallel edges end up in
    the same block; self-loops and bridges are singleton blocks.
    """
    V = g.vertex_count
    adj: list[list[tuple[int, int]]] = [[] for _ in range(V)]
    blocks: list[tuple[int, ...]] = []
    for e, (u, v) in enumerate(g.edges):
        if u == v:
            blocks.append((e,))
        else:
            adj[u].append((v, e))
            adj[v].append((u, e))

    disc = [-1] * V
    low = [0] * V
    clock = 0
    estack: list[int] = []
    for root in range(V):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = clock
        clock += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            v, pe, it = stack[-1]
            descended = False
            for w, e in it:
                if e == pe:
                    continue
                if disc[w] == -1:
                    estack.append(e)
                    disc[w] = low[w] = clock
                    clock += 1
                    stack.append((w, e, iter(adj[w])))
                    descended = True
                    break
                if disc[w] < disc[v]:
                    estack.append(e)
                    low[v] = min(low[v], disc[w])
            if descended:
                continue
            stack.pop()
            if stack:
                u = stack[-1][0]
                low[u] = min(low[u], low[v])
                if low[v] >= disc[u]:
                    blk = []
                    while True:
                        e = estack.pop()
                        blk.append(e)
                        if e == pe:
                            break
                    blocks.append(tuple(sorted(blk)))
    blocks.sort(key=lambda b: b[0])
    return BlockPartition(tuple(blocks))


# ------------------------------------------------------------------------- I/O


def _format_label(label) -> str:
    if isinstance(label, tuple):
        return ":".join(str(x) for x in label)
    return str(label)


def _parse_label(token: str):
    parts = token.split(":")
    if len(parts) > 1 and all(p.lstrip("-").isdigit() for p in parts):
        return tuple(int(p) for p in parts)
    return token


def format_graph(g: Multigraph) -> str:
    lines = [f"vertices {g.vertex_count}"]
    if g.terminals is not None:
        lines.append(f"terminals {g.terminals[0]} {g.terminals[1]}")
    if g.boundary:
        lines.append("boundary " + " ".join(str(v) for v in sorted(g.boundary)))
    for e, (u, v) in enumerate(g.edges):
        line = f"edge {u} {v}"
        if g.labels is not None and g.labels[e] is not None:
            line += " " + _format_label(g.labels[e])
        lines.append(line)
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Multigraph:
    """Parse the plain-text edge-list format (see :func:`format_graph`).

    Blank lines and lines starting with ``#`` are ignored.
    """
    n = None
    terminals = None
    boundary: list[int] = []
    edges, labels = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        try:
            if tok[0] == "vertices" and len(tok) == 2:
                n = int(tok[1])
            elif tok[0] == "terminals" and len(tok) == 3:
                terminals = (int(tok[1]), int(tok[2]))
            elif tok[0] == "boundary":
                boundary += [int(t) for t in tok[1:]]
            elif tok[0] == "edge" and len(tok) in (3, 4):
                edges.append((int(tok[1]), int(tok[2])))
                labels.append(_parse_label(tok[3]) if len(tok) == 4 else None)
            else:
                raise ValueError
        except ValueError:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}") from None
    if n is None:
        raise ValueError("missing 'vertices' line")
    has_labels = any(lab is not None for lab in labels)
    return Multigraph(n, edges, terminals, frozenset(boundary), labels if has_labels else None)


def read_graph(path) -> Multigraph:
    return parse_graph(Path(path).read_text())


def write_graph(g: Multigraph, path) -> None:
    Path(path).write_text(format_graph(g))

