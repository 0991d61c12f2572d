"""Exact two-terminal connection probability under independent edges.

Series/parallel reductions first, then factoring on an edge (contract with
probability q, delete with probability 1 - q).  Edge probabilities may be
floats or numpy arrays of a common shape; the reduction sequence depends
only on which edges are certainly open, so one pass evaluates a whole grid
of parameters at once.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

__all__ = ["two_terminal_reliability"]


def two_terminal_reliability(n_vertices, edges, probs, s, t, sure=()):
    """P(s and t connected) when edge ``i`` is open independently with
    probability ``probs[i]`` and every edge listed in ``sure`` is open.

    ``probs`` is either one value shared by all edges (a float, or an array
    for vectorized evaluation) or a list/tuple with one value per edge.
    """
    if not isinstance(probs, (list, tuple)):
        probs = [probs] * len(edges)
    sure = set(sure)
    parent = list(range(n_vertices))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for e in sure:
        a, b = find(edges[e][0]), find(edges[e][1])
        if a != b:
            parent[a] = b
    work = []
    for e, (a, b) in enumerate(edges):
        if e in sure:
            continue
        ra, rb = find(a), find(b)
        if ra != rb:
            work.append((ra, rb, probs[e]))
    s, t = find(s), find(t)
    if s == t:
        return _one_like(probs)
    return _solve(work, s, t, _one_like(probs))


def _one_like(probs):
    for p in probs:
        if isinstance(p, np.ndarray):
            return np.ones_like(p, dtype=float)
    return 1.0


def _solve(edges, s, t, one):
    """edges: list of (a, b, q) with a != b and uncertain q."""
    while True:
        edges = _component_of(edges, s)
        if not any(t in (a, b) for a, b, _ in edges):
            return one * 0.0
        changed = False

        # parallel reduction
        groups = defaultdict(list)
        for a, b, q in edges:
            groups[(min(a, b), max(a, b))].append(q)
        if len(groups) < len(edges):
            changed = True
            edges = []
            for (a, b), qs in groups.items():
                miss = one
                for q in qs:
                    miss = miss * (1 - q)
                edges.append((a, b, 1 - miss))

        # dangling and series reduction
        incident = defaultdict(list)
        for i, (a, b, _) in enumerate(edges):
            incident[a].append(i)
            incident[b].append(i)
        dead = set()
        for v, ids in incident.items():
            if v in (s, t):
                continue
            ids = [i for i in ids if i not in dead]
            if len(ids) == 1:
                dead.add(ids[0])
                changed = True
            elif len(ids) == 2:
                i, j = ids
                a1, b1, q1 = edges[i]
                a2, b2, q2 = edges[j]
                x = b1 if a1 == v else a1
                y = b2 if a2 == v else a2
                if x == y:
                    continue
                dead.update((i, j))
                edges.append((x, y, q1 * q2))
                incident[x].append(len(edges) - 1)
                incident[y].append(len(edges) - 1)
                changed = True
        if dead:
            edges = [ed for i, ed in enumerate(edges) if i not in dead]

        if len(edges) == 1:
            a, b, q = edges[0]
            if {a, b} == {s, t}:
                return q * one
        if not changed:
            break

    # factor on an edge touching s
    k = next(i for i, (a, b, _) in enumerate(edges) if s in (a, b))
    a, b, q = edges[k]
    rest = edges[:k] + edges[k + 1 :]
    deleted = _solve(rest, s, t, one)
    other = b if a == s else a
    if other == t:
        contracted = one
    else:
        merged = []
        for x, y, r in rest:
            x = s if x == other else x
            y = s if y == other else y
            if x != y:
                merged.append((x, y, r))
        contracted = _solve(merged, s, t, one)
    return q * contracted + (1 - q) * deleted


def _component_of(edges, s):
    adj = defaultdict(list)
    for i, (a, b, _) in enumerate(edges):
        adj[a].append(b)
        adj[b].append(a)
    seen = {s}
    stack = [s]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return [ed for ed in edges if ed[0] in seen]
