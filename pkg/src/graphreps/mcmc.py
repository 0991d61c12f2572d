"""Monte Carlo validation on finite multigraphs.

Single-bond heat-bath dynamics for FK-Ising (q = 2), loop O(1) samples as
uniform even subgraphs of FK samples, and a few coupling checks.  Chains are
seeded from ``(seed, stream)`` so that every run is reproducible.

Thinned samples are treated as independent when error bars are computed.
That is an approximation; no mixing guarantee is claimed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.stats import chisquare
from statsmodels.stats.proportion import proportion_confint

from .cycles import cycle_basis, gf2_rank, sample_ueg, ueg_edge_marginals
from .graph import Multigraph, arc_chain, connected_components, halve_edges, tree_ball, wired_quotient
from .models import fk_parameter

__all__ = [
    "McConfig",
    "Estimate",
    "CheckResult",
    "estimate",
    "fk_heat_bath",
    "loop_sampler",
    "connects",
    "wired_tree_bound_check",
    "halving_coupling_check",
    "arc_chain_marginal_check",
]

# samples simulated per numba call; bounds the size of the pre-drawn uniforms
_CHUNK_UPDATES = 1 << 22


@dataclass(frozen=True)
class McConfig:
    seed: int = 0
    stream: int = 0
    burn_in: int = 1000
    thinning: int = 10
    samples: int = 1000

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.burn_in < 0 or self.thinning < 0:
            raise ValueError("burn_in and thinning must be non-negative")

    def rng(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.default_rng(ss)


@dataclass(frozen=True)
class Estimate:
    mean: float
    half_width_95: float
    n: int

    @property
    def std_error(self) -> float:
        return float(np.sqrt(self.mean * (1 - self.mean) / self.n))


def estimate(hits) -> Estimate:
    """Proportion of true entries with a 95% Wilson half-width."""
    hits = np.asarray(hits, dtype=bool)
    n = hits.size
    k = int(hits.sum())
    lo, hi = proportion_confint(k, n, alpha=0.05, method="wilson")
    return Estimate(k / n, float(hi - lo) / 2, n)


@dataclass
class CheckResult:
    name: str
    status: str  # "pass", "fail" or "inconclusive"
    margin: float = float("nan")
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status != "fail"


# -------------------------------------------------------------------- kernels


def _csr(g: Multigraph):
    adj = g.adjacency()
    indptr = np.zeros(g.vertex_count + 1, dtype=np.int64)
    for v, nb in enumerate(adj):
        indptr[v + 1] = indptr[v] + len(nb)
    nbr = np.array([w for nb in adj for w, _ in nb], dtype=np.int64)
    eid = np.array([e for nb in adj for _, e in nb], dtype=np.int64)
    return indptr, nbr, eid


@numba.njit(cache=True)
def _connected_off(state, indptr, nbr, eid, skip, s, t, seen, stack, mark):
    # DFS over open edges other than `skip`; `seen[v] == mark` marks visited
    if s == t:
        return True
    seen[s] = mark
    top = 0
    stack[0] = s
    while top >= 0:
        v = stack[top]
        top -= 1
        for k in range(indptr[v], indptr[v + 1]):
            e = eid[k]
            if e == skip or not state[e]:
                continue
            w = nbr[k]
            if seen[w] == mark:
                continue
            if w == t:
                return True
            seen[w] = mark
            top += 1
            stack[top] = w
    return False


@numba.njit(cache=True)
def _heat_bath(state, ends, indptr, nbr, eid, p_on, p_off, u, n_burn, stride, out, seen, stack, mark0):
    """Run ``n_burn`` updates, then ``stride`` updates per output row.
    ``u`` holds two uniforms per update (edge choice, acceptance)."""
    E = ends.shape[0]
    mark = mark0
    k = 0
    total = n_burn + stride * out.shape[0]
    row = 0
    for step in range(total):
        e = min(int(u[k] * E), E - 1)
        r = u[k + 1]
        k += 2
        mark += 1
        if _connected_off(state, indptr, nbr, eid, e, ends[e, 0], ends[e, 1], seen, stack, mark):
            state[e] = r < p_on
        else:
            state[e] = r < p_off
        done = step + 1 - n_burn
        if done > 0 and done % stride == 0:
            out[row, :] = state
            row += 1
    return mark


@numba.njit(cache=True)
def _ueg_rows(configs, ends, indptr, nbr, eid, coins):
    """Uniform even subgraph of each row of ``configs``: fair coins on the
    non-forest open edges, forest edges fixed by peeling parities."""
    S, E = configs.shape
    V = indptr.shape[0] - 1
    out = np.zeros((S, E), dtype=np.bool_)
    parent = np.empty(V, dtype=np.int64)
    pedge = np.empty(V, dtype=np.int64)
    order = np.empty(V, dtype=np.int64)
    parity = np.empty(V, dtype=np.int64)
    tree = np.empty(E, dtype=np.bool_)
    for s in range(S):
        omega = configs[s]
        parent[:] = -1
        pedge[:] = -1
        tree[:] = False
        seen = np.zeros(V, dtype=np.bool_)
        n = 0
        for root in range(V):
            if seen[root]:
                continue
            seen[root] = True
            order[n] = root
            head = n
            n += 1
            while head < n:
                v = order[head]
                head += 1
                for k in range(indptr[v], indptr[v + 1]):
                    e = eid[k]
                    w = nbr[k]
                    if omega[e] and not seen[w]:
                        seen[w] = True
                        parent[w] = v
                        pedge[w] = e
                        tree[e] = True
                        order[n] = w
                        n += 1
        parity[:] = 0
        for e in range(E):
            if omega[e] and not tree[e] and coins[s, e] < 0.5:
                out[s, e] = True
                parity[ends[e, 0]] ^= 1
                parity[ends[e, 1]] ^= 1
        for i in range(V - 1, -1, -1):
            v = order[i]
            if parity[v] and pedge[v] >= 0:
                out[s, pedge[v]] = True
                parity[v] = 0
                parity[parent[v]] ^= 1
    return out


# -------------------------------------------------------------------- samplers


def _fk_chain(g: Multigraph, p: float, cfg: McConfig, rng: np.random.Generator) -> np.ndarray:
    E = g.edge_count
    out = np.zeros((cfg.samples, E), dtype=bool)
    if E == 0:
        return out
    indptr, nbr, eid = _csr(g)
    ends = g.endpoints.astype(np.int64)
    p_off = p / (p + 2 * (1 - p)) if p < 1 else 1.0
    stride = max(1, cfg.thinning) * E
    state = np.zeros(E, dtype=np.bool_)
    seen = np.zeros(g.vertex_count, dtype=np.int64)
    stack = np.zeros(g.vertex_count + 1, dtype=np.int64)
    mark = 0
    burn = cfg.burn_in * E
    while burn > 0:
        n = min(burn, _CHUNK_UPDATES)
        u = rng.random(2 * n)
        mark = _heat_bath(state, ends, indptr, nbr, eid, p, p_off, u, n, 1, out[:0], seen, stack, mark)
        burn -= n
    per_chunk = max(1, _CHUNK_UPDATES // stride)
    for lo in range(0, cfg.samples, per_chunk):
        hi = min(cfg.samples, lo + per_chunk)
        u = rng.random(2 * stride * (hi - lo))
        mark = _heat_bath(state, ends, indptr, nbr, eid, p, p_off, u, 0, stride, out[lo:hi], seen, stack, mark)
    return out


def fk_heat_bath(g: Multigraph, x: float, cfg: McConfig) -> np.ndarray:
    """FK-Ising samples (q = 2, p = 2x/(1+x)) as a ``(samples, E)`` bool array.

    One sweep is |E| updates of uniformly chosen edges.  The chain starts
    all-closed, runs ``burn_in`` sweeps, then records one sample every
    ``max(1, thinning)`` sweeps.  For wired boundary conditions pass
    ``wired_quotient(g)``.
    """
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    return _fk_chain(g, float(fk_parameter(x)), cfg, cfg.rng())


def _ueg_of_rows(g: Multigraph, configs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    if g.edge_count == 0:
        return configs.copy()
    indptr, nbr, eid = _csr(g)
    coins = rng.random(configs.shape)
    return _ueg_rows(configs, g.endpoints.astype(np.int64), indptr, nbr, eid, coins)


def loop_sampler(g: Multigraph, x: float, cfg: McConfig, return_fk: bool = False):
    """Loop O(1) samples: a uniform even subgraph of each FK sample.

    The UEG coins come from the same generator after the FK chain has been
    drawn, so the pair (FK, loop) is reproducible from ``cfg``.
    """
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    rng = cfg.rng()
    omega = _fk_chain(g, float(fk_parameter(x)), cfg, rng)
    eta = _ueg_of_rows(g, omega, rng)
    return (eta, omega) if return_fk else eta


def connects(g: Multigraph, configs: np.ndarray, u: int, v: int, skip: int = -1) -> np.ndarray:
    """For each row, whether u and v are joined by open edges other than ``skip``."""
    configs = np.atleast_2d(np.asarray(configs, dtype=np.bool_))
    indptr, nbr, eid = _csr(g)
    return _connects_rows(configs, indptr, nbr, eid, skip, u, v)


@numba.njit(cache=True)
def _connects_rows(configs, indptr, nbr, eid, skip, s, t):
    V = indptr.shape[0] - 1
    seen = np.zeros(V, dtype=np.int64)
    stack = np.zeros(V + 1, dtype=np.int64)
    out = np.zeros(configs.shape[0], dtype=np.bool_)
    for i in range(configs.shape[0]):
        out[i] = _connected_off(configs[i], indptr, nbr, eid, skip, s, t, seen, stack, i + 1)
    return out


# ---------------------------------------------------------------------- checks


def wired_tree_bound_check(d: int, radius: int, x: float, cfg: McConfig) -> CheckResult:
    """Finite-volume check of ``lambda >= (x/2) theta^2`` on the wired ball.

    theta: FK probability that a depth-1 vertex reaches the ghost without its
    parent edge.  lambda: loop probability that the root reaches the ghost.
    The check passes when lambda_hat >= (x/2) theta_hat^2 - 3 SE, with SE
    combining both binomial errors.  It is inconclusive when theta_hat is
    within 3 standard errors of 0.
    """
    if d < 3 or radius < 3:
        raise ValueError("need d >= 3 and radius >= 3")
    w = wired_quotient(tree_ball(d, radius))
    ghost = w.vertex_count - 1
    parent_edge = next(e for e, (a, b) in enumerate(w.edges) if {a, b} == {0, 1})
    eta, omega = loop_sampler(w, x, cfg, return_fk=True)
    theta = estimate(connects(w, omega, 1, ghost, skip=parent_edge))
    lam = estimate(connects(w, eta, 0, ghost))
    bound = 0.5 * x * theta.mean**2
    se = float(np.hypot(lam.std_error, x * theta.mean * theta.std_error))
    margin = lam.mean - (bound - 3 * se)
    details = {
        "theta_hat": theta.mean,
        "lambda_hat": lam.mean,
        "bound": bound,
        "combined_se": se,
        "samples": cfg.samples,
    }
    if theta.mean - 3 * theta.std_error <= 0:
        return CheckResult("wired_tree_bound", "inconclusive", margin, details)
    return CheckResult("wired_tree_bound", "pass" if margin >= 0 else "fail", margin, details)


def halving_coupling_check(g: Multigraph, p: float, cfg: McConfig) -> CheckResult:
    """Sample Bernoulli(p) on the halved graph, keep an original edge when
    both halves are open, and compare connectivity of every pair of original
    vertices.  Any disagreement fails the check."""
    if g.has_self_loops():
        raise ValueError("halving coupling needs a graph without self-loops")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    half, edge_map = halve_edges(g)
    rng = cfg.rng()
    V = g.vertex_count
    violations = 0
    for _ in range(cfg.samples):
        omega_half = rng.random(half.edge_count) < p
        omega = omega_half[edge_map[:, 0]] & omega_half[edge_map[:, 1]]
        _, lab = connected_components(g, omega)
        _, lab_half = connected_components(half, omega_half)
        lab_half = lab_half[:V]
        same = lab[:, None] == lab[None, :]
        same_half = lab_half[:, None] == lab_half[None, :]
        if not np.array_equal(same, same_half):
            violations += 1
    status = "pass" if violations == 0 else "fail"
    return CheckResult("halving_coupling", status, float(-violations), {"violations": violations, "samples": cfg.samples})


def arc_chain_marginal_check(N: int, cfg: McConfig, alpha: float = 1e-3) -> CheckResult:
    """The UEG of ``arc_chain(N)`` restricted to the arcs is uniform on
    ``{0,1}^N``: exactly when the basis projected onto the arcs has rank N,
    corroborated by a chi-square test on ``cfg.samples`` exact UEG draws."""
    if N < 2:
        raise ValueError("N must be at least 2")
    g = arc_chain(N)
    arcs = np.array([e for e, lab in enumerate(g.labels) if lab == "arc"])
    arc_mask = sum(1 << int(e) for e in arcs)
    rank = gf2_rank(m & arc_mask for m in cycle_basis(g).masks)
    marginals = ueg_edge_marginals(g)
    draws = sample_ueg(g, cfg.rng(), size=cfg.samples)[:, arcs]
    cells = draws.astype(np.int64) @ (1 << np.arange(N, dtype=np.int64))
    counts = np.bincount(cells, minlength=1 << N)
    pvalue = float(chisquare(counts).pvalue)
    ok = rank == N and np.all(marginals == 0.5)
    details = {"projected_rank": rank, "chi2_pvalue": pvalue, "samples": cfg.samples}
    if not ok:
        return CheckResult("arc_chain_marginal", "fail", float(rank - N), details)
    return CheckResult("arc_chain_marginal", "pass" if pvalue > alpha else "fail", pvalue - alpha, details)
