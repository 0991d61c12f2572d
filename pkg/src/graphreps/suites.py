"""Verification suites run by ``graphreps verify``.

Each suite returns a list of :class:`~graphreps.mcmc.CheckResult`.  A
check's ``margin`` is positive when it passes, so reports show how close a
quantity came to its tolerance.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter

import numpy as np
from scipy.stats import chisquare

from . import models as M
from .cycles import cycle_basis, even_masks, halving_iso, halving_iso_inverse, is_even, mask_to_config, sample_ueg
from .fixtures import load_fixtures
from .graph import Multigraph, complete_graph, connected_components, halve_edges, theta_gadget
from .mcmc import (
    CheckResult,
    McConfig,
    arc_chain_marginal_check,
    fk_heat_bath,
    halving_coupling_check,
    loop_sampler,
    wired_tree_bound_check,
)
from .reliability import two_terminal_reliability
from .trees import (
    cnd_critical_closed,
    cnd_critical_numeric,
    gw_survival,
    gw_survival_truncated,
    halving_pc_iterate,
    theta_loop_two_point,
)

__all__ = ["SUITES", "run_suite", "format_report"]


def _check(name, margin, **details) -> CheckResult:
    return CheckResult(name, "pass" if margin >= 0 else "fail", float(margin), details)


def _tol_check(name, error, tol, **details) -> CheckResult:
    return _check(name, tol - error, error=float(error), tol=tol, **details)


def _empirical(configs: np.ndarray) -> np.ndarray:
    E = configs.shape[1]
    idx = configs.astype(np.int64) @ (1 << np.arange(E, dtype=np.int64))
    return np.bincount(idx, minlength=1 << E) / len(idx)


# ---------------------------------------------------------------------- exact


def check_nonmonotone() -> list[CheckResult]:
    g = theta_gadget(12, 2)
    a, b = g.terminals
    xs = np.linspace(0.5, 1.0, 501)
    exact = M.loop_two_point(g, xs, a, b)
    err = float(np.abs(exact - theta_loop_two_point(12, 2, xs)).max())
    v85 = float(M.loop_two_point(g, 0.85, a, b))
    v965 = float(M.loop_two_point(g, 0.965, a, b))
    return [
        _check("theta(12,2) f(0.85) >= 0.27", v85 - 0.27, value=v85),
        _check("theta(12,2) f(0.965) <= 0.245", 0.245 - v965, value=v965),
        _tol_check("theta(12,2) enumeration vs closed formula", err, 1e-12),
    ]


def check_theta_table(sizes=((2, 1), (3, 2), (12, 2))) -> list[CheckResult]:
    out = []
    for n, m in sizes:
        g = theta_gadget(n, m)
        a, b = g.terminals
        masks = [int(k) for k in even_masks(g)]
        counts = sorted(bin(k).count("1") for k in masks)
        joins = sum(M._mask_connects(g, k, a, b) for k in masks)
        want = sorted([0, 2 * n, 2 * m, n + m, n + m, n + m, n + m, 2 * n + 2 * m])
        ok = len(masks) == 8 and counts == want and joins == 2
        out.append(CheckResult(f"theta({n},{m}) even-subgraph table", "pass" if ok else "fail", 0.0 if ok else -1.0,
                               {"sizes": counts, "connecting": joins}))
    return out


def check_critical_points(ds=range(4, 9), ns=range(1, 5), tol=1e-9) -> list[CheckResult]:
    worst, order_ok = 0.0, True
    for d in ds:
        for n in ns:
            xc = {}
            for model in ("loop", "rc", "double"):
                closed = cnd_critical_closed(model, d, n)
                xc[model] = cnd_critical_numeric(model, d, n)
                worst = max(worst, abs(closed - xc[model]))
            xc["single"] = cnd_critical_numeric("single", d, n)
            order_ok &= xc["loop"] > xc["single"] > xc["double"] > xc["rc"]
    return [
        _tol_check("cycle-tree critical points: closed vs bisection", worst, tol),
        CheckResult("cycle-tree ordering loop > single > double > rc", "pass" if order_ok else "fail", 0.0),
    ]


def check_two_point_identity(graphs: dict[str, Multigraph], xs=(0.3, 0.6, 0.9), tol=1e-10) -> list[CheckResult]:
    """FK two-point squared equals the double-current two-point."""
    out = []
    for name, g in graphs.items():
        worst = 0.0
        for x in xs:
            for u, v in itertools.combinations(range(g.vertex_count), 2):
                phi = M.rc_oracle_two_point(g, x, u, v)
                dbl = M.model_distribution(g, M.DoubleCurrent(x)).probability(M.connection_table(g, u, v))
                worst = max(worst, abs(phi**2 - dbl))
        out.append(_tol_check(f"{name}: phi[u<->v]^2 = double current", worst, tol))
    return out


def check_rc_coupling(graphs: dict[str, Multigraph], xs=(0.25, 0.5, 0.75), tol=1e-10) -> list[CheckResult]:
    out = []
    for name, g in graphs.items():
        worst = max(
            M.tv_distance(M.model_distribution(g, M.RC(x)), M.fk_distribution(g, M.fk_parameter(x))) for x in xs
        )
        out.append(_tol_check(f"{name}: TV(loop u Bernoulli, FK)", worst, tol))
    g = next(iter(graphs.values()))
    fit_err = max(abs(M.fit_fk_parameter(g, x) - float(M.fk_parameter(x))) for x in xs)
    out.append(_tol_check("recovered FK parameter = 2x/(1+x)", fit_err, 1e-6))
    return out


def check_factorisation(graphs: dict[str, Multigraph], tol=1e-12) -> list[CheckResult]:
    specs = [M.Loop(0.6), M.SingleCurrent(0.6), M.DoubleCurrent(0.6), M.RC(0.6), M.ArborealGas(0.8)]
    out = []
    for name, g in graphs.items():
        worst = max(M.factorisation_check(g, s) for s in specs)
        out.append(_tol_check(f"{name}: block factorisation", worst, tol))
    return out


def check_galton_watson(tol=1e-9) -> list[CheckResult]:
    worst = 0.0
    below_ok = True
    for d in (3, 4, 5, 6):
        below_ok &= gw_survival(d, 1 / (d - 1)).survival == 0.0
        below_ok &= gw_survival(d, 0.5 / (d - 1)).survival == 0.0
        for p in np.linspace(1.2 / (d - 1), 1.0, 5):
            exact = gw_survival(d, p).survival
            worst = max(worst, abs(exact - gw_survival_truncated(d, p, 4000)))
    one = gw_survival(4, 1.0).survival
    return [
        CheckResult("GW survival zero at and below 1/(d-1)", "pass" if below_ok else "fail", 0.0),
        _check("GW survival(1) = 1", 0.0 if one == 1.0 else -abs(1 - one), value=one),
        _tol_check("GW fixed point vs depth recursion", worst, tol),
    ]


def suite_exact(**_) -> list[CheckResult]:
    fx = load_fixtures()
    out = check_nonmonotone() + check_theta_table() + check_critical_points()
    out += check_two_point_identity({k: fx[k] for k in ("triangle", "c4", "k4", "theta_2_2")})
    out += check_rc_coupling({k: fx[k] for k in ("triangle", "c4", "theta_2_1")})
    out += check_factorisation({k: fx[k] for k in ("glued_triangles", "block_chain")})
    out += check_galton_watson()
    return out


# ------------------------------------------------------------------- sampling


def check_ueg(seed=0, draws=100_000) -> list[CheckResult]:
    fx = load_fixtures()
    g = fx["loopy"]
    bridge = g.edge_count - 1
    samples = sample_ueg(g, McConfig(seed=seed).rng(), size=draws)
    freq = samples.mean(axis=0)
    sigma = math.sqrt(0.25 / draws)
    cyc_dev = float(np.abs(freq[:bridge] - 0.5).max())
    out = [
        _check("UEG bridge marginal is exactly 0", 0.0 if freq[bridge] == 0 else -freq[bridge]),
        _check("UEG cyclic marginals 1/2 within 4 sigma", 4 * sigma - cyc_dev, deviation=cyc_dev, sigma=sigma),
    ]
    k4 = complete_graph(4)
    draws_k4 = sample_ueg(k4, McConfig(seed=seed, stream=1).rng(), size=draws)
    keys = Counter(draws_k4.astype(np.int64) @ (1 << np.arange(6)))
    support = {int(m) for m in even_masks(k4)}
    counts = [keys.get(m, 0) for m in sorted(support)]
    stray = sum(c for m, c in keys.items() if m not in support)
    pvalue = float(chisquare(counts).pvalue)
    out.append(_check("UEG chi-square uniform on even subgraphs of K4", pvalue - 1e-3 if stray == 0 else -1.0,
                      pvalue=pvalue, outside_support=stray))
    return out


def check_heat_bath(graphs: dict[str, Multigraph], xs=(0.3, 0.7), samples=10**6, seed=0, tol=0.01) -> list[CheckResult]:
    out = []
    for name, g in graphs.items():
        worst = 0.0
        for i, x in enumerate(xs):
            cfg = McConfig(seed=seed, stream=i, burn_in=1000, thinning=1, samples=samples)
            emp = _empirical(fk_heat_bath(g, x, cfg))
            worst = max(worst, 0.5 * float(np.abs(emp - M.fk_distribution(g, M.fk_parameter(x)).probs).sum()))
        out.append(_tol_check(f"{name}: heat-bath TV to FK oracle", worst, tol, samples=samples))
    return out


def check_loop_sampler(samples=100_000, seed=0) -> list[CheckResult]:
    fx = load_fixtures()
    tri = fx["triangle"]
    cfg = McConfig(seed=seed, thinning=1, samples=samples)
    emp = _empirical(loop_sampler(tri, 0.5, cfg))
    tv = 0.5 * float(np.abs(emp - M.loop_distribution(tri, 0.5).probs).sum())
    return [_tol_check("triangle: loop sampler TV to exact", tv, 0.01, samples=samples)]


def suite_sampling(samples: int | None = None, seed: int = 0, **_) -> list[CheckResult]:
    fx = load_fixtures()
    small = {k: g for k, g in fx.items() if g.edge_count <= 8}
    out = check_ueg(seed)
    out += check_heat_bath(small, samples=samples or 10**6, seed=seed)
    out += check_loop_sampler(seed=seed)
    out.append(halving_coupling_check(complete_graph(4), 0.5, McConfig(seed=seed, samples=10_000)))
    out.append(arc_chain_marginal_check(5, McConfig(seed=seed, samples=100_000)))
    return out


# -------------------------------------------------------------------- halving


def _vertex_partition(g: Multigraph, config, n_original: int) -> np.ndarray:
    _, lab = connected_components(g, np.asarray(config, dtype=bool))
    lab = lab[:n_original]
    return lab[:, None] == lab[None, :]


def check_halving_iso(graphs: dict[str, Multigraph]) -> list[CheckResult]:
    out = []
    for name, g in graphs.items():
        half, emap = halve_edges(g)
        bad = 0
        images = set()
        for m in even_masks(half):
            eta_half = mask_to_config(int(m), half.edge_count)
            eta = halving_iso(half, emap, eta_half)
            images.add(eta.tobytes())
            if not is_even(g, eta) or not np.array_equal(halving_iso_inverse(emap, eta), eta_half):
                bad += 1
            elif not np.array_equal(_vertex_partition(g, eta, g.vertex_count),
                                    _vertex_partition(half, eta_half, g.vertex_count)):
                bad += 1
        bijective = len(images) == 2 ** cycle_basis(g).rank == 2 ** cycle_basis(half).rank
        ok = bad == 0 and bijective
        out.append(CheckResult(f"{name}: halving isomorphism round-trip", "pass" if ok else "fail",
                               float(-bad), {"even_subgraphs": len(images)}))
    return out


def check_halving_law(graphs: dict[str, Multigraph], ps=(0.2, 0.5, 0.8), tol=1e-12) -> list[CheckResult]:
    out = []
    for name, g in graphs.items():
        half, _ = halve_edges(g)
        worst = 0.0
        for p in ps:
            for u, v in itertools.combinations(range(g.vertex_count), 2):
                lhs = two_terminal_reliability(half.vertex_count, half.edges, p, u, v)
                rhs = two_terminal_reliability(g.vertex_count, g.edges, p * p, u, v)
                worst = max(worst, abs(lhs - rhs))
        out.append(_tol_check(f"{name}: P_p(halved)[u<->v] = P_p^2[u<->v]", worst, tol))
    return out


def check_halving_iterate(j: int = 4) -> list[CheckResult]:
    value = halving_pc_iterate(0.5, j)
    out = [_tol_check(f"p_c after {j} halvings = 2^(-2^-{j})", abs(value - 2.0 ** -(2.0**-j)), 1e-15, value=value)]
    for eps in (0.1, 0.01):
        j0 = math.ceil(math.log2(math.log(2) / eps))
        worst = min(halving_pc_iterate(0.5, jj) - (1 - eps) for jj in range(j0, j0 + 20))
        out.append(_check(f"p_c iterate exceeds 1 - {eps} from j = {j0}", worst, j0=j0))
    return out


def suite_halving(j: int = 4, seed: int = 0, **_) -> list[CheckResult]:
    fx = load_fixtures()
    out = check_halving_iso({"k4": fx["k4"], "theta_2_2": fx["theta_2_2"]})
    out += check_halving_law({k: g for k, g in fx.items() if g.edge_count <= 10})
    out.append(halving_coupling_check(fx["k4"], 0.5, McConfig(seed=seed, samples=10_000)))
    out += check_halving_iterate(j)
    return out


# ---------------------------------------------------------------------- wired


def suite_wired(samples: int | None = None, seed: int = 0, **_) -> list[CheckResult]:
    out = []
    for i, x in enumerate((0.7, 0.9)):
        cfg = McConfig(seed=seed, stream=i, samples=samples or 10_000)
        res = wired_tree_bound_check(3, 5, x, cfg)
        res.name = f"wired ball d=3 r=5 x={x}: loop bound"
        out.append(res)
    return out


SUITES = {
    "exact": suite_exact,
    "sampling": suite_sampling,
    "halving": suite_halving,
    "wired": suite_wired,
}


def run_suite(name: str, **kw) -> list[CheckResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name](**kw)


def format_report(results: list[CheckResult]) -> str:
    lines = []
    for r in results:
        extra = " ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in r.details.items())
        lines.append(f"{r.status.upper():13s} {r.name}  margin={r.margin:.3g}  {extra}".rstrip())
    return "\n".join(lines)
