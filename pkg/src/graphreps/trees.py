"""Percolation on trees with every edge replaced by a gadget.

By cut-point factorisation, a model on the substituted tree projects onto
Bernoulli percolation of the base tree with parameter ``f(x)``, the gadget's
terminal-to-terminal connection probability.  Percolation then reduces to a
Galton-Watson survival question with threshold ``1 / (d - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .graph import Multigraph
from .models import (
    RC,
    DoubleCurrent,
    Loop,
    ModelSpec,
    SingleCurrent,
    model_two_point,
    single_current_sprinkle,
)

__all__ = [
    "GWResult",
    "RegimeReport",
    "DegenerateCriticalPoint",
    "tree_threshold",
    "gw_survival",
    "gw_survival_truncated",
    "effective_param",
    "regime_scan",
    "cycle_two_point",
    "theta_loop_two_point",
    "cnd_critical_closed",
    "cnd_critical_numeric",
    "halving_pc",
    "halving_pc_iterate",
]


class DegenerateCriticalPoint(ValueError):
    """The closed form leaves (0, 1) for this (model, d)."""


@dataclass(frozen=True)
class GWResult:
    survival: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class RegimeReport:
    """Maximal open subintervals of (0, 1) on which ``f(x) > threshold``."""

    intervals: tuple[tuple[float, float], ...]
    threshold: float
    boundary_tolerance: float

    @property
    def boundaries(self) -> list[float]:
        return [b for lo, hi in self.intervals for b in (lo, hi) if 0.0 < b < 1.0]

    def complement(self) -> list[tuple[float, float]]:
        """Components of (0, 1) minus the regime, as (lo, hi) pairs."""
        out, cur = [], 0.0
        for lo, hi in self.intervals:
            if lo > cur:
                out.append((cur, lo))
            cur = hi
        if cur < 1.0:
            out.append((cur, 1.0))
        return out

    @property
    def is_unique(self) -> bool:
        return len(self.intervals) <= 1 and len(self.complement()) <= 1


def tree_threshold(d: int, dilution: float = 1.0, convention: str = "dminus1") -> float:
    """Bernoulli critical point of the (diluted) d-regular tree.

    ``convention="dplus1"`` uses ``1 / (d + 1)`` instead of ``1 / (d - 1)``.
    """
    if convention == "dminus1":
        base = d - 1
    elif convention == "dplus1":
        base = d + 1
    else:
        raise ValueError(f"unknown threshold convention {convention!r}")
    if base <= 0 or not 0 < dilution <= 1:
        raise ValueError("need d > 1 and dilution in (0, 1]")
    return 1.0 / (dilution * base)


def gw_survival(d: int, p: float, tol: float = 1e-14, max_iter: int = 10**6) -> GWResult:
    """Probability that the root cluster of Bernoulli(p) on the d-regular
    tree is infinite.

    The extinction probability of a Binomial(d-1, p) branching process is the
    least fixed point of ``e = (1 - p + p e)**(d - 1)``, reached by monotone
    iteration from 0.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if p * (d - 1) <= 1:
        return GWResult(0.0, 0, True)
    e = 0.0
    for it in range(1, max_iter + 1):
        nxt = (1 - p + p * e) ** (d - 1)
        if abs(nxt - e) < tol:
            e = nxt
            return GWResult(1 - (1 - p + p * e) ** d, it, True)
        e = nxt
    return GWResult(1 - (1 - p + p * e) ** d, max_iter, False)


def gw_survival_truncated(d: int, p: float, depth: int) -> float:
    """Probability that the root reaches distance ``depth`` (finite-depth
    recursion; decreases to :func:`gw_survival` as depth grows)."""
    theta = 1.0
    for _ in range(depth - 1):
        theta = 1 - (1 - p * theta) ** (d - 1)
    return 1 - (1 - p * theta) ** d


def effective_param(gadget: Multigraph, family, x, **kw):
    """Terminal-to-terminal connection probability ``f(x)`` of ``gadget``
    under ``family(x)`` (a ModelSpec class or any callable returning one)."""
    if gadget.terminals is None:
        raise ValueError("gadget has no terminals")
    a, b = gadget.terminals
    return model_two_point(gadget, family(x), a, b, **kw)


def _refine(pred, lo, hi, tol):
    """Bisection for the switch point of a predicate with pred(lo) != pred(hi)."""
    plo = pred(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid) == plo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def regime_scan(
    gadget: Multigraph,
    family,
    d: int,
    dilution: float = 1.0,
    grid: int = 10_000,
    tol: float = 1e-9,
    threshold: float | None = None,
) -> RegimeReport:
    """Percolation regime of ``family`` on the d-regular tree (optionally
    diluted) with every edge replaced by ``gadget``.

    ``f`` is evaluated on a uniform grid of (0, 1); each change of the
    strict predicate ``f(x) > threshold`` is refined by bisection to ``tol``.
    Exact ties count as non-percolating.
    """
    if threshold is None:
        threshold = tree_threshold(d, dilution)
    xs = np.linspace(0.0, 1.0, grid + 1)[1:-1]

    def f(x):
        return effective_param(gadget, family, x)

    above = np.asarray(f(xs)) > threshold

    def pred(x):
        return bool(f(x) > threshold)

    intervals = []
    start = 0.0 if above[0] else None
    for i in range(1, xs.size):
        if above[i] == above[i - 1]:
            continue
        edge = _refine(pred, float(xs[i - 1]), float(xs[i]), tol)
        if above[i]:
            start = edge
        else:
            intervals.append((start, edge))
            start = None
    if start is not None:
        intervals.append((start, 1.0))
    return RegimeReport(tuple(intervals), threshold, tol)


# ----------------------------------------------------- cycle-substituted trees


def cycle_two_point(model: str, x, n: int):
    """Antipodal connection probability on the cycle of length 2n."""
    x = np.asarray(x, dtype=float)
    z = x ** (2 * n)
    if model == "loop":
        return z / (1 + z)
    if model in ("rc", "single"):
        p = x if model == "rc" else single_current_sprinkle(x)
        return (z + 2 * p**n - p ** (2 * n)) / (1 + z)
    if model == "double":
        p = x**2
        return (2 * z + z**2 + 2 * p**n - p ** (2 * n)) / (1 + z) ** 2
    raise ValueError(f"unknown model {model!r}")


def theta_loop_two_point(n: int, m: int, x):
    """Loop O(1) terminal two-point function of the theta gadget with
    terminals inside the inner paths: of its 8 even subgraphs only the inner
    cycle and the whole graph join the terminals."""
    x = np.asarray(x, dtype=float)
    num = x ** (2 * m) + x ** (2 * n + 2 * m)
    return num / (1 + x ** (2 * n) + num + 4 * x ** (n + m))


_MODEL_NAMES = {Loop: "loop", RC: "rc", SingleCurrent: "single", DoubleCurrent: "double"}


def _model_name(model) -> str:
    if isinstance(model, str):
        name = model.lower()
    elif isinstance(model, type) and model in _MODEL_NAMES:
        name = _MODEL_NAMES[model]
    elif isinstance(model, ModelSpec) and type(model) in _MODEL_NAMES:
        name = _MODEL_NAMES[type(model)]
    else:
        raise ValueError(f"unsupported model {model!r}")
    if name not in ("loop", "rc", "single", "double"):
        raise ValueError(f"unsupported model {model!r}")
    return name


def cnd_critical_closed(model, d: int, n: int) -> float:
    """Closed-form critical point of the free model on the d-regular tree
    with every edge replaced by a cycle of length 2n."""
    name = _model_name(model)
    if n < 1:
        raise ValueError("n must be at least 1")
    if name == "loop":
        if d <= 3:
            raise DegenerateCriticalPoint(f"loop needs d >= 4 (d = {d} gives no critical point in (0, 1))")
        return (d - 2) ** (-1 / (2 * n))
    if name == "rc":
        if d <= 2:
            raise DegenerateCriticalPoint(f"rc needs d >= 3 (d = {d} gives x_c = 1)")
        k = d - 1
        return (k - math.sqrt(k * k - 1)) ** (1 / n)
    if name == "double":
        # root of z^2 - (4d - 6) z + 1 = 0 with z = x^(2n)
        if d <= 2:
            raise DegenerateCriticalPoint(f"double current needs d >= 3 (d = {d} gives x_c = 1)")
        k = 2 * d - 3
        return (k - math.sqrt(k * k - 1)) ** (1 / (2 * n))
    raise DegenerateCriticalPoint("single current has no closed form")


def cnd_critical_numeric(model, d: int, n: int, tol: float = 1e-12) -> float:
    """Root of ``f(x) = 1 / (d - 1)`` by bisection, ``f`` the cycle two-point
    function (increasing in x for all four models)."""
    name = _model_name(model)
    t = tree_threshold(d)

    def g(x):
        return float(cycle_two_point(name, x, n)) - t

    if not g(0.0) < 0 < g(1.0):
        raise DegenerateCriticalPoint(f"threshold {t} not bracketed by f on [0, 1] for {name}, d={d}")
    return float(bisect(g, 0.0, 1.0, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200))


def halving_pc(p_c_base: float) -> float:
    """Bernoulli critical point after subdividing every edge once."""
    if not 0 <= p_c_base <= 1:
        raise ValueError("p must lie in [0, 1]")
    return math.sqrt(p_c_base)


def halving_pc_iterate(p0: float, j: int) -> float:
    if not 0 <= p0 <= 1:
        raise ValueError("p must lie in [0, 1]")
    return p0 ** (2.0**-j)
