"""Command-line front end.

Every command writes CSV preceded by ``#`` manifest lines (command, flags,
seed, version, graph digests, output path).  Re-running the same manifest
reproduces the same file.  Exit status: 0 success (or unique transition),
1 non-unique transition, 2 verification failure, 3 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import models as M
from .cycles import RankCapError, config_to_hex, sample_ueg
from .graph import Multigraph, cycle_graph, format_graph, path_graph, read_graph, theta_gadget
from .mcmc import McConfig, fk_heat_bath, loop_sampler
from .suites import SUITES, format_report, run_suite
from .trees import (
    DegenerateCriticalPoint,
    cnd_critical_closed,
    cnd_critical_numeric,
    effective_param,
    regime_scan,
    tree_threshold,
)

OUT_DIR_ENV = "GRAPHREPS_OUT_DIR"

EXIT_OK, EXIT_NONUNIQUE, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2, 3

MODELS = {
    "loop": M.Loop,
    "rc": M.RC,
    "current": M.SingleCurrent,
    "current2": M.DoubleCurrent,
    "bern": M.Bernoulli,
    "forest": M.ArborealGas,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _version() -> str:
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:
        from . import __version__

        return __version__


# ------------------------------------------------------------------- parsing


def parse_gadget(text: str) -> Multigraph:
    """``theta:n,m``, ``cycle:n`` or ``edge``."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "theta":
            n, m = (int(t) for t in rest.split(","))
            return theta_gadget(n, m)
        if kind == "cycle":
            return cycle_graph(int(rest))
        if kind == "edge" and not rest:
            return path_graph(1)
    except ValueError as exc:
        raise UsageError(f"bad gadget {text!r}: {exc}") from None
    raise UsageError(f"bad gadget {text!r}; expected theta:n,m, cycle:n or edge")


def parse_range(text: str) -> list[int]:
    """``4``, ``4..8`` (inclusive) or ``4,6,8``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"bad integer range {text!r}") from None


def _load_graph(args) -> tuple[Multigraph, dict]:
    if getattr(args, "graph", None):
        path = Path(args.graph)
        try:
            data = path.read_bytes()
            g = read_graph(path)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read graph {path}: {exc}") from None
        return g, {str(path): hashlib.sha256(data).hexdigest()}
    spec = args.gadget
    g = parse_gadget(spec)
    return g, {spec: hashlib.sha256(format_graph(g).encode()).hexdigest()}


# -------------------------------------------------------------------- output


def _out_path(args, command: str) -> Path | None:
    if args.out:
        return Path(args.out)
    base = os.environ.get(OUT_DIR_ENV)
    if base:
        return Path(base) / f"{command}.csv"
    return None


def _manifest(command: str, args, digests: dict, out: Path | None) -> str:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    lines = [
        f"command: {command}",
        f"flags: {json.dumps(flags, sort_keys=True)}",
        f"seed: {getattr(args, 'seed', None)}",
        f"version: {_version()}",
        f"graphs: {json.dumps(digests, sort_keys=True)}",
        f"output: {out if out is not None else '-'}",
    ]
    return "".join(f"# {line}\n" for line in lines)


def _emit(command: str, args, digests: dict, header: str, rows, notes=()) -> None:
    out = _out_path(args, command)
    buf = io.StringIO()
    buf.write(_manifest(command, args, digests, out))
    buf.writelines(f"# {line}\n" for line in notes)
    buf.write(header + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    if out is None:
        sys.stdout.write(buf.getvalue())
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(buf.getvalue())


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


# ------------------------------------------------------------------ commands


def cmd_gadget_curve(args) -> int:
    g, digests = _load_graph(args)
    family = MODELS[args.model]
    xs = np.linspace(args.xmin, args.xmax, args.grid)
    try:
        values = np.asarray(effective_param(g, family, xs))
    except (RankCapError, M.EdgeCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit("gadget-curve", args, digests, "x,value", zip(xs, values))
    return EXIT_OK


def cmd_regime(args) -> int:
    g, digests = _load_graph(args)
    threshold = tree_threshold(args.d, args.dilution, args.threshold_convention)
    report = regime_scan(g, MODELS[args.model], args.d, args.dilution, args.grid, args.tol, threshold)
    notes = [
        f"threshold: {threshold!r}",
        f"complement: {json.dumps(report.complement())}",
        f"transition: {'unique' if report.is_unique else 'non-unique'}",
    ]
    _emit("regime", args, digests, "lo,hi", report.intervals, notes)
    return EXIT_OK if report.is_unique else EXIT_NONUNIQUE


def cmd_critical_points(args) -> int:
    rows = []
    for d in parse_range(args.d):
        for n in parse_range(args.n):
            cell, numeric = [], {}
            for name in ("loop", "rc", "double", "single"):
                try:
                    num = cnd_critical_numeric(name, d, n)
                except DegenerateCriticalPoint as exc:
                    cell.append([name, d, n, "NA", "NA", "NA", "", str(exc)])
                    continue
                numeric[name] = num
                if name == "single":
                    cell.append([name, d, n, "NA", num, "NA", "", "no closed form"])
                    continue
                try:
                    closed = cnd_critical_closed(name, d, n)
                    cell.append([name, d, n, closed, num, abs(closed - num), "", ""])
                except DegenerateCriticalPoint as exc:
                    cell.append([name, d, n, "NA", num, "NA", "", str(exc)])
            if len(numeric) == 4:
                ok = numeric["loop"] > numeric["single"] > numeric["double"] > numeric["rc"]
                verdict = "strict" if ok else "violated"
            else:
                verdict = "NA"
            for row in cell:
                row[6] = verdict
            rows += cell
    _emit("critical-points", args, {}, "model,d,n,x_c_closed,x_c_numeric,abs_diff,ordering,reason", rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suite(args.suite, samples=args.samples, seed=args.seed, j=args.j)
    print(format_report(results))
    if args.suite == "halving":
        print(f"p_c(G_{args.j}) = 2^(-2^-{args.j}) = {2.0 ** -(2.0 ** -args.j)!r}")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


def _sample_configs(g: Multigraph, args) -> np.ndarray:
    cfg = McConfig(args.seed, args.stream, args.burnin, args.thin, args.samples)
    model = args.model
    if model == "ueg":
        return sample_ueg(g, cfg.rng(), size=cfg.samples)
    if model == "bern":
        return cfg.rng().random((cfg.samples, g.edge_count)) < args.p
    if model == "forest":
        raise UsageError("no sampler for the arboreal gas; use the exact routines")
    x = args.x
    if model == "rc":
        return fk_heat_bath(g, x, cfg)
    eta = loop_sampler(g, x, cfg)
    if model == "loop":
        return eta
    # the sprinkling gets its own stream so it is independent of the chains
    sprinkle_cfg = McConfig(args.seed, args.stream + 2**31, 0, 0, args.samples)
    if model == "current":
        p = float(M.single_current_sprinkle(x))
        return eta | (sprinkle_cfg.rng().random(eta.shape) < p)
    second = loop_sampler(g, x, McConfig(args.seed, args.stream + 2**30, args.burnin, args.thin, args.samples))
    return eta | second | (sprinkle_cfg.rng().random(eta.shape) < x * x)


def cmd_sample(args) -> int:
    g, digests = _load_graph(args)
    if args.model != "ueg" and args.model != "bern" and args.x is None:
        raise UsageError(f"--x is required for model {args.model}")
    if args.model == "bern" and args.p is None:
        raise UsageError("--p is required for model bern")
    configs = _sample_configs(g, args)
    rows = ((i, config_to_hex(c)) for i, c in enumerate(configs))
    _emit("sample", args, digests, "index,config_hex", rows)
    return EXIT_OK


# -------------------------------------------------------------------- parser


def _unit(text: str) -> float:
    v = float(text)
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graphreps", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=_version())
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def graph_flags(p, default_gadget=None):
        grp = p.add_mutually_exclusive_group(required=default_gadget is None)
        grp.add_argument("--graph", metavar="FILE", help="graph in edge-list text format")
        grp.add_argument("--gadget", default=default_gadget, help="theta:n,m | cycle:n | edge")

    def out_flag(p):
        p.add_argument("--out", metavar="FILE", help=f"output CSV (default: ${OUT_DIR_ENV}/<command>.csv or stdout)")

    p = sub.add_parser("gadget-curve", help="terminal two-point function of a gadget over an x grid")
    graph_flags(p, "theta:12,2")
    p.add_argument("--model", choices=MODELS, default="loop")
    p.add_argument("--grid", type=int, default=501, help="number of grid points")
    p.add_argument("--xmin", type=_unit, default=0.5)
    p.add_argument("--xmax", type=_unit, default=1.0)
    out_flag(p)
    p.set_defaults(func=cmd_gadget_curve)

    p = sub.add_parser("regime", help="percolation regime on the gadget-substituted d-regular tree")
    graph_flags(p, "theta:12,2")
    p.add_argument("--model", choices=MODELS, default="loop")
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--dilution", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--threshold-convention", choices=("dminus1", "dplus1"), default="dminus1")
    out_flag(p)
    p.set_defaults(func=cmd_regime)

    p = sub.add_parser("critical-points", help="critical x on the cycle-substituted tree")
    p.add_argument("--d", default="4..8", help="degree range, e.g. 4..8 or 4,6")
    p.add_argument("--n", default="1", help="half cycle length range")
    out_flag(p)
    p.set_defaults(func=cmd_critical_points)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--samples", type=int, default=None, help="override Monte Carlo sample counts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--j", type=int, default=4, help="number of halvings for the p_c iterate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="dump sampled configurations")
    graph_flags(p)
    p.add_argument("--model", choices=[*MODELS, "ueg"], required=True)
    p.add_argument("--x", type=_unit)
    p.add_argument("--p", type=_unit)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--burnin", type=int, default=1000)
    p.add_argument("--thin", type=int, default=10)
    p.add_argument("--samples", type=int, default=1000)
    out_flag(p)
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"graphreps: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
