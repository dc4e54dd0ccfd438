"""Command-line front end: ``techperf <command> ...``."""
from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

from . import experiments as ex
from .coupled import SimConfig, detect_stagnation


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _g(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "-"
    return f"{x:.4f}" if isinstance(x, float) else str(x)


def _print_table(columns, rows, file=None):
    file = file or sys.stdout
    cells = [[_g(v) for v in r] for r in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    print("  ".join(c.ljust(w) for c, w in zip(columns, widths)), file=file)
    for r in cells:
        print("  ".join(v.ljust(w) for v, w in zip(r, widths)), file=file)


def _spec(args) -> ex.ExperimentSpec:
    spec = ex.load_config(args.config, ex.ExperimentSpec) if args.config else ex.ExperimentSpec()
    spec = ex.parse_assignments(args.set, ex.ExperimentSpec, spec)
    over = {}
    for key in ("n_reps", "base_seed", "n_steps"):
        val = getattr(args, key, None)
        if val is not None:
            over[key] = val
    if getattr(args, "n_basic", None):
        over["n_basic_grid"] = args.n_basic
    if getattr(args, "r", None):
        over["threshold_grid"] = args.r
    return dataclasses.replace(spec, **over) if over else spec


def _cmd_table1(args) -> int:
    spec = _spec(args)
    out = Path(args.out or spec.output_dir)
    rows = ex.cmd_table1(spec, out, workers=args.workers)
    _print_table(ex.TABLE1_COLUMNS, [r.values() for r in rows])
    print(f"wrote {out / 'table1.csv'}")
    return 0


def _cmd_surface(args) -> int:
    spec = _spec(args)
    out = Path(args.out or spec.output_dir)
    rows = ex.cmd_surface(spec, out, workers=args.workers)
    _print_table(ex.SURFACE_COLUMNS, [r.values() for r in rows])
    print(f"wrote {out / 'surface.csv'}")
    return 0


def _cmd_plateau(args) -> int:
    s = ex.cmd_plateau(args.n_basic, args.p, args.steps, args.seed, args.out)
    limit = (1 << args.n_basic) - 1
    print(f"final ioi_c = {s.ioi_c[-1]} (limit {limit}); "
          f"first reached at t = {next((t for t, v in zip(s.t, s.ioi_c) if v == s.ioi_c[-1]))}")
    return 0


def _cmd_run(args) -> int:
    cfg = ex.load_config(args.config, SimConfig) if args.config else SimConfig()
    cfg = ex.parse_assignments(args.set, SimConfig, cfg)
    series, fit = ex.cmd_run(cfg, args.out)
    print(f"K = {fit.slope:.4f}  R^2 = {fit.r_squared:.4f}  final ioi_c = {series.ioi_c[-1]}  "
          f"injections = {series.total_injections}  "
          f"stagnation episodes = {len(detect_stagnation(series))}")
    return 0


def _cmd_fit(args) -> int:
    fit = ex.cmd_fit(args.path)
    print(f"slope = {fit.slope!r}\nintercept = {fit.intercept!r}\n"
          f"r_squared = {fit.r_squared!r}\nn_points = {fit.n_points}")
    return 0


def _cmd_domain_rates(args) -> int:
    report = ex.cmd_domain_rates(args.k, args.path, args.out)
    _print_table(ex.DOMAIN_COLUMNS, [r.values() for r in report.rows])
    for r in report.errors:
        print(f"error in {r.name}: {r.error}", file=sys.stderr)
    if report.ratio is not None:
        print(f"max/min K_J ratio = {report.ratio:.4g}")
    return 0


def _cmd_mcnerney(args) -> int:
    _, expo = ex.cmd_mcnerney(args.components, args.d, args.attempts, args.seed, args.out)
    print(f"fitted cost exponent = {expo:.4f} (expected {-1.0 / args.d:.4f})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="techperf",
                                description="Idea-pool growth simulations and trend fits.")
    sub = p.add_subparsers(dest="command", required=True)

    def grid_args(sp):
        sp.add_argument("--config", help="flat key = value experiment file")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one experiment field (repeatable)")
        sp.add_argument("--reps", dest="n_reps", type=int)
        sp.add_argument("--seed", dest="base_seed", type=int)
        sp.add_argument("--steps", dest="n_steps", type=int)
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("table1", help="replicate the 3x3 growth-rate grid")
    grid_args(sp)
    sp.set_defaults(func=_cmd_table1)

    sp = sub.add_parser("surface", help="mean K over an n_basic x R grid")
    grid_args(sp)
    sp.add_argument("--n-basic", type=_ints, help="comma-separated initial basic counts")
    sp.add_argument("--r", type=_floats, help="comma-separated threshold ratios")
    sp.set_defaults(func=_cmd_surface)

    sp = sub.add_parser("plateau", help="uncoupled pool run up to its combination limit")
    sp.add_argument("--n-basic", type=int, default=10)
    sp.add_argument("--p", type=float, default=0.25)
    sp.add_argument("--steps", type=int, default=400)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_plateau)

    sp = sub.add_parser("run", help="one coupled run")
    sp.add_argument("--config", help="flat key = value SimConfig file")
    sp.add_argument("--set", action="append", metavar="KEY=VALUE")
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_run)

    sp = sub.add_parser("fit", help="exponential fit of a (t, value) or run CSV")
    sp.add_argument("path")
    sp.set_defaults(func=_cmd_fit)

    sp = sub.add_parser("domain-rates", help="per-domain improvement rates")
    sp.add_argument("path", help="CSV with name, a_j, d_j, direction[, b]")
    sp.add_argument("--k", type=float, default=0.118, help="pool growth rate")
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_domain_rates)

    sp = sub.add_parser("mcnerney", help="component-interaction cost improvement run")
    sp.add_argument("--components", type=int, default=100)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--attempts", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_mcnerney)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"techperf {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
