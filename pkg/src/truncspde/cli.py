"""Command line front end.

Exit codes: 0 success, 1 a verified inequality failed, 2 invalid
configuration or arguments, 3 I/O failure.
"""

import argparse
import os
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import verify
from .config import error_table_csv, format_float, load_config, scheme_from_name, snapshot_csv
from .drift import IndicatorVariant
from .harness import ConfigError, ExperimentConfig, FitError, fit_order, strong_error_mc
from .schemes import SchemeKind, run_path

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_IO = 3


class _IOFailure(Exception):
    pass


def _write(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc}") from None


def _print_fits(table, schemes):
    for scheme in schemes:
        try:
            fit = fit_order(table, scheme)
        except FitError as exc:
            print(f"{scheme.value}: order fit unavailable ({exc})")
            continue
        print(f"{scheme.value}: slope={fit.slope:.6f} order={fit.order:.6f} r2={fit.r2:.6f}")


def cmd_convergence(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    out = args.out or cfg.output
    if out is None:
        raise ConfigError("no output path: pass --out or set 'output' in the config")
    table = strong_error_mc(cfg, threads=args.threads)
    _write(out, error_table_csv(table))
    _print_fits(table, cfg.schemes)
    return EXIT_OK


def cmd_simulate(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    kind = scheme_from_name(args.scheme)
    if args.N < 1 or cfg.N_ref % args.N:
        raise ConfigError(f"N={args.N} does not divide N_ref={cfg.N_ref}")
    if args.snap_every < 1:
        raise ConfigError("--snap-every must be positive")
    out = args.out or cfg.output
    if out is None:
        raise ConfigError("no output path: pass --out or set 'output' in the config")
    path = run_path(cfg.discretization(args.N), kind, cfg.noise(args.run_index), cfg.initial_coeffs(), args.snap_every)
    _write(out, snapshot_csv(path))
    return EXIT_OK


def cmd_verify(args):
    results = verify.verify_inequalities(only=args.only)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


# Full-size convergence experiment (K=2**10, N_ref=2**20, N up to 2**18).
FIGURE_K_LOG2 = 10
FIGURE_NREF_LOG2 = 20
FIGURE_N_LOG2 = (6, 18)
FIGURE_MC_RUNS = 25
DESK_MC_RUNS = 10
ORDER_LINE_CONSTANT = 0.4


def figure_config(scale=Fraction(1), seed=0, mc_runs=None):
    """Full-size convergence experiment, shrunk by ``scale = 4**-s``.

    Shrinking by ``4**-s`` halves ``K`` ``s`` times, keeps ``N_ref = K**2``,
    lowers the largest coarse ``N`` by ``16**s`` and drops the replica
    count from 25 to 10.  ``scale=1/16``
    gives ``K=256``, ``N_ref=2**16``, ``N = 2**6 .. 2**10``.
    """
    scale = Fraction(scale)
    e = 0
    while scale < 1 and scale.numerator == 1 and scale.denominator % 4 == 0:
        scale *= 4
        e += 1
    if scale != 1:
        raise ConfigError("scale must be 1, 1/4, 1/16 or 1/64")
    n_hi = FIGURE_N_LOG2[1] - 4 * e
    if n_hi < FIGURE_N_LOG2[0]:
        raise ConfigError("scale too small: no coarse step counts remain")
    K = 2 ** (FIGURE_K_LOG2 - e)
    return ExperimentConfig(
        K=K,
        N_ref=K * K,
        N_list=tuple(2**p for p in range(FIGURE_N_LOG2[0], n_hi + 1)),
        mc_runs=mc_runs or (FIGURE_MC_RUNS if e == 0 else DESK_MC_RUNS),
        seed=seed,
        schemes=(SchemeKind.EXP_EULER, SchemeKind.LIN_IMPLICIT),
        indicator_variant=IndicatorVariant.DRIFT,
        chi=Fraction(1, 6),
    )


def order_lines_csv(N_list):
    lines = ["N,order_1_8,order_1_4,order_1_2"]
    for N in N_list:
        vals = (ORDER_LINE_CONSTANT * N ** (-p) for p in (1 / 8, 1 / 4, 1 / 2))
        lines.append(",".join([str(N), *(format_float(v) for v in vals)]))
    return "\n".join(lines) + "\n"


def cmd_reproduce_figure(args):
    try:
        scale = Fraction(args.scale)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad --scale {args.scale!r}") from None
    cfg = figure_config(scale, seed=args.seed or 0, mc_runs=args.mc_runs)
    out = Path(args.out)
    errors_path = out / "errors.csv"
    lines_path = out / "order_lines.csv"
    try:
        out.mkdir(parents=True, exist_ok=True)
        for p in (errors_path, lines_path):
            with open(p, "a"):
                pass
    except OSError as exc:
        raise _IOFailure(f"output directory {out} not writable: {exc}") from None
    print(f"K={cfg.K} N_ref={cfg.N_ref} N={cfg.N_list[0]}..{cfg.N_list[-1]} mc_runs={cfg.mc_runs}")
    _write(lines_path, order_lines_csv(cfg.N_list))
    table = strong_error_mc(cfg, threads=args.threads)
    _write(errors_path, error_table_csv(table))
    _print_fits(table, cfg.schemes)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="truncspde", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    threads = os.cpu_count() or 1

    p = sub.add_parser("convergence", help="coupled Monte Carlo strong errors")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, default=threads)
    p.add_argument("--out")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("simulate", help="spectral snapshots of one path")
    p.add_argument("--config", required=True)
    p.add_argument("--scheme", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--snap-every", type=int, default=1)
    p.add_argument("--run-index", type=int, default=0)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="numerical checks of the operator and drift inequalities")
    p.add_argument("--only", action="append", choices=verify.FAMILIES)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reproduce-figure", help="strong-error table and order lines for the figure")
    p.add_argument("--out", required=True)
    p.add_argument("--scale", default="1")
    p.add_argument("--seed", type=int)
    p.add_argument("--mc-runs", type=int)
    p.add_argument("--threads", type=int, default=threads)
    p.set_defaults(func=cmd_reproduce_figure)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
