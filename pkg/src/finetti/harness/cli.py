"""Command-line interface: ``finetti {compute,study,simulate,verify}``.

Exit codes: 0 success, 1 verification failure, 2 validation error, 3 I/O error.
Diagnostics go to stderr, their verbosity set by ``FINETTI_LOG``
(error, warn, info, debug).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import List, Optional

from ..markov import CostGuardError, NumericMode, monte_carlo_m
from ..params import DomainError, instantiate
from . import verify as verify_mod
from .study import (DEFAULT_SEED, DEFAULT_TRIALS, METHODS, StudyConfig, compute_record,
                    fmt_float, resolve_params, run_study, write_csv)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("finetti")

_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "warning": logging.WARNING,
           "info": logging.INFO, "debug": logging.DEBUG}


class UsageError(Exception):
    pass


def setup_logging() -> None:
    level = _LEVELS.get(os.environ.get("FINETTI_LOG", "warn").lower(), logging.WARNING)
    root = logging.getLogger("finetti")
    root.handlers[:] = []
    h = logging.StreamHandler(sys.stderr)
    h.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    root.addHandler(h)
    root.setLevel(level)
    root.propagate = False


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=float, help="density of the tracked set, in (0, 1)")
    p.add_argument("--alpha", type=float, help="iterations per natural number")
    p.add_argument("--pi", type=float, help="scaled density p/(1-p)")
    p.add_argument("--beta", type=float, help="scaled iterations alpha/(1-p)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finetti", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="evaluate the expected density once")
    _add_params(c)
    c.add_argument("--N", type=int)
    c.add_argument("--method", choices=METHODS, default="dp")
    c.add_argument("--mode", choices=("float", "rational"), default="float")
    c.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    c.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    c.add_argument("--header", action="store_true", help="print the CSV header first")

    s = sub.add_parser("study", help="run a convergence study over a parameter grid")
    s.add_argument("--p-list", type=_float_list, required=True)
    s.add_argument("--alpha-list", type=_float_list, required=True)
    s.add_argument("--n-list", type=_int_list, required=True)
    s.add_argument("--method", default="dp", help="comma-separated subset of " + ",".join(METHODS))
    s.add_argument("--mode", choices=("float", "rational"), default="float")
    s.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    s.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    s.add_argument("--out", help="CSV output path (default: stdout)")
    s.add_argument("--svg", help="write a log-log SVG of abs_err vs N")
    s.add_argument("--figure", help="write a matplotlib figure (format from extension)")
    s.add_argument("--jobs", type=int, default=1)

    m = sub.add_parser("simulate", help="Monte Carlo estimate of the expected density")
    _add_params(m)
    m.add_argument("--N", type=int, required=True)
    m.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    m.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    m.add_argument("--header", action="store_true")

    v = sub.add_parser("verify", help="run the identity and oracle self-checks")
    v.add_argument("--max-n", type=int, default=10)
    v.add_argument("--trunc", type=int, default=16)
    v.add_argument("--tol", type=float, default=1e-9)
    v.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


def cmd_compute(args) -> int:
    r, s = resolve_params(args.p, args.alpha, args.pi, args.beta)
    if args.method != "limit" and args.N is None:
        raise UsageError(f"--N is required for method {args.method}")
    rec = compute_record(r, s, args.N, args.method, args.mode, args.trials, args.seed)
    write_csv([rec], sys.stdout, header=args.header)
    return EXIT_OK


def cmd_study(args) -> int:
    config = StudyConfig(
        p_list=args.p_list, alpha_list=args.alpha_list, n_list=args.n_list,
        methods=[m.strip() for m in args.method.split(",") if m.strip()],
        trials=args.trials, seed=args.seed, mode=NumericMode.parse(args.mode),
        out=args.out, svg=args.svg, figure=args.figure, jobs=args.jobs)
    records = run_study(config)
    try:
        if config.out:
            with open(config.out, "w", encoding="utf-8", newline="") as fh:
                write_csv(records, fh)
        else:
            write_csv(records, sys.stdout)
        if config.svg:
            from .svg import render_svg
            with open(config.svg, "w", encoding="utf-8", newline="") as fh:
                fh.write(render_svg(records))
        if config.figure:
            from .figures import plot_study
            plot_study(records, config.figure)
    except OSError as exc:
        print(f"finetti: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_simulate(args) -> int:
    _, s = resolve_params(args.p, args.alpha, args.pi, args.beta)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    est = monte_carlo_m(instantiate(s, args.N), args.trials, args.seed)
    if est.trials == 1:
        log.warning("a single trial gives no spread estimate; std_error reported as 0")
    if args.header:
        sys.stdout.write("mean,std_error,trials,seed\n")
    sys.stdout.write(f"{fmt_float(est.mean)},{fmt_float(est.std_error)},{est.trials},{est.seed}\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    if not 1 <= args.trunc <= verify_mod.MAX_TRUNC:
        raise UsageError(f"--trunc must lie in 1..{verify_mod.MAX_TRUNC}")
    if args.max_n < 1:
        raise UsageError("--max-n must be >= 1")
    results = verify_mod.run_all(args.max_n, args.trunc, args.tol, fault=args.inject_fault)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    return EXIT_OK if verify_mod.all_passed(results) else EXIT_FAIL


COMMANDS = {"compute": cmd_compute, "study": cmd_study, "simulate": cmd_simulate,
            "verify": cmd_verify}


def main(argv: Optional[List[str]] = None) -> int:
    setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DomainError, CostGuardError, OverflowError, ValueError) as exc:
        print(f"finetti {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
