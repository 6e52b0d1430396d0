"""Command-line interface.

Subcommands map one-to-one onto the toolkit's activities:

    longmem simulate     --d 0.3 --n 10000 --seed 1 --out series.csv
    longmem periodogram  --input series.csv --out pg.csv
    longmem estimate     --method ls --input series.csv --out report.json
    longmem diagnostics  --input series.csv --out diag.json
    longmem study        --config study.ini --out table.csv --format csv

Exit codes: 0 success, 2 invalid input, 3 numeric failure, 4 I/O failure.

The periodogram is evaluated at the harmonic frequencies only, which makes it
invariant to additive constants, so no mean removal is applied anywhere.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .. import baselines
from ..arfima import ArfimaParams, simulate
from ..errors import InvalidInputError, NumericError
from ..spectral import periodogram
from . import config as config_mod
from .io import emit_report, ingest_csv, transform
from .study import (
    estimate_ls,
    estimate_parametric,
    estimate_semiparametric,
    run_study,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _add_common(parser: argparse.ArgumentParser, *, needs_input: bool) -> None:
    if needs_input:
        parser.add_argument("--input", required=True, help="input CSV path")
        parser.add_argument("--column", default=None,
                            help="column name or 0-based index (default: first column)")
        parser.add_argument("--transform", default="none",
                            choices=["none", "log-returns", "first-difference"])
    parser.add_argument("--seed", type=int, default=None, help="random seed")
    parser.add_argument("--config", default=None, help="INI config file")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--format", default="json", choices=["json", "csv"])
    parser.add_argument("--print-config", action="store_true",
                        help="print the default configuration and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="longmem", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate an ARFIMA series to CSV")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--n", type=int, required=True)
    _add_common(p, needs_input=False)

    p = sub.add_parser("periodogram", help="periodogram of a CSV series")
    _add_common(p, needs_input=True)

    p = sub.add_parser("estimate", help="estimate the long-memory parameter")
    p.add_argument("--method", required=True,
                   choices=["semiparametric", "ls", "parametric"])
    p.add_argument("--K", type=int, default=None, help="pooling size")
    p.add_argument("--ell", type=int, default=None, help="low-frequency trim")
    p.add_argument("--m", type=int, default=None, help="bandwidth (last index)")
    p.add_argument("--model", default="0d0", choices=["0d0", "1d1"],
                   help="parametric model family")
    _add_common(p, needs_input=True)

    p = sub.add_parser("diagnostics", help="R/S Hurst and DFA2 diagnostics")
    _add_common(p, needs_input=True)

    p = sub.add_parser("study", help="run a simulation study")
    p.add_argument("--workers", type=int, default=None)
    _add_common(p, needs_input=False)
    return parser


def _load_series(args):
    series = ingest_csv(args.input, column=_parse_column(args.column))
    return transform(series, args.transform)


def _parse_column(raw):
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        return raw


def _out_path(args, default_name: str) -> Path:
    return Path(args.out) if args.out else Path(default_name)


def _cmd_simulate(args) -> int:
    params = ArfimaParams(d=args.d, phi=args.phi, theta=args.theta, sigma2=args.sigma2)
    series = simulate(params, args.n, args.seed if args.seed is not None else 0)
    path = _out_path(args, "series.csv")
    np.savetxt(path, series.values, fmt="%.10g", header="value", comments="")
    print(f"wrote {series.n} observations to {path}")
    return EXIT_OK


def _cmd_periodogram(args) -> int:
    series = _load_series(args)
    pg = periodogram(series)
    path = _out_path(args, "periodogram.csv")
    table = np.column_stack((pg.frequencies, pg.ordinates))
    np.savetxt(path, table, fmt="%.10g", header="frequency,ordinate",
               delimiter=",", comments="")
    print(f"wrote {len(pg.ordinates)} ordinates to {path}")
    return EXIT_OK


def _cmd_estimate(args) -> int:
    series = _load_series(args)
    chain = config_mod.load_chain_config(args.config, seed=args.seed)
    kwargs = {}
    if args.K is not None:
        kwargs["K"] = args.K
    if args.ell is not None:
        kwargs["ell"] = args.ell
    if args.m is not None:
        kwargs["m"] = args.m
    if args.method == "ls":
        report = estimate_ls(series, **kwargs)
    elif args.method == "semiparametric":
        report = estimate_semiparametric(series, chain, **kwargs)
    else:
        report = estimate_parametric(series, chain, model=args.model)
    path = _out_path(args, f"estimate-{args.method}.{args.format}")
    emit_report(report, args.format, path)
    print(f"{args.method}: d = {report.d_point:.4f} "
          f"[{report.d_low:.4f}, {report.d_high:.4f}] -> {path}")
    return EXIT_OK


def _cmd_diagnostics(args) -> int:
    series = _load_series(args)
    start = time.perf_counter()
    report = baselines.diagnostics(series)
    runtime = time.perf_counter() - start
    path = _out_path(args, f"diagnostics.{args.format}")
    emit_report(report, args.format, path)
    print(
        f"rs={report.rs_hurst:.3f} corrected={report.corrected_rs_hurst:.3f} "
        f"empirical={report.empirical_hurst:.3f} dfa2={report.dfa2_slope:.3f} "
        f"({runtime:.2f}s) -> {path}"
    )
    return EXIT_OK


def _cmd_study(args) -> int:
    chain = config_mod.load_chain_config(args.config, seed=args.seed)
    spec = config_mod.load_study_spec(args.config, chain=chain, workers=args.workers)
    result = run_study(spec)
    path = _out_path(args, f"study.{args.format}")
    emit_report(result, args.format, path)
    print(f"{len(result.aggregates)} aggregate rows -> {path} "
          f"({result.runtime_seconds:.1f}s)")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "periodogram": _cmd_periodogram,
    "estimate": _cmd_estimate,
    "diagnostics": _cmd_diagnostics,
    "study": _cmd_study,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "print_config", False):
        print(config_mod.default_config_text())
        return EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, FileNotFoundError) as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
