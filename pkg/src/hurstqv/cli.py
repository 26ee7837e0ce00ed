"""Command line interface: ``hurstqv <subcommand> ...``.

Exit codes: 0 success, 2 usage error, 1 domain or numeric error (reported
on stderr as ``error: <code>: <message>``).  ``HURSTQV_LOG`` in
{off, info, debug} enables diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import __version__
from .errors import HurstQVError
from .estimate import estimate_known_g, estimate_localized
from .experiment import ExperimentConfig, default_threads, format_table, run_experiment, write_report
from .fbm import fbm_path
from .paths import read_path_csv, write_path_csv
from .quadvar import GridDesign
from .sde import affine_process, get_process, simulate
from .variance import DEFAULT_TRUNCATION, variance_constants

LOG_LEVELS = {"off": None, "info": logging.INFO, "debug": logging.DEBUG}
METHODS = ("known_g", "h1", "h2", "h3", "h4")


def _pair(text):
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return a, b


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hurstqv",
        description="Hurst index estimation for SDEs driven by fractional Brownian motion.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="subcommand", required=True)

    p = sub.add_parser("gen-fbm", help="generate a fractional Brownian motion path",
                       description="Generate fBm on j*T/m, j=0..m, by circulant embedding.")
    p.add_argument("--m", type=int, required=True, help="number of grid steps (>= 4)")
    p.add_argument("--T", type=float, default=1.0, help="time horizon (default 1)")
    p.add_argument("--H", type=float, required=True, help="Hurst index in (0, 1)")
    p.add_argument("--seed", type=_seed, default=0, help="64-bit RNG seed (default 0)")
    p.add_argument("--out", default="-", help="output CSV with header j,t,x ('-' for stdout)")

    p = sub.add_parser("simulate", help="simulate an SDE path with the Milstein scheme",
                       description="Simulate X = x0 + int f(X)dt + int g(X)dB^H; "
                                   "CSV columns j,t,x,b (b = fBm driver).")
    p.add_argument("--process", default="I", choices=("I", "II", "affine"),
                   help="registered process, or 'affine' with --drift/--diffusion")
    p.add_argument("--drift", type=_pair, default=(0.0, 0.0),
                   help="affine drift coefficients a,b for f(x)=a+b*x")
    p.add_argument("--diffusion", type=_pair, default=(1.0, 0.0),
                   help="affine diffusion coefficients c,d for g(x)=c+d*x")
    p.add_argument("--x0", type=float, default=0.0, help="initial value of an affine process")
    p.add_argument("--m", type=int, required=True, help="number of grid steps (>= 4)")
    p.add_argument("--T", type=float, default=1.0, help="time horizon (default 1)")
    p.add_argument("--H", type=float, required=True, help="Hurst index in (1/2, 1)")
    p.add_argument("--seed", type=_seed, default=0, help="64-bit RNG seed (default 0)")
    p.add_argument("--out", default="-", help="output CSV ('-' for stdout)")

    p = sub.add_parser("estimate", help="estimate H from a path CSV",
                       description="Estimate the Hurst index of a j,t,x path; prints JSON.")
    p.add_argument("--in", dest="infile", required=True, help="input CSV with header j,t,x")
    p.add_argument("--method", choices=METHODS, default="h3", help="estimator (default h3)")
    p.add_argument("--g", default=None,
                   help="diffusion for known_g: process name I|II or a constant such as 1")
    p.add_argument("--n", type=int, default=None,
                   help="outer grid size for h1-h4 (default sqrt(m), k_n = n)")
    p.add_argument("--confidence", type=float, default=0.95,
                   help="confidence level of the interval (default 0.95)")

    p = sub.add_parser("variance", help="print asymptotic variance constants as JSON",
                       description="Evaluate the limiting variance constants at H.")
    p.add_argument("--H", type=float, required=True, help="Hurst index in (1/2, 1)")
    p.add_argument("--L", type=int, default=DEFAULT_TRUNCATION,
                   help=f"series truncation (>= 1000, default {DEFAULT_TRUNCATION})")

    p = sub.add_parser("experiment", help="run a Monte-Carlo study from a JSON config",
                       description="Run replicated simulations; writes summary.csv, "
                                   "summary.json and raw.csv into the config's output_dir.")
    p.add_argument("--config", required=True, help="JSON file mirroring ExperimentConfig")
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: available CPUs)")
    p.add_argument("--output-dir", default=None, help="override output_dir from the config")
    return parser


def _diffusion_from_arg(text):
    if text is None:
        raise HurstQVError("--g is required for method known_g")
    try:
        const = float(text)
    except ValueError:
        return get_process(text).diffusion
    return lambda x: const


def _write_csv(path, out, include_driver):
    if out == "-":
        write_path_csv(path, sys.stdout, include_driver)
    else:
        write_path_csv(path, out, include_driver)


def _run(args) -> int:
    if args.command == "gen-fbm":
        _write_csv(fbm_path(args.m, args.T, args.H, args.seed), args.out, False)
    elif args.command == "simulate":
        if args.process == "affine":
            spec = affine_process(args.drift, args.diffusion, args.x0)
        else:
            spec = get_process(args.process)
        _write_csv(simulate(spec, args.m, args.T, args.H, args.seed), args.out, True)
    elif args.command == "estimate":
        path = read_path_csv(args.infile)
        if args.method == "known_g":
            est = estimate_known_g(path, _diffusion_from_arg(args.g), args.confidence)
        else:
            design = GridDesign.for_path_length(path.m, args.n)
            est = estimate_localized(path, design, int(args.method[1]), args.confidence)
        print(json.dumps(est.as_dict(), sort_keys=True))
    elif args.command == "variance":
        print(json.dumps(variance_constants(args.H, args.L).as_dict(), sort_keys=True))
    elif args.command == "experiment":
        config = ExperimentConfig.from_file(args.config)
        threads = args.threads if args.threads is not None else default_threads()
        report = run_experiment(config, threads=max(1, threads))
        write_report(report, args.output_dir or config.output_dir)
        print(format_table(report))
    return 0


def main(argv=None) -> int:
    level = LOG_LEVELS.get(os.environ.get("HURSTQV_LOG", "off").lower())
    if level is not None:
        logging.basicConfig(stream=sys.stderr, level=level,
                            format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except HurstQVError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
