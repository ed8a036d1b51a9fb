"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 fit failure.  On
failure the exception class name is printed alone on the first stderr line.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import bench, complexity, io as gio
from .errors import DataError, FitFailure
from .fitters import Algorithm, IterationPolicy, fit
from .model import GaussianParams, Scenario, synthesize

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_FIT = 0, 1, 2, 3
DEFAULT_ITERATIONS = 10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return v


def _nonneg_float(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text}")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer: {text}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be a non-negative integer: {text}")
    return v


def _grid_size(text):
    v = int(text)
    if v < 3:
        raise argparse.ArgumentTypeError(f"need at least 3 points: {text}")
    return v


def _seed(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2**64): {text}")
    return v


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text}") from None


def _algorithm_list(text):
    try:
        return [Algorithm(v.strip()) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_policy_flags(p):
    p.add_argument("--max-iters", type=_nonneg_int, default=None,
                   help=f"reweighting iterations for guo-iter/fas-iter (default {DEFAULT_ITERATIONS})")
    p.add_argument("--tol", type=_positive_float, default=1e-8, help="relative stopping tolerance")
    p.add_argument("--refresh-sigma", type=_positive_int, default=None, metavar="M",
                   help="fas-iter: refresh the width every M iterations")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gaussfit", description="Closed-form Gaussian fitting and accuracy sweeps.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a Gaussian to an x,y CSV file")
    p.add_argument("--input", required=True, help="CSV file, or - for stdin")
    p.add_argument("--algorithm", required=True, choices=[a.value for a in Algorithm])
    _add_policy_flags(p)
    p.add_argument("--format", choices=(gio.CSV, gio.JSON), default=gio.CSV)

    p = sub.add_parser("simulate", help="write a noisy synthetic dataset")
    p.add_argument("--amplitude", type=_positive_float, default=1.0)
    p.add_argument("--mean", type=float, default=10.0)
    p.add_argument("--sigma", type=_positive_float, default=2.0)
    p.add_argument("--n", type=_grid_size, default=200)
    p.add_argument("--width-ratio", type=_positive_float, default=12.0, help="W: window width in sigmas")
    p.add_argument("--noise-sd", type=_nonneg_float, default=0.0, help="sigma_w")
    p.add_argument("--seed", type=_seed, default=0)

    p = sub.add_parser("sweep", help="Monte Carlo ARE%% of sigma along one axis")
    p.add_argument("--axis", required=True, choices=[a.value for a in bench.Axis])
    p.add_argument("--values", required=True, type=_float_list)
    p.add_argument("--trials", type=_positive_int, default=bench.DEFAULT_TRIALS)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--snr", type=_positive_float, default=25.0)
    p.add_argument("--width-ratio", type=_positive_float, default=12.0)
    p.add_argument("--n", type=_grid_size, default=200)
    p.add_argument("--amplitude", type=_positive_float, default=1.0)
    p.add_argument("--mean", type=float, default=10.0)
    p.add_argument("--sigma", type=_positive_float, default=2.0)
    p.add_argument("--algorithms", type=_algorithm_list,
                   default=list(bench.DEFAULT_ALGORITHMS), help="comma-separated")
    _add_policy_flags(p)
    p.add_argument("--k1", type=_positive_float, default=2.0)
    p.add_argument("--k2", type=_positive_float, default=3.0)
    p.add_argument("--threads", type=_positive_int, default=1, help="worker processes")
    p.add_argument("--format", choices=(gio.CSV, gio.JSON), default=gio.CSV)

    p = sub.add_parser("complexity", help="operation counts for guo, roonizi and fas")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--a-ln", type=_nonneg_int, default=0)
    p.add_argument("--m-ln", type=_nonneg_int, default=0)
    p.add_argument("--a-exp", type=_nonneg_int, default=0)
    p.add_argument("--m-exp", type=_nonneg_int, default=0)
    return parser


def _policy(args, algorithms) -> IterationPolicy:
    iterative = any(Algorithm(a).iterative for a in algorithms)
    max_iters = args.max_iters
    if max_iters is None:
        max_iters = DEFAULT_ITERATIONS if iterative else 0
    return IterationPolicy(max_iters=max_iters, rel_tol=args.tol, refresh_sigma_every=args.refresh_sigma)


def _cmd_fit(args, out, err):
    policy = _policy(args, [args.algorithm])
    source = sys.stdin if args.input == "-" else args.input
    data = gio.read_dataset(source)
    result = fit(data, args.algorithm, policy)
    out.write(gio.write_fits([result], args.format))


def _cmd_simulate(args, out, err):
    truth = GaussianParams(args.amplitude, args.mean, args.sigma)
    scenario = Scenario(truth, args.n, args.width_ratio, args.noise_sd, args.seed)
    out.write(gio.write_dataset(synthesize(scenario)))


def _cmd_sweep(args, out, err):
    config = bench.SweepConfig(
        axis=args.axis,
        values=tuple(args.values),
        truth=GaussianParams(args.amplitude, args.mean, args.sigma),
        snr=args.snr,
        width_ratio=args.width_ratio,
        n=args.n,
        trials=args.trials,
        algorithms=tuple(args.algorithms),
        policy=_policy(args, args.algorithms),
        base_seed=args.seed,
        k1=args.k1,
        k2=args.k2,
    )
    start = time.perf_counter()
    rows = bench.run_sweep(config, workers=args.threads)
    err.write(f"sweep: {len(rows)} points x {config.trials} trials in {time.perf_counter() - start:.1f}s\n")
    out.write(gio.write_sweep(rows, args.format, config.algorithms))


def _cmd_complexity(args, out, err):
    model = complexity.CostModel(args.a_ln, args.m_ln, args.a_exp, args.m_exp)
    counts = {a: complexity.op_counts(a, args.n, model) for a in complexity.MODELED}
    out.write("algorithm,additions,multiplications\n")
    for alg, c in counts.items():
        out.write(f"{alg.value},{c.additions},{c.multiplications}\n")
    delta = counts[Algorithm.GUO] - counts[Algorithm.FAS]
    out.write(f"guo-fas,{delta.additions},{delta.multiplications}\n")


_COMMANDS = {
    "fit": _cmd_fit,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "complexity": _cmd_complexity,
}


def main(argv=None, stdout=None, stderr=None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(f"UsageError\n{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        _COMMANDS[args.command](args, out, err)
    except DataError as exc:
        err.write(f"{type(exc).__name__}\n{exc}\n")
        return EXIT_DATA
    except FitFailure as exc:
        err.write(f"{type(exc).__name__}\n{exc}\n")
        return EXIT_FIT
    except OSError as exc:
        err.write(f"{type(exc).__name__}\n{exc}\n")
        return EXIT_DATA
    except ValueError as exc:
        # cross-flag validation lives in the dataclass constructors
        err.write(f"UsageError\n{exc}\n")
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
