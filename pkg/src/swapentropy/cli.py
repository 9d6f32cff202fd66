"""Command-line driver: ``swapentropy {evolve,sweep,period,verify}``."""

import argparse
import contextlib
import sys

from .config import ConfigError, parse_config
from .experiments import (AperiodicSignal, entropy_timeseries, estimate_period,
                          sweep_detuning, verify)
from .oracle import IntegratorConfig
from .swap import evolve_swap

DEFAULT_SWEEP = [0, 3, 10, 50, 100, 150, 200]


def _add_run_flags(p):
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--g1", help="e-f coupling rate, rad/us (default 1)")
    p.add_argument("--g2", help="f-g coupling rate, rad/us (default 1)")
    p.add_argument("--delta-over-g", help="detuning in units of g1 (default 0)")
    for name in ("alpha1", "beta1", "alpha2", "beta2"):
        p.add_argument(f"--{name}", metavar="RE[,IM]", help="Bell coefficient (default 1/sqrt(2))")
    p.add_argument("--t-start", help="first sample time, us (default 0)")
    p.add_argument("--t-end", help="last sample time, us (default 50)")
    p.add_argument("--t-step", help="sampling interval, us (default 0.01)")
    p.add_argument("--out", help="output file (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="swapentropy",
        description="Entropy of two cascade atoms and two cavities after entanglement swapping.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="entropy time series as CSV")
    _add_run_flags(p)
    p.add_argument("--dump-state", action="store_true",
                   help="write the four-party state at t_end instead of the series")

    p = sub.add_parser("sweep", help="period and maximum entropy versus detuning")
    _add_run_flags(p)
    p.add_argument("--deltas-over-g", type=float, nargs="+", default=DEFAULT_SWEEP)
    p.add_argument("--min-horizon", type=float, default=200.0,
                   help="shortest series length per detuning, us")
    p.add_argument("--horizon-factor", type=float, default=2.6,
                   help="series length in units of the predicted recurrence time")

    p = sub.add_parser("period", help="period estimate of one entropy series")
    _add_run_flags(p)

    p = sub.add_parser("verify", help="invariant and RK4 cross-checks")
    _add_run_flags(p)
    p.add_argument("--oracle-step", type=float, help="RK4 step, us (default per manifold)")
    p.add_argument("--oracle-horizon", type=float, default=50.0,
                   help="RK4 comparison only at times up to this, us")
    p.add_argument("--max-samples", type=int, default=2000)
    p.add_argument("--uncorrected-lambda1", action="store_true",
                   help="use the e,e population from the (e,0) branch (expected to fail)")
    return parser


def _overrides(args):
    keys = ("g1", "g2", "delta_over_g", "alpha1", "beta1", "alpha2", "beta2",
            "t_start", "t_end", "t_step", "out")
    return {k: getattr(args, k) for k in keys}


@contextlib.contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = parse_config(args.config, _overrides(args))
    except (ConfigError, OSError) as err:
        print(f"swapentropy: {err}", file=sys.stderr)
        return 2

    status = 0
    with _sink(config.output_path) as out:
        if args.command == "evolve":
            if args.dump_state:
                ket = evolve_swap(config.coeffs, config.params, config.times()[-1])
                out.write("\n".join(ket.dump_lines()) + "\n")
            else:
                entropy_timeseries(config).write_csv(out)
        elif args.command == "sweep":
            sweep_detuning(config, args.deltas_over_g, args.min_horizon,
                           args.horizon_factor).write_csv(out)
        elif args.command == "period":
            try:
                est = estimate_period(entropy_timeseries(config))
                out.write(f"period_us={est.period:.6f} confidence={est.confidence:.4f} "
                          f"method={est.method}\n")
            except AperiodicSignal as err:
                out.write(f"aperiodic at this horizon: {err}\n")
        elif args.command == "verify":
            integrator = IntegratorConfig(args.oracle_step) if args.oracle_step else None
            report = verify(config, integrator, args.oracle_horizon,
                            max_samples=args.max_samples,
                            uncorrected_lambda1=args.uncorrected_lambda1)
            out.write("\n".join(report.lines()) + "\n")
            status = 0 if report.passed else 1
    return status


if __name__ == "__main__":
    sys.exit(main())
