"""
Command-line interface: list models, run single chains, run quartile
experiments and write posterior histograms.
"""

import argparse
import logging
import sys
from typing import List, Optional

from ..config import configure_logging, get_config
from ..errors import SliceTraceError
from ..evaluation.experiment import run_experiment
from ..evaluation.reporting import emit_csv, posterior_histogram, write_samples
from ..inference.scheduler import KernelSpec, run_inference
from ..inference.slice_sampler import SliceConfig
from ..models.benchmarks import get_model, list_models

logger = logging.getLogger(__name__)


def _slice_config(args: argparse.Namespace) -> SliceConfig:
    config = get_config()["slice"]
    return SliceConfig(
        initial_width=args.width if args.width is not None else config["initial_width"],
        max_stepout_doublings=config["max_stepout_doublings"],
        max_shrink_iters=config["max_shrink_iters"],
        halve_initial_width=args.halve_width,
    )


def cmd_list_models(args: argparse.Namespace) -> int:
    for name in list_models():
        print(name)
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    model = get_model(args.model, args.iris)
    spec = KernelSpec.parse(args.kernel, _slice_config(args))
    samples = run_inference(model.program, spec, args.budget, args.seed)
    if args.csv:
        emit_csv(samples, args.csv)
    else:
        write_samples(samples, sys.stdout)
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    model = get_model(args.model, args.iris)
    slice_config = _slice_config(args)
    specs = [KernelSpec.parse(text, slice_config) for text in args.kernels.split(",") if text.strip()]
    runs = args.runs or get_config()["experiment"]["runs"]
    summaries = run_experiment(model, specs, args.budget, runs, args.seed, workers=args.workers)
    emit_csv(summaries, args.out)
    if args.curves:
        emit_csv([curve for summary in summaries.values() for curve in summary.curves], args.curves)
    return 0


def cmd_posterior(args: argparse.Namespace) -> int:
    model = get_model(args.model, args.iris)
    spec = KernelSpec.parse(args.kernel, _slice_config(args))
    samples = run_inference(model.program, spec, args.budget, args.seed)
    emit_csv(posterior_histogram(samples, args.predict or model.predict_names[0], args.bins), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slicetrace",
        description="Trans-dimensional slice sampling and Metropolis-Hastings for probabilistic programs",
    )
    parser.add_argument("--iris", help="Iris CSV path (overrides IRIS_PATH)")
    parser.add_argument("--log-level", help="Logging level (default from SLICETRACE_LOG_LEVEL or INFO)")
    parser.add_argument("--width", type=float, help="Initial slice width w")
    parser.add_argument("--halve-width", action="store_true", help="Halve w before stepping out")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list-models", help="List the benchmark models")
    p.set_defaults(handler=cmd_list_models)

    p = sub.add_parser("run", help="Run one chain and write its sample stream")
    p.add_argument("--model", required=True)
    p.add_argument("--kernel", default="slice", help="mh | slice | naive-slice | mix:BETA")
    p.add_argument("--budget", type=int, required=True, help="LL-evaluation budget")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="Output path (default: stdout)")
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("experiment", help="Quartile convergence curves across seeds")
    p.add_argument("--model", required=True)
    p.add_argument("--kernels", default="mh,slice", help="Comma-separated kernel list")
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--runs", type=int, help="Chains per kernel (default 20)")
    p.add_argument("--seed", type=int, default=0, help="Seed of the first run")
    p.add_argument("--workers", type=int, help="Parallel processes (default from SLICETRACE_WORKERS)")
    p.add_argument("--out", required=True, help="Quartile CSV path")
    p.add_argument("--curves", help="Optional per-run curve CSV path")
    p.set_defaults(handler=cmd_experiment)

    p = sub.add_parser("posterior", help="Histogram of one chain's posterior")
    p.add_argument("--model", required=True)
    p.add_argument("--kernel", default="slice")
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--predict", help="Predicted value to histogram (default: the model's first)")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_posterior)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except (SliceTraceError, ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
