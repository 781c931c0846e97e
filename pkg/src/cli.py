#!/usr/bin/env python3
"""Command-line entry point: one subcommand per pipeline step."""
import argparse
import logging
import os
import sys
from typing import Any, Callable, Dict, List, Optional

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.run_config import RunConfig, RunConfigLoader
from config.settings import Settings
from src.constants import EXIT_OK
from src.handlers.audit_handler import AuditHandler
from src.handlers.pipeline_handler import PipelineHandler
from src.handlers.synth_handler import SynthHandler
from src.utils.error_handler import PipelineError, global_error_handler, usage_error
from src.utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

PIPELINE_COMMANDS = ("ingest", "featurize", "train", "cluster-sanitarians", "score", "simulate")
AUDIT_COMMANDS = ("hit-rates", "codes-by-cluster", "monthly", "prepost", "seasonal", "counterfactual")

# Flag destination -> config key
FLAG_KEYS = {
    "out": "out",
    "seed": "seed",
    "capacity": "capacity",
    "bandwidth_meters": "bandwidth_meters",
    "window_days": "window_days",
    "split_date": "split_date",
    "cutoff_date": "cutoff_date",
    "train_start": "train_start",
    "train_end": "train_end",
    "test_start": "test_start",
    "test_end": "test_end",
    "strategy": "strategy",
    "mode": "mode",
    "model": "model",
    "features": "features",
    "top_chains": "top_chains",
    "random_replicates": "random_replicates",
    "inspections": "inspections",
    "licenses": "licenses",
    "weather": "weather",
    "events": "events",
    "portal_export": "portal_export",
}


class PipelineArgumentParser(argparse.ArgumentParser):
    """Argument parser that reports usage problems as pipeline errors."""

    def error(self, message):
        raise usage_error(message)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Flat key=value run configuration")
    common.add_argument("--out", help="Output directory")
    common.add_argument("--seed", type=int)
    common.add_argument("--capacity", type=int, help="Inspections per simulated day")
    common.add_argument("--bandwidth-meters", type=float)
    common.add_argument("--window-days", type=int)
    common.add_argument("--split-date", help="YYYY-MM-DD")
    common.add_argument("--cutoff-date", help="YYYY-MM-DD")
    common.add_argument("--train-start")
    common.add_argument("--train-end")
    common.add_argument("--test-start")
    common.add_argument("--test-end")
    common.add_argument("--allow-missing-license", action="store_true", default=None)
    common.add_argument("--strategy", choices=("usual", "random", "best", "worst", "model"))
    common.add_argument("--mode", choices=("zero_out", "reference_mean"))
    common.add_argument("--model", help="Model artifact (default: model.json in --out)")
    common.add_argument("--features", help="Feature matrix (default: features.csv in --out)")
    common.add_argument("--code", type=int, help="Critical violation code 1..14")
    common.add_argument("--kind", help="Inspection type filter")
    common.add_argument("--top-chains", type=int)
    common.add_argument("--n-inspections", type=int, help="Synthetic city size")
    common.add_argument("--random-replicates", type=int)
    common.add_argument("--inspections")
    common.add_argument("--licenses")
    common.add_argument("--weather")
    common.add_argument("--events")
    common.add_argument("--portal-export", help="City portal CSV; ingest converts it to inspections.csv in --out")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    return common


def build_parser() -> PipelineArgumentParser:
    common = _common_options()
    parser = PipelineArgumentParser(
        prog="inspection-forecast",
        description="Food-inspection forecasting pipeline and audits",
    )
    commands = parser.add_subparsers(dest="command", parser_class=PipelineArgumentParser)
    commands.required = True
    for name in PIPELINE_COMMANDS + ("synth", "report"):
        commands.add_parser(name, parents=[common])
    audit = commands.add_parser("audit", help="Audits of the model and of hit-rate patterns")
    audits = audit.add_subparsers(dest="audit", parser_class=PipelineArgumentParser)
    audits.required = True
    for name in AUDIT_COMMANDS:
        audits.add_parser(name, parents=[common])
    return parser


def load_run_config(args: argparse.Namespace) -> RunConfig:
    overrides: Dict[str, Any] = {key: getattr(args, dest) for dest, key in FLAG_KEYS.items()}
    overrides["allow_missing_license"] = args.allow_missing_license
    return RunConfigLoader(args.config).load(overrides)


def dispatch(args: argparse.Namespace, config: RunConfig) -> List:
    """Run the handler method behind the parsed subcommand."""
    if args.command in PIPELINE_COMMANDS:
        handler = PipelineHandler(config)
        action: Callable[[], List] = getattr(handler, args.command.replace("-", "_"))
    elif args.command == "audit":
        handler = AuditHandler(config, code=args.code, kind=args.kind)
        action = getattr(handler, args.audit.replace("-", "_"))
    else:
        handler = SynthHandler(config, n_inspections=args.n_inspections)
        action = getattr(handler, args.command)
    return action()


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse ``argv``, run one subcommand and return its exit status.

    Failures print one ``error[<type>]: <reason>`` line on stderr.
    """
    try:
        settings = Settings()
        args = build_parser().parse_args(argv)
    except PipelineError as e:
        print(e.format_line(), file=sys.stderr)
        return e.exit_status
    except SystemExit as e:
        return int(e.code or EXIT_OK)

    setup_logging(args.log_level or settings.log_level, enable_debug=settings.debug)
    try:
        config = load_run_config(args)
        written = dispatch(args, config)
    except Exception as e:
        error = global_error_handler.handle_error(e, {"command": args.command})
        print(error.format_line(), file=sys.stderr)
        return error.exit_status

    logger.info(f"{args.command} finished; {len(written)} files written to {config.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
