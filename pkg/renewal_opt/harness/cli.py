"""
Command line entry point.

    renewal-opt run --model file --frames N --V x --delta d --seed s [--diagnostics] --out prefix
    renewal-opt sweep --config sweep.json [--out prefix]
    renewal-opt oracle --model file
    renewal-opt diagnose --records run_records.csv [--summary run_summary.json] [--eta e --B b --xi x]

Exit codes: 0 success, 1 configuration or input error, 2 runtime error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from renewal_opt import __version__
from renewal_opt.config import BoundInputSettings, RunConfig, SweepConfig, load_settings
from renewal_opt.exceptions import ValidationError
from renewal_opt.harness import io
from renewal_opt.harness.runner import (
    analyze,
    build_model,
    oracle_cmd,
    resolve_theta_max,
    run,
    shifted_theta_star,
    write_diagnostics,
)
from renewal_opt.harness.sweep import sweep, write_sweep

logger = logging.getLogger("renewal_opt.cli")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _add_model_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", help="'file' or 'synthetic:<path>'")
    parser.add_argument("--penalty", choices=["delay", "reward"], help="file-model penalty")
    parser.add_argument("--realization", choices=["geometric", "chain"], help="file-model frame-length sampler")
    parser.add_argument("--shift", help="penalty shift: a number or 'auto'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="renewal-opt", description="Online renewal-system optimizer")
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the controller once")
    p_run.add_argument("--config", help="JSON run config; flags override it")
    _add_model_args(p_run)
    p_run.add_argument("--frames", type=int)
    p_run.add_argument("--slots", type=int, help="stop once the frame lengths add up to this many slots")
    p_run.add_argument("--V", type=float)
    p_run.add_argument("--delta", type=float)
    p_run.add_argument("--theta-max", dest="theta_max", help="number or 'auto'")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--diagnostics", action="store_true", default=None)
    p_run.add_argument("--record", action="store_true", default=None, help="write per-frame records")
    p_run.add_argument("--out", dest="output", help="output path prefix")

    p_sweep = sub.add_parser("sweep", help="run a (V, delta, replication) grid")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", default="sweep", help="output path prefix")

    p_oracle = sub.add_parser("oracle", help="solve for the best stationary policy")
    _add_model_args(p_oracle)

    p_diag = sub.add_parser("diagnose", help="analyze a record CSV")
    p_diag.add_argument("--records", required=True)
    p_diag.add_argument("--summary", help="run summary JSON; defaults to the one next to --records")
    _add_model_args(p_diag)
    p_diag.add_argument("--eta", type=float)
    p_diag.add_argument("--B", type=float)
    p_diag.add_argument("--xi", type=float)
    p_diag.add_argument("--V", type=float)
    p_diag.add_argument("--delta", type=float)
    p_diag.add_argument("--theta-max", dest="theta_max", help="number or 'auto'")
    p_diag.add_argument("--eps0", type=float)
    p_diag.add_argument("--theta-star", dest="theta_star", type=float, help="defaults to the oracle optimum")
    p_diag.add_argument("--out", help="output path prefix")
    return parser


def _overrides(args: argparse.Namespace, keys: List[str]) -> Dict[str, Any]:
    """Flags the user actually gave, with numeric strings for theta_max/shift converted."""
    values = {}
    for key in keys:
        value = getattr(args, key, None)
        if value is None:
            continue
        if key in ("theta_max", "shift") and value != "auto":
            try:
                value = float(value)
            except ValueError:
                raise ValidationError(f"--{key.replace('_', '-')} must be a number or 'auto', got {value!r}")
        values[key] = value
    return values


MODEL_KEYS = ["model", "penalty", "realization", "shift"]
RECORDS_SUFFIX = "_records.csv"


def cmd_run(args: argparse.Namespace) -> int:
    settings = load_settings(args.config) if args.config else {}
    settings.update(
        _overrides(
            args,
            MODEL_KEYS
            + ["frames", "slots", "V", "delta", "theta_max", "seed", "diagnostics", "record", "output"],
        )
    )
    summary = run(RunConfig.from_mapping(settings))
    print(io.to_json(summary.to_dict()))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = SweepConfig.from_mapping(load_settings(args.config))
    result = sweep(config)
    write_sweep(args.out, result)
    print(result.means.to_csv(index=False, lineterminator="\n"), end="")
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    solution = oracle_cmd(RunConfig.from_mapping(_overrides(args, MODEL_KEYS)))
    print(io.to_json(solution.to_dict()))
    return EXIT_OK


def _diagnose_settings(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Run settings for a record file: the config echo of the run's summary
    file, overridden by any flags given.

    Raises:
        ValidationError: no summary file and --V or --delta missing
    """
    summary_path = args.summary
    if summary_path is None and args.records.endswith(RECORDS_SUFFIX):
        summary_path = args.records[: -len(RECORDS_SUFFIX)] + "_summary.json"
    overrides = _overrides(args, MODEL_KEYS + ["V", "delta", "theta_max", "eps0"])
    if summary_path is not None and (args.summary is not None or Path(summary_path).exists()):
        settings = dict(load_settings(summary_path).get("config") or {})
        logger.info(f"diagnose: run settings from {summary_path}")
        settings.update(overrides)
        return settings
    if args.V is None or args.delta is None:
        raise ValidationError(
            f"no summary file for {args.records}; pass --V and --delta or --summary"
        )
    return overrides


def cmd_diagnose(args: argparse.Namespace) -> int:
    config = RunConfig.from_mapping(_diagnose_settings(args))
    model = build_model(config)
    theta_max = resolve_theta_max(config, model)
    series = io.read_records(args.records, model.c, config.V, config.delta, theta_max)

    defaults = config.bound_inputs or BoundInputSettings()
    settings = BoundInputSettings(
        eta=defaults.eta if args.eta is None else args.eta,
        B=defaults.B if args.B is None else args.B,
        xi=defaults.xi if args.xi is None else args.xi,
    )
    theta_star = args.theta_star
    if theta_star is None:
        theta_star = shifted_theta_star(model)
        if theta_star is None:
            raise ValidationError("the model admits no feasible policy; pass --theta-star")
    report = analyze(series, settings, theta_star, config.eps0)
    if args.out:
        write_diagnostics(args.out, series, report)
    print(io.to_json(report.to_dict()))
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "oracle": cmd_oracle,
    "diagnose": cmd_diagnose,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # usage errors are configuration errors; --help and --version exit 0
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except ValidationError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_CONFIG
    except Exception as e:
        logger.exception(f"{args.command}: unexpected error: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
