"""`qact` entry point: list experiments, print templates, run a config.

Exit codes: 0 pass, 1 identity check failed, 2 config or input error,
3 non-convergence or numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from qaction import __version__
from qaction.audit.run_log import RunLog
from qaction.errors import ConfigValidationError, NonConvergenceError, NumericalError
from qaction.experiments.catalog import CATALOG, describe, experiment_names
from qaction.experiments.config import (
    ExperimentConfig,
    load_config,
    require_seed,
    template_text,
)
from qaction.experiments.runners import run_experiment

EXIT_OK = 0
EXIT_IDENTITY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NON_CONVERGENCE = 3

RUN_LOG_NAME = "run_log.jsonl"


def _parse_env_int(name: str, default: int | None) -> int | None:
    raw = os.environ.get(name)
    if raw is None or not str(raw).strip():
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def _resolve_threads(args: argparse.Namespace) -> int:
    threads = args.threads if args.threads is not None else _parse_env_int("QACTION_THREADS", 1)
    if threads is None or threads < 1:
        raise ConfigValidationError(f"--threads must be an int >= 1, got {threads}")
    return threads


def _resolve_output_dir(args: argparse.Namespace, cfg: ExperimentConfig) -> Path:
    if args.output_dir:
        return Path(args.output_dir)
    if cfg.output_dir:
        return Path(cfg.output_dir)
    return Path("results") / cfg.experiment


def cmd_list(args: argparse.Namespace) -> int:
    for name in experiment_names():
        print(describe(CATALOG[name]))
    return EXIT_OK


def cmd_template(args: argparse.Namespace) -> int:
    try:
        text = template_text(args.name)
    except ConfigValidationError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(text)
    return EXIT_OK


def _fail(log: RunLog | None, code: int, message: str, extra: dict | None = None) -> int:
    print(f"ERROR: {message}", file=sys.stderr)
    if extra:
        print(
            f"ERROR: diagnostics: {json.dumps(extra, sort_keys=True, default=str)}",
            file=sys.stderr,
        )
    if log is not None:
        log.emit(
            "run_failed",
            {"exit_code": code, "message": message, "diagnostics": extra or {}},
        )
    return code


def cmd_run(args: argparse.Namespace) -> int:
    config_path = Path(args.config)
    early_log = RunLog(Path(args.output_dir) / RUN_LOG_NAME) if args.output_dir else None
    try:
        threads = _resolve_threads(args)
        cfg = load_config(config_path).with_seed(args.seed)
        require_seed(cfg)
    except ConfigValidationError as exc:
        return _fail(early_log, EXIT_CONFIG, str(exc))

    out_dir = _resolve_output_dir(args, cfg)
    log = RunLog(out_dir / RUN_LOG_NAME)
    log.emit(
        "run_started",
        {"config": str(config_path), "threads": threads, "code_version": __version__},
    )
    log.emit(
        "config_loaded",
        {"experiment": cfg.experiment, "seed": cfg.seed, "params": cfg.params},
    )

    started = time.perf_counter()
    try:
        record = run_experiment(cfg, threads)
    except NonConvergenceError as exc:
        return _fail(log, EXIT_NON_CONVERGENCE, str(exc), exc.diagnostics)
    except NumericalError as exc:
        return _fail(log, EXIT_NON_CONVERGENCE, str(exc), {"condition": exc.condition})
    except ArithmeticError as exc:
        message = f"{cfg.experiment}: {type(exc).__name__}: {exc}"
        return _fail(log, EXIT_NON_CONVERGENCE, message)
    except ValueError as exc:
        return _fail(log, EXIT_CONFIG, f"{cfg.experiment}: {exc}")
    elapsed = time.perf_counter() - started

    failed = record.failed_verdicts()
    log.emit(
        "experiment_finished",
        {
            "experiment": cfg.experiment,
            "wall_clock_s": elapsed,
            "verdicts_passed": len(record.verdicts) - len(failed),
            "verdicts_failed": len(failed),
        },
    )
    paths = record.write(out_dir)
    log.emit("result_written", {"files": [str(p) for p in paths]})

    for verdict in record.verdicts:
        status = "PASS" if verdict.passed else "FAIL"
        print(
            f"{status} {verdict.name}: {verdict.value!r} {verdict.comparison} "
            f"{verdict.tolerance!r}"
        )
    print(f"result: {out_dir / record.result_file_name()}")
    if failed:
        names = ", ".join(v.name for v in failed)
        print(f"ERROR: {cfg.experiment}: identity check failed: {names}", file=sys.stderr)
        return EXIT_IDENTITY_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qact")
    parser.add_argument("--version", action="version", version=f"qaction {__version__}")
    parser.set_defaults(func=cmd_list)

    sub = parser.add_subparsers(dest="command")

    listing = sub.add_parser("list", help="List experiments with required parameters")
    listing.set_defaults(func=cmd_list)

    template = sub.add_parser("template", help="Print the packaged config template")
    template.add_argument("name", help="Experiment name")
    template.set_defaults(func=cmd_template)

    run = sub.add_parser("run", help="Run one experiment from a config file")
    run.add_argument("config", help="Path to an experiment.v0 JSON config")
    run.add_argument(
        "--output-dir",
        help="Directory for result files (default: config output_dir, else ./results/<name>/)",
    )
    run.add_argument("--seed", type=int, help="Override the config seed")
    run.add_argument(
        "--threads",
        type=int,
        help="Worker threads for trace enumeration (default: $QACTION_THREADS or 1)",
    )
    run.set_defaults(func=cmd_run)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
