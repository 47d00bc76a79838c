"""Command-line entry point: ``szbench ingest|run|grid|report``.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
Result tables go to stdout; structured logs go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any

from app import __app_name__, __version__
from app.data.cache import ingest
from app.data.manifest import ManifestError, load_manifest, scan_directory
from app.errors import SzBenchError
from app.evaluation.report import aggregate_report, dump_json, load_results
from app.models.recording import FRAME_LEN, Label
from app.runner import CACHE_FILE_NAME, run_experiment, run_grid
from app.utils.config_loader import ConfigLoaderError, load_experiment_config, load_grid_config
from app.utils.logging import configure_logging, get_logger

if TYPE_CHECKING:
    from collections.abc import Sequence

    from app.models.config import ExperimentConfig

logger = get_logger("cli")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, type=Path, help="JSON config file")
    parser.add_argument("--seed", type=int, help="override the master seed")
    parser.add_argument("--jobs", type=int, help="parallel workers")
    parser.add_argument(
        "--allow-raw", action="store_true", help="permit raw signals for deep models"
    )
    parser.add_argument(
        "--subject-split", action="store_true", help="assign whole subjects to folds"
    )
    parser.add_argument("--reduced", action="store_true", help="keep every 5th frame")
    parser.add_argument("--out", type=Path, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=__app_name__,
        description="EEG schizophrenia classification benchmark",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    commands = parser.add_subparsers(dest="command", required=True)

    ingest_cmd = commands.add_parser("ingest", help="segment a dataset into a frame cache")
    ingest_cmd.add_argument("dataset_dir", type=Path)
    ingest_cmd.add_argument("--manifest", type=Path, help="JSON manifest (default: scan *.edf)")
    ingest_cmd.add_argument(
        "--out", type=Path, help=f"cache file (default: <dataset>/{CACHE_FILE_NAME})"
    )
    ingest_cmd.add_argument("--frame-len", type=int, default=FRAME_LEN)

    run_cmd = commands.add_parser("run", help="cross-validate one configuration")
    _run_flags(run_cmd)

    grid_cmd = commands.add_parser("grid", help="run a list of configurations")
    _run_flags(grid_cmd)

    report_cmd = commands.add_parser("report", help="tabulate existing results.json files")
    report_cmd.add_argument("results", nargs="+", type=Path, help="results.json files or run dirs")
    report_cmd.add_argument("--out", type=Path, help="write the table as text and JSON here")
    report_cmd.add_argument(
        "--published", action="store_true", help="add the published accuracy column"
    )
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    if args.jobs is not None:
        overrides["n_jobs"] = args.jobs
    if args.allow_raw:
        overrides["allow_raw"] = True
    if args.subject_split:
        overrides["subject_split"] = True
    if args.reduced:
        overrides["reduced"] = True
    if args.out is not None:
        overrides["output_dir"] = str(args.out)
    return overrides


def _with_seed(config: ExperimentConfig, seed: int | None) -> ExperimentConfig:
    return config if seed is None else config.with_seed(seed)


def cmd_ingest(args: argparse.Namespace) -> int:
    """Build (or reuse) the frame cache and print a per-class summary."""
    if args.frame_len < 1:
        logger.error("Invalid frame length", extra={"frame_len": args.frame_len})
        return EXIT_USAGE
    try:
        manifest = (
            load_manifest(args.manifest) if args.manifest else scan_directory(args.dataset_dir)
        )
    except ManifestError as e:
        logger.error("Invalid manifest", extra={"error": str(e)})
        return EXIT_USAGE

    cache_path = args.out or args.dataset_dir / CACHE_FILE_NAME
    frames = ingest(manifest, args.dataset_dir, cache_path, args.frame_len)
    sz, hc = frames.class_counts
    subjects = manifest.class_counts
    print(f"cache: {cache_path}")
    print(f"subjects: {Label.SZ.value}={subjects[0]} {Label.HC.value}={subjects[1]}")
    print(f"frames: {Label.SZ.value}={sz} {Label.HC.value}={hc} total={len(frames)}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    """Run one experiment and print its aggregate row."""
    config = _with_seed(load_experiment_config(args.config, _overrides(args)), args.seed)
    report = run_experiment(config).report
    if report is not None:
        print(aggregate_report([report]).text)
    return EXIT_OK


def cmd_grid(args: argparse.Namespace) -> int:
    """Run every grid entry; nonzero exit if any run failed."""
    configs = [
        _with_seed(c, args.seed) for c in load_grid_config(args.config, _overrides(args))
    ]
    output_dir = args.out or Path(configs[0].output_dir)
    entries, table = run_grid(configs, output_dir, n_jobs=args.jobs or 1)

    if table is not None:
        print(table.text)
    failed = [e for e in entries if e.error]
    for entry in failed:
        print(f"FAILED {entry.config.label}: {entry.error}", file=sys.stderr)
    return EXIT_FAILURE if failed else EXIT_OK


def _results_paths(paths: Sequence[Path]) -> list[Path]:
    found: list[Path] = []
    for path in paths:
        if path.is_dir():
            found.extend(sorted(path.glob("**/results.json")))
        else:
            found.append(path)
    return found


def cmd_report(args: argparse.Namespace) -> int:
    """Re-render the results table from results.json files."""
    paths = _results_paths(args.results)
    if not paths:
        logger.error("No results.json files found")
        return EXIT_USAGE

    table = aggregate_report([load_results(p) for p in paths], with_published=args.published)
    print(table.text)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "results_table.txt").write_text(table.text + "\n", encoding="utf-8")
        dump_json(args.out / "results_table.json", table.to_dict())
    return EXIT_OK


COMMANDS = {"ingest": cmd_ingest, "run": cmd_run, "grid": cmd_grid, "report": cmd_report}


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, dispatch a subcommand and map errors to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    configure_logging(level=args.log_level)
    try:
        return COMMANDS[args.command](args)
    except ConfigLoaderError as e:
        logger.error("Configuration error", extra={"error": str(e)})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SzBenchError as e:
        logger.error("Command failed", extra={"command": args.command, "error": str(e)})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except Exception as e:
        logger.exception("Unexpected failure", extra={"command": args.command})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
