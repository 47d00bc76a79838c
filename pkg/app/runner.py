"""Experiment pipeline: load frames, normalize, cross-validate and write results."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import TYPE_CHECKING, Any

from joblib import Parallel, delayed

from app import __version__
from app.baselines.registry import make_baseline
from app.data.cache import ingest, read_cache
from app.data.folds import make_split
from app.data.manifest import load_manifest, scan_directory
from app.data.preprocessing import normalize_frames, reduce_frameset
from app.errors import DataError
from app.evaluation.harness import HarnessConfig, cross_validate, trainer_for
from app.evaluation.plots import curves_svg, grid_accuracy_svg, roc_svg
from app.evaluation.report import (
    ResultsTable,
    aggregate_report,
    dump_json,
    mean_learning_curve,
    pooled_roc,
    write_curves_csv,
    write_results_json,
    write_roc_csv,
)
from app.models.session import RunSession, RunState
from app.numerics.init import INIT_SCHEME
from app.numerics.optim import OptimizerState
from app.utils.logging import get_logger
from app.zoo.architectures import build

if TYPE_CHECKING:
    from app.models.config import ExperimentConfig
    from app.models.metrics import MetricsReport
    from app.models.recording import FrameSet

logger = get_logger("runner")

CACHE_FILE_NAME = "frames.szbc"


@dataclass
class RunOutcome:
    """A finished (or failed) run and the files it wrote."""

    session: RunSession
    output_dir: Path
    files: list[Path] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.session.state is RunState.COMPLETED

    @property
    def report(self) -> MetricsReport | None:
        return self.session.report


def default_cache_path(config: ExperimentConfig) -> Path:
    return Path(config.cache) if config.cache else Path(config.output_dir) / CACHE_FILE_NAME


def load_frames(config: ExperimentConfig) -> FrameSet:
    """Raw frames for a config: ingest from the dataset, or read the cache alone.

    With a ``dataset_dir`` the frames come from the manifest (or a directory
    scan) through the hash-checked cache. Without one, ``cache`` must name
    an existing cache file.

    Raises:
        DataError: If neither source is configured or the cache frame length
            differs from the config.
    """
    if config.dataset_dir:
        if config.manifest:
            manifest = load_manifest(config.manifest)
        else:
            manifest = scan_directory(config.dataset_dir)
        return ingest(manifest, config.dataset_dir, default_cache_path(config), config.frame_len)

    if not config.cache:
        raise DataError("config names neither a dataset_dir nor a cache file")

    frames, header = read_cache(config.cache)
    if header.frame_len != config.frame_len:
        raise DataError(
            f"cache {config.cache} holds frames of {header.frame_len} samples, "
            f"config expects {config.frame_len}"
        )
    return frames


def prepare_frames(frames: FrameSet, config: ExperimentConfig) -> FrameSet:
    """Apply the config's normalization and the optional every-5th-frame reduction."""
    prepared = normalize_frames(frames, config.normalization)
    if config.reduced:
        prepared = reduce_frameset(prepared)
    return prepared


def run_manifest(config: ExperimentConfig, frames: FrameSet) -> dict[str, Any]:
    """Every setting needed to repeat the run; holds no timestamps."""
    sz, hc = frames.class_counts
    first = frames.frames[0]
    manifest: dict[str, Any] = {
        **config.to_dict(),
        "version": __version__,
        "std": "population",
        "frames": {
            "SZ": sz,
            "HC": hc,
            "frame_len": first.frame_len,
            "channels": first.n_channels,
        },
    }
    if config.is_deep and config.train is not None:
        spec = build(config.model_name, config.activation, config.l2_coeff)
        manifest["model"] = spec.to_dict()
        manifest["init_scheme"] = dict(INIT_SCHEME)
        manifest["optimizer"] = OptimizerState(
            kind=config.train.optimizer, learning_rate=config.train.learning_rate
        ).describe()
    else:
        manifest["baseline"] = make_baseline(config.method, config.baseline).hyperparameters()
    return manifest


def write_outputs(report: MetricsReport, output_dir: Path, label: str) -> list[Path]:
    """results.json, pooled ROC (CSV and SVG) and, for deep models, learning curves."""
    files = [write_results_json(output_dir / "results.json", report)]

    curve, auc = pooled_roc(report)
    files.append(write_roc_csv(output_dir / f"roc_{label}.csv", report))
    files.append(roc_svg(output_dir / f"roc_{label}.svg", curve, auc, label))

    learning = mean_learning_curve(report)
    if len(learning):
        files.append(write_curves_csv(output_dir / f"curves_{label}.csv", report))
        files.append(curves_svg(output_dir / f"curves_{label}.svg", learning, label))
    return files


def run_experiment(
    config: ExperimentConfig,
    frames: FrameSet | None = None,
    output_dir: Path | None = None,
) -> RunOutcome:
    """Run one experiment end to end.

    Args:
        config: The experiment.
        frames: Raw frames to use instead of loading them from the config.
        output_dir: Directory owned by this run; defaults to
            ``<config.output_dir>/<config.label>``.

    Returns:
        RunOutcome of a completed session.

    Raises:
        SzBenchError: Whatever failed; the session is marked failed first.
    """
    session = RunSession(config=config)
    if output_dir is None:
        output_dir = Path(config.output_dir) / config.label
    outcome = RunOutcome(session=session, output_dir=output_dir)
    logger.info("Run started", extra={"run": config.label, "seed": config.seed})

    try:
        session.advance()
        raw = frames if frames is not None else load_frames(config)
        prepared = prepare_frames(raw, config)
        split = make_split(prepared, config.k, config.seed, config.subject_split)

        session.advance()
        harness = HarnessConfig(
            method=config.method,
            seed=config.seed,
            n_jobs=config.n_jobs,
            manifest=run_manifest(config, prepared),
            checkpoint_dir=output_dir / "models" if config.save_models else None,
        )
        report = cross_validate(trainer_for(config), prepared, split, harness)

        session.advance()
        session.report = report
        outcome.files = write_outputs(report, output_dir, config.label)
        session.advance()
    except Exception as e:
        session.fail(str(e))
        stage = session.failed_stage.value if session.failed_stage else None
        logger.error(
            "Run failed", extra={"run": config.label, "stage": stage, "error": str(e)}
        )
        raise

    logger.info(
        "Run finished",
        extra={
            "run": config.label,
            "acc": report.mean["acc"],
            "duration_seconds": session.duration_seconds,
            "stage_seconds": session.stage_seconds,
        },
    )
    return outcome


@dataclass
class GridEntry:
    """Result of one grid run: a report or the error that stopped it."""

    config: ExperimentConfig
    run_dir: Path
    report: MetricsReport | None = None
    error: str | None = None


def _data_key(config: ExperimentConfig) -> tuple[Any, ...]:
    return (config.dataset_dir, config.manifest, config.cache, config.frame_len, config.output_dir)


def grid_run_dirs(configs: list[ExperimentConfig]) -> list[Path]:
    """One output directory per grid entry.

    Entries sharing ``<output_dir>/<label>`` get their grid position appended, so
    runs that differ only in seed, k or hyperparameters never share files.
    """
    bases = [Path(c.output_dir) / c.label for c in configs]
    counts = Counter(bases)
    return [
        base.with_name(f"{base.name}_{index}") if counts[base] > 1 else base
        for index, base in enumerate(bases)
    ]


def single_worker_runs(configs: list[ExperimentConfig], n_jobs: int) -> list[ExperimentConfig]:
    """Pin every run to one worker when the grid itself runs in parallel."""
    if n_jobs == 1:
        return configs
    return [c if c.n_jobs == 1 else replace(c, n_jobs=1) for c in configs]


def _grid_run(config: ExperimentConfig, frames: FrameSet | None, run_dir: Path) -> GridEntry:
    if frames is None:
        return GridEntry(config=config, run_dir=run_dir, error="frames could not be loaded")
    try:
        outcome = run_experiment(config, frames, run_dir)
    except Exception as e:
        return GridEntry(config=config, run_dir=run_dir, error=f"{type(e).__name__}: {e}")
    return GridEntry(config=config, run_dir=run_dir, report=outcome.report)


def run_grid(
    configs: list[ExperimentConfig], output_dir: Path | str, n_jobs: int = 1
) -> tuple[list[GridEntry], ResultsTable | None]:
    """Run every config, continuing past failures, and write the combined table.

    Frames are loaded once per distinct data source before the runs start;
    runs then execute in up to ``n_jobs`` workers, each writing its own
    output subdirectory (see ``grid_run_dirs``). Inside a parallel grid every
    run keeps to a single worker.

    Returns:
        (entries in input order, combined table or None when every run failed).
    """
    output_dir = Path(output_dir)
    configs = single_worker_runs(configs, n_jobs)
    run_dirs = grid_run_dirs(configs)
    sources: dict[tuple[Any, ...], FrameSet | None] = {}
    for config in configs:
        key = _data_key(config)
        if key in sources:
            continue
        try:
            sources[key] = load_frames(config)
        except Exception as e:
            logger.error("Loading frames failed", extra={"run": config.label, "error": str(e)})
            sources[key] = None

    entries: list[GridEntry] = Parallel(n_jobs=n_jobs)(
        delayed(_grid_run)(config, sources[_data_key(config)], run_dir)
        for config, run_dir in zip(configs, run_dirs, strict=True)
    )
    for entry in entries:
        if entry.error:
            logger.error("Grid run failed", extra={"run": entry.config.label, "error": entry.error})

    reports = [e.report for e in entries if e.report is not None]
    if not reports:
        return entries, None

    table = aggregate_report(reports, with_published=True)
    output_dir.mkdir(parents=True, exist_ok=True)
    (output_dir / "grid_results.txt").write_text(table.text + "\n", encoding="utf-8")
    dump_json(
        output_dir / "grid_results.json",
        {
            **table.to_dict(),
            "failed": [
                {"run": e.config.label, "run_dir": str(e.run_dir), "error": e.error}
                for e in entries
                if e.error
            ],
        },
    )
    grid_accuracy_svg(output_dir / "grid_accuracy.svg", table.rows, "Mean accuracy per method")
    return entries, table
