"""Experiment and grid configuration loader."""

import os
from pathlib import Path
from typing import Any

import yaml

from app.errors import SzBenchError
from app.models.config import ExperimentConfig
from app.utils.logging import get_logger

logger = get_logger("utils.config_loader")

DATASET_ROOT_ENV = "SZBENCH_DATASET_ROOT"


class ConfigLoaderError(SzBenchError):
    """Error raised when configuration loading fails."""

    pass


def load_experiment_config(
    path: Path | str, overrides: dict[str, Any] | None = None
) -> ExperimentConfig:
    """Load one experiment from a JSON (or YAML) file.

    ``SZBENCH_DATASET_ROOT`` supplies ``dataset_dir`` when the file omits it.

    Args:
        path: Config file.
        overrides: Top-level keys replacing the file's values (command-line flags).

    Returns:
        ExperimentConfig instance.

    Raises:
        ConfigLoaderError: If the file is missing, unparsable or invalid.
    """
    path = Path(path)
    raw_config = {**_read_mapping(path), **(overrides or {})}
    config = _build(raw_config, path)
    logger.info(
        "Loaded configuration",
        extra={"file": str(path), "method": config.method, "run": config.label},
    )
    return config


def load_grid_config(
    path: Path | str, overrides: dict[str, Any] | None = None
) -> list[ExperimentConfig]:
    """Load a grid of experiments.

    The file is either a list of experiment mappings or a mapping with a
    ``runs`` list and optional ``defaults`` merged under every run.
    Duplicate runs are kept. ``overrides`` replace keys of every run.

    Raises:
        ConfigLoaderError: If the file is invalid or the grid is empty.
    """
    path = Path(path)
    document = _read_document(path)

    defaults: dict[str, Any] = {}
    if isinstance(document, dict):
        unknown = sorted(set(document) - {"runs", "defaults"})
        if unknown:
            raise ConfigLoaderError(f"Unknown grid keys in {path}: {', '.join(unknown)}")
        defaults = document.get("defaults") or {}
        runs = document.get("runs") or []
    else:
        runs = document or []

    if not isinstance(runs, list) or not isinstance(defaults, dict):
        raise ConfigLoaderError(f"Grid file {path} must hold a list of runs")
    if not runs:
        raise ConfigLoaderError(f"Grid file {path} contains no runs")

    configs = []
    for i, run in enumerate(runs):
        if not isinstance(run, dict):
            raise ConfigLoaderError(f"Run {i} in {path} is not a mapping")
        configs.append(_build({**defaults, **run, **(overrides or {})}, path, where=f"run {i}"))

    logger.info("Loaded grid", extra={"file": str(path), "runs": len(configs)})
    return configs


def _build(raw_config: dict[str, Any], path: Path, where: str = "") -> ExperimentConfig:
    values = dict(raw_config)
    if not values.get("dataset_dir") and os.environ.get(DATASET_ROOT_ENV):
        values["dataset_dir"] = os.environ[DATASET_ROOT_ENV]

    try:
        return ExperimentConfig.from_mapping(values)
    except (TypeError, ValueError) as e:
        location = f"{path} ({where})" if where else str(path)
        raise ConfigLoaderError(f"Invalid configuration in {location}: {e}") from e


def _read_mapping(path: Path) -> dict[str, Any]:
    document = _read_document(path)
    if not document:
        raise ConfigLoaderError(f"Config file {path} is empty")
    if not isinstance(document, dict):
        raise ConfigLoaderError(f"Config file {path} must hold a mapping")
    return document


def _read_document(path: Path) -> Any:
    if not path.is_file():
        raise ConfigLoaderError(f"Config file not found: {path}")

    try:
        return _load_yaml_file(path)
    except yaml.YAMLError as e:
        raise ConfigLoaderError(f"Failed to parse config file {path}: {e}") from e
    except OSError as e:
        raise ConfigLoaderError(f"Failed to read config file {path}: {e}") from e


def _load_yaml_file(filepath: Path) -> Any:
    """Load a JSON or YAML file.

    Args:
        filepath: Path to the file.

    Returns:
        Parsed content, or None if empty.

    Raises:
        yaml.YAMLError: If the content is invalid.
        OSError: If file cannot be read.
    """
    content = filepath.read_text(encoding="utf-8")

    if not content.strip():
        return None

    return yaml.safe_load(content)
