"""Utility modules for szbench."""

from app.utils.config_loader import (
    ConfigLoaderError,
    load_experiment_config,
    load_grid_config,
)
from app.utils.logging import JsonFormatter, configure_logging, get_logger

__all__ = [
    "ConfigLoaderError",
    "JsonFormatter",
    "configure_logging",
    "get_logger",
    "load_experiment_config",
    "load_grid_config",
]
