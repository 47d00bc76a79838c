"""Structured JSON logging for szbench.

Log lines go to stderr as one JSON object each; stdout is left to result tables.
Anything passed through ``extra=`` lands as a top-level key, with numpy values
unwrapped so fold metrics read as plain numbers.
"""

from __future__ import annotations

import json
import logging
import os
import sys
import traceback
from datetime import UTC, datetime
from enum import Enum
from pathlib import PurePath
from typing import Any

import numpy as np

ROOT_LOGGER_NAME = "szbench"
LEVEL_ENV_VAR = "SZBENCH_LOG_LEVEL"

# Attributes every LogRecord carries; anything else on a record came from ``extra=``.
_RECORD_ATTRS = frozenset(vars(logging.makeLogRecord({}))) | {"message", "asctime"}


def to_plain(value: Any) -> Any:
    """Convert ``value`` into something ``json.dumps`` accepts."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return {"shape": list(value.shape), "dtype": str(value.dtype)}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, PurePath):
        return str(value)
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [to_plain(v) for v in value]
    return value


class JsonFormatter(logging.Formatter):
    """Render each record as a single JSON line."""

    def format(self, record: logging.LogRecord) -> str:
        entry: dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, tz=UTC).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        if record.levelno >= logging.WARNING:
            entry["location"] = {
                "file": record.pathname,
                "line": record.lineno,
                "function": record.funcName,
            }
        if record.exc_info:
            entry["exception"] = "".join(traceback.format_exception(*record.exc_info))

        entry.update(
            (key, to_plain(value))
            for key, value in vars(record).items()
            if key not in _RECORD_ATTRS and not key.startswith("_")
        )
        return json.dumps(entry, default=str)


def resolve_level(level: str | None = None) -> int:
    """Map a level name to its number.

    ``level`` wins over ``SZBENCH_LOG_LEVEL``; unknown names give INFO.
    """
    name = (level or os.environ.get(LEVEL_ENV_VAR) or "INFO").upper()
    number = logging.getLevelNamesMapping().get(name)
    return number if number is not None else logging.INFO


def configure_logging(name: str = ROOT_LOGGER_NAME, level: str | None = None) -> logging.Logger:
    """Install the JSON stderr handler on the project logger.

    Calling it again replaces the handler instead of adding a second one.

    Args:
        name: Logger to configure.
        level: Level name; falls back to SZBENCH_LOG_LEVEL, then INFO.

    Returns:
        The configured logger.
    """
    numeric = resolve_level(level)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JsonFormatter())
    handler.setLevel(numeric)

    logger = logging.getLogger(name)
    logger.handlers[:] = [handler]
    logger.setLevel(numeric)
    logger.propagate = False
    return logger


def get_logger(module_name: str) -> logging.Logger:
    """Return the logger for ``module_name`` below the project root, e.g. "data.edf"."""
    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{module_name}")
