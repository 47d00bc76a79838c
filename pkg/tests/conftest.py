"""Pytest configuration and shared fixtures."""

from __future__ import annotations

import logging
import os
from typing import TYPE_CHECKING

import numpy as np
import pytest

from app.data.preprocessing import normalize_frames, synthetic_frameset
from app.models.recording import Normalization
from app.utils.logging import ROOT_LOGGER_NAME
from tests.fixtures.eeg import write_dataset

if TYPE_CHECKING:
    from collections.abc import Generator
    from pathlib import Path

    from app.models.recording import FrameSet


@pytest.fixture(autouse=True)
def reset_env() -> Generator[None]:
    """Reset environment variables after each test."""
    original_env = os.environ.copy()
    yield
    os.environ.clear()
    os.environ.update(original_env)


@pytest.fixture(autouse=True)
def reset_logging() -> Generator[None]:
    """Undo configure_logging so caplog keeps receiving project records."""
    logger = logging.getLogger(ROOT_LOGGER_NAME)
    handlers, level, propagate = list(logger.handlers), logger.level, logger.propagate
    yield
    logger.handlers[:] = handlers
    logger.setLevel(level)
    logger.propagate = propagate


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for test data."""
    return np.random.default_rng(1234)


@pytest.fixture
def raw_frames() -> FrameSet:
    """20 raw synthetic frames per class, 64 samples x 3 channels."""
    return synthetic_frameset(20, frame_len=64, n_channels=3, seed=7)


@pytest.fixture
def zscore_frames(raw_frames: FrameSet) -> FrameSet:
    """The synthetic frames, z-scored per channel."""
    return normalize_frames(raw_frames, Normalization.ZSCORE)


@pytest.fixture
def dataset_dir(tmp_path: Path) -> Path:
    """Two SZ and two HC EDF recordings of 1000 samples with a manifest."""
    directory = tmp_path / "dataset"
    write_dataset(directory, n_sz=2, n_hc=2, n_samples=1000)
    return directory
