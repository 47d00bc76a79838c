"""Synthetic EEG recordings and datasets for tests."""

from __future__ import annotations

import json
from typing import TYPE_CHECKING

import numpy as np

from app.data.edf import write_edf
from app.models.recording import MONTAGE, Frame, FrameSet, Label, Normalization, RawRecording

if TYPE_CHECKING:
    from pathlib import Path


def make_recording(
    subject_id: str = "s01",
    label: Label = Label.SZ,
    n_samples: int = 1000,
    channels: tuple[str, ...] = MONTAGE,
    sample_rate_hz: float = 250.0,
    seed: int = 0,
    amplitude: float = 20.0,
) -> RawRecording:
    """Gaussian-noise recording in microvolts."""
    rng = np.random.default_rng(seed)
    return RawRecording(
        subject_id=subject_id,
        label=label,
        sample_rate_hz=sample_rate_hz,
        channel_names=list(channels),
        samples=amplitude * rng.standard_normal((n_samples, len(channels))),
    )


def write_dataset(
    directory: Path,
    n_sz: int = 2,
    n_hc: int = 2,
    n_samples: int = 1000,
    with_manifest: bool = True,
) -> Path | None:
    """Write ``sNN.edf``/``hNN.edf`` files and, optionally, a JSON manifest.

    Returns:
        Manifest path, or None without a manifest.
    """
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for prefix, label, count in (("s", Label.SZ, n_sz), ("h", Label.HC, n_hc)):
        for i in range(1, count + 1):
            name = f"{prefix}{i:02d}"
            seed = i if label is Label.SZ else 100 + i
            write_edf(
                directory / f"{name}.edf",
                make_recording(name, label, n_samples=n_samples, seed=seed),
            )
            entries.append({"file": f"{name}.edf", "label": label.value})

    if not with_manifest:
        return None
    manifest = directory / "manifest.json"
    manifest.write_text(json.dumps({"version": 1, "entries": entries}), encoding="utf-8")
    return manifest


def separable_features(
    n_per_class: int = 20, n_features: int = 4, gap: float = 4.0, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Two Gaussian blobs: SZ (index 0) around +gap/2, HC (index 1) around -gap/2."""
    rng = np.random.default_rng(seed)
    sz = rng.standard_normal((n_per_class, n_features)) + gap / 2
    hc = rng.standard_normal((n_per_class, n_features)) - gap / 2
    x = np.vstack([sz, hc])
    y = np.array([0] * n_per_class + [1] * n_per_class, dtype=np.intp)
    return x, y


def xor_features(n_per_quadrant: int = 10, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """XOR layout: SZ in quadrants (+,+) and (-,-), HC in the other two."""
    rng = np.random.default_rng(seed)
    points, labels = [], []
    for sx, sy in ((1, 1), (-1, -1), (1, -1), (-1, 1)):
        centre = np.array([sx, sy], dtype=np.float64)
        points.append(centre + 0.2 * rng.standard_normal((n_per_quadrant, 2)))
        labels.extend([0 if sx == sy else 1] * n_per_quadrant)
    return np.vstack(points), np.array(labels, dtype=np.intp)


def offset_frameset(
    n_per_class: int = 12,
    frame_len: int = 16,
    n_channels: int = 2,
    offset: float = 1.5,
    seed: int = 0,
) -> FrameSet:
    """Frames a linear model separates: SZ noise around +offset, HC around -offset.

    Frames are tagged zscore so deep models accept them without warnings.
    """
    rng = np.random.default_rng(seed)
    frames = []
    for label, sign in ((Label.SZ, 1.0), (Label.HC, -1.0)):
        prefix = "s" if label is Label.SZ else "h"
        for i in range(n_per_class):
            frames.append(
                Frame(
                    subject_id=f"{prefix}{i % 3 + 1:02d}",
                    label=label,
                    data=sign * offset + rng.standard_normal((frame_len, n_channels)),
                    frame_index=i // 3,
                    normalization=Normalization.ZSCORE,
                )
            )
    return FrameSet(frames)
