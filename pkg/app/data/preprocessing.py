"""Framing, per-channel normalization and flattening of EEG recordings."""

from __future__ import annotations

from dataclasses import replace
from typing import TYPE_CHECKING

import numpy as np

from app.errors import ContractError, DataError, DimensionError, ParameterError
from app.models.recording import (
    FRAME_LEN,
    N_CHANNELS,
    SAMPLE_RATE_HZ,
    Frame,
    FrameSet,
    Label,
    Normalization,
    RawRecording,
)
from app.utils.logging import get_logger

if TYPE_CHECKING:
    from collections.abc import Iterable

    from numpy.typing import ArrayLike, NDArray

logger = get_logger("data.preprocessing")

REDUCED_STEP = 5


def segment(rec: RawRecording, frame_len: int = FRAME_LEN) -> list[Frame]:
    """Cut a recording into consecutive non-overlapping frames.

    The trailing remainder shorter than ``frame_len`` is discarded.

    Args:
        rec: Recording to segment.
        frame_len: Samples per frame.

    Returns:
        floor(n_samples / frame_len) raw frames in time order.

    Raises:
        ParameterError: If frame_len is not positive.
        DataError: If the recording is shorter than one frame.
    """
    if frame_len <= 0:
        raise ParameterError(f"frame_len must be positive, got {frame_len}")

    count = rec.n_samples // frame_len
    if count == 0:
        raise DataError(
            f"recording {rec.subject_id} has {rec.n_samples} samples, "
            f"fewer than one frame of {frame_len}"
        )

    frames = [
        Frame(
            subject_id=rec.subject_id,
            label=rec.label,
            data=rec.samples[i * frame_len : (i + 1) * frame_len].copy(),
            frame_index=i,
        )
        for i in range(count)
    ]
    logger.debug(
        "Segmented recording",
        extra={
            "subject_id": rec.subject_id,
            "frames": count,
            "discarded_samples": rec.n_samples - count * frame_len,
        },
    )
    return frames


def zscore_channels(data: NDArray[np.float64]) -> tuple[NDArray[np.float64], list[int]]:
    """Standardize each column with its population mean and std.

    Returns:
        The standardized array and the indices of zero-variance columns,
        which are set to zeros.
    """
    mean = data.mean(axis=0)
    std = data.std(axis=0)
    flat = std == 0.0
    out = np.zeros_like(data)
    live = ~flat
    out[:, live] = (data[:, live] - mean[live]) / std[live]
    return out, [int(i) for i in np.flatnonzero(flat)]


def l2_channels(data: NDArray[np.float64]) -> NDArray[np.float64]:
    """Scale each column to unit Euclidean norm; all-zero columns stay zero."""
    norms = np.linalg.norm(data, axis=0)
    out = np.zeros_like(data)
    live = norms > 0.0
    out[:, live] = data[:, live] / norms[live]
    return out


def normalize(frame: Frame, scheme: Normalization | str) -> Frame:
    """Normalize a raw frame per channel.

    zscore standardizes every channel over the frame's samples. zscore_l2
    applies zscore and then scales every channel to unit L2 norm.

    Args:
        frame: Frame tagged raw.
        scheme: zscore or zscore_l2.

    Returns:
        A new frame carrying the scheme tag.

    Raises:
        ContractError: If the frame is already normalized.
        ParameterError: If scheme is raw.
    """
    scheme = Normalization(scheme)
    if scheme is Normalization.RAW:
        raise ParameterError("normalize scheme must be zscore or zscore_l2, got raw")
    if frame.is_normalized:
        raise ContractError(
            f"frame {frame.subject_id}#{frame.frame_index} is already "
            f"normalized ({frame.normalization.value})"
        )

    data, flat = zscore_channels(frame.data)
    if flat:
        logger.warning(
            "Zero-variance channels set to zeros",
            extra={
                "subject_id": frame.subject_id,
                "frame_index": frame.frame_index,
                "channels": flat,
            },
        )
    if scheme is Normalization.ZSCORE_L2:
        data = l2_channels(data)

    return replace(frame, data=data, normalization=scheme)


def normalize_frames(frames: FrameSet, scheme: Normalization | str) -> FrameSet:
    """Normalize every frame; ``raw`` returns the set unchanged."""
    scheme = Normalization(scheme)
    if scheme is Normalization.RAW:
        return frames
    return FrameSet([normalize(f, scheme) for f in frames.frames])


def flatten_frame(frame: Frame) -> NDArray[np.float64]:
    """Row-major (time-major) feature vector of a frame."""
    return frame.data.reshape(-1).copy()


def unflatten_frame(
    vector: ArrayLike, frame_len: int = FRAME_LEN, n_channels: int = N_CHANNELS
) -> NDArray[np.float64]:
    """Inverse of flatten_frame: a [frame_len x n_channels] array.

    Raises:
        DimensionError: If the vector length is not frame_len * n_channels.
    """
    flat = np.asarray(vector, dtype=np.float64).reshape(-1)
    if flat.size != frame_len * n_channels:
        raise DimensionError(
            f"vector of length {flat.size} cannot form a {frame_len}x{n_channels} frame",
            axis="features",
        )
    return flat.reshape(frame_len, n_channels).copy()


def frames_from_recordings(
    recordings: Iterable[RawRecording], frame_len: int = FRAME_LEN
) -> FrameSet:
    """Segment every recording and collect the frames in input order."""
    frames: list[Frame] = []
    for rec in recordings:
        frames.extend(segment(rec, frame_len))
    return FrameSet(frames)


def reduce_frameset(frames: FrameSet, step: int = REDUCED_STEP) -> FrameSet:
    """Keep every ``step``-th frame, starting with the first."""
    if step < 1:
        raise ParameterError(f"step must be at least 1, got {step}")
    return FrameSet(frames.frames[::step])


def synthetic_frameset(
    frames_per_class: int,
    frame_len: int = 250,
    n_channels: int = N_CHANNELS,
    subjects_per_class: int = 2,
    seed: int = 0,
    sample_rate_hz: float = SAMPLE_RATE_HZ,
    burst_amplitude: float = 3.0,
    burst_hz: float = 10.0,
) -> FrameSet:
    """Two-class toy EEG: HC frames are Gaussian noise, SZ frames add a sinusoid burst.

    The burst covers the middle half of every SZ frame on all channels, with
    a random phase per frame. Frames are dealt round-robin to
    ``subjects_per_class`` subjects per class and returned raw, SZ first.
    """
    if frames_per_class < 1 or subjects_per_class < 1:
        raise ParameterError("frames_per_class and subjects_per_class must be positive")

    rng = np.random.default_rng(seed)
    t = np.arange(frame_len) / sample_rate_hz
    envelope = np.zeros(frame_len)
    envelope[frame_len // 4 : 3 * frame_len // 4] = 1.0

    frames: list[Frame] = []
    for label in (Label.SZ, Label.HC):
        prefix = "s" if label is Label.SZ else "h"
        for i in range(frames_per_class):
            data = rng.standard_normal((frame_len, n_channels))
            if label is Label.SZ:
                phase = rng.uniform(0.0, 2.0 * np.pi)
                burst = burst_amplitude * envelope * np.sin(2.0 * np.pi * burst_hz * t + phase)
                data += burst[:, None]
            subject = i % subjects_per_class
            frames.append(
                Frame(
                    subject_id=f"{prefix}{subject + 1:02d}",
                    label=label,
                    data=data,
                    frame_index=i // subjects_per_class,
                )
            )
    return FrameSet(frames)
