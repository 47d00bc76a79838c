"""EEG recording, frame and fold models."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from numpy.typing import NDArray

# Electrode order used by the reference dataset (10-20 montage)
MONTAGE = (
    "Fp1", "Fp2", "F7", "F3", "Fz", "F4", "F8", "T3", "C3", "Cz",
    "C4", "T4", "T5", "P3", "Pz", "P4", "T6", "O1", "O2",
)  # fmt: skip

N_CHANNELS = len(MONTAGE)
SAMPLE_RATE_HZ = 250.0
FRAME_LEN = 6250  # 25 s at 250 Hz


class Label(str, Enum):
    """Diagnostic class of a subject. SZ is the positive class."""

    SZ = "SZ"
    HC = "HC"

    @property
    def index(self) -> int:
        """Class index in the fixed SZ < HC order."""
        return 0 if self is Label.SZ else 1

    @property
    def target(self) -> float:
        """Binary training target (1 for SZ)."""
        return 1.0 if self is Label.SZ else 0.0


class Normalization(str, Enum):
    """Per-frame normalization scheme."""

    RAW = "raw"
    ZSCORE = "zscore"
    ZSCORE_L2 = "zscore_l2"


@dataclass
class RawRecording:
    """One subject's multichannel EEG signal in microvolts."""

    subject_id: str
    label: Label
    sample_rate_hz: float
    channel_names: list[str]
    samples: NDArray[np.float64]  # [n_samples x n_channels]

    def __post_init__(self) -> None:
        """Validate fields after initialization."""
        if not self.subject_id:
            raise ValueError("subject_id cannot be empty")

        self.label = Label(self.label)
        self.samples = np.asarray(self.samples, dtype=np.float64)

        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")

        if self.samples.ndim != 2:
            raise ValueError(
                f"samples must be 2-D [n_samples x channels], got {self.samples.shape}"
            )

        if self.samples.shape[1] != len(self.channel_names):
            raise ValueError(
                f"samples have {self.samples.shape[1]} channels but "
                f"{len(self.channel_names)} channel names were given"
            )

    @property
    def n_samples(self) -> int:
        return int(self.samples.shape[0])

    @property
    def n_channels(self) -> int:
        return int(self.samples.shape[1])

    @property
    def duration_seconds(self) -> float:
        return self.n_samples / self.sample_rate_hz

    @property
    def matches_montage(self) -> bool:
        """Whether the channel list is exactly the reference montage order."""
        return tuple(self.channel_names) == MONTAGE


@dataclass
class Frame:
    """One fixed-length multichannel segment; the unit of classification."""

    subject_id: str
    label: Label
    data: NDArray[np.float64]  # [frame_len x n_channels], time-major
    frame_index: int
    normalization: Normalization = Normalization.RAW

    def __post_init__(self) -> None:
        """Validate fields after initialization."""
        self.label = Label(self.label)
        self.normalization = Normalization(self.normalization)
        self.data = np.asarray(self.data, dtype=np.float64)

        if self.data.ndim != 2:
            raise ValueError(f"frame data must be 2-D [time x channels], got {self.data.shape}")

        if self.frame_index < 0:
            raise ValueError(f"frame_index must be non-negative, got {self.frame_index}")

    @property
    def frame_len(self) -> int:
        return int(self.data.shape[0])

    @property
    def n_channels(self) -> int:
        return int(self.data.shape[1])

    @property
    def is_normalized(self) -> bool:
        return self.normalization is not Normalization.RAW


@dataclass
class FrameSet:
    """An ordered collection of frames with per-class counts."""

    frames: list[Frame] = field(default_factory=list)

    @property
    def class_counts(self) -> tuple[int, int]:
        """(SZ count, HC count)."""
        sz = sum(1 for f in self.frames if f.label is Label.SZ)
        return sz, len(self.frames) - sz

    @property
    def labels(self) -> list[Label]:
        return [f.label for f in self.frames]

    @property
    def subjects(self) -> list[str]:
        """Distinct subject ids in first-seen order."""
        return list(dict.fromkeys(f.subject_id for f in self.frames))

    @property
    def targets(self) -> NDArray[np.float64]:
        return np.array([f.label.target for f in self.frames], dtype=np.float64)

    def subset(self, indices: list[int] | NDArray[np.intp]) -> FrameSet:
        """Frames at ``indices``, in that order."""
        return FrameSet([self.frames[int(i)] for i in indices])

    def stack(self) -> NDArray[np.float64]:
        """All frame data as one [n_frames x time x channels] array."""
        if not self.frames:
            raise ValueError("cannot stack an empty frame set")
        return np.stack([f.data for f in self.frames])

    def flat_matrix(self) -> NDArray[np.float64]:
        """All frames flattened row-major, [n_frames x time*channels]."""
        return self.stack().reshape(len(self.frames), -1)

    def __len__(self) -> int:
        return len(self.frames)


@dataclass
class FoldSplit:
    """Assignment of every frame of a FrameSet to one of k folds."""

    k: int
    assignments: list[int]
    seed: int
    by_subject: bool = False

    def __post_init__(self) -> None:
        """Validate fields after initialization."""
        if self.k < 2:
            raise ValueError(f"k must be at least 2, got {self.k}")

        bad = [a for a in self.assignments if not 0 <= a < self.k]
        if bad:
            raise ValueError(f"fold ids must lie in [0, {self.k}), got {sorted(set(bad))}")

    def test_indices(self, fold: int) -> list[int]:
        return [i for i, a in enumerate(self.assignments) if a == fold]

    def train_indices(self, fold: int) -> list[int]:
        return [i for i, a in enumerate(self.assignments) if a != fold]

    @property
    def fold_sizes(self) -> list[int]:
        return [self.assignments.count(f) for f in range(self.k)]


def encode_labels(labels: list[Label] | NDArray[np.intp]) -> NDArray[np.intp]:
    """Class indices (SZ = 0, HC = 1) for labels or already-encoded indices."""
    if isinstance(labels, np.ndarray):
        encoded = labels.astype(np.intp)
    else:
        encoded = np.array([Label(lab).index for lab in labels], dtype=np.intp)
    if encoded.size and not np.isin(encoded, (0, 1)).all():
        raise ValueError("class indices must be 0 (SZ) or 1 (HC)")
    return encoded


def decode_label(index: int) -> Label:
    return Label.SZ if int(index) == 0 else Label.HC
