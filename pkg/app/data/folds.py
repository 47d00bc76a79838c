"""Stratified k-fold assignment at frame or subject level."""

from __future__ import annotations

import numpy as np

from app.errors import DataError, ParameterError
from app.models.recording import FoldSplit, FrameSet, Label
from app.utils.logging import get_logger

logger = get_logger("data.folds")


def _check_k(k: int) -> None:
    if k < 2:
        raise ParameterError(f"k must be at least 2, got {k}")


def split_kfold(frames: FrameSet, k: int = 5, seed: int = 0) -> FoldSplit:
    """Stratified shuffled k-fold split of individual frames.

    Each class is shuffled with a generator seeded by ``seed`` and dealt to
    folds round-robin. The deal continues across classes (SZ first), so fold
    sizes differ by at most one and every fold holds both classes.

    Args:
        frames: Frames to split.
        k: Number of folds.
        seed: Shuffle seed.

    Returns:
        FoldSplit over ``frames`` in their stored order.

    Raises:
        ParameterError: If k < 2.
        DataError: If a class has fewer than k frames.
    """
    _check_k(k)
    labels = frames.labels
    rng = np.random.default_rng(seed)
    assignments = [-1] * len(labels)
    dealt = 0

    for label in (Label.SZ, Label.HC):
        members = np.array([i for i, lab in enumerate(labels) if lab is label], dtype=np.intp)
        if members.size < k:
            raise DataError(f"class {label.value} has {members.size} frames, need at least k={k}")
        for j, index in enumerate(rng.permutation(members)):
            assignments[int(index)] = (dealt + j) % k
        dealt += members.size

    split = FoldSplit(k=k, assignments=assignments, seed=seed)
    logger.debug(
        "Frame-level folds assigned",
        extra={"k": k, "seed": seed, "sizes": split.fold_sizes},
    )
    return split


def split_by_subject(frames: FrameSet, k: int = 5, seed: int = 0) -> FoldSplit:
    """Stratified k-fold split that keeps every subject's frames in one fold.

    Subjects of each class are shuffled and dealt round-robin, continuing
    across classes like split_kfold.

    Raises:
        ParameterError: If k < 2.
        DataError: If a class has fewer than k subjects.
    """
    _check_k(k)
    rng = np.random.default_rng(seed)
    subject_fold: dict[str, int] = {}
    dealt = 0

    for label in (Label.SZ, Label.HC):
        subjects = list(dict.fromkeys(f.subject_id for f in frames.frames if f.label is label))
        if len(subjects) < k:
            raise DataError(
                f"class {label.value} has {len(subjects)} subjects, need at least k={k}"
            )
        for j, pos in enumerate(rng.permutation(len(subjects))):
            subject_fold[subjects[int(pos)]] = (dealt + j) % k
        dealt += len(subjects)

    assignments = [subject_fold[f.subject_id] for f in frames.frames]
    split = FoldSplit(k=k, assignments=assignments, seed=seed, by_subject=True)
    logger.debug(
        "Subject-level folds assigned", extra={"k": k, "seed": seed, "sizes": split.fold_sizes}
    )
    return split


def make_split(frames: FrameSet, k: int, seed: int, by_subject: bool = False) -> FoldSplit:
    """Dispatch to split_by_subject or split_kfold."""
    if by_subject:
        return split_by_subject(frames, k, seed)
    return split_kfold(frames, k, seed)


def check_split(frames: FrameSet, split: FoldSplit) -> None:
    """Verify the split covers ``frames`` and every training partition has both classes.

    Raises:
        DataError: On a length mismatch or a single-class training partition.
    """
    if len(split.assignments) != len(frames):
        raise DataError(
            f"split assigns {len(split.assignments)} frames but the set has {len(frames)}"
        )
    labels = frames.labels
    for fold in range(split.k):
        present = {labels[i] for i in split.train_indices(fold)}
        if len(present) < 2:
            raise DataError(f"training partition of fold {fold} lacks a class")
