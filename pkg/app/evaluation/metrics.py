"""Confusion counts, classification metrics and ROC/AUC with SZ as the positive class."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np
import pandas as pd

from app.errors import DataError, DimensionError
from app.models.metrics import ConfusionMatrix, RocCurve
from app.models.recording import Label, encode_labels
from app.utils.logging import get_logger

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike, NDArray

logger = get_logger("evaluation.metrics")

_SZ = Label.SZ.index


@dataclass(frozen=True)
class ClassificationMetrics:
    """Accuracy, precision and recall of one confusion matrix."""

    acc: float
    prec: float
    rec: float
    degenerate: tuple[str, ...] = field(default_factory=tuple)
    """Metrics whose denominator was zero and were set to 0."""

    def to_dict(self) -> dict[str, Any]:
        return {
            "acc": self.acc,
            "prec": self.prec,
            "rec": self.rec,
            "degenerate": list(self.degenerate),
        }


def _as_indices(labels: Sequence[Label] | NDArray[np.intp]) -> NDArray[np.intp]:
    return encode_labels(labels if isinstance(labels, np.ndarray) else list(labels))


def confusion(
    preds: Sequence[Label] | NDArray[np.intp], truth: Sequence[Label] | NDArray[np.intp]
) -> ConfusionMatrix:
    """Tally predictions against ground truth.

    Args:
        preds: Predicted labels or class indices (SZ = 0).
        truth: True labels or class indices, same length.

    Returns:
        ConfusionMatrix with SZ as the positive class.

    Raises:
        DimensionError: If the lengths differ.
    """
    p = _as_indices(preds)
    t = _as_indices(truth)
    if p.size != t.size:
        raise DimensionError(
            f"{p.size} predictions for {t.size} ground-truth labels", axis="samples"
        )

    pos_pred = p == _SZ
    pos_true = t == _SZ
    return ConfusionMatrix(
        tp=int(np.sum(pos_pred & pos_true)),
        fp=int(np.sum(pos_pred & ~pos_true)),
        tn=int(np.sum(~pos_pred & ~pos_true)),
        fn=int(np.sum(~pos_pred & pos_true)),
    )


def _ratio(num: int, den: int) -> float | None:
    return None if den == 0 else num / den


def metrics(cm: ConfusionMatrix) -> ClassificationMetrics:
    """Acc, Prec and Rec from a confusion matrix.

    A metric with a zero denominator is reported as 0 and listed in
    ``degenerate``.
    """
    values = {
        "acc": _ratio(cm.tp + cm.tn, cm.total),
        "prec": _ratio(cm.tp, cm.tp + cm.fp),
        "rec": _ratio(cm.tp, cm.tp + cm.fn),
    }
    degenerate = tuple(name for name, value in values.items() if value is None)
    if degenerate:
        logger.warning(
            "Zero denominator, metric set to 0",
            extra={"metrics": list(degenerate), **cm.to_dict()},
        )

    return ClassificationMetrics(
        acc=values["acc"] or 0.0,
        prec=values["prec"] or 0.0,
        rec=values["rec"] or 0.0,
        degenerate=degenerate,
    )


def _split_scores(
    scores: ArrayLike, truth: Sequence[Label] | NDArray[np.intp]
) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
    s = np.asarray(scores, dtype=np.float64).ravel()
    positive = _as_indices(truth) == _SZ
    if s.size != positive.size:
        raise DimensionError(f"{s.size} scores for {positive.size} labels", axis="samples")
    if not np.isfinite(s).all():
        raise DataError("ROC scores must be finite")

    n_pos = int(positive.sum())
    if n_pos == 0 or n_pos == positive.size:
        raise DataError("ROC needs both classes in the ground truth")
    return s, positive


def roc_auc(
    scores: ArrayLike, truth: Sequence[Label] | NDArray[np.intp]
) -> tuple[RocCurve, float]:
    """ROC curve and trapezoid AUC; higher scores mean more SZ-like.

    Thresholds sweep the unique scores in descending order, so tied scores
    move the curve in one (possibly diagonal) step. The first point is
    (0, 0) at threshold +inf.

    Args:
        scores: One real score per sample.
        truth: True labels or class indices.

    Returns:
        (RocCurve, auc).

    Raises:
        DimensionError: If the lengths differ.
        DataError: If only one class is present or a score is not finite.
    """
    s, positive = _split_scores(scores, truth)

    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    pos_sorted = positive[order]

    # last index of each run of equal scores
    ends = np.flatnonzero(np.diff(s_sorted) != 0)
    ends = np.append(ends, s_sorted.size - 1)

    tps = np.cumsum(pos_sorted)[ends]
    fps = (ends + 1) - tps
    tpr = np.concatenate(([0.0], tps / tps[-1]))
    fpr = np.concatenate(([0.0], fps / fps[-1]))
    thresholds = np.concatenate(([np.inf], s_sorted[ends]))

    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    curve = RocCurve(fpr=fpr.tolist(), tpr=tpr.tolist(), thresholds=thresholds.tolist())
    return curve, auc


def mann_whitney_auc(scores: ArrayLike, truth: Sequence[Label] | NDArray[np.intp]) -> float:
    """AUC as the normalized Mann-Whitney U statistic, ties ranked by average."""
    s, positive = _split_scores(scores, truth)
    ranks = pd.Series(s).rank(method="average").to_numpy()
    n_pos = int(positive.sum())
    n_neg = positive.size - n_pos
    u = float(ranks[positive].sum()) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def mean_std(values: ArrayLike) -> tuple[float, float]:
    """Mean and population standard deviation (divide by k).

    A constant vector has a std of exactly 0.
    """
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise DataError("cannot aggregate an empty metric vector")
    if np.all(arr == arr[0]):
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=0))
