"""Evaluation result models."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

METRIC_NAMES = ("acc", "prec", "rec", "auc")


@dataclass(frozen=True)
class ConfusionMatrix:
    """Binary confusion counts with SZ as the positive class."""

    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self) -> None:
        """Validate fields after initialization."""
        for name in ("tp", "fp", "tn", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: ConfusionMatrix) -> ConfusionMatrix:
        return ConfusionMatrix(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            tn=self.tn + other.tn,
            fn=self.fn + other.fn,
        )

    def to_dict(self) -> dict[str, int]:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


@dataclass
class RocCurve:
    """ROC points from (0, 0) to (1, 1) with the threshold of each point."""

    fpr: list[float]
    tpr: list[float]
    thresholds: list[float]

    def __post_init__(self) -> None:
        """Validate fields after initialization."""
        if not len(self.fpr) == len(self.tpr) == len(self.thresholds):
            raise ValueError("fpr, tpr and thresholds must have equal lengths")

        if any(b < a for a, b in zip(self.fpr, self.fpr[1:], strict=False)) or any(
            b < a for a, b in zip(self.tpr, self.tpr[1:], strict=False)
        ):
            raise ValueError("ROC coordinates must be non-decreasing")

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr, self.tpr, strict=True))


@dataclass
class FoldResult:
    """Metrics of one cross-validation fold."""

    fold: int
    confusion: ConfusionMatrix
    acc: float
    prec: float
    rec: float
    auc: float
    n_test: int
    degenerate: list[str] = field(default_factory=list)
    """Metrics whose denominator was zero and were set to 0."""

    scores: list[float] = field(default_factory=list)
    truth: list[int] = field(default_factory=list)
    learning_curve: list[dict[str, float]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        """Validate fields after initialization."""
        for name in METRIC_NAMES:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")

        if self.confusion.total != self.n_test:
            raise ValueError(
                f"confusion counts sum to {self.confusion.total}, expected {self.n_test}"
            )

    def metric(self, name: str) -> float:
        return float(getattr(self, name))

    def to_dict(self) -> dict[str, Any]:
        return {
            "fold": self.fold,
            "n_test": self.n_test,
            "confusion": self.confusion.to_dict(),
            "acc": self.acc,
            "prec": self.prec,
            "rec": self.rec,
            "auc": self.auc,
            "degenerate": list(self.degenerate),
            "warnings": list(self.warnings),
        }


@dataclass
class MetricsReport:
    """Per-fold metrics and their mean and population std."""

    method: str
    folds: list[FoldResult]
    manifest: dict[str, Any] = field(default_factory=dict)
    mean: dict[str, float] = field(default_factory=dict)
    std: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Validate fields after initialization."""
        if not self.folds:
            raise ValueError("a report needs at least one fold")

        k = self.manifest.get("k")
        if k is not None and k != len(self.folds):
            raise ValueError(f"report has {len(self.folds)} folds, manifest says k={k}")

    @property
    def k(self) -> int:
        return len(self.folds)

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "manifest": self.manifest,
            "folds": [f.to_dict() for f in self.folds],
            "aggregate": {
                name: {"mean": self.mean.get(name), "std": self.std.get(name)}
                for name in METRIC_NAMES
            },
        }
