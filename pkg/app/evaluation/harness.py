"""K-fold cross-validation over deep models and shallow baselines."""

from __future__ import annotations

import json
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any, Protocol

import numpy as np
from joblib import Parallel, delayed

from app.baselines.registry import BaselineModel, make_baseline
from app.data.folds import check_split
from app.errors import ContractError, DataError
from app.evaluation.metrics import confusion, mean_std, metrics, roc_auc
from app.models.config import TrainConfig
from app.models.metrics import METRIC_NAMES, FoldResult, MetricsReport
from app.utils.logging import get_logger
from app.zoo.architectures import build
from app.zoo.checkpoint import save_checkpoint
from app.zoo.network import labels_from_outputs, sz_score
from app.zoo.trainer import TrainedModel, train

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from app.models.config import BaselineParams, ExperimentConfig
    from app.models.layer import ModelSpec
    from app.models.recording import FoldSplit, FrameSet, Label

logger = get_logger("evaluation.harness")


class FoldModel(Protocol):
    """What the harness needs from a per-fold classifier."""

    def fit(self, frames: FrameSet) -> None: ...

    def predict(self, frames: FrameSet) -> list[Label]: ...

    def score(self, frames: FrameSet) -> NDArray[np.float64]: ...

    def learning_curve(self) -> list[dict[str, float]]: ...

    def warnings(self) -> list[str]: ...

    def save(self, directory: Path, fold: int) -> Path: ...


# Builds an unfitted fold model from the fold's seed
Trainer = Callable[[int], FoldModel]


def fold_seed(seed: int, fold: int) -> int:
    """Seed of one fold, derived from the master seed and the fold index."""
    return int(np.random.SeedSequence([seed, fold]).generate_state(1)[0])


@dataclass
class DeepFoldModel:
    """Adapter training one network per fold."""

    spec: ModelSpec
    config: TrainConfig
    model: TrainedModel | None = None

    def fit(self, frames: FrameSet) -> None:
        self.model = train(self.spec, frames, self.config)

    def _fitted(self) -> TrainedModel:
        if self.model is None:
            raise ContractError(f"{self.spec.name.value} fold model used before fit")
        return self.model

    def predict(self, frames: FrameSet) -> list[Label]:
        return labels_from_outputs(self._fitted().outputs(frames))

    def score(self, frames: FrameSet) -> NDArray[np.float64]:
        return sz_score(self._fitted().outputs(frames))

    def learning_curve(self) -> list[dict[str, float]]:
        return [s.to_dict() for s in self._fitted().learning_curve]

    def warnings(self) -> list[str]:
        return []

    def save(self, directory: Path, fold: int) -> Path:
        return save_checkpoint(directory / f"fold{fold}.json", self._fitted())


@dataclass
class BaselineFoldModel:
    """Adapter fitting a shallow classifier on flattened frames."""

    model: BaselineModel

    def fit(self, frames: FrameSet) -> None:
        self.model.fit(frames.flat_matrix(), frames.labels)

    def predict(self, frames: FrameSet) -> list[Label]:
        return self.model.predict_labels(frames.flat_matrix())

    def score(self, frames: FrameSet) -> NDArray[np.float64]:
        return self.model.score(frames.flat_matrix())

    def learning_curve(self) -> list[dict[str, float]]:
        return []

    def warnings(self) -> list[str]:
        return list(self.model.warnings)

    def save(self, directory: Path, fold: int) -> Path:
        path = directory / f"fold{fold}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.model.to_dict(), sort_keys=True), encoding="utf-8")
        return path


def deep_trainer(spec: ModelSpec, config: TrainConfig) -> Trainer:
    """Factory of per-fold deep models; each fold trains with its own seed."""

    def make(seed: int) -> FoldModel:
        return DeepFoldModel(spec, config.with_overrides({"seed": seed}))

    return make


def baseline_trainer(kind: str, params: BaselineParams, n_jobs: int = 1) -> Trainer:
    """Factory of per-fold baselines seeded with the fold seed."""

    def make(seed: int) -> FoldModel:
        return BaselineFoldModel(make_baseline(kind, params, seed=seed, n_jobs=n_jobs))

    return make


def trainer_for(config: ExperimentConfig) -> Trainer:
    """The fold-model factory an experiment config describes."""
    if config.is_deep:
        spec = build(config.model_name, config.activation, config.l2_coeff)
        return deep_trainer(spec, config.train or TrainConfig.for_model(config.model_name))
    return baseline_trainer(config.method, config.baseline)


@dataclass
class HarnessConfig:
    """Settings of one cross-validation run."""

    method: str
    seed: int = 0
    n_jobs: int = 1
    manifest: dict[str, Any] = field(default_factory=dict)
    checkpoint_dir: Path | None = None

    def __post_init__(self) -> None:
        """Validate fields after initialization."""
        if not self.method:
            raise ValueError("method cannot be empty")

        if self.n_jobs == 0:
            raise ValueError("n_jobs must be non-zero")


def _run_fold(
    trainer: Trainer,
    frames: FrameSet,
    split: FoldSplit,
    fold: int,
    config: HarnessConfig,
) -> FoldResult:
    train_set = frames.subset(split.train_indices(fold))
    test_set = frames.subset(split.test_indices(fold))

    model = trainer(fold_seed(config.seed, fold))
    model.fit(train_set)
    preds = model.predict(test_set)
    scores = model.score(test_set)
    truth = test_set.labels

    cm = confusion(preds, truth)
    result = metrics(cm)
    degenerate = list(result.degenerate)
    try:
        _, auc = roc_auc(scores, truth)
    except DataError:
        auc = 0.0
        degenerate.append("auc")
        logger.warning("Single-class test fold, AUC set to 0", extra={"fold": fold})

    if config.checkpoint_dir is not None:
        model.save(config.checkpoint_dir, fold)

    logger.info(
        "Fold finished",
        extra={
            "method": config.method,
            "fold": fold,
            "n_test": len(test_set),
            "acc": result.acc,
            "auc": auc,
        },
    )
    return FoldResult(
        fold=fold,
        confusion=cm,
        acc=result.acc,
        prec=result.prec,
        rec=result.rec,
        auc=auc,
        n_test=len(test_set),
        degenerate=degenerate,
        scores=[float(s) for s in scores],
        truth=[lab.index for lab in truth],
        learning_curve=model.learning_curve(),
        warnings=model.warnings(),
    )


def summarize(folds: list[FoldResult]) -> tuple[dict[str, float], dict[str, float]]:
    """Per-metric mean and population std over folds."""
    mean: dict[str, float] = {}
    std: dict[str, float] = {}
    for name in METRIC_NAMES:
        mean[name], std[name] = mean_std([f.metric(name) for f in folds])
    return mean, std


def cross_validate(
    trainer: Trainer,
    frames: FrameSet,
    split: FoldSplit,
    config: HarnessConfig,
) -> MetricsReport:
    """Train on k-1 folds and evaluate on the held-out fold, k times.

    Folds run through joblib with ``config.n_jobs`` workers. Every fold
    seeds its model from (seed, fold), so results do not depend on the
    job count.

    Args:
        trainer: Factory of unfitted fold models.
        frames: The full frame set.
        split: Fold assignment covering ``frames``.
        config: Method name, seed, job count and manifest.

    Returns:
        MetricsReport with per-fold results and population-std aggregates.

    Raises:
        DataError: If the split does not cover the set or a training
            partition lacks a class.
    """
    check_split(frames, split)
    logger.info(
        "Cross-validation started",
        extra={"method": config.method, "k": split.k, "frames": len(frames)},
    )

    folds = Parallel(n_jobs=config.n_jobs)(
        delayed(_run_fold)(trainer, frames, split, fold, config) for fold in range(split.k)
    )
    folds = sorted(folds, key=lambda f: f.fold)
    mean, std = summarize(folds)

    manifest = {
        **config.manifest,
        "k": split.k,
        "std": "population",
        "split": {"seed": split.seed, "by_subject": split.by_subject, "sizes": split.fold_sizes},
        "fold_seeds": [fold_seed(config.seed, f) for f in range(split.k)],
    }
    return MetricsReport(method=config.method, folds=folds, manifest=manifest, mean=mean, std=std)
