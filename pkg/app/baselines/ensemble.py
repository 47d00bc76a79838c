"""Bagging, random forest and extremely randomized trees."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any

import numpy as np
from joblib import Parallel, delayed

from app.baselines.tree import DecisionTree, Splitter
from app.errors import DataError, ParameterError
from app.models.recording import Label, encode_labels
from app.utils.logging import get_logger

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

logger = get_logger("baselines.ensemble")


class EnsembleKind(str, Enum):
    """Tree ensemble variants."""

    BAGGING = "bagging"
    RFOREST = "rforest"
    ETREES = "etrees"


def sqrt_features(d: int) -> int:
    """Feature subset size per split for random forests and extra trees."""
    return max(1, int(math.sqrt(d)))


def bootstrap_indices(rng: np.random.Generator, n: int) -> NDArray[np.intp]:
    """n row indices drawn with replacement."""
    return rng.integers(0, n, size=n).astype(np.intp)


def member_generators(seed: int, n_estimators: int) -> list[np.random.Generator]:
    """One independent generator per ensemble member."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n_estimators)]


def _grow_member(
    kind: EnsembleKind,
    x: NDArray[np.float64],
    y: NDArray[np.intp],
    rng: np.random.Generator,
    max_depth: int | None,
    min_split: int,
) -> DecisionTree:
    d = x.shape[1]
    if kind is EnsembleKind.ETREES:
        return DecisionTree.fit(
            x, y, max_depth, min_split, sqrt_features(d), Splitter.RANDOM, rng
        )
    rows = bootstrap_indices(rng, y.size)
    max_features = None if kind is EnsembleKind.BAGGING else sqrt_features(d)
    return DecisionTree.fit(
        x[rows], y[rows], max_depth, min_split, max_features, Splitter.BEST, rng
    )


@dataclass
class TreeEnsemble:
    """Fitted member trees; prediction is a majority vote."""

    kind: EnsembleKind
    trees: list[DecisionTree] = field(default_factory=list)
    seed: int = 0

    def votes(self, x: NDArray[np.float64]) -> NDArray[np.intp]:
        """SZ votes per row."""
        ballots = np.stack([tree.predict(x) == Label.SZ.index for tree in self.trees])
        return ballots.sum(axis=0).astype(np.intp)

    def predict(self, x: NDArray[np.float64]) -> NDArray[np.intp]:
        """Majority class per row; tied votes go to SZ."""
        sz = self.votes(x)
        return np.where(2 * sz >= len(self.trees), Label.SZ.index, Label.HC.index).astype(np.intp)

    def score(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """Fraction of SZ votes per row."""
        return self.votes(x) / len(self.trees)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "seed": self.seed,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TreeEnsemble:
        return cls(
            kind=EnsembleKind(data["kind"]),
            trees=[DecisionTree.from_dict(t) for t in data["trees"]],
            seed=int(data.get("seed", 0)),
        )


def ensemble_fit(
    kind: EnsembleKind | str,
    train_x: ArrayLike,
    train_y: list[Label] | NDArray[np.intp],
    n_estimators: int = 100,
    seed: int = 0,
    max_depth: int | None = None,
    min_split: int = 2,
    n_jobs: int = 1,
) -> TreeEnsemble:
    """Fit a tree ensemble.

    bagging grows full-feature CART trees on bootstrap samples. rforest adds
    a random subset of sqrt(d) features per split. etrees uses the whole
    training set, sqrt(d) random features and one random threshold per
    candidate feature. Member i draws from the i-th child of
    ``SeedSequence(seed)``, so results do not depend on ``n_jobs``.

    Raises:
        DataError: On an empty training set.
        ParameterError: If n_estimators < 1.
    """
    kind = EnsembleKind(kind)
    x = np.asarray(train_x, dtype=np.float64)
    y = encode_labels(train_y)
    if x.ndim != 2 or x.shape[0] == 0:
        raise DataError("an ensemble needs a non-empty 2-D training matrix")
    if n_estimators < 1:
        raise ParameterError(f"n_estimators must be positive, got {n_estimators}")

    generators = member_generators(seed, n_estimators)
    trees = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_grow_member)(kind, x, y, rng, max_depth, min_split) for rng in generators
    )
    logger.debug(
        "Fitted tree ensemble",
        extra={"kind": kind.value, "n_estimators": n_estimators, "seed": seed},
    )
    return TreeEnsemble(kind=kind, trees=list(trees), seed=seed)
