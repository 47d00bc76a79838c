"""Uniform fit/predict/score wrapper over the shallow classifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

from app.baselines.bayes import GaussianNB
from app.baselines.ensemble import EnsembleKind, TreeEnsemble, ensemble_fit
from app.baselines.knn import KnnModel
from app.baselines.svm import SvmModel, svm_rbf_fit
from app.baselines.tree import DecisionTree
from app.errors import ContractError, ParameterError
from app.models.config import BaselineKind, BaselineParams
from app.models.recording import Label, decode_label
from app.utils.logging import get_logger

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

logger = get_logger("baselines.registry")

FittedState = KnnModel | GaussianNB | DecisionTree | TreeEnsemble | SvmModel

# Hyperparameters that affect each kind, as declared in reports
RELEVANT_PARAMS: dict[BaselineKind, tuple[str, ...]] = {
    BaselineKind.KNN: ("n_neighbors",),
    BaselineKind.GNB: ("variance_floor",),
    BaselineKind.DTREE: ("max_depth", "min_split"),
    BaselineKind.BAGGING: ("n_estimators", "max_depth", "min_split"),
    BaselineKind.RFOREST: ("n_estimators", "max_depth", "min_split"),
    BaselineKind.ETREES: ("n_estimators", "max_depth", "min_split"),
    BaselineKind.SVM_RBF: ("C", "gamma", "tol", "max_passes"),
}

_STATE_TYPES: dict[BaselineKind, type[Any]] = {
    BaselineKind.KNN: KnnModel,
    BaselineKind.GNB: GaussianNB,
    BaselineKind.DTREE: DecisionTree,
    BaselineKind.BAGGING: TreeEnsemble,
    BaselineKind.RFOREST: TreeEnsemble,
    BaselineKind.ETREES: TreeEnsemble,
    BaselineKind.SVM_RBF: SvmModel,
}


@dataclass
class BaselineModel:
    """A shallow classifier of one kind, fitted or not."""

    kind: BaselineKind
    params: BaselineParams = field(default_factory=BaselineParams)
    seed: int = 0
    n_jobs: int = 1
    state: FittedState | None = None
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        """Validate fields after initialization."""
        self.kind = BaselineKind(self.kind)

    @property
    def is_fitted(self) -> bool:
        return self.state is not None

    def hyperparameters(self) -> dict[str, Any]:
        """Settings that affect this kind."""
        values = self.params.to_dict()
        return {name: values[name] for name in RELEVANT_PARAMS[self.kind]}

    def fit(self, x: ArrayLike, y: list[Label] | NDArray[np.intp]) -> BaselineModel:
        """Fit on [n x d] vectors; returns self."""
        p = self.params
        kind = self.kind
        if kind is BaselineKind.KNN:
            self.state = KnnModel.fit(x, y, p.n_neighbors)
        elif kind is BaselineKind.GNB:
            self.state = GaussianNB.fit(x, y, p.variance_floor)
        elif kind is BaselineKind.DTREE:
            self.state = DecisionTree.fit(x, y, max_depth=p.max_depth, min_split=p.min_split)
        elif kind is BaselineKind.SVM_RBF:
            self.state = svm_rbf_fit(x, y, p.C, p.gamma, p.tol, p.max_passes, self.seed)
            self.warnings = list(self.state.warnings)
        else:
            self.state = ensemble_fit(
                EnsembleKind(kind.value),
                x,
                y,
                n_estimators=p.n_estimators,
                seed=self.seed,
                max_depth=p.max_depth,
                min_split=p.min_split,
                n_jobs=self.n_jobs,
            )
        return self

    def _fitted(self) -> FittedState:
        if self.state is None:
            raise ContractError(f"{self.kind.value} model used before fit")
        return self.state

    def predict(self, x: NDArray[np.float64]) -> NDArray[np.intp]:
        """Class index per row (SZ = 0, HC = 1)."""
        return self._fitted().predict(np.atleast_2d(x))

    def predict_labels(self, x: NDArray[np.float64]) -> list[Label]:
        return [decode_label(i) for i in self.predict(x)]

    def score(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """ROC score per row; larger means more SZ-like."""
        return self._fitted().score(np.atleast_2d(x))

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "params": self.params.to_dict(),
            "seed": self.seed,
            "state": self.state.to_dict() if self.state is not None else None,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> BaselineModel:
        kind = BaselineKind(data["kind"])
        state = data.get("state")
        return cls(
            kind=kind,
            params=BaselineParams(**data.get("params", {})),
            seed=int(data.get("seed", 0)),
            state=_STATE_TYPES[kind].from_dict(state) if state is not None else None,
        )


def make_baseline(
    kind: BaselineKind | str,
    params: BaselineParams | None = None,
    seed: int = 0,
    n_jobs: int = 1,
) -> BaselineModel:
    """Unfitted baseline of ``kind`` with pinned or overridden hyperparameters.

    Raises:
        ParameterError: On an unknown kind.
    """
    try:
        resolved = BaselineKind(kind)
    except ValueError as e:
        valid = [k.value for k in BaselineKind]
        raise ParameterError(f"unknown baseline {kind!r}, expected one of {valid}") from e
    return BaselineModel(
        kind=resolved, params=params or BaselineParams(), seed=seed, n_jobs=n_jobs
    )
