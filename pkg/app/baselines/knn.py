"""k-nearest-neighbour classification with Euclidean distance."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np

from app.errors import DataError, ParameterError
from app.models.recording import Label, decode_label, encode_labels

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

# Training rows compared against a query at once
DISTANCE_BLOCK = 256


def distances(train_x: NDArray[np.float64], query: NDArray[np.float64]) -> NDArray[np.float64]:
    """Euclidean distance from ``query`` to every training row."""
    out = np.empty(train_x.shape[0])
    for start in range(0, train_x.shape[0], DISTANCE_BLOCK):
        block = train_x[start : start + DISTANCE_BLOCK]
        out[start : start + block.shape[0]] = np.sqrt(((block - query) ** 2).sum(axis=1))
    return out


def neighbours(dist: NDArray[np.float64], k: int) -> NDArray[np.intp]:
    """Indices of the k smallest distances; equal distances keep training order."""
    return np.argsort(dist, kind="stable")[:k]


def vote(classes: NDArray[np.intp], dist: NDArray[np.float64]) -> int:
    """Majority class; ties go to the smaller summed distance, then SZ before HC."""
    counts = np.bincount(classes, minlength=2)
    if counts[0] != counts[1]:
        return int(np.argmax(counts))
    summed = [float(dist[classes == c].sum()) for c in (0, 1)]
    if summed[0] != summed[1]:
        return int(np.argmin(summed))
    return Label.SZ.index


def knn(
    train_x: ArrayLike,
    train_y: list[Label] | NDArray[np.intp],
    query: ArrayLike,
    k: int = 5,
) -> Label:
    """Label of ``query`` by majority vote among its k nearest training vectors.

    Raises:
        DataError: If the training set is empty.
        ParameterError: If k is not in [1, training size].
    """
    model = KnnModel.fit(train_x, train_y, k)
    return decode_label(model.predict(np.asarray(query, dtype=np.float64)[None, :])[0])


@dataclass
class KnnModel:
    """Stored training vectors; prediction is a full scan."""

    k: int
    train_x: NDArray[np.float64]
    train_y: NDArray[np.intp]

    @classmethod
    def fit(
        cls, train_x: ArrayLike, train_y: list[Label] | NDArray[np.intp], k: int = 5
    ) -> KnnModel:
        x = np.asarray(train_x, dtype=np.float64)
        y = encode_labels(train_y)
        if x.ndim != 2 or x.shape[0] == 0:
            raise DataError("knn needs a non-empty 2-D training matrix")
        if y.shape[0] != x.shape[0]:
            raise DataError(f"{x.shape[0]} training rows but {y.shape[0]} labels")
        if not 1 <= k <= x.shape[0]:
            raise ParameterError(f"k must lie in [1, {x.shape[0]}], got {k}")
        return cls(k=k, train_x=x, train_y=y)

    def _query(self, query: NDArray[np.float64]) -> tuple[NDArray[np.intp], NDArray[np.float64]]:
        dist = distances(self.train_x, query)
        idx = neighbours(dist, self.k)
        return self.train_y[idx], dist[idx]

    def predict(self, x: NDArray[np.float64]) -> NDArray[np.intp]:
        """Class index per query row."""
        return np.array([vote(*self._query(row)) for row in x], dtype=np.intp)

    def score(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """Fraction of SZ among the k neighbours of each row."""
        return np.array([float(np.mean(self._query(row)[0] == 0)) for row in x])

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "train_x": self.train_x.tolist(),
            "train_y": self.train_y.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> KnnModel:
        return cls.fit(np.array(data["train_x"]), np.array(data["train_y"]), int(data["k"]))
