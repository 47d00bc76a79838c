"""CART decision trees with Gini impurity."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Any

import numpy as np

from app.errors import DataError, ParameterError
from app.models.recording import Label, encode_labels

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

# Feature columns scored per vectorized pass
SPLIT_BLOCK = 2048


class Splitter(str, Enum):
    """Threshold search: exhaustive midpoints or one uniform draw per feature."""

    BEST = "best"
    RANDOM = "random"


def gini(counts: tuple[int, int] | NDArray[np.int64]) -> float:
    """Gini impurity 1 - sum(p^2) of a (SZ, HC) count pair."""
    sz, hc = int(counts[0]), int(counts[1])
    n = sz + hc
    if n == 0:
        return 0.0
    return 1.0 - (sz / n) ** 2 - (hc / n) ** 2


@dataclass
class TreeNode:
    """A split on ``x[feature_index] <= threshold`` or a leaf.

    Every node keeps the (SZ, HC) counts of the training rows that reached it.
    """

    counts: tuple[int, int]
    feature_index: int | None = None
    threshold: float | None = None
    left: TreeNode | None = None
    right: TreeNode | None = None

    def __post_init__(self) -> None:
        """Validate fields after initialization."""
        self.counts = (int(self.counts[0]), int(self.counts[1]))
        if min(self.counts) < 0 or sum(self.counts) == 0:
            raise ValueError(f"node counts must be non-negative and non-empty, got {self.counts}")
        split = (self.feature_index, self.threshold, self.left, self.right)
        if any(v is not None for v in split) and any(v is None for v in split):
            raise ValueError("an internal node needs feature_index, threshold and both children")

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def majority(self) -> int:
        """Class index of the larger count; ties go to SZ."""
        return Label.SZ.index if self.counts[0] >= self.counts[1] else Label.HC.index

    @property
    def proba_sz(self) -> float:
        return self.counts[0] / sum(self.counts)

    def leaf_for(self, row: NDArray[np.float64]) -> TreeNode:
        node = self
        while node.left is not None and node.right is not None:
            assert node.feature_index is not None and node.threshold is not None
            node = node.left if row[node.feature_index] <= node.threshold else node.right
        return node

    def depth(self) -> int:
        if self.left is None or self.right is None:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())

    def n_leaves(self) -> int:
        if self.left is None or self.right is None:
            return 1
        return self.left.n_leaves() + self.right.n_leaves()

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"counts": list(self.counts)}
        if self.left is not None and self.right is not None:
            data.update(
                feature_index=self.feature_index,
                threshold=self.threshold,
                left=self.left.to_dict(),
                right=self.right.to_dict(),
            )
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TreeNode:
        if "left" not in data:
            return cls(counts=tuple(data["counts"]))  # type: ignore[arg-type]
        return cls(
            counts=tuple(data["counts"]),  # type: ignore[arg-type]
            feature_index=int(data["feature_index"]),
            threshold=float(data["threshold"]),
            left=cls.from_dict(data["left"]),
            right=cls.from_dict(data["right"]),
        )


def _class_counts(y: NDArray[np.intp]) -> tuple[int, int]:
    counts = np.bincount(y, minlength=2)
    return int(counts[0]), int(counts[1])


def _best_in_block(
    x: NDArray[np.float64], y: NDArray[np.intp]
) -> tuple[float, int, float] | None:
    """Lowest weighted child Gini over midpoint thresholds of every column.

    Returns (impurity, column, threshold) or None if every column is constant.
    Ties go to the lowest column, then the lowest threshold.
    """
    n = x.shape[0]
    order = np.argsort(x, axis=0, kind="stable")
    xs = np.take_along_axis(x, order, axis=0)
    sz_left = np.cumsum(y[order] == 0, axis=0)[:-1].astype(np.float64)
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    sz_right = float(np.sum(y == 0)) - sz_left

    gini_left = 1.0 - (sz_left / n_left) ** 2 - ((n_left - sz_left) / n_left) ** 2
    gini_right = 1.0 - (sz_right / n_right) ** 2 - ((n_right - sz_right) / n_right) ** 2
    weighted = (n_left * gini_left + n_right * gini_right) / n
    weighted[xs[1:] <= xs[:-1]] = np.inf

    per_column = weighted.min(axis=0)
    column = int(np.argmin(per_column))
    best = float(per_column[column])
    if not np.isfinite(best):
        return None
    pos = int(np.argmin(weighted[:, column]))
    lo, hi = float(xs[pos, column]), float(xs[pos + 1, column])
    threshold = (lo + hi) / 2.0
    if threshold >= hi:
        threshold = lo
    return best, column, threshold


def best_split(
    x: NDArray[np.float64], y: NDArray[np.intp], features: NDArray[np.intp]
) -> tuple[int, float] | None:
    """Exhaustive CART split over ``features`` (ascending global indices)."""
    best: tuple[float, int, float] | None = None
    for start in range(0, features.size, SPLIT_BLOCK):
        cols = features[start : start + SPLIT_BLOCK]
        found = _best_in_block(x[:, cols], y)
        if found is not None and (best is None or found[0] < best[0]):
            best = (found[0], int(cols[found[1]]), found[2])
    return None if best is None else (best[1], best[2])


def random_split(
    x: NDArray[np.float64],
    y: NDArray[np.intp],
    features: NDArray[np.intp],
    rng: np.random.Generator,
) -> tuple[int, float] | None:
    """Best of one uniformly drawn threshold per candidate feature."""
    best: tuple[float, int, float] | None = None
    n = y.size
    for f in features:
        column = x[:, f]
        lo, hi = float(column.min()), float(column.max())
        if lo == hi:
            continue
        threshold = float(rng.uniform(lo, hi))
        left = column <= threshold
        n_left = int(left.sum())
        if n_left in (0, n):
            continue
        left_counts = _class_counts(y[left])
        right_counts = _class_counts(y[~left])
        impurity = (n_left * gini(left_counts) + (n - n_left) * gini(right_counts)) / n
        if best is None or impurity < best[0]:
            best = (impurity, int(f), threshold)
    return None if best is None else (best[1], best[2])


def _candidate_features(
    x: NDArray[np.float64], max_features: int, rng: np.random.Generator
) -> NDArray[np.intp]:
    """Random features, drawn until ``max_features`` non-constant ones are found."""
    d = x.shape[1]
    chosen: list[NDArray[np.intp]] = []
    found = 0
    permutation = rng.permutation(d)
    for start in range(0, d, SPLIT_BLOCK):
        block = permutation[start : start + SPLIT_BLOCK]
        varying = block[np.ptp(x[:, block], axis=0) > 0]
        chosen.append(varying[: max_features - found])
        found += chosen[-1].size
        if found >= max_features:
            break
    return np.concatenate(chosen).astype(np.intp)


@dataclass
class DecisionTree:
    """A fitted tree and the settings it was grown with."""

    root: TreeNode
    n_features: int
    max_depth: int | None = None
    min_split: int = 2

    @classmethod
    def fit(
        cls,
        train_x: ArrayLike,
        train_y: list[Label] | NDArray[np.intp],
        max_depth: int | None = None,
        min_split: int = 2,
        max_features: int | None = None,
        splitter: Splitter | str = Splitter.BEST,
        rng: np.random.Generator | None = None,
    ) -> DecisionTree:
        """Grow a tree until nodes are pure, smaller than ``min_split`` or at ``max_depth``.

        Args:
            train_x: [n x d] training matrix.
            train_y: Labels or class indices.
            max_depth: Depth limit, unlimited when None.
            min_split: Smallest node that may be split.
            max_features: Random feature subset size per split; all features when None.
            splitter: best (midpoints) or random (extremely randomized).
            rng: Generator for feature subsets and random thresholds.

        Raises:
            DataError: On an empty or misaligned training set.
            ParameterError: On invalid settings.
        """
        x = np.asarray(train_x, dtype=np.float64)
        y = encode_labels(train_y)
        if x.ndim != 2 or x.shape[0] == 0:
            raise DataError("a tree needs a non-empty 2-D training matrix")
        if y.size != x.shape[0]:
            raise DataError(f"{x.shape[0]} training rows but {y.size} labels")
        if min_split < 2:
            raise ParameterError(f"min_split must be at least 2, got {min_split}")
        if max_depth is not None and max_depth < 0:
            raise ParameterError(f"max_depth must be non-negative, got {max_depth}")
        splitter = Splitter(splitter)
        d = x.shape[1]
        if max_features is not None and not 1 <= max_features <= d:
            raise ParameterError(f"max_features must lie in [1, {d}], got {max_features}")
        gen = rng if rng is not None else np.random.default_rng(0)
        all_features = np.arange(d, dtype=np.intp)

        root = TreeNode(counts=_class_counts(y))
        stack: list[tuple[TreeNode, NDArray[np.intp], int]] = [(root, np.arange(y.size), 0)]
        while stack:
            node, idx, depth = stack.pop()
            if min(node.counts) == 0 or idx.size < min_split:
                continue
            if max_depth is not None and depth >= max_depth:
                continue

            xn, yn = x[idx], y[idx]
            if max_features is None or max_features == d:
                features = all_features
            else:
                features = _candidate_features(xn, max_features, gen)
            if splitter is Splitter.RANDOM:
                split = random_split(xn, yn, features, gen)
            else:
                split = best_split(xn, yn, np.sort(features))
            if split is None:
                continue

            feature, threshold = split
            go_left = xn[:, feature] <= threshold
            node.feature_index, node.threshold = feature, threshold
            node.left = TreeNode(counts=_class_counts(yn[go_left]))
            node.right = TreeNode(counts=_class_counts(yn[~go_left]))
            stack.append((node.right, idx[~go_left], depth + 1))
            stack.append((node.left, idx[go_left], depth + 1))

        return cls(root=root, n_features=d, max_depth=max_depth, min_split=min_split)

    def predict(self, x: NDArray[np.float64]) -> NDArray[np.intp]:
        """Majority class of the reached leaf per row."""
        return np.array([self.root.leaf_for(row).majority for row in x], dtype=np.intp)

    def score(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """SZ fraction of the reached leaf per row."""
        return np.array([self.root.leaf_for(row).proba_sz for row in x])

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_features": self.n_features,
            "max_depth": self.max_depth,
            "min_split": self.min_split,
            "root": self.root.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> DecisionTree:
        return cls(
            root=TreeNode.from_dict(data["root"]),
            n_features=int(data["n_features"]),
            max_depth=data.get("max_depth"),
            min_split=int(data.get("min_split", 2)),
        )


def dtree_fit(
    train_x: ArrayLike,
    train_y: list[Label] | NDArray[np.intp],
    max_depth: int | None = None,
    min_split: int = 2,
) -> TreeNode:
    """CART root node grown on the full feature set."""
    return DecisionTree.fit(train_x, train_y, max_depth=max_depth, min_split=min_split).root
