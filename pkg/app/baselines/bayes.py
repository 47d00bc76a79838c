"""Gaussian naive Bayes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np

from app.errors import DataError
from app.models.recording import Label, decode_label, encode_labels

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

VARIANCE_FLOOR = 1e-9


@dataclass
class GaussianNB:
    """Per-class priors, feature means and floored variances (rows SZ, HC)."""

    log_prior: NDArray[np.float64]  # [2]
    means: NDArray[np.float64]  # [2 x d]
    variances: NDArray[np.float64]  # [2 x d]
    epsilon: float

    @classmethod
    def fit(
        cls,
        train_x: ArrayLike,
        train_y: list[Label] | NDArray[np.intp],
        variance_floor: float = VARIANCE_FLOOR,
    ) -> GaussianNB:
        """Estimate class statistics.

        Every variance is floored at ``variance_floor * max feature variance``.

        Raises:
            DataError: If either class is missing.
        """
        x = np.asarray(train_x, dtype=np.float64)
        y = encode_labels(train_y)
        counts = np.bincount(y, minlength=2)
        if (counts == 0).any():
            raise DataError(f"naive Bayes needs both classes, got SZ={counts[0]} HC={counts[1]}")

        epsilon = variance_floor * float(np.var(x, axis=0).max())
        means = np.stack([x[y == c].mean(axis=0) for c in (0, 1)])
        variances = np.maximum(np.stack([x[y == c].var(axis=0) for c in (0, 1)]), epsilon)
        if epsilon == 0.0:
            # every feature is constant across the whole training set
            variances = np.where(variances == 0.0, 1.0, variances)
        return cls(
            log_prior=np.log(counts / counts.sum()),
            means=means,
            variances=variances,
            epsilon=epsilon,
        )

    def joint_log_likelihood(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """log prior + sum of per-feature Gaussian log densities, [n x 2]."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        out = np.empty((x.shape[0], 2))
        for c in (0, 1):
            var = self.variances[c]
            norm = -0.5 * np.sum(np.log(2.0 * np.pi * var))
            sq = ((x - self.means[c]) ** 2) / var
            out[:, c] = self.log_prior[c] + norm - 0.5 * sq.sum(axis=1)
        return out

    def predict_log_proba(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """Normalized class log posteriors, [n x 2]."""
        jll = self.joint_log_likelihood(x)
        top = jll.max(axis=1, keepdims=True)
        return jll - (top + np.log(np.exp(jll - top).sum(axis=1, keepdims=True)))

    def predict(self, x: NDArray[np.float64]) -> NDArray[np.intp]:
        """Argmax class index; exact ties go to SZ."""
        return np.argmax(self.joint_log_likelihood(x), axis=1).astype(np.intp)

    def score(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """Log-odds of SZ, a monotone stand-in for the SZ posterior."""
        log_proba = self.predict_log_proba(x)
        return log_proba[:, 0] - log_proba[:, 1]

    def to_dict(self) -> dict[str, Any]:
        return {
            "log_prior": self.log_prior.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> GaussianNB:
        return cls(
            log_prior=np.array(data["log_prior"]),
            means=np.array(data["means"]),
            variances=np.array(data["variances"]),
            epsilon=float(data["epsilon"]),
        )


def gnb_fit_predict(
    train_x: ArrayLike, train_y: list[Label] | NDArray[np.intp], query: ArrayLike
) -> Label:
    """Fit on the training set and classify one query vector."""
    model = GaussianNB.fit(train_x, train_y)
    return decode_label(model.predict(np.asarray(query, dtype=np.float64)[None, :])[0])
