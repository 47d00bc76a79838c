"""Soft-margin RBF support vector machine trained by sequential minimal optimization."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

from app.errors import DataError, ParameterError
from app.models.recording import Label, decode_label, encode_labels
from app.utils.logging import get_logger

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

logger = get_logger("baselines.svm")

KKT_TOL = 1e-3
MAX_PASSES = 10_000
ALPHA_EPS = 1e-8
STEP_EPS = 1e-3  # minimum relative change of alpha2 for a step to count


def scale_gamma(x: NDArray[np.float64]) -> float:
    """gamma = 1 / (d * Var(x)) over all entries; 1.0 for constant data."""
    var = float(x.var())
    return 1.0 / (x.shape[1] * var) if var > 0 else 1.0


def rbf_kernel(a: NDArray[np.float64], b: NDArray[np.float64], gamma: float) -> NDArray[np.float64]:
    """exp(-gamma * ||a_i - b_j||^2), [len(a) x len(b)]."""
    sq = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * (a @ b.T)
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass
class _SmoState:
    kernel: NDArray[np.float64]
    y: NDArray[np.float64]
    C: float
    tol: float
    alpha: NDArray[np.float64]
    errors: NDArray[np.float64]
    rng: np.random.Generator
    b: float = 0.0

    def take_step(self, i1: int, i2: int) -> bool:
        if i1 == i2:
            return False
        K, y, C = self.kernel, self.y, self.C
        a1, a2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = y[i1], y[i2]
        e1, e2 = self.errors[i1], self.errors[i2]
        s = y1 * y2

        if y1 != y2:
            lo, hi = max(0.0, a2 - a1), min(C, C + a2 - a1)
        else:
            lo, hi = max(0.0, a1 + a2 - C), min(C, a1 + a2)
        if lo >= hi:
            return False

        k11, k12, k22 = K[i1, i1], K[i1, i2], K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta <= 0:
            # duplicate points; the pair cannot improve the objective
            return False

        a2_new = float(np.clip(a2 + y2 * (e1 - e2) / eta, lo, hi))
        if abs(a2_new - a2) < STEP_EPS * (a2_new + a2 + STEP_EPS):
            return False
        a2_new = 0.0 if a2_new < ALPHA_EPS else (C if a2_new > C - ALPHA_EPS else a2_new)
        # rounding only; the box already holds for a1
        a1_new = min(max(a1 + s * (a2 - a2_new), 0.0), C)

        d1, d2 = y1 * (a1_new - a1), y2 * (a2_new - a2)
        b1 = self.b - e1 - d1 * k11 - d2 * k12
        b2 = self.b - e2 - d1 * k12 - d2 * k22
        if 0.0 < a1_new < C:
            b_new = b1
        elif 0.0 < a2_new < C:
            b_new = b2
        else:
            b_new = (b1 + b2) / 2.0

        self.errors += d1 * K[i1] + d2 * K[i2] + (b_new - self.b)
        self.alpha[i1], self.alpha[i2] = a1_new, a2_new
        self.b = b_new
        return True

    def examine(self, i2: int) -> bool:
        y2, a2, e2 = self.y[i2], self.alpha[i2], self.errors[i2]
        r2 = e2 * y2
        if not ((r2 < -self.tol and a2 < self.C) or (r2 > self.tol and a2 > 0)):
            return False

        n = self.y.size
        free = np.flatnonzero((self.alpha > 0) & (self.alpha < self.C))
        if free.size > 1:
            i1 = int(free[np.argmax(np.abs(self.errors[free] - e2))])
            if self.take_step(i1, i2):
                return True
        if free.size:
            start = int(self.rng.integers(free.size))
            for i1 in np.roll(free, -start):
                if self.take_step(int(i1), i2):
                    return True
        start = int(self.rng.integers(n))
        return any(self.take_step((start + j) % n, i2) for j in range(n))


@dataclass
class SvmModel:
    """Support vectors, their signed coefficients and the offset."""

    support_indices: list[int]
    support_vectors: NDArray[np.float64]
    coef: NDArray[np.float64]  # alpha_i * y_i
    b: float
    gamma: float
    C: float
    converged: bool = True
    passes: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def alphas(self) -> NDArray[np.float64]:
        return np.abs(self.coef)

    def decision(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """Signed decision value sum(alpha_i y_i K(x_i, x)) + b per row; SZ is positive."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if not self.support_indices:
            return np.full(x.shape[0], self.b)
        return rbf_kernel(x, self.support_vectors, self.gamma) @ self.coef + self.b

    def predict(self, x: NDArray[np.float64]) -> NDArray[np.intp]:
        """SZ where the decision value is non-negative."""
        return np.where(self.decision(x) >= 0.0, Label.SZ.index, Label.HC.index).astype(np.intp)

    def score(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        return self.decision(x)

    def to_dict(self) -> dict[str, Any]:
        return {
            "support_indices": list(self.support_indices),
            "support_vectors": self.support_vectors.tolist(),
            "coef": self.coef.tolist(),
            "b": self.b,
            "gamma": self.gamma,
            "C": self.C,
            "converged": self.converged,
            "passes": self.passes,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SvmModel:
        return cls(
            support_indices=[int(i) for i in data["support_indices"]],
            support_vectors=np.array(data["support_vectors"], dtype=np.float64).reshape(
                len(data["support_indices"]), -1
            ),
            coef=np.array(data["coef"], dtype=np.float64),
            b=float(data["b"]),
            gamma=float(data["gamma"]),
            C=float(data["C"]),
            converged=bool(data.get("converged", True)),
            passes=int(data.get("passes", 0)),
        )


def svm_rbf_fit(
    train_x: ArrayLike,
    train_y: list[Label] | NDArray[np.intp],
    C: float = 1.0,
    gamma: float | str = "scale",
    tol: float = KKT_TOL,
    max_passes: int = MAX_PASSES,
    seed: int = 0,
) -> SvmModel:
    """Solve the soft-margin dual with Platt's SMO.

    The outer loop alternates full sweeps and sweeps over non-bound
    multipliers until a full sweep changes nothing. Hitting ``max_passes``
    returns the current iterate with ``converged=False`` and a warning.

    Args:
        train_x: [n x d] training matrix.
        train_y: Labels or class indices (SZ is the positive class).
        C: Box constraint.
        gamma: RBF width, or "scale" for 1 / (d * Var(x)).
        tol: KKT violation tolerance.
        max_passes: Outer-loop limit.
        seed: Seed for the sweep start positions.

    Raises:
        DataError: If a class is missing.
        ParameterError: On non-positive C, gamma or tol.
    """
    x = np.asarray(train_x, dtype=np.float64)
    labels = encode_labels(train_y)
    if x.ndim != 2 or x.shape[0] != labels.size:
        raise DataError(f"training matrix {x.shape} does not match {labels.size} labels")
    counts = np.bincount(labels, minlength=2)
    if (counts == 0).any():
        raise DataError(f"SVM needs both classes, got SZ={counts[0]} HC={counts[1]}")
    if C <= 0 or tol <= 0:
        raise ParameterError(f"C and tol must be positive, got C={C}, tol={tol}")

    g = scale_gamma(x) if gamma == "scale" else float(gamma)
    if g <= 0:
        raise ParameterError(f"gamma must be positive, got {g}")

    y = np.where(labels == Label.SZ.index, 1.0, -1.0)
    n = y.size
    state = _SmoState(
        kernel=rbf_kernel(x, x, g),
        y=y,
        C=C,
        tol=tol,
        alpha=np.zeros(n),
        errors=-y.copy(),
        rng=np.random.default_rng(seed),
    )

    changed, examine_all, passes, converged = 0, True, 0, True
    while changed > 0 or examine_all:
        if passes >= max_passes:
            converged = False
            break
        if examine_all:
            candidates = range(n)
        else:
            candidates = [int(i) for i in np.flatnonzero((state.alpha > 0) & (state.alpha < C))]
        changed = sum(state.examine(i) for i in candidates)
        if examine_all:
            examine_all = False
        elif changed == 0:
            examine_all = True
        passes += 1

    warnings = []
    if not converged:
        warnings.append(f"SMO stopped after {max_passes} passes without meeting the KKT tolerance")
        logger.warning("SVM did not converge", extra={"passes": passes, "n_train": n})

    support = np.flatnonzero(state.alpha > 0)
    model = SvmModel(
        support_indices=[int(i) for i in support],
        support_vectors=x[support],
        coef=state.alpha[support] * y[support],
        b=state.b,
        gamma=g,
        C=C,
        converged=converged,
        passes=passes,
        warnings=warnings,
    )
    logger.debug(
        "Fitted SVM",
        extra={"support_vectors": support.size, "passes": passes, "gamma": g},
    )
    return model


def svm_predict(model: SvmModel, query: ArrayLike) -> Label:
    return decode_label(model.predict(np.asarray(query, dtype=np.float64)[None, :])[0])
