"""Training losses and weight regularization."""

from __future__ import annotations

from collections.abc import Sequence
from typing import TYPE_CHECKING

import numpy as np

from app.errors import DataError, DimensionError, ParameterError
from app.numerics.tensor import Tensor, add, as_tensor, make_node

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    Array = NDArray[np.float64]

PROBABILITY_CLAMP = 1e-7


def l2_penalty(params: Sequence[Tensor], coeff: float) -> Tensor:
    """``coeff * sum(||W||^2)`` over the given tensors.

    Raises:
        ParameterError: If coeff is negative.
    """
    if coeff < 0:
        raise ParameterError(f"l2 coefficient must be non-negative, got {coeff}")
    params = list(params)
    total = coeff * sum(float(np.sum(p.data * p.data)) for p in params)

    def grad_fn(g: Array) -> list[Array]:
        return [2.0 * coeff * float(g) * p.data for p in params]

    return make_node(np.asarray(total), params, "l2_penalty", grad_fn)


def binary_cross_entropy(pred: Tensor, target: Tensor | ArrayLike) -> Tensor:
    """Mean binary cross-entropy over every output unit.

    Probabilities are clamped to [eps, 1 - eps]; clamped entries get no gradient.

    Raises:
        DimensionError: If pred and target shapes differ.
        DataError: If a target is not 0 or 1.
    """
    t = as_tensor(target).data
    if t.shape != pred.shape:
        raise DimensionError(f"target shape {t.shape} differs from pred {pred.shape}", "outputs")
    if not np.all((t == 0.0) | (t == 1.0)):
        raise DataError("binary cross-entropy targets must be 0 or 1")

    p = np.clip(pred.data, PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP)
    n = p.size
    loss = -np.mean(t * np.log(p) + (1.0 - t) * np.log(1.0 - p))
    inside = (pred.data > PROBABILITY_CLAMP) & (pred.data < 1.0 - PROBABILITY_CLAMP)

    def grad_fn(g: Array) -> tuple[Array]:
        local = (p - t) / (p * (1.0 - p)) / n
        return (float(g) * np.where(inside, local, 0.0),)

    return make_node(np.asarray(loss), (pred,), "bce", grad_fn)


def bce_loss(
    pred: Tensor,
    target: Tensor | ArrayLike,
    params_for_penalty: Sequence[Tensor] = (),
    l2_coeff: float = 0.0,
) -> Tensor:
    """Binary cross-entropy plus L2 weight penalty.

    Args:
        pred: Sigmoid outputs.
        target: 0/1 targets with the same shape as ``pred``.
        params_for_penalty: Weight tensors (biases excluded by the caller).
        l2_coeff: Penalty coefficient.

    Returns:
        Scalar loss tensor.
    """
    data_loss = binary_cross_entropy(pred, target)
    if l2_coeff == 0.0 or not params_for_penalty:
        return data_loss
    return add(data_loss, l2_penalty(params_for_penalty, l2_coeff))
