"""SGD and Adam parameter updates."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

from app.errors import ContractError, ParameterError
from app.models.config import OptimizerKind

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from app.numerics.tensor import Tensor

    Array = NDArray[np.float64]


@dataclass
class OptimizerState:
    """Update rule, step counter and per-parameter moments (Adam only)."""

    kind: OptimizerKind = OptimizerKind.ADAM
    learning_rate: float = 0.01
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    first_moments: list[Array] = field(default_factory=list)
    second_moments: list[Array] = field(default_factory=list)

    def __post_init__(self) -> None:
        """Validate fields after initialization."""
        self.kind = OptimizerKind(self.kind)

        if self.learning_rate <= 0:
            raise ParameterError(f"learning_rate must be positive, got {self.learning_rate}")

        if self.step_count < 0:
            raise ParameterError(f"step_count must be non-negative, got {self.step_count}")

        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ParameterError(f"betas must lie in [0, 1), got {self.beta1}, {self.beta2}")

    def describe(self) -> dict[str, Any]:
        """Hyperparameters for run manifests."""
        info: dict[str, Any] = {"kind": self.kind.value, "learning_rate": self.learning_rate}
        if self.kind is OptimizerKind.ADAM:
            info.update(beta1=self.beta1, beta2=self.beta2, eps=self.eps)
        return info


def optimizer_step(
    state: OptimizerState,
    params: Sequence[Tensor],
    grads: Sequence[Array],
) -> OptimizerState:
    """Apply one update to every parameter.

    Parameter arrays are replaced, not mutated, so values captured by an
    earlier graph stay intact.

    Args:
        state: Optimizer state; step counter and moments are updated.
        params: Trainable tensors.
        grads: One gradient per parameter, same order.

    Returns:
        The updated state.

    Raises:
        ContractError: If params and grads are not aligned one-to-one.
    """
    if len(params) != len(grads):
        raise ContractError(f"got {len(params)} parameters but {len(grads)} gradients")
    for p, g in zip(params, grads, strict=True):
        if p.shape != np.shape(g):
            raise ContractError(f"gradient shape {np.shape(g)} does not match parameter {p.shape}")

    state.step_count += 1
    lr = state.learning_rate

    if state.kind is OptimizerKind.SGD:
        for p, g in zip(params, grads, strict=True):
            p.data = p.data - lr * g
        return state

    if not state.first_moments:
        state.first_moments = [np.zeros_like(p.data) for p in params]
        state.second_moments = [np.zeros_like(p.data) for p in params]
    elif len(state.first_moments) != len(params):
        raise ContractError(
            f"optimizer tracks {len(state.first_moments)} parameters, got {len(params)}"
        )

    b1, b2, t = state.beta1, state.beta2, state.step_count
    for i, (p, g) in enumerate(zip(params, grads, strict=True)):
        m = b1 * state.first_moments[i] + (1.0 - b1) * g
        v = b2 * state.second_moments[i] + (1.0 - b2) * (g * g)
        state.first_moments[i], state.second_moments[i] = m, v
        m_hat = m / (1.0 - b1**t)
        v_hat = v / (1.0 - b2**t)
        p.data = p.data - lr * m_hat / (np.sqrt(v_hat) + state.eps)

    return state
