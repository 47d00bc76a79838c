"""Tensor arithmetic, layer kernels, losses and optimizers."""

from app.numerics.layers import (
    LstmParams,
    activation,
    conv1d,
    dense,
    dropout,
    lstm_forward,
    maxpool1d,
)
from app.numerics.losses import bce_loss, binary_cross_entropy, l2_penalty
from app.numerics.optim import OptimizerKind, OptimizerState, optimizer_step
from app.numerics.tensor import Tensor, backprop, gradient_check

__all__ = [
    "LstmParams",
    "OptimizerKind",
    "OptimizerState",
    "Tensor",
    "activation",
    "backprop",
    "bce_loss",
    "binary_cross_entropy",
    "conv1d",
    "dense",
    "dropout",
    "gradient_check",
    "l2_penalty",
    "lstm_forward",
    "maxpool1d",
    "optimizer_step",
]
