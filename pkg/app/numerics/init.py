"""Weight initialization schemes."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np

from app.numerics.layers import LstmParams
from app.numerics.tensor import Tensor

if TYPE_CHECKING:
    from numpy.typing import NDArray

INIT_SCHEME = {
    "conv1d": "glorot_uniform(fan_in=k*in_ch, fan_out=k*out_ch)",
    "dense": "glorot_uniform(fan_in=features, fan_out=units)",
    "lstm_input": "glorot_uniform(fan_in=features, fan_out=4*units)",
    "lstm_recurrent": "scaled_uniform(limit=sqrt(6/(units+4*units)))",
    "bias": "zeros; lstm forget gate = 1",
}


def glorot_uniform(
    rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, fan_out: int
) -> NDArray[np.float64]:
    """Uniform samples in +-sqrt(6 / (fan_in + fan_out))."""
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def conv_kernels(rng: np.random.Generator, filters: int, kernel: int, in_ch: int) -> Tensor:
    shape = (filters, kernel, in_ch)
    return Tensor.parameter(glorot_uniform(rng, shape, kernel * in_ch, kernel * filters))


def dense_weights(rng: np.random.Generator, units: int, features: int) -> Tensor:
    return Tensor.parameter(glorot_uniform(rng, (units, features), features, units))


def zeros(size: int) -> Tensor:
    return Tensor.parameter(np.zeros(size))


def recurrent_uniform(rng: np.random.Generator, units: int) -> NDArray[np.float64]:
    """Recurrent weights [4*units x units] in +-sqrt(6 / (units + 4*units))."""
    return glorot_uniform(rng, (4 * units, units), units, 4 * units)


def lstm_params(rng: np.random.Generator, units: int, features: int) -> LstmParams:
    """LSTM weights: Glorot input weights, scaled uniform recurrent weights, forget bias 1."""
    gates = 4 * units
    w_in = glorot_uniform(rng, (gates, features), features, gates)
    w_rec = recurrent_uniform(rng, units)
    bias = np.zeros(gates)
    bias[units : 2 * units] = 1.0
    return LstmParams(
        units=units,
        input_weights=Tensor.parameter(w_in),
        recurrent_weights=Tensor.parameter(w_rec),
        biases=Tensor.parameter(bias),
    )
