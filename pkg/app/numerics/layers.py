"""Differentiable neural layer kernels.

Sequence layers take time-major inputs, ``[time x channels]`` for one sample or
``[batch x time x channels]`` for a mini-batch; unbatched inputs come back
unbatched. Convolution and pooling use valid padding only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from app.errors import DimensionError, ParameterError
from app.models.layer import Activation
from app.numerics.tensor import Tensor, make_node, reshape

if TYPE_CHECKING:
    from numpy.typing import NDArray

    Array = NDArray[np.float64]

LEAKY_RELU_SLOPE = 0.01
SELU_SCALE = 1.0507009873554805
SELU_ALPHA = 1.6732632423543772


def _as_batch(x: Tensor, rank: int, op: str) -> tuple[Tensor, bool]:
    """Add a leading batch axis to an unbatched input."""
    if x.ndim == rank:
        return reshape(x, (1, *x.shape)), True
    if x.ndim == rank + 1:
        return x, False
    raise DimensionError(
        f"{op} expects rank {rank} or {rank + 1} input, got shape {x.shape}", "rank"
    )


def _unbatch(out: Tensor, squeezed: bool) -> Tensor:
    return reshape(out, out.shape[1:]) if squeezed else out


def _tap(time_index: int, count: int, stride: int) -> slice:
    """Input rows read by kernel tap ``time_index`` across ``count`` output steps."""
    return slice(time_index, time_index + stride * (count - 1) + 1, stride)


def output_length(time: int, window: int, stride: int) -> int:
    """Valid-padding output length: floor((time - window) / stride) + 1."""
    return (time - window) // stride + 1


def conv1d(x: Tensor, kernels: Tensor, bias: Tensor, stride: int = 1) -> Tensor:
    """Valid 1-D convolution (cross-correlation) over time.

    Args:
        x: Input, [time x in_ch] or [batch x time x in_ch].
        kernels: Filters, [out_ch x k x in_ch].
        bias: Per-filter offsets, [out_ch].
        stride: Step between output positions.

    Returns:
        [floor((time - k) / stride) + 1 x out_ch], batched like ``x``.

    Raises:
        DimensionError: If an axis does not line up.
        ParameterError: If stride < 1.
    """
    if stride < 1:
        raise ParameterError(f"conv1d stride must be >= 1, got {stride}")
    if kernels.ndim != 3:
        raise DimensionError(f"conv1d kernels must be [out x k x in], got {kernels.shape}", "rank")
    out_ch, k, in_ch = kernels.shape
    if bias.shape != (out_ch,):
        raise DimensionError(f"conv1d bias must be [{out_ch}], got {bias.shape}", "out_ch")

    xb, squeezed = _as_batch(x, 2, "conv1d")
    batch, time, channels = xb.shape
    if channels != in_ch:
        raise DimensionError(
            f"conv1d input has {channels} channels, kernels expect {in_ch}", "in_ch"
        )
    if time < k:
        raise DimensionError(f"conv1d input length {time} is shorter than kernel {k}", "time")

    steps = output_length(time, k, stride)
    xd, w = xb.data, kernels.data
    out = np.broadcast_to(bias.data, (batch, steps, out_ch)).copy()
    for j in range(k):
        out += xd[:, _tap(j, steps, stride), :] @ w[:, j, :].T

    def grad_fn(g: Array) -> tuple[Array, Array, Array]:
        grad_x = np.zeros_like(xd)
        grad_w = np.empty_like(w)
        flat_g = g.reshape(-1, out_ch)
        for j in range(k):
            rows = _tap(j, steps, stride)
            grad_x[:, rows, :] += g @ w[:, j, :]
            grad_w[:, j, :] = flat_g.T @ xd[:, rows, :].reshape(-1, in_ch)
        return grad_x, grad_w, flat_g.sum(axis=0)

    return _unbatch(make_node(out, (xb, kernels, bias), "conv1d", grad_fn), squeezed)


def maxpool1d(x: Tensor, window: int, stride: int = 1) -> Tensor:
    """Max pooling over time, per channel.

    Gradient goes to the first maximal position of each window.

    Raises:
        DimensionError: If the window is longer than the input.
        ParameterError: If window or stride < 1.
    """
    if window < 1 or stride < 1:
        raise ParameterError(f"maxpool1d window and stride must be >= 1, got {window}, {stride}")
    xb, squeezed = _as_batch(x, 2, "maxpool1d")
    time = xb.shape[1]
    if window > time:
        raise DimensionError(f"maxpool1d window {window} exceeds input length {time}", "time")

    steps = output_length(time, window, stride)
    windows = sliding_window_view(xb.data, window, axis=1)[:, ::stride]
    argmax = windows.argmax(axis=-1)
    out = np.take_along_axis(windows, argmax[..., None], axis=-1)[..., 0]

    def grad_fn(g: Array) -> tuple[Array]:
        grad_x = np.zeros_like(xb.data)
        for j in range(window):
            grad_x[:, _tap(j, steps, stride), :] += np.where(argmax == j, g, 0.0)
        return (grad_x,)

    return _unbatch(make_node(out, (xb,), "maxpool1d", grad_fn), squeezed)


def dense(x: Tensor, weights: Tensor, bias: Tensor) -> Tensor:
    """Fully connected layer: ``weights @ x + bias``.

    Args:
        x: [features] or [batch x features].
        weights: [out x features].
        bias: [out].
    """
    if weights.ndim != 2:
        raise DimensionError(f"dense weights must be 2-D, got {weights.shape}", "rank")
    out_units, features = weights.shape
    if bias.shape != (out_units,):
        raise DimensionError(f"dense bias must be [{out_units}], got {bias.shape}", "out")

    xb, squeezed = _as_batch(x, 1, "dense")
    if xb.shape[1] != features:
        raise DimensionError(
            f"dense input has {xb.shape[1]} features, weights expect {features}", "features"
        )

    xd, w = xb.data, weights.data

    def grad_fn(g: Array) -> tuple[Array, Array, Array]:
        return g @ w, g.T @ xd, g.sum(axis=0)

    out = xd @ w.T + bias.data
    return _unbatch(make_node(out, (xb, weights, bias), "dense", grad_fn), squeezed)


def sigmoid_array(z: Array) -> Array:
    """Overflow-free logistic function."""
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def activation(x: Tensor, kind: Activation | str) -> Tensor:
    """Apply an elementwise activation."""
    kind = Activation(kind)
    z = x.data

    if kind is Activation.LINEAR:
        return x
    if kind is Activation.RELU:
        out = np.maximum(z, 0.0)
        slope = (z > 0).astype(np.float64)
    elif kind is Activation.LEAKY_RELU:
        out = np.where(z > 0, z, LEAKY_RELU_SLOPE * z)
        slope = np.where(z > 0, 1.0, LEAKY_RELU_SLOPE)
    elif kind is Activation.SELU:
        neg = SELU_SCALE * SELU_ALPHA * np.exp(np.minimum(z, 0.0))
        out = np.where(z > 0, SELU_SCALE * z, neg - SELU_SCALE * SELU_ALPHA)
        slope = np.where(z > 0, SELU_SCALE, neg)
    else:
        out = sigmoid_array(z)
        slope = out * (1.0 - out)

    def grad_fn(g: Array) -> tuple[Array]:
        return (g * slope,)

    return make_node(out, (x,), kind.value, grad_fn)


def dropout(x: Tensor, rate: float, training: bool, rng: np.random.Generator) -> Tensor:
    """Inverted dropout.

    In evaluation mode (or with rate 0) the input tensor itself is returned.

    Raises:
        ParameterError: If rate is outside [0, 1).
    """
    if not 0.0 <= rate < 1.0:
        raise ParameterError(f"dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return x

    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)

    def grad_fn(g: Array) -> tuple[Array]:
        return (g * mask,)

    return make_node(x.data * mask, (x,), "dropout", grad_fn)


@dataclass
class LstmParams:
    """LSTM weights, gates stacked in (input, forget, cell, output) order."""

    units: int
    input_weights: Tensor  # [4*units x feature_dim]
    recurrent_weights: Tensor  # [4*units x units]
    biases: Tensor  # [4*units]

    def __post_init__(self) -> None:
        """Validate that all four gates share the stated dimensions."""
        gates = 4 * self.units
        if self.units < 1:
            raise ParameterError(f"LSTM units must be positive, got {self.units}")
        if self.input_weights.ndim != 2 or self.input_weights.shape[0] != gates:
            raise DimensionError(
                f"input_weights must be [{gates} x features], got {self.input_weights.shape}",
                "gates",
            )
        if self.recurrent_weights.shape != (gates, self.units):
            raise DimensionError(
                f"recurrent_weights must be [{gates} x {self.units}], "
                f"got {self.recurrent_weights.shape}",
                "gates",
            )
        if self.biases.shape != (gates,):
            raise DimensionError(f"biases must be [{gates}], got {self.biases.shape}", "gates")

    @property
    def feature_dim(self) -> int:
        return int(self.input_weights.shape[1])

    @property
    def tensors(self) -> tuple[Tensor, Tensor, Tensor]:
        return self.input_weights, self.recurrent_weights, self.biases


def lstm_forward(seq: Tensor, params: LstmParams, return_sequence: bool = False) -> Tensor:
    """Run an LSTM over a sequence from zero initial states.

    Args:
        seq: [time x features] or [batch x time x features].
        params: Layer weights.
        return_sequence: Emit every hidden state instead of the last one.

    Returns:
        [time x units] when ``return_sequence`` else [units], batched like ``seq``.

    Raises:
        ParameterError: If the sequence is empty.
        DimensionError: If the feature axis does not match the weights.
    """
    xb, squeezed = _as_batch(seq, 2, "lstm")
    batch, time, features = xb.shape
    if time == 0:
        raise ParameterError("lstm needs a non-empty sequence")
    if features != params.feature_dim:
        raise DimensionError(
            f"lstm input has {features} features, weights expect {params.feature_dim}",
            "features",
        )

    units = params.units
    w_in, w_rec, b = (t.data for t in params.tensors)
    xd = xb.data
    projected = xd @ w_in.T + b  # [batch x time x 4U]

    gates = np.empty((time, batch, 4 * units))
    cells = np.empty((time, batch, units))
    hiddens = np.empty((time, batch, units))
    h = np.zeros((batch, units))
    c = np.zeros((batch, units))
    for t in range(time):
        z = projected[:, t, :] + h @ w_rec.T
        act = np.empty_like(z)
        act[:, : 2 * units] = sigmoid_array(z[:, : 2 * units])
        act[:, 2 * units : 3 * units] = np.tanh(z[:, 2 * units : 3 * units])
        act[:, 3 * units :] = sigmoid_array(z[:, 3 * units :])
        i, f, g, o = np.split(act, 4, axis=1)
        c = f * c + i * g
        h = o * np.tanh(c)
        gates[t], cells[t], hiddens[t] = act, c, h

    out = hiddens.transpose(1, 0, 2).copy() if return_sequence else h.copy()

    def grad_fn(grad_out: Array) -> tuple[Array, Array, Array, Array]:
        dz_all = np.empty((batch, time, 4 * units))
        grad_rec = np.zeros_like(w_rec)
        dh_next = np.zeros((batch, units))
        dc_next = np.zeros((batch, units))
        zeros = np.zeros((batch, units))
        for t in reversed(range(time)):
            if return_sequence:
                dh = dh_next + grad_out[:, t, :]
            elif t == time - 1:
                dh = dh_next + grad_out
            else:
                dh = dh_next
            i, f, g, o = np.split(gates[t], 4, axis=1)
            c_prev = cells[t - 1] if t > 0 else zeros
            h_prev = hiddens[t - 1] if t > 0 else zeros
            tanh_c = np.tanh(cells[t])
            dc = dc_next + dh * o * (1.0 - tanh_c**2)
            dz = np.concatenate(
                [
                    dc * g * i * (1.0 - i),
                    dc * c_prev * f * (1.0 - f),
                    dc * i * (1.0 - g**2),
                    dh * tanh_c * o * (1.0 - o),
                ],
                axis=1,
            )
            dz_all[:, t, :] = dz
            grad_rec += dz.T @ h_prev
            dh_next = dz @ w_rec
            dc_next = dc * f
        flat_dz = dz_all.reshape(-1, 4 * units)
        grad_in = flat_dz.T @ xd.reshape(-1, features)
        return dz_all @ w_in, grad_in, grad_rec, flat_dz.sum(axis=0)

    node = make_node(out, (xb, *params.tensors), "lstm", grad_fn)
    return _unbatch(node, squeezed)
