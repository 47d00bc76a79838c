"""The seven deep architectures as declarative layer tables."""

from __future__ import annotations

import math

from app.errors import ParameterError
from app.models.layer import (
    HIDDEN_ACTIVATIONS,
    Activation,
    LayerKind,
    LayerSpec,
    ModelName,
    ModelSpec,
)

CONV_FILTERS = 64
CONV_KERNEL = 3
CONV_DROPOUT = 0.5
DENSE_DROPOUT = 0.25


def _conv() -> LayerSpec:
    return LayerSpec(
        LayerKind.CONV1D,
        filters=CONV_FILTERS,
        kernel=CONV_KERNEL,
        stride=1,
        activation=Activation.RELU,
        variable=True,
    )


def _drop(rate: float) -> LayerSpec:
    return LayerSpec(LayerKind.DROPOUT, rate=rate)


def _pool() -> LayerSpec:
    return LayerSpec(LayerKind.MAXPOOL1D, window=2, stride=1)


def _flatten() -> LayerSpec:
    return LayerSpec(LayerKind.FLATTEN)


def _dense(units: int, activation: Activation) -> LayerSpec:
    return LayerSpec(LayerKind.DENSE, units=units, activation=activation)


def _lstm(units: int, return_sequence: bool = False) -> LayerSpec:
    return LayerSpec(LayerKind.LSTM, units=units, return_sequence=return_sequence)


def _head(units: int = 1) -> LayerSpec:
    return _dense(units, Activation.SIGMOID)


# Rows as printed. Conv activations are the swept ones; dense rows printed
# ReLU stay ReLU and blank dense activations are linear.
ARCHITECTURES: dict[ModelName, tuple[LayerSpec, ...]] = {
    ModelName.CNN_1: (
        _conv(),
        _conv(),
        _drop(DENSE_DROPOUT),
        _pool(),
        _flatten(),
        _dense(100, Activation.LINEAR),
        _drop(DENSE_DROPOUT),
        _head(2),
    ),
    ModelName.CNN_2: (
        _conv(),
        _drop(CONV_DROPOUT),
        _conv(),
        _drop(CONV_DROPOUT),
        _conv(),
        _drop(CONV_DROPOUT),
        _pool(),
        _flatten(),
        _dense(100, Activation.RELU),
        _drop(DENSE_DROPOUT),
        _head(),
    ),
    ModelName.CNN_3: (
        _conv(),
        _conv(),
        _drop(CONV_DROPOUT),
        _pool(),
        _flatten(),
        _dense(100, Activation.RELU),
        _drop(DENSE_DROPOUT),
        _dense(50, Activation.RELU),
        _drop(DENSE_DROPOUT),
        _head(),
    ),
    ModelName.LSTM_1: (
        _lstm(100),
        _drop(CONV_DROPOUT),
        _dense(100, Activation.RELU),
        _drop(DENSE_DROPOUT),
        _head(),
    ),
    ModelName.LSTM_2: (
        _lstm(100, return_sequence=True),
        _lstm(50),
        _drop(CONV_DROPOUT),
        _dense(100, Activation.RELU),
        _drop(DENSE_DROPOUT),
        _head(),
    ),
    ModelName.CNN_LSTM_1: (
        _conv(),
        _conv(),
        _drop(CONV_DROPOUT),
        _pool(),
        _flatten(),
        _lstm(100),
        _drop(CONV_DROPOUT),
        _dense(100, Activation.LINEAR),
        _drop(DENSE_DROPOUT),
        _head(),
    ),
    ModelName.CNN_LSTM_2: (
        _conv(),
        _conv(),
        _drop(CONV_DROPOUT),
        _pool(),
        _flatten(),
        _lstm(100),
        _drop(CONV_DROPOUT),
        _dense(100, Activation.LINEAR),
        _drop(DENSE_DROPOUT),
        _dense(50, Activation.RELU),
        _drop(DENSE_DROPOUT),
        _head(),
    ),
}


def build(
    name: ModelName | str,
    activation: Activation | str = Activation.RELU,
    l2_coeff: float = 0.01,
) -> ModelSpec:
    """Layer stack of a named architecture with the swept activation applied.

    Args:
        name: One of the seven model names.
        activation: relu, leaky_relu or selu for the variable rows.
        l2_coeff: Weight penalty coefficient.

    Returns:
        ModelSpec.

    Raises:
        ParameterError: On an unknown name or a non-hidden activation.
    """
    try:
        model = ModelName(name)
    except ValueError as e:
        valid = [m.value for m in ModelName]
        raise ParameterError(f"unknown model {name!r}, expected one of {valid}") from e
    try:
        act = Activation(activation)
    except ValueError as e:
        raise ParameterError(f"unknown activation {activation!r}") from e
    if act not in HIDDEN_ACTIVATIONS:
        raise ParameterError(f"{act.value} cannot be used as the hidden activation")

    return ModelSpec(
        name=model,
        layers=[layer.with_activation(act) for layer in ARCHITECTURES[model]],
        activation=act,
        l2_coeff=l2_coeff,
    )


def flatten_feeds_sequence(spec: ModelSpec, index: int) -> bool:
    """Whether the flatten row at ``index`` is followed by an LSTM.

    Such a flatten is a layout marker: the pooled [time x filters] map enters
    the LSTM as a sequence.
    """
    return any(layer.kind is LayerKind.LSTM for layer in spec.layers[index + 1 :])


def shape_trace(spec: ModelSpec, input_shape: tuple[int, int]) -> list[tuple[int, ...]]:
    """Closed-form output shape of every layer for one unbatched input.

    Args:
        spec: Model specification.
        input_shape: (time, channels).

    Returns:
        One shape per layer, in order.

    Raises:
        ParameterError: If a window or kernel no longer fits the sequence.
    """
    shape: tuple[int, ...] = tuple(input_shape)
    trace: list[tuple[int, ...]] = []
    for i, layer in enumerate(spec.layers):
        if layer.kind in {LayerKind.CONV1D, LayerKind.MAXPOOL1D}:
            width = layer.kernel if layer.kind is LayerKind.CONV1D else layer.window
            assert width is not None and layer.stride is not None
            if len(shape) != 2 or shape[0] < width:
                raise ParameterError(f"layer {i} ({layer.kind.value}) cannot take shape {shape}")
            length = (shape[0] - width) // layer.stride + 1
            shape = (length, layer.filters or shape[1])
        elif layer.kind is LayerKind.FLATTEN:
            if not flatten_feeds_sequence(spec, i):
                shape = (math.prod(shape),)
        elif layer.kind is LayerKind.DENSE:
            shape = (int(layer.units or 0),)
        elif layer.kind is LayerKind.LSTM:
            if len(shape) != 2:
                raise ParameterError(f"layer {i} (lstm) needs a sequence, got shape {shape}")
            units = int(layer.units or 0)
            shape = (shape[0], units) if layer.return_sequence else (units,)
        trace.append(shape)
    return trace
