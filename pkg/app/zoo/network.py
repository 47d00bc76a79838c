"""Parameterized networks built from a ModelSpec, and their forward pass."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any

import numpy as np

from app.errors import ContractError, DimensionError
from app.models.layer import LayerKind, ModelSpec
from app.models.recording import Frame, Label
from app.numerics import init
from app.numerics.layers import (
    LstmParams,
    activation,
    conv1d,
    dense,
    dropout,
    lstm_forward,
    maxpool1d,
)
from app.numerics.tensor import Tensor, reshape
from app.utils.logging import get_logger
from app.zoo.architectures import flatten_feeds_sequence, shape_trace

if TYPE_CHECKING:
    from collections.abc import Callable

    from numpy.typing import ArrayLike, NDArray

logger = get_logger("zoo.network")

DEFAULT_THRESHOLD = 0.5
EVAL_CHUNK = 32

# Parameter names per weighted layer kind, in optimizer order
PARAM_NAMES: dict[LayerKind, tuple[str, ...]] = {
    LayerKind.CONV1D: ("kernels", "bias"),
    LayerKind.DENSE: ("weights", "bias"),
    LayerKind.LSTM: ("input_weights", "recurrent_weights", "biases"),
}

# Parameters that receive the L2 penalty (biases are excluded)
PENALIZED = frozenset({"kernels", "weights", "input_weights", "recurrent_weights"})


class Mode(str, Enum):
    """Forward-pass mode; dropout is active only in train mode."""

    TRAIN = "train"
    EVAL = "eval"


@dataclass
class Network:
    """A ModelSpec with one parameter group per layer."""

    spec: ModelSpec
    input_shape: tuple[int, int]
    layer_params: list[dict[str, Tensor]] = field(default_factory=list)
    strict_contract: bool = False
    """Raise instead of warning when an unnormalized frame is forwarded."""

    def __post_init__(self) -> None:
        """Check the parameter groups against the shapes the ModelSpec implies."""
        if len(self.layer_params) != len(self.spec.layers):
            raise ValueError(
                f"network has {len(self.layer_params)} parameter groups for "
                f"{len(self.spec.layers)} layers"
            )
        for i, (layer, group) in enumerate(zip(self.spec.layers, self.layer_params, strict=True)):
            expected = PARAM_NAMES.get(layer.kind, ())
            if tuple(group) != expected:
                raise ValueError(f"layer {i} ({layer.kind.value}) needs params {expected}")

    @property
    def time_len(self) -> int:
        return self.input_shape[0]

    @property
    def n_channels(self) -> int:
        return self.input_shape[1]

    def parameters(self) -> list[Tensor]:
        """Trainable tensors in layer order."""
        return [t for group in self.layer_params for t in group.values()]

    def penalized(self) -> list[Tensor]:
        """Weight tensors subject to the L2 penalty."""
        return [t for group in self.layer_params for n, t in group.items() if n in PENALIZED]

    @property
    def n_parameters(self) -> int:
        return sum(t.data.size for t in self.parameters())

    def state_dict(self) -> dict[str, NDArray[np.float64]]:
        """Copies of all parameter arrays keyed ``"<layer>.<name>"``."""
        return {
            f"{i}.{name}": t.data.copy()
            for i, group in enumerate(self.layer_params)
            for name, t in group.items()
        }

    def load_state_dict(self, state: dict[str, NDArray[np.float64]]) -> None:
        """Replace parameter values.

        Raises:
            DimensionError: On missing keys or shape mismatches.
        """
        expected = self.state_dict()
        if set(state) != set(expected):
            missing = sorted(set(expected) - set(state))
            extra = sorted(set(state) - set(expected))
            raise DimensionError(f"state keys differ: missing {missing}, unexpected {extra}")
        for i, group in enumerate(self.layer_params):
            for name, t in group.items():
                value = np.asarray(state[f"{i}.{name}"], dtype=np.float64)
                if value.shape != t.shape:
                    raise DimensionError(
                        f"{i}.{name} has shape {value.shape}, expected {t.shape}", name
                    )
                t.data = value.copy()

    def forward_batch(
        self,
        x: Tensor | ArrayLike,
        mode: Mode | str = Mode.EVAL,
        rng: np.random.Generator | None = None,
        on_layer: Callable[[int, Tensor], None] | None = None,
    ) -> Tensor:
        """Run the layer stack on a batch.

        Args:
            x: [batch x time x channels].
            mode: train enables dropout.
            rng: Dropout generator, required in train mode.
            on_layer: Called with the layer index and its output after every layer.

        Returns:
            Sigmoid outputs, [batch x output_units].
        """
        mode = Mode(mode)
        training = mode is Mode.TRAIN
        if training and rng is None:
            raise ContractError("train mode needs a random generator for dropout")
        gen = rng if rng is not None else np.random.default_rng(0)

        out = x if isinstance(x, Tensor) else Tensor(np.asarray(x, dtype=np.float64))
        if out.ndim != 3 or tuple(out.shape[1:]) != self.input_shape:
            raise DimensionError(
                f"network expects [batch x {self.time_len} x {self.n_channels}], got {out.shape}",
                "input",
            )

        for i, (layer, group) in enumerate(zip(self.spec.layers, self.layer_params, strict=True)):
            kind = layer.kind
            if kind is LayerKind.CONV1D:
                out = conv1d(out, group["kernels"], group["bias"], int(layer.stride or 1))
                out = activation(out, layer.activation or "linear")
            elif kind is LayerKind.MAXPOOL1D:
                out = maxpool1d(out, int(layer.window or 1), int(layer.stride or 1))
            elif kind is LayerKind.DROPOUT:
                out = dropout(out, float(layer.rate or 0.0), training, gen)
            elif kind is LayerKind.FLATTEN:
                if not flatten_feeds_sequence(self.spec, i):
                    out = reshape(out, (out.shape[0], -1))
            elif kind is LayerKind.DENSE:
                out = dense(out, group["weights"], group["bias"])
                out = activation(out, layer.activation or "linear")
            elif kind is LayerKind.LSTM:
                params = LstmParams(
                    units=int(layer.units or 0),
                    input_weights=group["input_weights"],
                    recurrent_weights=group["recurrent_weights"],
                    biases=group["biases"],
                )
                out = lstm_forward(out, params, layer.return_sequence)
            if on_layer is not None:
                on_layer(i, out)
        return out


def init_network(
    spec: ModelSpec,
    input_shape: tuple[int, int],
    seed: int = 0,
) -> Network:
    """Allocate and initialize every parameter of ``spec``.

    Conv and dense weights are Glorot uniform, LSTM input weights Glorot
    uniform with scaled uniform recurrent weights, biases zero except the
    LSTM forget gate (one).
    """
    rng = np.random.default_rng(seed)
    trace = shape_trace(spec, input_shape)
    prev: tuple[int, ...] = tuple(input_shape)
    groups: list[dict[str, Tensor]] = []

    for layer, shape in zip(spec.layers, trace, strict=True):
        group: dict[str, Tensor] = {}
        if layer.kind is LayerKind.CONV1D:
            filters, kernel = int(layer.filters or 0), int(layer.kernel or 0)
            group["kernels"] = init.conv_kernels(rng, filters, kernel, prev[-1])
            group["bias"] = init.zeros(filters)
        elif layer.kind is LayerKind.DENSE:
            units = int(layer.units or 0)
            if len(prev) != 1:
                raise DimensionError(
                    f"dense layer needs a flat input, got shape {prev}", "features"
                )
            group["weights"] = init.dense_weights(rng, units, prev[0])
            group["bias"] = init.zeros(units)
        elif layer.kind is LayerKind.LSTM:
            p = init.lstm_params(rng, int(layer.units or 0), prev[-1])
            group["input_weights"], group["recurrent_weights"], group["biases"] = p.tensors
        groups.append(group)
        prev = shape

    network = Network(
        spec=spec,
        input_shape=(int(input_shape[0]), int(input_shape[1])),
        layer_params=groups,
    )
    logger.debug(
        "Initialized network",
        extra={"model": spec.name.value, "parameters": network.n_parameters, "seed": seed},
    )
    return network


def _check_frame(network: Network, frame: Frame) -> None:
    if frame.is_normalized:
        return
    message = f"frame {frame.subject_id}#{frame.frame_index} is not normalized"
    if network.strict_contract:
        raise ContractError(message)
    logger.warning("Unnormalized frame forwarded", extra={"subject_id": frame.subject_id})


def forward(
    network: Network,
    frame: Frame,
    mode: Mode | str = Mode.EVAL,
    rng: np.random.Generator | None = None,
) -> NDArray[np.float64]:
    """Output probabilities for one frame.

    Returns:
        Array of shape [output_units]: one SZ probability, or two unit
        activations for a two-unit head.

    Raises:
        ContractError: If the frame is unnormalized and the network is strict.
    """
    _check_frame(network, frame)
    out = network.forward_batch(frame.data[None, :, :], mode, rng)
    return out.data[0].copy()


def predict_proba(network: Network, x: NDArray[np.float64]) -> NDArray[np.float64]:
    """Eval-mode outputs for [n x time x channels] inputs, [n x output_units]."""
    if x.shape[0] == 0:
        return np.zeros((0, network.spec.output_units))
    chunks = [
        network.forward_batch(x[start : start + EVAL_CHUNK]).data
        for start in range(0, x.shape[0], EVAL_CHUNK)
    ]
    return np.concatenate(chunks, axis=0)


def sz_score(outputs: NDArray[np.float64]) -> NDArray[np.float64]:
    """SZ score per row: the single output, or the SZ unit of a two-unit head."""
    return outputs[:, Label.SZ.index].copy() if outputs.shape[1] == 2 else outputs[:, 0].copy()


def score(network: Network, x: NDArray[np.float64]) -> NDArray[np.float64]:
    """ROC score (SZ probability) per input."""
    return sz_score(predict_proba(network, x))


def label_from_output(output: ArrayLike, threshold: float = DEFAULT_THRESHOLD) -> Label:
    """Label for one output: SZ iff p >= threshold, or argmax for a two-unit head."""
    values = np.atleast_1d(np.asarray(output, dtype=np.float64))
    if values.size == 2:
        return Label.SZ if int(np.argmax(values)) == Label.SZ.index else Label.HC
    return Label.SZ if float(values[0]) >= threshold else Label.HC


def labels_from_outputs(
    outputs: NDArray[np.float64], threshold: float = DEFAULT_THRESHOLD
) -> list[Label]:
    return [label_from_output(row, threshold) for row in outputs]


def describe(network: Network) -> dict[str, Any]:
    """Summary for run manifests."""
    return {
        "model": network.spec.name.value,
        "activation": network.spec.activation.value,
        "input_shape": list(network.input_shape),
        "parameters": network.n_parameters,
        "init_scheme": dict(init.INIT_SCHEME),
    }
