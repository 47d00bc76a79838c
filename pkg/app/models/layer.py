"""Declarative layer and model specifications."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any


class LayerKind(str, Enum):
    """Kind of a layer row."""

    CONV1D = "conv1d"
    DROPOUT = "dropout"
    MAXPOOL1D = "maxpool1d"
    FLATTEN = "flatten"
    DENSE = "dense"
    LSTM = "lstm"


class Activation(str, Enum):
    """Elementwise activation functions."""

    RELU = "relu"
    LEAKY_RELU = "leaky_relu"
    SELU = "selu"
    SIGMOID = "sigmoid"
    LINEAR = "linear"  # blank activation cells


# Activations that can be swept over the hidden layers
HIDDEN_ACTIVATIONS = (Activation.RELU, Activation.LEAKY_RELU, Activation.SELU)


class ModelName(str, Enum):
    """The seven deep architectures."""

    CNN_1 = "CNN-1"
    CNN_2 = "CNN-2"
    CNN_3 = "CNN-3"
    LSTM_1 = "LSTM-1"
    LSTM_2 = "LSTM-2"
    CNN_LSTM_1 = "CNN-LSTM-1"
    CNN_LSTM_2 = "CNN-LSTM-2"

    @property
    def family(self) -> str:
        """Family tag: cnn, lstm or cnn_lstm."""
        if self.value.startswith("CNN-LSTM"):
            return "cnn_lstm"
        if self.value.startswith("LSTM"):
            return "lstm"
        return "cnn"


# Parameters each kind must carry; everything else must stay unset
REQUIRED_PARAMS: dict[LayerKind, frozenset[str]] = {
    LayerKind.CONV1D: frozenset({"filters", "kernel", "stride", "activation"}),
    LayerKind.DROPOUT: frozenset({"rate"}),
    LayerKind.MAXPOOL1D: frozenset({"window", "stride"}),
    LayerKind.FLATTEN: frozenset(),
    LayerKind.DENSE: frozenset({"units", "activation"}),
    LayerKind.LSTM: frozenset({"units"}),
}

OPTIONAL_PARAMS = ("filters", "kernel", "stride", "rate", "window", "units", "activation")


@dataclass(frozen=True)
class LayerSpec:
    """One row of an architecture table."""

    kind: LayerKind
    filters: int | None = None
    kernel: int | None = None
    stride: int | None = None
    rate: float | None = None
    window: int | None = None
    units: int | None = None
    activation: Activation | None = None
    variable: bool = False
    """Hidden activation replaced by the swept activation when building."""

    return_sequence: bool = False
    """LSTM only: emit the whole hidden sequence (another LSTM follows)."""

    def __post_init__(self) -> None:
        """Validate that parameters are present exactly for the declared kind."""
        object.__setattr__(self, "kind", LayerKind(self.kind))
        if self.activation is not None:
            object.__setattr__(self, "activation", Activation(self.activation))

        required = REQUIRED_PARAMS[self.kind]
        for name in OPTIONAL_PARAMS:
            present = getattr(self, name) is not None
            if name in required and not present:
                raise ValueError(f"{self.kind.value} layer requires '{name}'")
            if name not in required and present:
                raise ValueError(f"{self.kind.value} layer does not take '{name}'")

        if self.return_sequence and self.kind is not LayerKind.LSTM:
            raise ValueError("return_sequence only applies to lstm layers")

        if self.variable and self.kind not in {LayerKind.CONV1D, LayerKind.DENSE}:
            raise ValueError("only conv1d and dense activations can be variable")

        if self.rate is not None and not 0.0 <= self.rate < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {self.rate}")

        for name in ("filters", "kernel", "stride", "window", "units"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be positive, got {value}")

    @property
    def has_weights(self) -> bool:
        return self.kind in {LayerKind.CONV1D, LayerKind.DENSE, LayerKind.LSTM}

    def with_activation(self, activation: Activation) -> LayerSpec:
        """Copy of this row with a variable activation replaced."""
        if not self.variable:
            return self
        return LayerSpec(**{**self._fields(), "activation": activation})

    def _fields(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "filters": self.filters,
            "kernel": self.kernel,
            "stride": self.stride,
            "rate": self.rate,
            "window": self.window,
            "units": self.units,
            "activation": self.activation,
            "variable": self.variable,
            "return_sequence": self.return_sequence,
        }

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["kind"] = self.kind.value
        data["activation"] = self.activation.value if self.activation else None
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> LayerSpec:
        return cls(**data)


@dataclass
class ModelSpec:
    """A named, ordered layer stack with its regularization setting."""

    name: ModelName
    layers: list[LayerSpec]
    activation: Activation = Activation.RELU
    l2_coeff: float = 0.01
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Validate fields after initialization."""
        self.name = ModelName(self.name)
        self.activation = Activation(self.activation)

        if self.activation not in HIDDEN_ACTIVATIONS:
            raise ValueError(
                f"hidden activation must be one of "
                f"{[a.value for a in HIDDEN_ACTIVATIONS]}, got {self.activation.value}"
            )

        if self.l2_coeff < 0:
            raise ValueError(f"l2_coeff must be non-negative, got {self.l2_coeff}")

        if not self.layers:
            raise ValueError("a model needs at least one layer")

        head = self.layers[-1]
        if head.kind is not LayerKind.DENSE or head.activation is not Activation.SIGMOID:
            raise ValueError("the final layer must be a sigmoid dense layer")

        if head.units not in {1, 2}:
            raise ValueError(f"the output head must have 1 or 2 units, got {head.units}")

    @property
    def row_count(self) -> int:
        """Number of table rows, counting the input row."""
        return len(self.layers) + 1

    @property
    def output_units(self) -> int:
        return int(self.layers[-1].units or 1)

    @property
    def family(self) -> str:
        return self.name.family

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name.value,
            "activation": self.activation.value,
            "l2_coeff": self.l2_coeff,
            "layers": [layer.to_dict() for layer in self.layers],
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ModelSpec:
        return cls(
            name=ModelName(data["name"]),
            layers=[LayerSpec.from_dict(layer) for layer in data["layers"]],
            activation=Activation(data["activation"]),
            l2_coeff=float(data.get("l2_coeff", 0.01)),
            metadata=dict(data.get("metadata", {})),
        )
