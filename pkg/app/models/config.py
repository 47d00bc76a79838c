"""Configuration models for szbench experiments."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from typing import Any

from app.models.layer import HIDDEN_ACTIVATIONS, Activation, ModelName
from app.models.recording import FRAME_LEN, Normalization


class OptimizerKind(str, Enum):
    """Supported update rules."""

    SGD = "sgd"
    ADAM = "adam"


class BaselineKind(str, Enum):
    """The seven shallow classifiers."""

    KNN = "knn"
    DTREE = "dtree"
    SVM_RBF = "svm_rbf"
    GNB = "gnb"
    BAGGING = "bagging"
    RFOREST = "rforest"
    ETREES = "etrees"


# Declared method order for result tables
METHOD_ORDER: tuple[str, ...] = tuple(k.value for k in BaselineKind) + tuple(
    m.value for m in ModelName
)

# Published per-family settings: (epochs, batch_size, learning_rate)
FAMILY_DEFAULTS: dict[str, tuple[int, int, float]] = {
    "cnn": (32, 10, 0.01),
    "lstm": (30, 16, 0.01),
    "cnn_lstm": (50, 128, 0.01),
}


def parse_method(method: str) -> ModelName | BaselineKind:
    """Resolve a method name to a deep model or a baseline.

    Raises:
        ValueError: If the name is unknown.
    """
    for enum_type in (ModelName, BaselineKind):
        try:
            return enum_type(method)
        except ValueError:
            continue
    raise ValueError(f"Unknown method: {method}. Supported methods: {', '.join(METHOD_ORDER)}")


@dataclass
class TrainConfig:
    """Hyperparameters for fitting one deep model."""

    epochs: int = 32
    batch_size: int = 10
    learning_rate: float = 0.01
    optimizer: OptimizerKind = OptimizerKind.ADAM
    seed: int = 0
    validation_fraction: float = 0.1
    micro_batch: int | None = None
    """Frames per forward/backward pass; gradients of the slices are accumulated."""

    def __post_init__(self) -> None:
        """Validate configuration values."""
        self.optimizer = OptimizerKind(self.optimizer)

        if self.micro_batch is not None and self.micro_batch < 1:
            raise ValueError(f"micro_batch must be positive, got {self.micro_batch}")

        if self.epochs < 0:
            raise ValueError(f"epochs must be non-negative, got {self.epochs}")

        if self.batch_size < 1:
            raise ValueError(f"batch_size must be positive, got {self.batch_size}")

        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")

        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError(
                f"validation_fraction must be in [0, 1), got {self.validation_fraction}"
            )

    @classmethod
    def for_model(cls, name: ModelName | str, **overrides: Any) -> TrainConfig:
        """Family defaults for a model, with optional overrides."""
        epochs, batch_size, learning_rate = FAMILY_DEFAULTS[ModelName(name).family]
        config = cls(epochs=epochs, batch_size=batch_size, learning_rate=learning_rate)
        return config.with_overrides(overrides)

    def with_overrides(self, overrides: dict[str, Any]) -> TrainConfig:
        known = {f.name for f in fields(self)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise ValueError(f"Unknown train settings: {', '.join(unknown)}")
        return replace(self, **overrides)

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["optimizer"] = self.optimizer.value
        return data


@dataclass
class BaselineParams:
    """Pinned default hyperparameters for the shallow classifiers."""

    n_neighbors: int = 5
    n_estimators: int = 100
    C: float = 1.0
    gamma: str | float = "scale"
    tol: float = 1e-3
    max_passes: int = 10_000
    min_split: int = 2
    max_depth: int | None = None
    variance_floor: float = 1e-9

    def __post_init__(self) -> None:
        """Validate configuration values."""
        if self.n_neighbors < 1:
            raise ValueError(f"n_neighbors must be positive, got {self.n_neighbors}")

        if self.n_estimators < 1:
            raise ValueError(f"n_estimators must be positive, got {self.n_estimators}")

        if self.C <= 0:
            raise ValueError(f"C must be positive, got {self.C}")

        if isinstance(self.gamma, str) and self.gamma != "scale":
            raise ValueError(f"gamma must be 'scale' or a positive number, got {self.gamma!r}")

        if not isinstance(self.gamma, str) and self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

        if self.min_split < 2:
            raise ValueError(f"min_split must be at least 2, got {self.min_split}")

        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError(f"max_depth must be positive, got {self.max_depth}")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class ExperimentConfig:
    """Full description of one benchmark run."""

    method: str
    normalization: Normalization = Normalization.ZSCORE
    activation: Activation = Activation.RELU
    dataset_dir: str | None = None
    manifest: str | None = None
    cache: str | None = None
    train: TrainConfig | None = None
    baseline: BaselineParams = field(default_factory=BaselineParams)
    l2_coeff: float = 0.01
    k: int = 5
    seed: int = 0
    output_dir: str = "results"
    allow_raw: bool = False
    subject_split: bool = False
    reduced: bool = False
    frame_len: int = FRAME_LEN
    n_jobs: int = 1
    save_models: bool = False
    name: str | None = None

    def __post_init__(self) -> None:
        """Validate configuration values."""
        resolved = parse_method(self.method)
        self.method = resolved.value
        self.normalization = Normalization(self.normalization)
        self.activation = Activation(self.activation)

        if self.activation not in HIDDEN_ACTIVATIONS:
            raise ValueError(
                f"activation must be one of {[a.value for a in HIDDEN_ACTIVATIONS]}, "
                f"got {self.activation.value}"
            )

        if self.k < 2:
            raise ValueError(f"k must be at least 2, got {self.k}")

        if self.frame_len < 1:
            raise ValueError(f"frame_len must be positive, got {self.frame_len}")

        if self.n_jobs == 0:
            raise ValueError("n_jobs must be non-zero (negative counts back from all cores)")

        if self.l2_coeff < 0:
            raise ValueError(f"l2_coeff must be non-negative, got {self.l2_coeff}")

        if (
            self.is_deep
            and self.normalization is Normalization.RAW
            and not self.allow_raw
        ):
            raise ValueError(
                "raw normalization is rejected for deep models; set allow_raw to override"
            )

        if self.is_deep and self.train is None:
            self.train = TrainConfig.for_model(self.method, seed=self.seed)

    @property
    def is_deep(self) -> bool:
        return isinstance(parse_method(self.method), ModelName)

    @property
    def model_name(self) -> ModelName:
        return ModelName(self.method)

    @property
    def baseline_kind(self) -> BaselineKind:
        return BaselineKind(self.method)

    @property
    def label(self) -> str:
        """Run label used for output file names, e.g. ``CNN-LSTM-2_relu_zscore_l2``."""
        if self.name:
            return self.name
        parts = [self.method]
        if self.is_deep:
            parts.append(self.activation.value)
        parts.append(self.normalization.value)
        return "_".join(parts)

    @classmethod
    def from_mapping(cls, config: dict[str, Any]) -> ExperimentConfig:
        """Build a config from a parsed JSON/YAML mapping.

        Args:
            config: Mapping with the keys of this class; ``train`` and ``baseline``
                hold nested override mappings.

        Returns:
            ExperimentConfig instance.

        Raises:
            ValueError: On unknown keys or invalid values.
        """
        if "method" not in config:
            raise ValueError("config must name a 'method'")

        known = {f.name for f in fields(cls)}
        unknown = sorted(set(config) - known)
        if unknown:
            raise ValueError(f"Unknown config keys: {', '.join(unknown)}")

        values = dict(config)
        method = parse_method(str(values["method"]))
        train_overrides = values.pop("train", None) or {}
        if not isinstance(train_overrides, dict):
            raise ValueError("'train' must be a mapping of overrides")

        train_overrides = dict(train_overrides)
        if "l2_coeff" in train_overrides:
            values["l2_coeff"] = train_overrides.pop("l2_coeff")

        if isinstance(method, ModelName):
            train_overrides.setdefault("seed", values.get("seed", 0))
            values["train"] = TrainConfig.for_model(method, **train_overrides)
        elif train_overrides:
            raise ValueError(f"'train' settings do not apply to baseline {method.value}")

        baseline = values.pop("baseline", None) or {}
        if not isinstance(baseline, dict):
            raise ValueError("'baseline' must be a mapping of overrides")
        unknown = sorted(set(baseline) - {f.name for f in fields(BaselineParams)})
        if unknown:
            raise ValueError(f"Unknown baseline settings: {', '.join(unknown)}")
        values["baseline"] = BaselineParams(**baseline)

        return cls(**values)

    def with_seed(self, seed: int) -> ExperimentConfig:
        """Copy with a new master seed, propagated to the training config."""
        train = self.train.with_overrides({"seed": seed}) if self.train else None
        return replace(self, seed=seed, train=train)

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "normalization": self.normalization.value,
            "activation": self.activation.value if self.is_deep else None,
            "dataset_dir": self.dataset_dir,
            "manifest": self.manifest,
            "cache": self.cache,
            "train": self.train.to_dict() if self.train else None,
            "baseline": self.baseline.to_dict() if not self.is_deep else None,
            "l2_coeff": self.l2_coeff if self.is_deep else None,
            "k": self.k,
            "seed": self.seed,
            "allow_raw": self.allow_raw,
            "subject_split": self.subject_split,
            "reduced": self.reduced,
            "frame_len": self.frame_len,
            "name": self.label,
        }
