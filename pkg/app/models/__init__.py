"""Data models for szbench."""

from app.models.config import (
    METHOD_ORDER,
    BaselineKind,
    BaselineParams,
    ExperimentConfig,
    OptimizerKind,
    TrainConfig,
    parse_method,
)
from app.models.layer import Activation, LayerKind, LayerSpec, ModelName, ModelSpec
from app.models.metrics import ConfusionMatrix, FoldResult, MetricsReport, RocCurve
from app.models.recording import (
    FRAME_LEN,
    MONTAGE,
    N_CHANNELS,
    FoldSplit,
    Frame,
    FrameSet,
    Label,
    Normalization,
    RawRecording,
)
from app.models.session import RunSession, RunState

__all__ = [
    "FRAME_LEN",
    "METHOD_ORDER",
    "MONTAGE",
    "N_CHANNELS",
    "Activation",
    "BaselineKind",
    "BaselineParams",
    "ConfusionMatrix",
    "ExperimentConfig",
    "FoldResult",
    "FoldSplit",
    "Frame",
    "FrameSet",
    "Label",
    "LayerKind",
    "LayerSpec",
    "MetricsReport",
    "ModelName",
    "ModelSpec",
    "Normalization",
    "OptimizerKind",
    "RawRecording",
    "RocCurve",
    "RunSession",
    "RunState",
    "TrainConfig",
    "parse_method",
]
