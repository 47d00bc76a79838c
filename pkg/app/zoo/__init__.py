"""Deep architectures, networks, training and checkpoints."""

from app.zoo.architectures import ARCHITECTURES, build, shape_trace
from app.zoo.checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from app.zoo.network import Mode, Network, forward, init_network, predict_proba, score
from app.zoo.trainer import EpochStats, TrainedModel, predict_label, train

__all__ = [
    "ARCHITECTURES",
    "CheckpointError",
    "EpochStats",
    "Mode",
    "Network",
    "TrainedModel",
    "build",
    "forward",
    "init_network",
    "load_checkpoint",
    "predict_label",
    "predict_proba",
    "save_checkpoint",
    "score",
    "shape_trace",
    "train",
]
