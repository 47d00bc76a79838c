"""JSON checkpoints of trained models.

A checkpoint is one UTF-8 JSON object::

    {
      "format": "szbench-checkpoint",
      "version": 1,
      "spec": {...ModelSpec...},
      "input_shape": [time, channels],
      "manifest": {...train config, optimizer, normalization, seed...},
      "learning_curve": [{...epoch stats...}],
      "tensors": {"<layer>.<name>": {"shape": [...], "data": "<base64>"}}
    }

Tensor data is base64 of little-endian float64 values in C order.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path
from typing import Any

import numpy as np

from app.errors import DataError
from app.models.config import TrainConfig
from app.models.layer import ModelSpec
from app.models.recording import Normalization
from app.utils.logging import get_logger
from app.zoo.network import init_network
from app.zoo.trainer import EpochStats, TrainedModel

logger = get_logger("zoo.checkpoint")

CHECKPOINT_FORMAT = "szbench-checkpoint"
CHECKPOINT_VERSION = 1


class CheckpointError(DataError):
    """Raised when a checkpoint cannot be read or does not match its spec."""

    pass


def _encode(array: np.ndarray[Any, Any]) -> dict[str, Any]:
    data = np.ascontiguousarray(array, dtype="<f8").tobytes()
    return {"shape": list(array.shape), "data": base64.b64encode(data).decode("ascii")}


def _decode(blob: dict[str, Any]) -> np.ndarray[Any, np.dtype[np.float64]]:
    raw = base64.b64decode(blob["data"], validate=True)
    values = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    return values.reshape(tuple(blob["shape"]))


def save_checkpoint(path: Path | str, model: TrainedModel) -> Path:
    """Write a model checkpoint as JSON."""
    path = Path(path)
    document = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "spec": model.spec.to_dict(),
        "input_shape": list(model.network.input_shape),
        "manifest": model.manifest(),
        "learning_curve": [s.to_dict() for s in model.learning_curve],
        "tensors": {k: _encode(v) for k, v in model.network.state_dict().items()},
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, sort_keys=True), encoding="utf-8")
    logger.info("Saved checkpoint", extra={"path": str(path), "model": model.spec.name.value})
    return path


def load_checkpoint(path: Path | str) -> TrainedModel:
    """Rebuild a TrainedModel from a checkpoint file.

    Raises:
        CheckpointError: If the file is unreadable, of another format or
            its tensors do not fit the stored spec.
    """
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e

    if document.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path} is not a szbench checkpoint")
    if document.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {document.get('version')}")

    try:
        spec = ModelSpec.from_dict(document["spec"])
        time_len, channels = document["input_shape"]
        manifest = document["manifest"]
        network = init_network(spec, (int(time_len), int(channels)))
        network.load_state_dict({k: _decode(v) for k, v in document["tensors"].items()})
        curve = [EpochStats(**{**s, "epoch": int(s["epoch"])}) for s in document["learning_curve"]]
        config = TrainConfig(**manifest["train"])
        normalization = Normalization(manifest["normalization"])
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointError(f"invalid checkpoint {path}: {e}") from e

    return TrainedModel(
        spec=spec,
        network=network,
        config=config,
        learning_curve=curve,
        normalization=normalization,
        optimizer=dict(manifest.get("optimizer", {})),
    )
