"""Mini-batch training of deep models and label prediction."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

from app.errors import DataError, DivergenceError
from app.models.recording import FrameSet, Label, Normalization
from app.numerics.losses import bce_loss
from app.numerics.optim import OptimizerState, optimizer_step
from app.numerics.tensor import Tensor, backprop
from app.utils.logging import get_logger
from app.zoo.network import (
    DEFAULT_THRESHOLD,
    Mode,
    Network,
    forward,
    init_network,
    label_from_output,
    labels_from_outputs,
    predict_proba,
)

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from app.models.config import TrainConfig
    from app.models.layer import ModelSpec
    from app.models.recording import Frame

logger = get_logger("zoo.trainer")


@dataclass(frozen=True)
class EpochStats:
    """Losses and accuracies after one epoch; validation values are NaN without a split."""

    epoch: int
    train_loss: float
    val_loss: float
    train_acc: float
    val_acc: float

    def to_dict(self) -> dict[str, float]:
        return {k: float(v) for k, v in asdict(self).items()}


@dataclass
class TrainedModel:
    """A fitted network with its training history."""

    spec: ModelSpec
    network: Network
    config: TrainConfig
    learning_curve: list[EpochStats] = field(default_factory=list)
    normalization: Normalization = Normalization.ZSCORE
    optimizer: dict[str, Any] = field(default_factory=dict)

    def outputs(self, frames: FrameSet) -> NDArray[np.float64]:
        """Eval-mode outputs, [n x output_units]."""
        if not frames.frames:
            return np.zeros((0, self.spec.output_units))
        return predict_proba(self.network, frames.stack())

    def manifest(self) -> dict[str, Any]:
        return {
            "model": self.spec.to_dict(),
            "train": self.config.to_dict(),
            "optimizer": dict(self.optimizer),
            "normalization": self.normalization.value,
        }


def targets_for(frames: FrameSet, output_units: int) -> NDArray[np.float64]:
    """Training targets: SZ = 1 for a single unit, one-hot in SZ/HC order for two."""
    if output_units == 2:
        onehot = np.zeros((len(frames), 2))
        onehot[np.arange(len(frames)), [lab.index for lab in frames.labels]] = 1.0
        return onehot
    return frames.targets.reshape(-1, 1)


def validation_split(
    frames: FrameSet, fraction: float, seed: int
) -> tuple[list[int], list[int]]:
    """Stratified (train, validation) index lists.

    Each class contributes round(fraction * count) frames to validation,
    keeping at least one frame of that class for training.
    """
    rng = np.random.default_rng(seed)
    labels = frames.labels
    train_idx: list[int] = []
    val_idx: list[int] = []
    for label in (Label.SZ, Label.HC):
        members = [i for i, lab in enumerate(labels) if lab is label]
        shuffled = [members[int(j)] for j in rng.permutation(len(members))]
        n_val = min(round(fraction * len(members)), max(len(members) - 1, 0))
        val_idx.extend(shuffled[:n_val])
        train_idx.extend(shuffled[n_val:])
    return sorted(train_idx), sorted(val_idx)


def _accuracy(outputs: NDArray[np.float64], labels: list[Label]) -> float:
    predicted = labels_from_outputs(outputs)
    return sum(p is t for p, t in zip(predicted, labels, strict=True)) / len(labels)


def _loss(network: Network, pred: Tensor, target: NDArray[np.float64]) -> Tensor:
    return bce_loss(pred, target, network.penalized(), network.spec.l2_coeff)


def batch_gradients(
    network: Network,
    x: NDArray[np.float64],
    y: NDArray[np.float64],
    rng: np.random.Generator,
    micro_batch: int | None = None,
) -> tuple[float, dict[Tensor, NDArray[np.float64]], NDArray[np.float64]]:
    """Loss, parameter gradients and train-mode outputs of one batch.

    With ``micro_batch`` the batch is forwarded in slices and each slice's
    gradient is weighted by its share of the batch. The L2 term enters every
    slice loss, so the weighted sum equals the full-batch gradient. Only one
    slice's graph is alive at a time.
    """
    n = x.shape[0]
    step = n if micro_batch is None else min(micro_batch, n)
    params = network.parameters()
    total = 0.0
    grads: dict[Tensor, NDArray[np.float64]] = {p: np.zeros_like(p.data) for p in params}
    outputs: list[NDArray[np.float64]] = []
    for start in range(0, n, step):
        weight = min(step, n - start) / n
        pred = network.forward_batch(x[start : start + step], Mode.TRAIN, rng)
        loss = _loss(network, pred, y[start : start + step])
        total += weight * loss.item()
        for p, g in backprop(loss, params).items():
            grads[p] += weight * g
        outputs.append(pred.data)
    return total, grads, np.concatenate(outputs)


def train(
    spec: ModelSpec,
    train_frames: FrameSet,
    config: TrainConfig,
    normalization: Normalization | None = None,
) -> TrainedModel:
    """Fit ``spec`` to the frames with mini-batch BCE + L2 training.

    Each epoch shuffles the training part with a generator seeded by
    ``config.seed + epoch``; the last short batch is kept. A stratified
    validation split of ``config.validation_fraction`` is held out for the
    learning curve.

    Args:
        spec: Architecture to fit.
        train_frames: Frames of both classes, all of one shape.
        config: Epochs, batch size, learning rate, optimizer and seed.
        normalization: Tag recorded with the model; taken from the frames when omitted.

    Returns:
        TrainedModel.

    Raises:
        DataError: If the set is empty or holds a single class.
        DivergenceError: If a batch loss is not finite.
    """
    if not train_frames.frames:
        raise DataError("cannot train on an empty frame set")
    sz, hc = train_frames.class_counts
    if sz == 0 or hc == 0:
        raise DataError(f"training set needs both classes, got SZ={sz} HC={hc}")
    if any(not f.is_normalized for f in train_frames.frames):
        logger.warning("Training on unnormalized frames", extra={"model": spec.name.value})

    tag = normalization or train_frames.frames[0].normalization
    fit_idx, val_idx = validation_split(train_frames, config.validation_fraction, config.seed)
    x_all = train_frames.stack()
    y_all = targets_for(train_frames, spec.output_units)
    labels = train_frames.labels

    network = init_network(spec, (x_all.shape[1], x_all.shape[2]), seed=config.seed)
    state = OptimizerState(kind=config.optimizer, learning_rate=config.learning_rate)
    params = network.parameters()
    curve: list[EpochStats] = []
    fit = np.array(fit_idx, dtype=np.intp)

    for epoch in range(config.epochs):
        rng = np.random.default_rng(config.seed + epoch)
        order = fit[rng.permutation(fit.size)]
        loss_sum, correct = 0.0, 0

        for batch_no, start in enumerate(range(0, order.size, config.batch_size)):
            batch = order[start : start + config.batch_size]
            value, grads, outputs = batch_gradients(
                network, x_all[batch], y_all[batch], rng, config.micro_batch
            )
            if not math.isfinite(value):
                raise DivergenceError(f"non-finite loss {value}", epoch=epoch, batch=batch_no)
            optimizer_step(state, params, [grads[p] for p in params])

            loss_sum += value * batch.size
            batch_labels = [labels[int(i)] for i in batch]
            correct += round(_accuracy(outputs, batch_labels) * batch.size)

        val_loss = val_acc = float("nan")
        if val_idx:
            outputs = predict_proba(network, x_all[val_idx])
            val_loss = _loss(network, Tensor(outputs), y_all[val_idx]).item()
            val_acc = _accuracy(outputs, [labels[i] for i in val_idx])

        stats = EpochStats(
            epoch=epoch,
            train_loss=loss_sum / fit.size,
            val_loss=val_loss,
            train_acc=correct / fit.size,
            val_acc=val_acc,
        )
        curve.append(stats)
        logger.info("Epoch finished", extra={"model": spec.name.value, **stats.to_dict()})

    return TrainedModel(
        spec=spec,
        network=network,
        config=config,
        learning_curve=curve,
        normalization=Normalization(tag),
        optimizer=state.describe(),
    )


def predict_label(
    model: TrainedModel | Network, frame: Frame, threshold: float = DEFAULT_THRESHOLD
) -> Label:
    """SZ iff p >= threshold; argmax for a two-unit head."""
    network = model.network if isinstance(model, TrainedModel) else model
    return label_from_output(forward(network, frame, Mode.EVAL), threshold)
