"""Unit tests for architectures, networks, training and checkpoints."""

from pathlib import Path

import numpy as np
import pytest

from app.data.preprocessing import normalize
from app.errors import ContractError, DataError, DimensionError, ParameterError
from app.models.config import TrainConfig
from app.models.layer import Activation, LayerKind, LayerSpec, ModelName, ModelSpec
from app.models.recording import Frame, FrameSet, Label
from app.zoo.architectures import build, shape_trace
from app.zoo.checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from app.zoo.network import (
    Mode,
    forward,
    init_network,
    label_from_output,
    predict_proba,
    sz_score,
)
from app.zoo.trainer import (
    TrainedModel,
    batch_gradients,
    predict_label,
    targets_for,
    train,
    validation_split,
)
from tests.fixtures.eeg import offset_frameset

C, D, P, F, H, L = (
    LayerKind.CONV1D,
    LayerKind.DROPOUT,
    LayerKind.MAXPOOL1D,
    LayerKind.FLATTEN,
    LayerKind.DENSE,
    LayerKind.LSTM,
)

GOLDEN_KINDS = {
    ModelName.CNN_1: [C, C, D, P, F, H, D, H],
    ModelName.CNN_2: [C, D, C, D, C, D, P, F, H, D, H],
    ModelName.CNN_3: [C, C, D, P, F, H, D, H, D, H],
    ModelName.LSTM_1: [L, D, H, D, H],
    ModelName.LSTM_2: [L, L, D, H, D, H],
    ModelName.CNN_LSTM_1: [C, C, D, P, F, L, D, H, D, H],
    ModelName.CNN_LSTM_2: [C, C, D, P, F, L, D, H, D, H, D, H],
}


def tiny_spec(units: int = 1) -> ModelSpec:
    """Conv, pool and a sigmoid head: small enough to train in a test."""
    return ModelSpec(
        name=ModelName.CNN_1,
        layers=[
            LayerSpec(LayerKind.CONV1D, filters=3, kernel=3, stride=1,
                      activation=Activation.LEAKY_RELU),
            LayerSpec(LayerKind.MAXPOOL1D, window=2, stride=1),
            LayerSpec(LayerKind.FLATTEN),
            LayerSpec(LayerKind.DENSE, units=units, activation=Activation.SIGMOID),
        ],
        l2_coeff=0.001,
    )  # fmt: skip


FAST = TrainConfig(epochs=15, batch_size=8, learning_rate=0.05, seed=3)


class TestArchitectures:
    """Tests for the seven layer tables."""

    @pytest.mark.parametrize("name", list(ModelName))
    def test_golden_layer_kinds(self, name: ModelName) -> None:
        """Test each table row by row."""
        spec = build(name)
        assert [layer.kind for layer in spec.layers] == GOLDEN_KINDS[name]

    def test_row_counts(self) -> None:
        """Test row counts including the input row."""
        assert build("CNN-1").row_count == 9
        assert build("CNN-LSTM-2").row_count == 13

    def test_heads(self) -> None:
        """Test that only CNN-1 has a two-unit head."""
        assert build("CNN-1").output_units == 2
        assert {build(m).output_units for m in ModelName if m is not ModelName.CNN_1} == {1}

    def test_activation_sweep_touches_conv_only(self) -> None:
        """Test that the swept activation replaces conv rows but not fixed dense rows."""
        spec = build("CNN-3", "selu")

        conv = [layer.activation for layer in spec.layers if layer.kind is LayerKind.CONV1D]
        dense = [layer.activation for layer in spec.layers if layer.kind is LayerKind.DENSE]
        assert conv == [Activation.SELU, Activation.SELU]
        assert dense == [Activation.RELU, Activation.RELU, Activation.SIGMOID]

    def test_blank_dense_rows_are_linear(self) -> None:
        """Test that CNN-LSTM-1's unlabelled dense row stays linear."""
        dense = [layer for layer in build("CNN-LSTM-1").layers if layer.kind is LayerKind.DENSE]
        assert dense[0].activation is Activation.LINEAR

    def test_cnn_lstm_shape_trace(self) -> None:
        """Test that the LSTM of CNN-LSTM-1 reads a 6245-step sequence of 64 features."""
        trace = shape_trace(build("CNN-LSTM-1"), (6250, 19))

        assert trace[:5] == [(6248, 64), (6246, 64), (6246, 64), (6245, 64), (6245, 64)]
        assert trace[5] == (100,)
        assert trace[-1] == (1,)

    def test_cnn_flatten_size(self) -> None:
        """Test that the CNN-1 flatten row feeds 6245 * 64 features to the dense layer."""
        trace = shape_trace(build("CNN-1"), (6250, 19))
        assert trace[4] == (6245 * 64,)
        assert trace[-1] == (2,)

    def test_lstm_2_stacks_sequences(self) -> None:
        """Test that the first LSTM of LSTM-2 emits a sequence."""
        trace = shape_trace(build("LSTM-2"), (6250, 19))
        assert trace[:2] == [(6250, 100), (50,)]

    def test_unknown_model(self) -> None:
        """Test that an unknown name lists the valid ones."""
        with pytest.raises(ParameterError, match="CNN-1"):
            build("CNN-9")

    def test_sigmoid_not_sweepable(self) -> None:
        """Test that only hidden activations can be swept."""
        with pytest.raises(ParameterError, match="hidden activation"):
            build("CNN-1", "sigmoid")

    def test_spec_round_trip_through_dict(self) -> None:
        """Test that a spec survives its manifest form."""
        spec = build("LSTM-2", "leaky_relu", 0.02)
        assert ModelSpec.from_dict(spec.to_dict()) == spec


SEQ = (6245, 64)
FLAT = 6245 * 64

# Hand-derived per-layer output shapes for a 6250 x 19 frame: valid conv
# (kernel 3, stride 1) and max pooling (window 2, stride 1) give
# (time - width) // stride + 1 samples; flatten multiplies out unless an LSTM follows.
SHAPES_6250: dict[ModelName, list[tuple[int, ...]]] = {
    ModelName.CNN_1: [
        (6248, 64), (6246, 64), (6246, 64), SEQ, (FLAT,), (100,), (100,), (2,),
    ],
    ModelName.CNN_2: [
        (6248, 64), (6248, 64), (6246, 64), (6246, 64), (6244, 64), (6244, 64),
        (6243, 64), (6243 * 64,), (100,), (100,), (1,),
    ],
    ModelName.CNN_3: [
        (6248, 64), (6246, 64), (6246, 64), SEQ, (FLAT,), (100,), (100,), (50,), (50,), (1,),
    ],
    ModelName.LSTM_1: [(100,), (100,), (100,), (100,), (1,)],
    ModelName.LSTM_2: [(6250, 100), (50,), (50,), (100,), (100,), (1,)],
    ModelName.CNN_LSTM_1: [
        (6248, 64), (6246, 64), (6246, 64), SEQ, SEQ, (100,), (100,), (100,), (100,), (1,),
    ],
    ModelName.CNN_LSTM_2: [
        (6248, 64), (6246, 64), (6246, 64), SEQ, SEQ,
        (100,), (100,), (100,), (100,), (50,), (50,), (1,),
    ],
}  # fmt: skip


class TestShapeAlgebra:
    """Per-layer shapes of all seven models on a full-length frame."""

    @pytest.mark.parametrize("name", list(ModelName))
    def test_trace_matches_hand_derived_shapes(self, name: ModelName) -> None:
        """Test every shape_trace entry against the closed-form sizes."""
        assert shape_trace(build(name), (6250, 19)) == SHAPES_6250[name]

    @pytest.mark.slow
    @pytest.mark.parametrize("name", list(ModelName))
    def test_forward_pass_matches_trace(self, name: ModelName) -> None:
        """Test that a real forward pass produces the traced shape at every layer."""
        rng = np.random.default_rng(0)
        data = rng.normal(5.0, 20.0, (6250, 19))
        raw = Frame(subject_id="s01", label=Label.SZ, data=data, frame_index=0)
        frame = normalize(raw, "zscore")
        network = init_network(build(name), (6250, 19))
        seen: list[tuple[int, ...]] = []

        network.forward_batch(
            frame.data[None, :, :], on_layer=lambda _i, out: seen.append(tuple(out.shape[1:]))
        )

        assert seen == SHAPES_6250[name]
        assert forward(network, frame).shape == SHAPES_6250[name][-1]


class TestNetwork:
    """Tests for initialized networks and forward passes."""

    def test_forward_shapes(self, rng: np.random.Generator) -> None:
        """Test batch outputs for a one-unit and a two-unit head."""
        x = rng.standard_normal((5, 16, 2))

        assert predict_proba(init_network(tiny_spec(), (16, 2)), x).shape == (5, 1)
        assert predict_proba(init_network(tiny_spec(2), (16, 2)), x).shape == (5, 2)

    def test_outputs_are_probabilities(self, rng: np.random.Generator) -> None:
        """Test that sigmoid outputs lie in (0, 1)."""
        out = predict_proba(init_network(tiny_spec(), (16, 2)), rng.standard_normal((4, 16, 2)))
        assert ((out > 0.0) & (out < 1.0)).all()

    def test_eval_forward_is_deterministic(self) -> None:
        """Test that equal seeds give equal weights and equal outputs."""
        frames = offset_frameset(2)
        a = init_network(tiny_spec(), (16, 2), seed=9)
        b = init_network(tiny_spec(), (16, 2), seed=9)

        for frame in frames.frames:
            np.testing.assert_array_equal(forward(a, frame), forward(b, frame))

    def test_small_lstm_model_runs(self, rng: np.random.Generator) -> None:
        """Test a recurrent table at reduced size end to end."""
        spec = build("LSTM-2")
        network = init_network(spec, (6, 3), seed=0)

        out = network.forward_batch(rng.standard_normal((2, 6, 3)), Mode.TRAIN, rng)

        assert out.shape == (2, 1)

    def test_wrong_input_shape(self) -> None:
        """Test that inputs must match the network's frame shape."""
        network = init_network(tiny_spec(), (16, 2))
        with pytest.raises(DimensionError) as exc_info:
            network.forward_batch(np.zeros((1, 16, 3)))
        assert exc_info.value.axis == "input"

    def test_train_mode_needs_rng(self) -> None:
        """Test that dropout mode requires a generator."""
        network = init_network(tiny_spec(), (16, 2))
        with pytest.raises(ContractError, match="random generator"):
            network.forward_batch(np.zeros((1, 16, 2)), Mode.TRAIN)

    def test_unnormalized_frame_strict(self) -> None:
        """Test that strict networks refuse raw frames."""
        network = init_network(tiny_spec(), (16, 2))
        network.strict_contract = True
        frame = Frame(subject_id="s01", label=Label.SZ, data=np.zeros((16, 2)), frame_index=0)

        with pytest.raises(ContractError, match="not normalized"):
            forward(network, frame)

    def test_state_dict_shape_check(self) -> None:
        """Test that loading a mis-shaped tensor is rejected."""
        network = init_network(tiny_spec(), (16, 2))
        state = network.state_dict()
        state["0.kernels"] = np.zeros((1, 1, 1))

        with pytest.raises(DimensionError):
            network.load_state_dict(state)

    def test_labels_from_outputs(self) -> None:
        """Test thresholding and two-unit argmax."""
        assert label_from_output([0.5]) is Label.SZ
        assert label_from_output([0.49]) is Label.HC
        assert label_from_output([0.7, 0.3]) is Label.SZ
        assert label_from_output([0.2, 0.8]) is Label.HC
        assert sz_score(np.array([[0.7, 0.3]])).tolist() == [0.7]


class TestTrainer:
    """Tests for mini-batch training."""

    def test_micro_batches_match_full_batch_gradient(self) -> None:
        """Test that accumulated slice gradients equal the full-batch gradient."""
        network = init_network(tiny_spec(), (16, 2), seed=4)
        rng = np.random.default_rng(0)
        x = rng.standard_normal((7, 16, 2))
        y = rng.integers(0, 2, size=(7, 1)).astype(np.float64)

        full_loss, full, full_out = batch_gradients(network, x, y, np.random.default_rng(1))
        part_loss, part, part_out = batch_gradients(
            network, x, y, np.random.default_rng(1), micro_batch=3
        )

        assert part_loss == pytest.approx(full_loss, rel=1e-10)
        np.testing.assert_allclose(part_out, full_out, rtol=1e-10)
        for param in network.parameters():
            np.testing.assert_allclose(part[param], full[param], rtol=1e-10, atol=1e-14)

    def test_training_with_micro_batches(self) -> None:
        """Test that sliced batches still fit the toy set."""
        config = TrainConfig(epochs=15, batch_size=8, learning_rate=0.05, seed=3, micro_batch=3)
        frames = offset_frameset(12)

        model = train(tiny_spec(), frames, config)

        predicted = [predict_label(model, f) for f in frames.frames]
        hits = [p is f.label for p, f in zip(predicted, frames.frames, strict=True)]
        assert np.mean(hits) >= 0.95
        assert model.manifest()["train"]["micro_batch"] == 3

    def test_learns_separable_frames(self) -> None:
        """Test that training fits an offset-separable toy set."""
        frames = offset_frameset(12)

        model = train(tiny_spec(), frames, FAST)

        predicted = [predict_label(model, f) for f in frames.frames]
        accuracy = np.mean([p is f.label for p, f in zip(predicted, frames.frames, strict=True)])
        assert accuracy >= 0.95
        assert len(model.learning_curve) == 15
        assert model.learning_curve[-1].train_loss < model.learning_curve[0].train_loss

    def test_two_unit_head_trains(self) -> None:
        """Test one-hot targets with a two-unit head."""
        frames = offset_frameset(12)
        model = train(tiny_spec(2), frames, FAST)

        assert model.outputs(frames).shape == (24, 2)
        assert model.learning_curve[-1].train_acc >= 0.9

    def test_same_seed_same_weights(self) -> None:
        """Test that training is deterministic given the seed."""
        frames = offset_frameset(6)
        config = TrainConfig(epochs=2, batch_size=4, seed=1)

        a = train(tiny_spec(), frames, config).network.state_dict()
        b = train(tiny_spec(), frames, config).network.state_dict()

        for key in a:
            np.testing.assert_array_equal(a[key], b[key])

    def test_zero_epochs_returns_initial_weights(self) -> None:
        """Test that epochs=0 leaves the initialization untouched."""
        frames = offset_frameset(4)
        config = TrainConfig(epochs=0, seed=5)

        model = train(tiny_spec(), frames, config)

        initial = init_network(tiny_spec(), (16, 2), seed=5).state_dict()
        for key, value in model.network.state_dict().items():
            np.testing.assert_array_equal(value, initial[key])
        assert model.learning_curve == []

    def test_validation_curve_recorded(self) -> None:
        """Test that a validation split fills val columns."""
        frames = offset_frameset(10)
        config = TrainConfig(epochs=2, batch_size=4, validation_fraction=0.2)

        curve = train(tiny_spec(), frames, config).learning_curve

        assert all(np.isfinite(s.val_loss) and 0.0 <= s.val_acc <= 1.0 for s in curve)

    def test_no_validation_gives_nan(self) -> None:
        """Test that val columns are NaN without a split."""
        config = TrainConfig(epochs=1, batch_size=4, validation_fraction=0.0)
        stats = train(tiny_spec(), offset_frameset(4), config).learning_curve[0]
        assert np.isnan(stats.val_loss)

    def test_single_class_rejected(self) -> None:
        """Test that training needs both classes."""
        frames = offset_frameset(4)
        sz_only = FrameSet([f for f in frames.frames if f.label is Label.SZ])

        with pytest.raises(DataError, match="both classes"):
            train(tiny_spec(), sz_only, FAST)

    def test_validation_split_stratified(self) -> None:
        """Test per-class validation counts and disjointness."""
        frames = offset_frameset(10)

        fit, val = validation_split(frames, 0.2, seed=0)

        assert len(val) == 4
        assert not set(fit) & set(val)
        assert sum(1 for i in val if frames.frames[i].label is Label.SZ) == 2

    def test_targets(self) -> None:
        """Test single-unit and one-hot targets."""
        frames = offset_frameset(1)

        assert targets_for(frames, 1).ravel().tolist() == [1.0, 0.0]
        assert targets_for(frames, 2).tolist() == [[1.0, 0.0], [0.0, 1.0]]


class TestCheckpoint:
    """Tests for JSON checkpoints."""

    @pytest.fixture
    def model(self) -> TrainedModel:
        return train(tiny_spec(), offset_frameset(4), TrainConfig(epochs=2, batch_size=4))

    def test_reload_reproduces_outputs(self, model: TrainedModel, tmp_path: Path) -> None:
        """Test that a reloaded model gives identical outputs."""
        frames = offset_frameset(3, seed=8)
        path = save_checkpoint(tmp_path / "fold0.json", model)

        loaded = load_checkpoint(path)

        np.testing.assert_array_equal(loaded.outputs(frames), model.outputs(frames))
        assert loaded.spec == model.spec
        assert loaded.config == model.config
        assert len(loaded.learning_curve) == 2

    def test_foreign_file(self, tmp_path: Path) -> None:
        """Test that other JSON documents are rejected."""
        path = tmp_path / "x.json"
        path.write_text('{"format": "other"}', encoding="utf-8")
        with pytest.raises(CheckpointError, match="not a szbench checkpoint"):
            load_checkpoint(path)

    def test_tensor_mismatch(self, model: TrainedModel, tmp_path: Path) -> None:
        """Test that tensors must fit the stored spec."""
        path = save_checkpoint(tmp_path / "fold0.json", model)
        text = path.read_text(encoding="utf-8").replace('"0.kernels"', '"9.kernels"')
        path.write_text(text, encoding="utf-8")

        with pytest.raises(CheckpointError, match="invalid checkpoint"):
            load_checkpoint(path)
