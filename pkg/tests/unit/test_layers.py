"""Unit tests for the layer kernels."""

import numpy as np
import pytest

from app.errors import DimensionError, ParameterError
from app.models.layer import Activation
from app.numerics.init import lstm_params
from app.numerics.layers import (
    SELU_ALPHA,
    SELU_SCALE,
    LstmParams,
    activation,
    conv1d,
    dense,
    dropout,
    lstm_forward,
    maxpool1d,
    output_length,
)
from app.numerics.tensor import Tensor, backprop, gradient_check, tensor_sum

TOLERANCE = 1e-4


def naive_conv1d(x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int) -> np.ndarray:
    """Reference cross-correlation written as explicit loops."""
    out_ch, k, in_ch = w.shape
    steps = (x.shape[0] - k) // stride + 1
    out = np.zeros((steps, out_ch))
    for t in range(steps):
        for o in range(out_ch):
            total = b[o]
            for j in range(k):
                for c in range(in_ch):
                    total += w[o, j, c] * x[t * stride + j, c]
            out[t, o] = total
    return out


class TestConv1d:
    """Tests for the 1-D convolution."""

    @pytest.mark.parametrize("stride", [1, 2, 3])
    def test_matches_naive_loops(self, rng: np.random.Generator, stride: int) -> None:
        """Test the vectorized kernel against the loop definition."""
        x = rng.standard_normal((11, 3))
        w = rng.standard_normal((4, 3, 3))
        b = rng.standard_normal(4)

        out = conv1d(Tensor(x), Tensor(w), Tensor(b), stride=stride)

        np.testing.assert_allclose(out.data, naive_conv1d(x, w, b, stride), atol=1e-12)

    def test_batched_equals_per_sample(self, rng: np.random.Generator) -> None:
        """Test that a batch gives the same rows as separate calls."""
        x = rng.standard_normal((2, 8, 2))
        w = Tensor(rng.standard_normal((3, 3, 2)))
        b = Tensor(np.zeros(3))

        batched = conv1d(Tensor(x), w, b)

        for i in range(2):
            np.testing.assert_allclose(batched.data[i], conv1d(Tensor(x[i]), w, b).data)

    def test_output_lengths(self) -> None:
        """Test the valid-padding length formula on the network shapes."""
        assert output_length(6250, 3, 1) == 6248
        assert output_length(6248, 2, 1) == 6247
        assert output_length(6250, 5, 2) == 3123
        assert output_length(10, 3, 3) == 3

    def test_gradients(self, rng: np.random.Generator) -> None:
        """Test conv1d gradients w.r.t. input, kernels and bias."""
        x = Tensor.parameter(rng.standard_normal((2, 6, 3)))
        w = Tensor.parameter(rng.standard_normal((4, 3, 3)))
        b = Tensor.parameter(rng.standard_normal(4))

        def fn() -> Tensor:
            out = conv1d(x, w, b, stride=2)
            return tensor_sum(out * out)

        assert gradient_check(fn, [x, w, b]) < TOLERANCE

    def test_channel_mismatch(self) -> None:
        """Test that a wrong channel count names the in_ch axis."""
        with pytest.raises(DimensionError) as exc_info:
            conv1d(Tensor(np.ones((8, 2))), Tensor(np.ones((1, 3, 3))), Tensor(np.zeros(1)))
        assert exc_info.value.axis == "in_ch"

    def test_input_shorter_than_kernel(self) -> None:
        """Test that a short input names the time axis."""
        with pytest.raises(DimensionError) as exc_info:
            conv1d(Tensor(np.ones((2, 1))), Tensor(np.ones((1, 3, 1))), Tensor(np.zeros(1)))
        assert exc_info.value.axis == "time"

    def test_bad_stride(self) -> None:
        """Test that a zero stride is rejected."""
        with pytest.raises(ParameterError, match="stride"):
            conv1d(Tensor(np.ones((4, 1))), Tensor(np.ones((1, 2, 1))), Tensor(np.zeros(1)), 0)


class TestMaxPool:
    """Tests for max pooling."""

    def test_values(self) -> None:
        """Test window maxima per channel."""
        x = np.array([[1.0, 0.0], [3.0, -1.0], [2.0, 5.0], [0.0, 4.0]])

        out = maxpool1d(Tensor(x), window=2, stride=1)

        assert out.data.tolist() == [[3.0, 0.0], [3.0, 5.0], [2.0, 5.0]]

    def test_gradient_goes_to_first_maximum(self) -> None:
        """Test that ties route the whole gradient to the first position."""
        x = Tensor.parameter(np.array([[2.0], [2.0], [1.0]]))

        grads = backprop(tensor_sum(maxpool1d(x, window=3)))

        assert grads[x].ravel().tolist() == [1.0, 0.0, 0.0]

    def test_gradients(self, rng: np.random.Generator) -> None:
        """Test pooling gradients with strided windows."""
        x = Tensor.parameter(rng.standard_normal((2, 7, 2)))

        def fn() -> Tensor:
            out = maxpool1d(x, window=3, stride=2)
            return tensor_sum(out * out)

        assert gradient_check(fn, [x]) < TOLERANCE

    def test_window_too_long(self) -> None:
        """Test that a window longer than the input is rejected."""
        with pytest.raises(DimensionError) as exc_info:
            maxpool1d(Tensor(np.ones((2, 1))), window=3)
        assert exc_info.value.axis == "time"


class TestDense:
    """Tests for the fully connected layer."""

    def test_single_sample(self) -> None:
        """Test W @ x + b on an unbatched vector."""
        w = Tensor(np.array([[1.0, 2.0], [0.0, -1.0]]))
        b = Tensor(np.array([0.5, 0.0]))

        out = dense(Tensor([3.0, 4.0]), w, b)

        assert out.shape == (2,)
        assert out.data.tolist() == [11.5, -4.0]

    def test_gradients(self, rng: np.random.Generator) -> None:
        """Test dense gradients on a batch."""
        x = Tensor.parameter(rng.standard_normal((3, 5)))
        w = Tensor.parameter(rng.standard_normal((2, 5)))
        b = Tensor.parameter(rng.standard_normal(2))

        def fn() -> Tensor:
            out = dense(x, w, b)
            return tensor_sum(out * out)

        assert gradient_check(fn, [x, w, b]) < TOLERANCE

    def test_feature_mismatch(self) -> None:
        """Test that a wrong feature count names the features axis."""
        with pytest.raises(DimensionError) as exc_info:
            dense(Tensor(np.ones(3)), Tensor(np.ones((2, 4))), Tensor(np.zeros(2)))
        assert exc_info.value.axis == "features"


class TestActivation:
    """Tests for elementwise activations."""

    def test_relu_and_leaky(self) -> None:
        """Test ReLU and leaky ReLU on both signs."""
        x = Tensor([-2.0, 3.0])

        assert activation(x, "relu").data.tolist() == [0.0, 3.0]
        assert activation(x, Activation.LEAKY_RELU).data.tolist() == pytest.approx([-0.02, 3.0])

    def test_selu_constants(self) -> None:
        """Test SELU on the positive side and its negative saturation."""
        out = activation(Tensor([1.0, -50.0]), "selu").data

        assert out[0] == pytest.approx(SELU_SCALE)
        assert out[1] == pytest.approx(-SELU_SCALE * SELU_ALPHA)
        assert SELU_SCALE == pytest.approx(1.0507, abs=1e-4)
        assert SELU_ALPHA == pytest.approx(1.6733, abs=1e-4)

    def test_sigmoid_is_stable(self) -> None:
        """Test that extreme inputs saturate without overflow."""
        out = activation(Tensor([-1000.0, 0.0, 1000.0]), "sigmoid").data

        assert out.tolist() == [0.0, 0.5, 1.0]

    def test_linear_is_identity(self) -> None:
        """Test that the linear activation returns its input."""
        x = Tensor([1.0, -1.0])
        assert activation(x, "linear") is x

    @pytest.mark.parametrize("kind", ["relu", "leaky_relu", "selu", "sigmoid"])
    def test_gradients(self, kind: str) -> None:
        """Test activation gradients away from the ReLU kink."""
        x = Tensor.parameter(np.array([-1.3, -0.4, 0.7, 2.1]))

        def fn() -> Tensor:
            out = activation(x, kind)
            return tensor_sum(out * out)

        assert gradient_check(fn, [x]) < TOLERANCE

    def test_unknown_activation(self) -> None:
        """Test that an unknown name is rejected."""
        with pytest.raises(ValueError):
            activation(Tensor([1.0]), "swish")


class TestDropout:
    """Tests for inverted dropout."""

    def test_eval_mode_is_identity(self, rng: np.random.Generator) -> None:
        """Test that evaluation returns the input unchanged."""
        x = Tensor(np.ones(10))
        assert dropout(x, 0.5, training=False, rng=rng) is x

    def test_inverted_scaling(self, rng: np.random.Generator) -> None:
        """Test that kept units are scaled by 1 / (1 - rate)."""
        out = dropout(Tensor(np.ones(10_000)), 0.25, training=True, rng=rng).data

        kept = out[out != 0.0]
        np.testing.assert_allclose(kept, 1.0 / 0.75)
        assert 0.72 < kept.size / out.size < 0.78
        assert out.mean() == pytest.approx(1.0, abs=0.05)

    def test_same_seed_same_mask(self) -> None:
        """Test that masks are reproducible from the generator seed."""
        x = Tensor(np.ones(50))
        a = dropout(x, 0.5, True, np.random.default_rng(3)).data
        b = dropout(x, 0.5, True, np.random.default_rng(3)).data
        np.testing.assert_array_equal(a, b)

    @pytest.mark.parametrize("rate", [-0.1, 1.0])
    def test_rate_range(self, rng: np.random.Generator, rate: float) -> None:
        """Test that rates outside [0, 1) are rejected."""
        with pytest.raises(ParameterError, match="rate"):
            dropout(Tensor([1.0]), rate, True, rng)


class TestLstm:
    """Tests for the LSTM layer."""

    def test_output_shapes(self, rng: np.random.Generator) -> None:
        """Test last-state and full-sequence shapes, batched and not."""
        params = lstm_params(rng, units=4, features=3)
        seq = Tensor(rng.standard_normal((5, 3)))
        batch = Tensor(rng.standard_normal((2, 5, 3)))

        assert lstm_forward(seq, params).shape == (4,)
        assert lstm_forward(seq, params, return_sequence=True).shape == (5, 4)
        assert lstm_forward(batch, params).shape == (2, 4)
        assert lstm_forward(batch, params, return_sequence=True).shape == (2, 5, 4)

    def test_last_state_matches_sequence_tail(self, rng: np.random.Generator) -> None:
        """Test that the last hidden state equals the final sequence row."""
        params = lstm_params(rng, units=3, features=2)
        seq = Tensor(rng.standard_normal((6, 2)))

        last = lstm_forward(seq, params).data
        full = lstm_forward(seq, params, return_sequence=True).data

        np.testing.assert_allclose(last, full[-1])

    def test_forget_bias_initialized_to_one(self, rng: np.random.Generator) -> None:
        """Test that only the forget gate biases start at 1."""
        params = lstm_params(rng, units=2, features=1)
        assert params.biases.data.tolist() == [0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]

    @pytest.mark.parametrize("return_sequence", [False, True])
    def test_gradients(self, rng: np.random.Generator, return_sequence: bool) -> None:
        """Test backprop through time for every weight and the input."""
        params = lstm_params(rng, units=3, features=2)
        seq = Tensor.parameter(rng.standard_normal((2, 4, 2)))

        def fn() -> Tensor:
            out = lstm_forward(seq, params, return_sequence=return_sequence)
            return tensor_sum(out * out)

        assert gradient_check(fn, [seq, *params.tensors]) < TOLERANCE

    def test_feature_mismatch(self, rng: np.random.Generator) -> None:
        """Test that the wrong feature width names the features axis."""
        params = lstm_params(rng, units=2, features=3)
        with pytest.raises(DimensionError) as exc_info:
            lstm_forward(Tensor(np.ones((4, 2))), params)
        assert exc_info.value.axis == "features"

    def test_gate_shapes_validated(self) -> None:
        """Test that mis-sized gate weights are rejected at construction."""
        with pytest.raises(DimensionError, match="recurrent_weights"):
            LstmParams(
                units=2,
                input_weights=Tensor(np.ones((8, 3))),
                recurrent_weights=Tensor(np.ones((8, 3))),
                biases=Tensor(np.zeros(8)),
            )
