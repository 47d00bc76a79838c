"""Unit tests for losses and optimizers."""

import math

import numpy as np
import pytest

from app.errors import ContractError, DataError, DimensionError, ParameterError
from app.models.config import OptimizerKind
from app.numerics.losses import PROBABILITY_CLAMP, bce_loss, binary_cross_entropy, l2_penalty
from app.numerics.optim import OptimizerState, optimizer_step
from app.numerics.tensor import Tensor, backprop, gradient_check


class TestBinaryCrossEntropy:
    """Tests for binary cross-entropy."""

    def test_known_value(self) -> None:
        """Test the mean of -log terms over two outputs."""
        loss = binary_cross_entropy(Tensor([0.8, 0.4]), [1.0, 0.0])

        expected = -(math.log(0.8) + math.log(0.6)) / 2
        assert loss.item() == pytest.approx(expected)

    def test_clamp_keeps_loss_finite(self) -> None:
        """Test that a confident wrong prediction gives a finite loss."""
        loss = binary_cross_entropy(Tensor([0.0]), [1.0])

        assert loss.item() == pytest.approx(-math.log(PROBABILITY_CLAMP))

    def test_gradient(self) -> None:
        """Test the analytic gradient against central differences."""
        p = Tensor.parameter(np.array([[0.2, 0.7], [0.9, 0.4]]))
        target = np.array([[1.0, 0.0], [1.0, 1.0]])

        assert gradient_check(lambda: binary_cross_entropy(p, target), [p]) < 1e-4

    def test_non_binary_target(self) -> None:
        """Test that soft targets are rejected."""
        with pytest.raises(DataError, match="0 or 1"):
            binary_cross_entropy(Tensor([0.5]), [0.5])

    def test_shape_mismatch(self) -> None:
        """Test that pred and target must share a shape."""
        with pytest.raises(DimensionError):
            binary_cross_entropy(Tensor([0.5, 0.5]), [1.0])


class TestL2Penalty:
    """Tests for the weight penalty."""

    def test_value_and_gradient(self) -> None:
        """Test coeff * sum of squares and its 2 * coeff * W gradient."""
        w = Tensor.parameter(np.array([1.0, -2.0]))
        v = Tensor.parameter(np.array([[3.0]]))

        penalty = l2_penalty([w, v], 0.1)
        grads = backprop(penalty)

        assert penalty.item() == pytest.approx(1.4)
        np.testing.assert_allclose(grads[w], [0.2, -0.4])
        np.testing.assert_allclose(grads[v], [[0.6]])

    def test_negative_coeff(self) -> None:
        """Test that a negative coefficient is rejected."""
        with pytest.raises(ParameterError):
            l2_penalty([Tensor.parameter([1.0])], -0.01)

    def test_bce_loss_adds_penalty(self) -> None:
        """Test that the combined loss is the sum of both terms."""
        pred = Tensor([0.5, 0.5])
        w = Tensor.parameter(np.array([2.0]))

        plain = bce_loss(pred, [1.0, 0.0])
        combined = bce_loss(pred, [1.0, 0.0], [w], l2_coeff=0.01)

        assert combined.item() == pytest.approx(plain.item() + 0.04)


class TestOptimizer:
    """Tests for SGD and Adam updates."""

    def test_sgd_step(self) -> None:
        """Test w <- w - lr * g."""
        w = Tensor.parameter(np.array([1.0, 2.0]))
        state = OptimizerState(kind=OptimizerKind.SGD, learning_rate=0.5)

        optimizer_step(state, [w], [np.array([0.2, -0.4])])

        np.testing.assert_allclose(w.data, [0.9, 2.2])
        assert state.step_count == 1

    def test_adam_first_step_moves_by_learning_rate(self) -> None:
        """Test that bias correction makes the first Adam step about lr * sign(g)."""
        w = Tensor.parameter(np.array([0.0, 0.0]))
        state = OptimizerState(kind="adam", learning_rate=0.01)

        optimizer_step(state, [w], [np.array([3.0, -0.5])])

        np.testing.assert_allclose(w.data, [-0.01, 0.01], rtol=1e-6)

    def test_adam_tracks_moments(self) -> None:
        """Test the moment estimates after two steps."""
        w = Tensor.parameter(np.array([1.0]))
        state = OptimizerState()
        g = np.array([2.0])

        optimizer_step(state, [w], [g])
        optimizer_step(state, [w], [g])

        assert state.step_count == 2
        np.testing.assert_allclose(state.first_moments[0], [0.19 * 2.0])
        np.testing.assert_allclose(state.second_moments[0], [(1 - 0.999**2) * 4.0])

    def test_parameter_array_is_replaced(self) -> None:
        """Test that updates do not mutate arrays captured elsewhere."""
        w = Tensor.parameter(np.array([1.0]))
        captured = w.data

        optimizer_step(OptimizerState(kind="sgd"), [w], [np.array([1.0])])

        assert captured.tolist() == [1.0]
        assert w.data is not captured

    def test_misaligned_gradients(self) -> None:
        """Test that params and grads must pair up."""
        w = Tensor.parameter(np.array([1.0]))
        with pytest.raises(ContractError):
            optimizer_step(OptimizerState(), [w], [])
        with pytest.raises(ContractError, match="shape"):
            optimizer_step(OptimizerState(), [w], [np.zeros(2)])

    def test_describe(self) -> None:
        """Test the manifest description of each optimizer."""
        assert OptimizerState(kind="sgd", learning_rate=0.1).describe() == {
            "kind": "sgd",
            "learning_rate": 0.1,
        }
        assert OptimizerState().describe()["beta2"] == 0.999

    @pytest.mark.parametrize(
        "kwargs",
        [{"learning_rate": 0.0}, {"beta1": 1.0}, {"step_count": -1}],
    )
    def test_validation(self, kwargs: dict) -> None:
        """Test that invalid hyperparameters are rejected."""
        with pytest.raises(ParameterError):
            OptimizerState(**kwargs)

    def test_sgd_minimizes_quadratic(self) -> None:
        """Test that repeated steps reach the minimum of (w - 3)^2."""
        w = Tensor.parameter(np.array([0.0]))
        state = OptimizerState(kind="sgd", learning_rate=0.1)

        for _ in range(200):
            diff = w - 3.0
            grads = backprop((diff * diff).sum())
            optimizer_step(state, [w], [grads[w]])

        assert w.data[0] == pytest.approx(3.0, abs=1e-6)
