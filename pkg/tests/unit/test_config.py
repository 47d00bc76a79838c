"""Unit tests for configuration."""

import json
import tempfile
from pathlib import Path

import pytest

from app.models.config import (
    METHOD_ORDER,
    BaselineKind,
    BaselineParams,
    ExperimentConfig,
    OptimizerKind,
    TrainConfig,
    parse_method,
)
from app.models.layer import ModelName
from app.models.recording import Normalization
from app.utils.config_loader import (
    DATASET_ROOT_ENV,
    ConfigLoaderError,
    load_experiment_config,
    load_grid_config,
)


class TestTrainConfig:
    """Tests for TrainConfig model."""

    def test_default_config(self) -> None:
        """Test the CNN family defaults."""
        config = TrainConfig()

        assert (config.epochs, config.batch_size, config.learning_rate) == (32, 10, 0.01)
        assert config.optimizer is OptimizerKind.ADAM

    @pytest.mark.parametrize(
        ("name", "expected"),
        [
            ("CNN-2", (32, 10, 0.01)),
            ("LSTM-1", (30, 16, 0.01)),
            ("CNN-LSTM-2", (50, 128, 0.01)),
        ],
    )
    def test_family_defaults(self, name: str, expected: tuple[int, int, float]) -> None:
        """Test per-family epochs, batch size and learning rate."""
        config = TrainConfig.for_model(name)
        assert (config.epochs, config.batch_size, config.learning_rate) == expected

    def test_overrides(self) -> None:
        """Test that overrides replace family defaults."""
        config = TrainConfig.for_model("LSTM-2", epochs=2, optimizer="sgd")

        assert config.epochs == 2
        assert config.batch_size == 16
        assert config.optimizer is OptimizerKind.SGD

    def test_unknown_override(self) -> None:
        """Test that misspelled settings are rejected."""
        with pytest.raises(ValueError, match="Unknown train settings: epoch"):
            TrainConfig().with_overrides({"epoch": 3})

    def test_validation(self) -> None:
        """Test value checks."""
        with pytest.raises(ValueError, match="batch_size"):
            TrainConfig(batch_size=0)
        with pytest.raises(ValueError, match="learning_rate"):
            TrainConfig(learning_rate=0.0)
        with pytest.raises(ValueError, match="validation_fraction"):
            TrainConfig(validation_fraction=1.0)

        # zero epochs is a valid no-op run
        assert TrainConfig(epochs=0).epochs == 0


class TestBaselineParams:
    """Tests for BaselineParams model."""

    def test_pinned_defaults(self) -> None:
        """Test the documented default hyperparameters."""
        params = BaselineParams()

        assert params.n_neighbors == 5
        assert params.n_estimators == 100
        assert params.C == 1.0
        assert params.gamma == "scale"

    def test_gamma_validation(self) -> None:
        """Test that gamma is 'scale' or a positive number."""
        assert BaselineParams(gamma=0.5).gamma == 0.5
        with pytest.raises(ValueError, match="gamma"):
            BaselineParams(gamma="auto")
        with pytest.raises(ValueError, match="gamma"):
            BaselineParams(gamma=-1.0)

    def test_bounds(self) -> None:
        """Test positive counts and min_split."""
        with pytest.raises(ValueError, match="n_neighbors"):
            BaselineParams(n_neighbors=0)
        with pytest.raises(ValueError, match="min_split"):
            BaselineParams(min_split=1)


class TestExperimentConfig:
    """Tests for ExperimentConfig model."""

    def test_parse_method(self) -> None:
        """Test that method names resolve to models or baselines."""
        assert parse_method("CNN-LSTM-1") is ModelName.CNN_LSTM_1
        assert parse_method("svm_rbf") is BaselineKind.SVM_RBF
        with pytest.raises(ValueError, match="Unknown method"):
            parse_method("resnet")

    def test_method_order(self) -> None:
        """Test that baselines are listed before deep models."""
        assert METHOD_ORDER[:7] == tuple(k.value for k in BaselineKind)
        assert METHOD_ORDER[-1] == "CNN-LSTM-2"

    def test_deep_run_gets_family_train_config(self) -> None:
        """Test that a deep method fills in its family defaults."""
        config = ExperimentConfig(method="CNN-LSTM-2", seed=4)

        assert config.is_deep
        assert config.train is not None
        assert config.train.batch_size == 128
        assert config.train.seed == 4
        assert config.label == "CNN-LSTM-2_relu_zscore"

    def test_baseline_label_omits_activation(self) -> None:
        """Test run labels of shallow methods."""
        config = ExperimentConfig(method="knn", normalization="raw")

        assert not config.is_deep
        assert config.label == "knn_raw"
        assert config.to_dict()["activation"] is None

    def test_raw_deep_run_needs_opt_in(self) -> None:
        """Test that raw frames are rejected for deep models without allow_raw."""
        with pytest.raises(ValueError, match="allow_raw"):
            ExperimentConfig(method="CNN-1", normalization="raw")

        config = ExperimentConfig(method="CNN-1", normalization="raw", allow_raw=True)
        assert config.normalization is Normalization.RAW

    def test_output_activation_not_allowed(self) -> None:
        """Test that only hidden activations can be swept."""
        with pytest.raises(ValueError, match="activation"):
            ExperimentConfig(method="CNN-1", activation="sigmoid")

    def test_from_mapping(self) -> None:
        """Test nested overrides and the l2 coefficient under train."""
        config = ExperimentConfig.from_mapping(
            {
                "method": "LSTM-1",
                "activation": "selu",
                "normalization": "zscore_l2",
                "seed": 7,
                "train": {"epochs": 3, "l2_coeff": 0.001},
            }
        )

        assert config.train is not None
        assert config.train.epochs == 3
        assert config.train.batch_size == 16
        assert config.train.seed == 7
        assert config.l2_coeff == 0.001

    def test_from_mapping_rejects_unknown_keys(self) -> None:
        """Test misspelled top-level keys."""
        with pytest.raises(ValueError, match="Unknown config keys: folds"):
            ExperimentConfig.from_mapping({"method": "gnb", "folds": 5})

    def test_train_settings_on_baseline(self) -> None:
        """Test that training settings cannot be given to a baseline."""
        with pytest.raises(ValueError, match="do not apply"):
            ExperimentConfig.from_mapping({"method": "gnb", "train": {"epochs": 3}})

    def test_baseline_overrides(self) -> None:
        """Test baseline hyperparameter overrides."""
        config = ExperimentConfig.from_mapping({"method": "knn", "baseline": {"n_neighbors": 3}})
        assert config.baseline.n_neighbors == 3

        with pytest.raises(ValueError, match="Unknown baseline settings"):
            ExperimentConfig.from_mapping({"method": "knn", "baseline": {"k": 3}})

    def test_with_seed(self) -> None:
        """Test that a new seed reaches the training config."""
        config = ExperimentConfig(method="CNN-1").with_seed(11)

        assert config.seed == 11
        assert config.train is not None
        assert config.train.seed == 11


class TestLoadExperimentConfig:
    """Tests for experiment file loading."""

    def test_load_json(self, tmp_path: Path) -> None:
        """Test loading a JSON experiment file."""
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"method": "rforest", "k": 3, "dataset_dir": "data"}))

        config = load_experiment_config(path)

        assert config.method == "rforest"
        assert config.k == 3
        assert config.dataset_dir == "data"

    def test_load_yaml(self) -> None:
        """Test that YAML files load too."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "run.yml"
            path.write_text("method: CNN-3\nactivation: leaky_relu\ntrain:\n  epochs: 1\n")

            config = load_experiment_config(path)

            assert config.activation.value == "leaky_relu"
            assert config.train is not None
            assert config.train.epochs == 1

    def test_overrides_win(self, tmp_path: Path) -> None:
        """Test that command-line overrides replace file values."""
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"method": "gnb", "seed": 1}))

        assert load_experiment_config(path, {"seed": 9}).seed == 9

    def test_dataset_root_from_environment(self, tmp_path: Path) -> None:
        """Test the environment fallback for dataset_dir."""
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"method": "gnb"}))

        with pytest.MonkeyPatch.context() as mp:
            mp.setenv(DATASET_ROOT_ENV, "/data/eeg")
            config = load_experiment_config(path)

        assert config.dataset_dir == "/data/eeg"

    def test_file_value_beats_environment(self, tmp_path: Path) -> None:
        """Test that an explicit dataset_dir is kept."""
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"method": "gnb", "dataset_dir": "mine"}))

        with pytest.MonkeyPatch.context() as mp:
            mp.setenv(DATASET_ROOT_ENV, "/data/eeg")
            config = load_experiment_config(path)

        assert config.dataset_dir == "mine"

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test that a missing file raises."""
        with pytest.raises(ConfigLoaderError, match="not found"):
            load_experiment_config(tmp_path / "none.json")

    def test_empty_file(self, tmp_path: Path) -> None:
        """Test that an empty file raises."""
        path = tmp_path / "run.json"
        path.write_text("")
        with pytest.raises(ConfigLoaderError, match="empty"):
            load_experiment_config(path)

    def test_invalid_yaml_raises_error(self, tmp_path: Path) -> None:
        """Test that unparsable content raises."""
        path = tmp_path / "run.yml"
        path.write_text("invalid: yaml: content: :")
        with pytest.raises(ConfigLoaderError, match="parse"):
            load_experiment_config(path)

    def test_invalid_value_names_file(self, tmp_path: Path) -> None:
        """Test that validation errors mention the file."""
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"method": "gnb", "k": 1}))
        with pytest.raises(ConfigLoaderError, match=r"run\.json.*k must be at least 2"):
            load_experiment_config(path)


class TestLoadGridConfig:
    """Tests for grid file loading."""

    def test_list_of_runs(self, tmp_path: Path) -> None:
        """Test a bare list, keeping duplicates."""
        path = tmp_path / "grid.json"
        path.write_text(json.dumps([{"method": "gnb"}, {"method": "gnb"}, {"method": "knn"}]))

        configs = load_grid_config(path)

        assert [c.method for c in configs] == ["gnb", "gnb", "knn"]

    def test_defaults_merge_under_runs(self, tmp_path: Path) -> None:
        """Test that defaults apply unless a run sets the key."""
        path = tmp_path / "grid.json"
        path.write_text(
            json.dumps(
                {
                    "defaults": {"normalization": "zscore_l2", "k": 3},
                    "runs": [{"method": "CNN-1"}, {"method": "CNN-1", "k": 4}],
                }
            )
        )

        configs = load_grid_config(path, {"seed": 2})

        assert [c.k for c in configs] == [3, 4]
        assert {c.normalization.value for c in configs} == {"zscore_l2"}
        assert {c.seed for c in configs} == {2}

    def test_empty_grid(self, tmp_path: Path) -> None:
        """Test that a grid without runs raises."""
        path = tmp_path / "grid.json"
        path.write_text(json.dumps({"runs": []}))
        with pytest.raises(ConfigLoaderError, match="no runs"):
            load_grid_config(path)

    def test_unknown_grid_keys(self, tmp_path: Path) -> None:
        """Test misspelled grid keys."""
        path = tmp_path / "grid.json"
        path.write_text(json.dumps({"run": [{"method": "gnb"}]}))
        with pytest.raises(ConfigLoaderError, match="Unknown grid keys"):
            load_grid_config(path)

    def test_bad_run_is_located(self, tmp_path: Path) -> None:
        """Test that an invalid run names its position."""
        path = tmp_path / "grid.json"
        path.write_text(json.dumps([{"method": "gnb"}, {"method": "nope"}]))
        with pytest.raises(ConfigLoaderError, match="run 1"):
            load_grid_config(path)


CONFIGS_DIR = Path(__file__).resolve().parents[2] / "configs"


class TestShippedConfigs:
    """The example configs in configs/ stay loadable."""

    def test_single_run_slices_batches(self) -> None:
        """Test that the CNN-LSTM-2 config keeps family defaults and sets micro_batch."""
        config = load_experiment_config(CONFIGS_DIR / "cnn_lstm2_zscore_l2.json")

        assert config.train is not None
        assert config.train.batch_size == 128
        assert config.train.micro_batch == 16

    def test_deep_grid_covers_every_model(self) -> None:
        """Test the 42-run deep grid."""
        configs = load_grid_config(CONFIGS_DIR / "deep_grid.json")

        assert len(configs) == 42
        assert {c.model_name for c in configs} == set(ModelName)
        assert all(c.train is not None and c.train.micro_batch == 16 for c in configs)

    def test_micro_batch_validation(self) -> None:
        """Test that a non-positive slice size is rejected."""
        with pytest.raises(ValueError, match="micro_batch"):
            TrainConfig(micro_batch=0)
