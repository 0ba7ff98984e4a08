"""Tests for the run configuration document."""

import json
from pathlib import Path

import pytest

from calibrator.network import Activation, LossKind
from calibrator.run_config import (
    CONFIG_SCHEMA_VERSION,
    LOG_LEVEL_ENV,
    SIDECAR_NAME,
    ProcessSettings,
    RunConfig,
    load_config,
    write_sidecar,
)
from common import ConfigValidationError


class TestDefaults:
    """Tests for RunConfig.default()."""

    def test_reference_protocol(self) -> None:
        """30..45 degC in 1 degC steps, 50 vectors each, seed 42."""
        config = RunConfig.default()
        protocol = config.plate.protocol()
        assert (protocol.start_c, protocol.end_c, protocol.step_c) == (30.0, 45.0, 1.0)
        assert protocol.samples_per_setpoint == 50
        assert config.array.seed == 42
        assert config.dataset.seed == 42
        assert config.dataset.train_fraction == 0.8

    def test_baseline_network(self) -> None:
        """32-20-1 tanh network, mse, 300 epochs."""
        config = RunConfig.default()
        arch = config.train.architecture()
        assert arch.layer_sizes == (32, 20, 1)
        assert arch.output_activation is Activation.TANH
        train_config = config.train.train_config()
        assert train_config.loss_kind is LossKind.MSE
        assert train_config.epochs == 300

    def test_builders(self) -> None:
        """Sections build the rig objects they describe."""
        config = RunConfig.default()
        assert len(config.array.build().sensors) == 32
        coeffs = config.thermistor.coefficients()
        assert coeffs.b > 0
        assert coeffs.c > 0
        assert config.ablation.variants[0] == "baseline"


class TestFromDict:
    """Tests for parsing and validation."""

    def test_empty_document_is_default(self) -> None:
        """Missing sections take their defaults."""
        assert RunConfig.from_dict({}) == RunConfig.default()

    def test_partial_override(self) -> None:
        """Given keys override defaults; JSON lists become tuples."""
        config = RunConfig.from_dict(
            {
                "plate": {"end_c": 33.0, "samples_per_setpoint": 10},
                "train": {"hidden_layers": [20, 12], "epochs": 5},
                "ablation": {"variants": ["baseline", "loss_mae"]},
            }
        )
        assert config.plate.protocol().end_c == 33.0
        assert config.train.architecture().layer_sizes == (32, 20, 12, 1)
        assert config.ablation.variants == ("baseline", "loss_mae")

    def test_dict_roundtrip(self) -> None:
        """from_dict(as_dict()) reproduces the config and its hash."""
        config = RunConfig.from_dict({"train": {"input_columns": list(range(16))}})
        again = RunConfig.from_dict(json.loads(json.dumps(config.as_dict())))
        assert again == config
        assert again.config_hash() == config.config_hash()

    def test_start_above_end(self) -> None:
        """An inverted protocol is a violation."""
        with pytest.raises(ConfigValidationError, match="exceeds end"):
            RunConfig.from_dict({"plate": {"start_c": 46.0}})

    def test_every_violation_listed(self) -> None:
        """All problems are reported together."""
        with pytest.raises(ConfigValidationError) as exc_info:
            RunConfig.from_dict(
                {
                    "plate": {"start_c": 50.0, "colour": "red"},
                    "dataset": {"train_fraction": 1.5},
                    "train": {"epochs": 0, "hidden_activation": "softmax"},
                    "ablation": {"variants": ["loss_mae"]},
                    "extras": {},
                }
            )
        violations = exc_info.value.violations
        joined = " | ".join(violations)
        assert "exceeds end" in joined
        assert "unknown key(s) ['colour']" in joined
        assert "train_fraction" in joined
        assert "epochs" in joined
        assert "softmax" in joined
        assert "must include 'baseline'" in joined
        assert "unknown section(s) ['extras']" in joined
        assert len(violations) >= 7

    def test_steep_profile_rejected(self) -> None:
        """The attenuation must stay below 1 over the protocol."""
        with pytest.raises(ConfigValidationError, match="below 1"):
            RunConfig.from_dict({"plate": {"nonuniformity_slope": 0.1}})

    def test_bad_calibration(self) -> None:
        """Duplicate calibration resistances cannot be fitted."""
        with pytest.raises(ConfigValidationError, match="thermistor"):
            RunConfig.from_dict(
                {"thermistor": {"calibration": [[1e5, 0.0], [1e5, 25.0], [3.5e4, 50.0]]}}
            )

    def test_section_not_an_object(self) -> None:
        """Sections must be JSON objects."""
        with pytest.raises(ConfigValidationError, match="section must be an object"):
            RunConfig.from_dict({"train": [1, 2]})

    def test_wrong_schema_version(self) -> None:
        """Only the current schema version is accepted."""
        with pytest.raises(ConfigValidationError, match="schema_version"):
            RunConfig.from_dict({"schema_version": CONFIG_SCHEMA_VERSION + 1})

    def test_negative_seed(self) -> None:
        """Seeds must be non-negative integers."""
        with pytest.raises(ConfigValidationError, match="split_seed"):
            RunConfig.from_dict({"dataset": {"split_seed": -3}})


class TestHashAndOverride:
    """Tests for config_hash and with_seed_override."""

    def test_hash_is_stable(self) -> None:
        """Equal configs hash equally; any change alters the hash."""
        a, b = RunConfig.default(), RunConfig.default()
        assert a.config_hash() == b.config_hash()
        assert len(a.config_hash()) == 64
        changed = RunConfig.from_dict({"train": {"learning_rate": 0.02}})
        assert changed.config_hash() != a.config_hash()

    def test_seed_override_replaces_every_seed(self) -> None:
        """Every named seed takes the override value."""
        config = RunConfig.default().with_seed_override(7)
        assert config.array.seed == 7
        assert config.dataset.seed == 7
        assert config.dataset.split_seed == 7
        assert config.dataset.subsample_seed == 7
        assert config.train.init_seed == 7
        assert config.train.shuffle_seed == 7
        assert config.ablation.shuffle_seed == 7

    def test_seed_override_keeps_the_rest(self) -> None:
        """Non-seed settings are untouched."""
        config = RunConfig.default().with_seed_override(7)
        assert config.train.epochs == 300
        assert config.plate == RunConfig.default().plate

    def test_negative_override(self) -> None:
        """A negative override is invalid."""
        with pytest.raises(ConfigValidationError):
            RunConfig.default().with_seed_override(-1)


class TestFiles:
    """Tests for load_config and sidecars."""

    def test_sidecar_reloads(self, tmp_path: Path) -> None:
        """A written sidecar loads back to the same config."""
        config = RunConfig.from_dict({"dataset": {"subsample_per_setpoint": 50}})
        path = write_sidecar(config, tmp_path)
        assert path.name == SIDECAR_NAME
        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["config_hash"] == config.config_hash()
        assert load_config(path) == config

    def test_edited_sidecar_rejected(self, tmp_path: Path) -> None:
        """A sidecar whose content no longer matches its hash is refused."""
        path = write_sidecar(RunConfig.default(), tmp_path)
        data = json.loads(path.read_text(encoding="utf-8"))
        data["train"]["epochs"] = 10
        path.write_text(json.dumps(data), encoding="utf-8")
        with pytest.raises(ConfigValidationError, match="config_hash"):
            load_config(path)

    def test_invalid_json(self, tmp_path: Path) -> None:
        """Unparseable files are a validation error."""
        path = tmp_path / "config.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ConfigValidationError, match="not valid JSON"):
            load_config(path)

    def test_missing_file(self, tmp_path: Path) -> None:
        """Missing files surface as OS errors."""
        with pytest.raises(FileNotFoundError):
            load_config(tmp_path / "absent.json")


class TestProcessSettings:
    """Tests for environment-driven settings."""

    def test_log_level_from_environment(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """THERMOARRAY_LOG_LEVEL sets the default log level."""
        monkeypatch.setenv(LOG_LEVEL_ENV, "DEBUG")
        assert ProcessSettings().log_level == "DEBUG"

    def test_log_level_default(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """INFO when the variable is unset."""
        monkeypatch.delenv(LOG_LEVEL_ENV, raising=False)
        assert ProcessSettings().log_level == "INFO"
