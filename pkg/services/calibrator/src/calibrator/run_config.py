"""
Run configuration document.

One JSON document drives every subcommand. Sections mirror the pipeline
stages; each section validates itself and reports every problem it finds,
so a broken document fails once with the full list of violations.

Process-level settings (log level) come from environment variables and are
kept out of the document so they never change its hash.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from collections.abc import Callable
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, TypeVar

from common import ConfigError, ConfigValidationError, PhysicsError
from rig_sim.plate import PlateProfile, Protocol
from rig_sim.sensors import ArraySpec, SensorDefaults, build_array
from rig_sim.serial_log import DEFAULT_FRAME_WINDOW_MS
from rig_sim.thermistor import (
    NTC_100K_CALIBRATION_C,
    NTC_100K_RANGE_OHMS,
    ThermistorCoefficients,
    fit_from_celsius,
)

from .ablation import DEFAULT_VARIANTS, validate_variant_names
from .network import Activation, LossKind, MlpArchitecture
from .optimizer import DEFAULT_BETA1, DEFAULT_BETA2, DEFAULT_EPSILON
from .training import TrainConfig

logger = logging.getLogger(__name__)

CONFIG_SCHEMA_VERSION = 1
LOG_LEVEL_ENV = "THERMOARRAY_LOG_LEVEL"
SIDECAR_NAME = "run_config.json"

_BuildErrors = (ConfigError, PhysicsError, TypeError, ValueError)

T = TypeVar("T")


def _attempt(section: str, build: Callable[[], T], violations: list[str]) -> T | None:
    """Run a constructor, recording its failure as a violation."""
    try:
        return build()
    except _BuildErrors as e:
        violations.append(f"{section}: {e}")
        return None


# =============================================================================
# Sections
# =============================================================================


@dataclass
class PlateSection:
    """Plate field profile and staircase protocol."""

    ambient_c: float = 22.0
    nonuniformity_base: float = 0.1
    nonuniformity_slope: float = 0.025
    plate_radius_mm: float = 90.0
    start_c: float = 30.0
    end_c: float = 45.0
    step_c: float = 1.0
    samples_per_setpoint: int = 50
    set_accuracy_c: float = 0.15

    def profile(self) -> PlateProfile:
        return PlateProfile(
            ambient_c=self.ambient_c,
            nonuniformity_base=self.nonuniformity_base,
            nonuniformity_slope=self.nonuniformity_slope,
            plate_radius_mm=self.plate_radius_mm,
        )

    def protocol(self) -> Protocol:
        return Protocol(
            start_c=self.start_c,
            end_c=self.end_c,
            step_c=self.step_c,
            samples_per_setpoint=self.samples_per_setpoint,
            set_accuracy_c=self.set_accuracy_c,
        )

    def violations(self) -> list[str]:
        found: list[str] = []
        profile = _attempt("plate", self.profile, found)
        protocol = _attempt("plate", self.protocol, found)
        if profile is not None and protocol is not None:
            _attempt("plate", lambda: profile.validate_for(protocol), found)
        return found


@dataclass
class ArraySection:
    """Construction seed and family-level sensor parameters."""

    seed: int = 42
    digital_bias_range_c: tuple[float, float] = (-0.5, 0.5)
    analog_bias_range_c: tuple[float, float] = (-2.0, 0.5)
    digital_noise_sigma_c: float = 0.05
    analog_noise_sigma_c: float = 0.15
    digital_step_c: float = 0.0625
    adc_bits: int = 10
    divider_ref_ohms: float = 100_000.0
    pitch_mm: float = 20.0

    def defaults(self) -> SensorDefaults:
        return SensorDefaults(
            digital_bias_range_c=self.digital_bias_range_c,
            analog_bias_range_c=self.analog_bias_range_c,
            digital_noise_sigma_c=self.digital_noise_sigma_c,
            analog_noise_sigma_c=self.analog_noise_sigma_c,
            digital_step_c=self.digital_step_c,
            adc_bits=self.adc_bits,
            divider_ref_ohms=self.divider_ref_ohms,
            pitch_mm=self.pitch_mm,
        )

    def build(self) -> ArraySpec:
        """The 32-sensor array this section describes."""
        return build_array(self.seed, self.defaults())

    def violations(self) -> list[str]:
        found: list[str] = []
        if not isinstance(self.seed, int) or self.seed < 0:
            found.append(f"array: seed must be a non-negative integer, got {self.seed!r}")
        _attempt("array", self.defaults, found)
        return found


@dataclass
class ThermistorSection:
    """Calibration triple as (ohms, degC) pairs and the validity range."""

    calibration: tuple[tuple[float, float], ...] = NTC_100K_CALIBRATION_C
    r_min: float = NTC_100K_RANGE_OHMS[0]
    r_max: float = NTC_100K_RANGE_OHMS[1]

    def coefficients(self) -> ThermistorCoefficients:
        return fit_from_celsius(
            [(float(r), float(t_c)) for r, t_c in self.calibration], (self.r_min, self.r_max)
        )

    def violations(self) -> list[str]:
        found: list[str] = []
        _attempt("thermistor", self.coefficients, found)
        return found


@dataclass
class DatasetSection:
    """Generation seed, split, ingest window and optional per-setpoint subsample."""

    seed: int = 42
    split_seed: int = 0
    train_fraction: float = 0.8
    subsample_per_setpoint: int | None = None
    subsample_seed: int = 0
    window_ms: int = DEFAULT_FRAME_WINDOW_MS

    def violations(self) -> list[str]:
        found: list[str] = []
        for name in ("seed", "split_seed", "subsample_seed"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                found.append(f"dataset: {name} must be a non-negative integer, got {value!r}")
        if not isinstance(self.train_fraction, int | float) or not 0 < self.train_fraction < 1:
            found.append(f"dataset: train_fraction must lie in (0, 1), got {self.train_fraction!r}")
        if self.subsample_per_setpoint is not None and (
            not isinstance(self.subsample_per_setpoint, int) or self.subsample_per_setpoint < 1
        ):
            found.append(
                "dataset: subsample_per_setpoint must be null or a positive integer, "
                f"got {self.subsample_per_setpoint!r}"
            )
        if not isinstance(self.window_ms, int) or self.window_ms < 1:
            found.append(f"dataset: window_ms must be a positive integer, got {self.window_ms!r}")
        return found


@dataclass
class TrainSection:
    """Baseline architecture and training schedule."""

    hidden_layers: tuple[int, ...] = (20,)
    input_columns: tuple[int, ...] | None = None  # None: all 32 columns
    hidden_activation: str = Activation.TANH.value
    output_activation: str = Activation.TANH.value
    loss_kind: str = LossKind.MSE.value
    learning_rate: float = 0.01
    epochs: int = 300
    batch_size: int = 32
    beta1: float = DEFAULT_BETA1
    beta2: float = DEFAULT_BETA2
    epsilon: float = DEFAULT_EPSILON
    init_seed: int = 0
    shuffle_seed: int = 0

    def architecture(self) -> MlpArchitecture:
        if self.input_columns is None:
            return MlpArchitecture(
                hidden_layers=self.hidden_layers,
                hidden_activation=Activation(self.hidden_activation),
                output_activation=Activation(self.output_activation),
            )
        return MlpArchitecture(
            hidden_layers=self.hidden_layers,
            input_columns=self.input_columns,
            hidden_activation=Activation(self.hidden_activation),
            output_activation=Activation(self.output_activation),
        )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            loss_kind=LossKind(self.loss_kind),
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            batch_size=self.batch_size,
            beta1=self.beta1,
            beta2=self.beta2,
            epsilon=self.epsilon,
            init_seed=self.init_seed,
            shuffle_seed=self.shuffle_seed,
        )

    def violations(self) -> list[str]:
        found: list[str] = []
        _attempt("train", self.architecture, found)
        _attempt("train", self.train_config, found)
        return found


@dataclass
class AblationSection:
    """Variants to run, in report order, and the component-shuffle seed."""

    variants: tuple[str, ...] = DEFAULT_VARIANTS
    shuffle_seed: int = 0

    def violations(self) -> list[str]:
        found = [f"ablation: {v}" for v in validate_variant_names(list(self.variants))]
        if not isinstance(self.shuffle_seed, int) or self.shuffle_seed < 0:
            found.append(
                f"ablation: shuffle_seed must be a non-negative integer, got {self.shuffle_seed!r}"
            )
        return found


@dataclass
class OutputSection:
    """Where artifacts go when --out is not given."""

    directory: str = "out"

    def violations(self) -> list[str]:
        if not isinstance(self.directory, str) or not self.directory:
            return [f"output: directory must be a non-empty string, got {self.directory!r}"]
        return []


_SECTIONS: dict[str, type[Any]] = {
    "plate": PlateSection,
    "array": ArraySection,
    "thermistor": ThermistorSection,
    "dataset": DatasetSection,
    "train": TrainSection,
    "ablation": AblationSection,
    "output": OutputSection,
}


def _tupled(value: Any) -> Any:
    """JSON arrays become (nested) tuples."""
    if isinstance(value, list):
        return tuple(_tupled(v) for v in value)
    return value


def _section_from_dict(name: str, data: Any, violations: list[str]) -> Any:
    cls = _SECTIONS[name]
    if not isinstance(data, dict):
        violations.append(f"{name}: section must be an object, got {type(data).__name__}")
        return cls()
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        violations.append(f"{name}: unknown key(s) {unknown}")
    section = cls(**{k: _tupled(v) for k, v in data.items() if k in known})
    violations.extend(section.violations())
    return section


# =============================================================================
# Run configuration
# =============================================================================


@dataclass
class RunConfig:
    """The whole run document."""

    plate: PlateSection = field(default_factory=PlateSection)
    array: ArraySection = field(default_factory=ArraySection)
    thermistor: ThermistorSection = field(default_factory=ThermistorSection)
    dataset: DatasetSection = field(default_factory=DatasetSection)
    train: TrainSection = field(default_factory=TrainSection)
    ablation: AblationSection = field(default_factory=AblationSection)
    output: OutputSection = field(default_factory=OutputSection)
    schema_version: int = CONFIG_SCHEMA_VERSION

    @classmethod
    def default(cls) -> RunConfig:
        """Defaults reproducing the reference 30-45 degC, 800-sample protocol."""
        return cls()

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunConfig:
        """Build and validate a run config.

        Missing sections take their defaults. A top-level config_hash (as
        written in sidecars) must match the document.

        Raises:
            ConfigValidationError: Listing every violation found.
        """
        violations: list[str] = []
        if not isinstance(data, dict):
            raise ConfigValidationError([f"config must be a JSON object, got {type(data).__name__}"])
        data = dict(data)
        expected_hash = data.pop("config_hash", None)

        version = data.pop("schema_version", CONFIG_SCHEMA_VERSION)
        if version != CONFIG_SCHEMA_VERSION:
            violations.append(
                f"schema_version {version!r} is not supported (expected {CONFIG_SCHEMA_VERSION})"
            )
        unknown = sorted(set(data) - set(_SECTIONS))
        if unknown:
            violations.append(f"unknown section(s) {unknown}; known: {list(_SECTIONS)}")

        sections = {
            name: _section_from_dict(name, data.get(name, {}), violations) for name in _SECTIONS
        }
        config = cls(**sections)
        if not violations and expected_hash is not None and expected_hash != config.config_hash():
            violations.append(
                f"config_hash {expected_hash!r} does not match the document ({config.config_hash()})"
            )
        if violations:
            raise ConfigValidationError(violations)
        return config

    def as_dict(self) -> dict[str, Any]:
        """Plain-dict form (tuples become lists once serialized)."""
        return asdict(self)

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form (sorted keys, compact)."""
        canonical = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_seed_override(self, seed: int) -> RunConfig:
        """Copy with every named seed replaced by seed."""
        if seed < 0:
            raise ConfigValidationError([f"seed override must be non-negative, got {seed}"])
        return replace(
            self,
            array=replace(self.array, seed=seed),
            dataset=replace(self.dataset, seed=seed, split_seed=seed, subsample_seed=seed),
            train=replace(self.train, init_seed=seed, shuffle_seed=seed),
            ablation=replace(self.ablation, shuffle_seed=seed),
        )

    def to_json(self) -> str:
        """Sidecar text: the document plus its hash."""
        document = {**self.as_dict(), "config_hash": self.config_hash()}
        return json.dumps(document, indent=2, sort_keys=True) + "\n"


def load_config(source: Path) -> RunConfig:
    """Read and validate a run config (a sidecar works too)."""
    try:
        data = json.loads(source.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigValidationError([f"{source} is not valid JSON: {e}"]) from e
    config = RunConfig.from_dict(data)
    logger.info(f"Loaded run config {source} (hash {config.config_hash()[:12]})")
    return config


def write_sidecar(config: RunConfig, out_dir: Path) -> Path:
    """Write the resolved config next to a command's artifacts."""
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / SIDECAR_NAME
    path.write_text(config.to_json(), encoding="utf-8")
    return path


@dataclass
class ProcessSettings:
    """Settings read from the environment, outside the run document."""

    log_level: str = field(default_factory=lambda: os.environ.get(LOG_LEVEL_ENV, "INFO"))
