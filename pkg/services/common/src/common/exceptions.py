"""Unified exception hierarchy for the thermoarray workspace.

Every package raises from this tree so the CLI can map failures to exit
codes in one place (see cli_errors).
"""

from __future__ import annotations


class ThermoArrayError(Exception):
    """Base exception for all thermoarray errors."""


# =============================================================================
# Configuration Exceptions
# =============================================================================


class ConfigError(ThermoArrayError):
    """Base exception for configuration problems."""


class ConfigValidationError(ConfigError):
    """Run configuration failed validation.

    Carries every violation found, not only the first one.
    """

    def __init__(self, violations: list[str]) -> None:
        self.violations = list(violations)
        joined = "; ".join(self.violations)
        super().__init__(f"{len(self.violations)} configuration violation(s): {joined}")


# =============================================================================
# Physics Exceptions (thermistor, plate, sensors)
# =============================================================================


class PhysicsError(ThermoArrayError):
    """Base exception for physical-model errors."""


class ThermistorRangeError(PhysicsError):
    """Resistance outside the coefficients' validity range."""

    def __init__(self, message: str, bound: str) -> None:
        self.bound = bound
        super().__init__(message)


class ThermistorDomainError(PhysicsError):
    """Steinhart-Hart evaluation or inversion has no valid solution."""


class ThermistorFitError(PhysicsError):
    """Calibration points produce a singular coefficient system."""


# =============================================================================
# Data Exceptions (dataset, CSV, serial log)
# =============================================================================


class DataError(ThermoArrayError):
    """Base exception for dataset errors."""


class DatasetError(DataError):
    """Dataset invariants violated (empty, wrong arity, unknown label)."""


class CsvParseError(DataError):
    """Malformed dataset CSV row."""

    def __init__(self, message: str, line: int) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}")


class IngestError(DataError):
    """Serial log could not be ingested."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class SplitError(DataError):
    """Train/test split would leave one side empty."""


class SubsampleError(DataError):
    """A setpoint has fewer samples than requested."""

    def __init__(self, message: str, setpoint_c: float) -> None:
        self.setpoint_c = setpoint_c
        super().__init__(message)


# =============================================================================
# Model Exceptions (network, training, persistence)
# =============================================================================


class ModelError(ThermoArrayError):
    """Base exception for neural-network errors."""


class ScalerError(ModelError):
    """Scaler cannot be fitted (empty set or zero-variance feature)."""


class LossError(ModelError):
    """Loss inputs are invalid for the chosen loss kind."""


class DivergenceError(ModelError):
    """Training produced a non-finite loss."""

    def __init__(self, message: str, epoch: int) -> None:
        self.epoch = epoch
        super().__init__(message)


class ModelFormatError(ModelError):
    """Model document is malformed or has an unsupported schema version."""


# =============================================================================
# Rendering Exceptions
# =============================================================================


class RenderError(ThermoArrayError):
    """Chart inputs are inconsistent."""
