"""
Per-sensor measurement model and the 4x8 array.

Two families share the array:

- digital IC sensors (DS18B20 class): bias + noise, then an on-chip
  quantizer with a fixed 0.0625 degC step;
- analog NTC thermistors: bias + noise, then a voltage divider read by an
  ADC, converted back to temperature through Steinhart-Hart.

Rows 1-2 hold analog sensors (ids 0-15), rows 3-4 digital (ids 16-31).
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from enum import StrEnum
from typing import Any

import numpy as np

from common import ConfigError, derive_rng
from common.seeding import STREAM_ARRAY

from .plate import GridPosition, PlateProfile, local_temperature, perturb_setpoint
from .thermistor import (
    ThermistorCoefficients,
    celsius_to_kelvin,
    kelvin_to_celsius,
    resistance_to_temperature,
    temperature_to_resistance,
)

logger = logging.getLogger(__name__)

ROWS = 4
COLS = 8
SENSOR_COUNT = ROWS * COLS
ANALOG_ROWS = (1, 2)


class SensorKind(StrEnum):
    """Sensor family."""

    DIGITAL = "digital"
    ANALOG = "analog"


@dataclass(frozen=True)
class SensorDefaults:
    """Family-level parameters used when building an array."""

    digital_bias_range_c: tuple[float, float] = (-0.5, 0.5)
    analog_bias_range_c: tuple[float, float] = (-2.0, 0.5)
    digital_noise_sigma_c: float = 0.05
    analog_noise_sigma_c: float = 0.15
    digital_step_c: float = 0.0625
    adc_bits: int = 10
    divider_ref_ohms: float = 100_000.0
    pitch_mm: float = 20.0

    def __post_init__(self) -> None:
        for name in ("digital_bias_range_c", "analog_bias_range_c"):
            low, high = getattr(self, name)
            if low > high:
                raise ConfigError(f"{name} must be ordered (low <= high), got ({low}, {high})")
        if self.digital_noise_sigma_c < 0 or self.analog_noise_sigma_c < 0:
            raise ConfigError("Noise sigmas must be non-negative")
        if not self.digital_step_c > 0:
            raise ConfigError(f"digital_step_c must be positive, got {self.digital_step_c}")
        if self.adc_bits < 1:
            raise ConfigError(f"adc_bits must be at least 1, got {self.adc_bits}")
        if not self.divider_ref_ohms > 0:
            raise ConfigError(f"divider_ref_ohms must be positive, got {self.divider_ref_ohms}")
        if not self.pitch_mm > 0:
            raise ConfigError(f"pitch_mm must be positive, got {self.pitch_mm}")


@dataclass(frozen=True)
class SensorSpec:
    """One sensor: family, placement, and its fixed error characteristics."""

    id: int
    kind: SensorKind
    position: GridPosition
    bias_c: float
    noise_sigma_c: float
    digital_step_c: float = 0.0625  # digital only
    adc_bits: int = 10  # analog only
    divider_ref_ohms: float = 100_000.0  # analog only

    @property
    def adc_full_scale(self) -> int:
        """Largest ADC code."""
        return (1 << self.adc_bits) - 1


@dataclass(frozen=True)
class ArraySpec:
    """The full 32-sensor array."""

    sensors: tuple[SensorSpec, ...]
    construction_seed: int

    def __post_init__(self) -> None:
        if len(self.sensors) != SENSOR_COUNT:
            raise ConfigError(f"Array must hold {SENSOR_COUNT} sensors, got {len(self.sensors)}")
        if [s.id for s in self.sensors] != list(range(SENSOR_COUNT)):
            raise ConfigError("Sensor ids must be 0..31 in order")
        if len({(s.position.row, s.position.col) for s in self.sensors}) != SENSOR_COUNT:
            raise ConfigError("Sensor grid positions must be unique")

    def ids_of_kind(self, kind: SensorKind) -> tuple[int, ...]:
        """Sensor ids (= reading columns) of one family."""
        return tuple(s.id for s in self.sensors if s.kind is kind)

    def as_dict(self) -> dict[str, Any]:
        """Plain-dict form for JSON documents."""
        return {
            "construction_seed": self.construction_seed,
            "sensors": [asdict(s) | {"kind": s.kind.value} for s in self.sensors],
        }


def grid_position(row: int, col: int, pitch_mm: float) -> GridPosition:
    """Position of grid cell (row, col), 1-based, centered on the plate."""
    return GridPosition(
        row=row,
        col=col,
        x_mm=(col - (COLS + 1) / 2) * pitch_mm,
        y_mm=(row - (ROWS + 1) / 2) * pitch_mm,
    )


def build_array(seed: int, defaults: SensorDefaults | None = None) -> ArraySpec:
    """Lay out the 4x8 array and draw each sensor's fixed bias.

    Deterministic in seed.
    """
    defaults = defaults or SensorDefaults()
    rng = derive_rng(seed, STREAM_ARRAY)

    sensors: list[SensorSpec] = []
    for row in range(1, ROWS + 1):
        kind = SensorKind.ANALOG if row in ANALOG_ROWS else SensorKind.DIGITAL
        for col in range(1, COLS + 1):
            if kind is SensorKind.ANALOG:
                low, high = defaults.analog_bias_range_c
                sigma = defaults.analog_noise_sigma_c
            else:
                low, high = defaults.digital_bias_range_c
                sigma = defaults.digital_noise_sigma_c
            sensors.append(
                SensorSpec(
                    id=len(sensors),
                    kind=kind,
                    position=grid_position(row, col, defaults.pitch_mm),
                    bias_c=float(rng.uniform(low, high)),
                    noise_sigma_c=sigma,
                    digital_step_c=defaults.digital_step_c,
                    adc_bits=defaults.adc_bits,
                    divider_ref_ohms=defaults.divider_ref_ohms,
                )
            )

    return ArraySpec(sensors=tuple(sensors), construction_seed=seed)


def _noise(sigma: float, rng: np.random.Generator) -> float:
    # Always draw so the stream position does not depend on sigma
    return float(rng.normal(0.0, 1.0)) * sigma


def quantize(value: float, step: float) -> float:
    """Round to the nearest multiple of step (ties to even), grid anchored at 0."""
    return float(np.rint(value / step)) * step


def read_digital(spec: SensorSpec, true_c: float, rng: np.random.Generator) -> float:
    """Digital sensor reading in Celsius, on the sensor's quantization grid."""
    if spec.kind is not SensorKind.DIGITAL:
        raise ConfigError(f"Sensor {spec.id} is {spec.kind}, not digital")
    return quantize(true_c + spec.bias_c + _noise(spec.noise_sigma_c, rng), spec.digital_step_c)


def celsius_to_adc_code(t_c: float, spec: SensorSpec, coeffs: ThermistorCoefficients) -> int:
    """ADC code produced by the divider when the thermistor sits at t_c."""
    r = temperature_to_resistance(celsius_to_kelvin(t_c), coeffs)
    fraction = r / (r + spec.divider_ref_ohms)
    code = int(np.rint(fraction * spec.adc_full_scale))
    return min(max(code, 0), spec.adc_full_scale)


def adc_code_to_celsius(code: int, spec: SensorSpec, coeffs: ThermistorCoefficients) -> float:
    """Temperature recovered from an ADC code.

    Codes at the rails carry no resistance information; they are clamped one
    step inside, and the recovered resistance is clamped to the coefficient
    range, so the rails map to the extreme valid temperatures.
    """
    full = spec.adc_full_scale
    clamped = min(max(code, 1), full - 1) if full > 1 else 1
    if clamped != code:
        logger.debug(f"Sensor {spec.id}: ADC code {code} clamped to {clamped}")
    fraction = clamped / full
    r = spec.divider_ref_ohms * fraction / (1 - fraction) if fraction < 1 else coeffs.r_max
    r = min(max(r, coeffs.r_min), coeffs.r_max)
    return kelvin_to_celsius(resistance_to_temperature(r, coeffs))


def read_analog(
    spec: SensorSpec,
    true_c: float,
    coeffs: ThermistorCoefficients,
    rng: np.random.Generator,
) -> float:
    """Analog NTC reading in Celsius through the divider + ADC pipeline."""
    if spec.kind is not SensorKind.ANALOG:
        raise ConfigError(f"Sensor {spec.id} is {spec.kind}, not analog")
    t_sensor = true_c + spec.bias_c + _noise(spec.noise_sigma_c, rng)
    code = celsius_to_adc_code(t_sensor, spec, coeffs)
    return adc_code_to_celsius(code, spec, coeffs)


def read_array(
    array: ArraySpec,
    profile: PlateProfile,
    set_c: float,
    coeffs: ThermistorCoefficients,
    rng: np.random.Generator,
    set_accuracy_c: float = 0.0,
) -> list[float]:
    """One simultaneous 32-component reading vector, ordered by sensor id.

    A single setpoint perturbation is shared by every sensor in the vector:
    they all see the same physical plate state.
    """
    plate_c = perturb_setpoint(set_c, set_accuracy_c, rng)
    readings: list[float] = []
    for sensor in array.sensors:
        true_c = local_temperature(sensor.position, plate_c, profile)
        if sensor.kind is SensorKind.DIGITAL:
            readings.append(read_digital(sensor, true_c, rng))
        else:
            readings.append(read_analog(sensor, true_c, coeffs, rng))
    return readings
