"""
Hotplate surface model and the staircase setpoint protocol.

The steady-state field is hottest at the plate center and falls off
quadratically with radius; the fall-off grows with the setpoint:

    T(rho) = ambient + (set - ambient) * (1 - k(set) * (rho / radius)^2)
    k(set) = k0 + k1 * (set - 30)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from common import ConfigError

REFERENCE_SETPOINT_C = 30.0


@dataclass(frozen=True)
class PlateProfile:
    """Radially non-uniform plate field parameters."""

    ambient_c: float = 22.0
    nonuniformity_base: float = 0.1  # k0, dimensionless
    nonuniformity_slope: float = 0.025  # k1, per degC above 30
    plate_radius_mm: float = 90.0

    def __post_init__(self) -> None:
        if not 0 <= self.nonuniformity_base < 1:
            raise ConfigError(
                f"nonuniformity_base must be in [0, 1), got {self.nonuniformity_base}"
            )
        if self.nonuniformity_slope < 0:
            raise ConfigError(
                f"nonuniformity_slope must be non-negative, got {self.nonuniformity_slope}"
            )
        if not self.plate_radius_mm > 0:
            raise ConfigError(f"plate_radius_mm must be positive, got {self.plate_radius_mm}")

    def attenuation(self, set_c: float) -> float:
        """Edge attenuation coefficient k(set_c)."""
        return self.nonuniformity_base + self.nonuniformity_slope * (set_c - REFERENCE_SETPOINT_C)

    def validate_for(self, protocol: Protocol) -> None:
        """Check the attenuation stays below 1 over every protocol setpoint.

        Raises:
            ConfigError: If some setpoint drives k to 1 or above.
        """
        for set_c in staircase_setpoints(protocol):
            if self.attenuation(set_c) >= 1:
                raise ConfigError(
                    f"Plate attenuation k({set_c}) = {self.attenuation(set_c):.4f} must stay below 1"
                )


@dataclass(frozen=True)
class GridPosition:
    """A sensor's place on the array grid and on the plate."""

    row: int  # 1..4
    col: int  # 1..8
    x_mm: float
    y_mm: float

    @property
    def radius_mm(self) -> float:
        """Distance from the plate center."""
        return math.hypot(self.x_mm, self.y_mm)


@dataclass(frozen=True)
class Protocol:
    """Staircase setpoint protocol."""

    start_c: float = 30.0
    end_c: float = 45.0
    step_c: float = 1.0
    samples_per_setpoint: int = 50
    set_accuracy_c: float = 0.15

    def __post_init__(self) -> None:
        if self.start_c > self.end_c:
            raise ConfigError(f"Protocol start {self.start_c} exceeds end {self.end_c}")
        if not self.step_c > 0:
            raise ConfigError(f"Protocol step must be positive, got {self.step_c}")
        if self.samples_per_setpoint < 1:
            raise ConfigError(
                f"samples_per_setpoint must be at least 1, got {self.samples_per_setpoint}"
            )
        if self.set_accuracy_c < 0:
            raise ConfigError(f"set_accuracy_c must be non-negative, got {self.set_accuracy_c}")


def local_temperature(pos: GridPosition, set_c: float, profile: PlateProfile) -> float:
    """Steady-state surface temperature under a sensor, in Celsius."""
    rho = pos.radius_mm / profile.plate_radius_mm
    k = profile.attenuation(set_c)
    return profile.ambient_c + (set_c - profile.ambient_c) * (1 - k * rho * rho)


def staircase_setpoints(protocol: Protocol) -> list[float]:
    """Setpoints from start to end inclusive.

    Computed as start + i*step (not by accumulation) so long staircases
    do not drift.
    """
    count = math.floor((protocol.end_c - protocol.start_c) / protocol.step_c + 1e-9) + 1
    return [round(protocol.start_c + i * protocol.step_c, 10) for i in range(count)]


def perturb_setpoint(set_c: float, accuracy_c: float, rng: np.random.Generator) -> float:
    """Physical plate temperature for a nominal setpoint within the plate's accuracy.

    Only the physical field sees the jitter; sample labels keep the nominal setpoint.
    """
    if accuracy_c < 0:
        raise ConfigError(f"accuracy_c must be non-negative, got {accuracy_c}")
    if accuracy_c == 0:
        return set_c
    return set_c + float(rng.uniform(-accuracy_c, accuracy_c))
