"""
Steinhart-Hart NTC thermistor physics.

    1/T = A + B*ln(R) + C*ln(R)^3

T is in kelvin everywhere inside this module; callers convert at the edges.
The cubic extrapolates badly, so every call checks the validity range stored
with the coefficients.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from common import ThermistorDomainError, ThermistorFitError, ThermistorRangeError

logger = logging.getLogger(__name__)

KELVIN_OFFSET = 273.15

_NEWTON_MAX_ITER = 100
_NEWTON_TOL = 1e-15
_RANGE_PROBES = 257


def celsius_to_kelvin(t_c: float) -> float:
    """Convert Celsius to kelvin."""
    return t_c + KELVIN_OFFSET


def kelvin_to_celsius(t_k: float) -> float:
    """Convert kelvin to Celsius."""
    return t_k - KELVIN_OFFSET


@dataclass(frozen=True)
class ThermistorCoefficients:
    """Steinhart-Hart A, B, C with the resistance range they are valid for."""

    a: float
    b: float
    c: float
    r_min: float
    r_max: float

    def __post_init__(self) -> None:
        if not self.a > 0:
            raise ThermistorDomainError(f"Coefficient a must be positive, got {self.a}")
        if not 0 < self.r_min < self.r_max:
            raise ThermistorDomainError(
                f"Validity range must satisfy 0 < r_min < r_max, got [{self.r_min}, {self.r_max}]"
            )
        # Denominator must stay positive across the range; probe densely in ln-space
        # plus the cubic's interior stationary point, if any.
        x = np.linspace(math.log(self.r_min), math.log(self.r_max), _RANGE_PROBES)
        probes = list(x)
        if self.c != 0 and -self.b / (3 * self.c) > 0:
            stationary = math.sqrt(-self.b / (3 * self.c))
            probes.extend(p for p in (stationary, -stationary) if x[0] <= p <= x[-1])
        if min(self.inverse_temperature(p) for p in probes) <= 0:
            raise ThermistorDomainError(
                "Coefficients give a non-positive 1/T inside "
                f"[{self.r_min}, {self.r_max}] ohm"
            )

    def inverse_temperature(self, ln_r: float) -> float:
        """Evaluate A + B*x + C*x^3 at x = ln(R)."""
        return self.a + self.b * ln_r + self.c * ln_r**3

    def as_dict(self) -> dict[str, float]:
        """Plain-dict form for JSON documents."""
        return {"a": self.a, "b": self.b, "c": self.c, "r_min": self.r_min, "r_max": self.r_max}


def resistance_to_temperature(r: float, coeffs: ThermistorCoefficients) -> float:
    """Convert a thermistor resistance to absolute temperature.

    Args:
        r: Resistance in ohms.
        coeffs: Steinhart-Hart coefficients.

    Returns:
        Temperature in kelvin.

    Raises:
        ThermistorRangeError: If r lies outside [r_min, r_max].
        ThermistorDomainError: If the Steinhart-Hart denominator is not positive.
    """
    if r < coeffs.r_min:
        raise ThermistorRangeError(
            f"Resistance {r} ohm is below r_min={coeffs.r_min} ohm", bound="r_min"
        )
    if r > coeffs.r_max:
        raise ThermistorRangeError(
            f"Resistance {r} ohm is above r_max={coeffs.r_max} ohm", bound="r_max"
        )
    denom = coeffs.inverse_temperature(math.log(r))
    if not denom > 0:
        raise ThermistorDomainError(f"Non-positive 1/T ({denom}) at {r} ohm")
    return 1.0 / denom


def temperature_to_resistance(t: float, coeffs: ThermistorCoefficients) -> float:
    """Invert Steinhart-Hart: find R with resistance_to_temperature(R) == t.

    Solves c*x^3 + b*x + (a - 1/t) = 0 for x = ln(R) with Newton steps kept
    inside a sign-changing bracket over the validity range (bisection when a
    step would leave it).

    Args:
        t: Temperature in kelvin.
        coeffs: Steinhart-Hart coefficients.

    Returns:
        Resistance in ohms.

    Raises:
        ThermistorDomainError: If t is not positive or no root lies in range.
    """
    if not t > 0:
        raise ThermistorDomainError(f"Temperature must be positive, got {t} K")

    target = 1.0 / t
    lo = math.log(coeffs.r_min)
    hi = math.log(coeffs.r_max)
    f_lo = coeffs.inverse_temperature(lo) - target
    f_hi = coeffs.inverse_temperature(hi) - target

    if f_lo == 0:
        return coeffs.r_min
    if f_hi == 0:
        return coeffs.r_max
    if f_lo * f_hi > 0:
        raise ThermistorDomainError(
            f"No resistance in [{coeffs.r_min}, {coeffs.r_max}] ohm maps to {t} K"
        )

    x = 0.5 * (lo + hi)
    for _ in range(_NEWTON_MAX_ITER):
        f = coeffs.inverse_temperature(x) - target
        if f == 0:
            break
        # Shrink the bracket around the root
        if (f < 0) == (f_lo < 0):
            lo, f_lo = x, f
        else:
            hi = x
        slope = coeffs.b + 3 * coeffs.c * x * x
        step_ok = slope != 0
        x_next = x - f / slope if step_ok else x
        if not step_ok or not lo < x_next < hi:
            x_next = 0.5 * (lo + hi)
        if abs(x_next - x) <= _NEWTON_TOL * max(1.0, abs(x)):
            x = x_next
            break
        x = x_next

    return math.exp(x)


def fit_coefficients(
    points: Sequence[tuple[float, float]],
    r_range: tuple[float, float],
) -> ThermistorCoefficients:
    """Fit A, B, C through three (resistance, temperature) calibration points.

    Args:
        points: Exactly three (ohms, kelvin) pairs with distinct resistances.
        r_range: (r_min, r_max) validity range for the fitted curve.

    Returns:
        Coefficients reproducing all three points.

    Raises:
        ThermistorFitError: If the linear system is singular or inputs are invalid.
    """
    if len(points) != 3:
        raise ThermistorFitError(f"Exactly three calibration points required, got {len(points)}")
    for r, t in points:
        if not r > 0 or not t > 0:
            raise ThermistorFitError(f"Calibration point ({r} ohm, {t} K) must be positive")

    ln_r = np.array([math.log(r) for r, _ in points])
    matrix = np.column_stack([np.ones(3), ln_r, ln_r**3])
    rhs = np.array([1.0 / t for _, t in points])

    # Duplicate ln R values make the Vandermonde-like matrix singular; catch
    # near-duplicates too since solve() would return garbage instead of raising.
    if np.linalg.cond(matrix) > 1e14:
        raise ThermistorFitError(f"Calibration resistances {[r for r, _ in points]} are degenerate")
    try:
        a, b, c = np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError as e:
        raise ThermistorFitError(f"Singular calibration system: {e}") from e

    try:
        coeffs = ThermistorCoefficients(
            a=float(a), b=float(b), c=float(c), r_min=r_range[0], r_max=r_range[1]
        )
    except ThermistorDomainError as e:
        raise ThermistorFitError(f"Fitted coefficients are unusable: {e}") from e

    logger.debug(f"Fitted Steinhart-Hart coefficients a={a:.6e} b={b:.6e} c={c:.6e}")
    return coeffs


# 100 kOhm-at-25 degC NTC calibration triple (ohms, degC) and its validity range
NTC_100K_CALIBRATION_C: tuple[tuple[float, float], ...] = (
    (330_000.0, 0.0),
    (100_000.0, 25.0),
    (35_400.0, 50.0),
)
NTC_100K_RANGE_OHMS = (100.0, 5_000_000.0)


def fit_from_celsius(
    points_c: Sequence[tuple[float, float]],
    r_range: tuple[float, float] = NTC_100K_RANGE_OHMS,
) -> ThermistorCoefficients:
    """fit_coefficients for (ohms, degC) calibration points."""
    return fit_coefficients([(r, celsius_to_kelvin(t_c)) for r, t_c in points_c], r_range)
