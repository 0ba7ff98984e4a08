"""Pytest configuration for rig simulator tests.

Shared fixtures (default array, seed-42 dataset) live in services/conftest.py.
"""

import pytest

from rig_sim.plate import PlateProfile, Protocol
from rig_sim.sensors import SensorDefaults
from rig_sim.thermistor import ThermistorCoefficients


@pytest.fixture
def toy_coeffs() -> ThermistorCoefficients:
    """Coefficients whose values can be evaluated by hand."""
    return ThermistorCoefficients(a=1.0e-3, b=2.0e-4, c=1.0e-7, r_min=0.5, r_max=1.0e6)


@pytest.fixture
def profile() -> PlateProfile:
    """Default plate profile."""
    return PlateProfile()


@pytest.fixture
def flat_profile() -> PlateProfile:
    """Perfectly uniform plate."""
    return PlateProfile(nonuniformity_base=0.0, nonuniformity_slope=0.0)


@pytest.fixture
def protocol() -> Protocol:
    """The 30..45 degC staircase with 50 vectors per step."""
    return Protocol()


@pytest.fixture
def ideal_defaults() -> SensorDefaults:
    """Sensors without bias or noise and with a fine ADC."""
    return SensorDefaults(
        digital_bias_range_c=(0.0, 0.0),
        analog_bias_range_c=(0.0, 0.0),
        digital_noise_sigma_c=0.0,
        analog_noise_sigma_c=0.0,
        adc_bits=24,
    )


@pytest.fixture
def noiseless_defaults() -> SensorDefaults:
    """Default biases and quantization, no random noise."""
    return SensorDefaults(digital_noise_sigma_c=0.0, analog_noise_sigma_c=0.0)
