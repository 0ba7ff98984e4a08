"""Shared pytest configuration for all services."""

import pytest

from calibrator.network import MlpArchitecture
from calibrator.persistence import TrainedModel
from calibrator.training import TrainConfig, TrainHistory, train
from rig_sim.dataset import Dataset, generate, split
from rig_sim.plate import PlateProfile, Protocol
from rig_sim.sensors import ArraySpec, build_array
from rig_sim.thermistor import NTC_100K_CALIBRATION_C, ThermistorCoefficients, fit_from_celsius


def pytest_configure(config: pytest.Config) -> None:
    """Register custom markers."""
    config.addinivalue_line(
        "markers", "integration: mark test as integration test (slow, full-size training runs)"
    )


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    """Skip integration tests unless --integration flag is passed."""
    run_integration = config.getoption("--integration", default=False)
    if not run_integration:
        skip_integration = pytest.mark.skip(reason="need --integration option to run")
        for item in items:
            if "integration" in item.keywords:
                item.add_marker(skip_integration)


def pytest_addoption(parser: pytest.Parser) -> None:
    """Add custom command line options."""
    parser.addoption(
        "--integration",
        action="store_true",
        default=False,
        help="run integration tests (full ablation sweeps)",
    )


# =============================================================================
# Shared rig fixtures
# =============================================================================

DEFAULT_SEED = 42


@pytest.fixture(scope="session")
def ntc_coeffs() -> ThermistorCoefficients:
    """Coefficients fitted from the default 100 kOhm calibration triple."""
    return fit_from_celsius(NTC_100K_CALIBRATION_C)


@pytest.fixture(scope="session")
def default_array() -> ArraySpec:
    """The default 4x8 array built from seed 42."""
    return build_array(DEFAULT_SEED)


@pytest.fixture(scope="session")
def default_dataset(default_array: ArraySpec, ntc_coeffs: ThermistorCoefficients) -> Dataset:
    """The full 30..45 degC staircase, 50 vectors per step, seed 42."""
    return generate(default_array, PlateProfile(), Protocol(), ntc_coeffs, seed=DEFAULT_SEED)


@pytest.fixture(scope="session")
def small_dataset(default_array: ArraySpec, ntc_coeffs: ThermistorCoefficients) -> Dataset:
    """Four setpoints with ten vectors each, for fast tests."""
    protocol = Protocol(start_c=30.0, end_c=33.0, samples_per_setpoint=10)
    return generate(default_array, PlateProfile(), protocol, ntc_coeffs, seed=DEFAULT_SEED)


@pytest.fixture(scope="session")
def default_split(default_dataset: Dataset) -> tuple[Dataset, Dataset]:
    """80/20 split of the seed-42 dataset."""
    return split(default_dataset, 0.8, 0)


@pytest.fixture(scope="session")
def trained_baseline(
    default_split: tuple[Dataset, Dataset],
) -> tuple[TrainedModel, TrainHistory]:
    """The 32-20-1 tanh network trained for 300 epochs on the default split."""
    train_ds, test_ds = default_split
    return train(train_ds, test_ds, MlpArchitecture(), TrainConfig())
