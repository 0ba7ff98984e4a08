"""Tests for the plate field and the setpoint protocol."""

import numpy as np
import pytest

from common import ConfigError
from rig_sim.plate import (
    GridPosition,
    PlateProfile,
    Protocol,
    local_temperature,
    perturb_setpoint,
    staircase_setpoints,
)
from rig_sim.sensors import grid_position


class TestLocalTemperature:
    """Tests for the radial field."""

    def test_center_equals_setpoint(self, profile: PlateProfile) -> None:
        """No attenuation at the plate center."""
        center = GridPosition(row=0, col=0, x_mm=0.0, y_mm=0.0)
        assert local_temperature(center, 40.0, profile) == pytest.approx(40.0)

    def test_flat_plate_is_uniform(self, flat_profile: PlateProfile) -> None:
        """With zero non-uniformity every position reads the setpoint."""
        for row in range(1, 5):
            for col in range(1, 9):
                pos = grid_position(row, col, 20.0)
                assert local_temperature(pos, 37.0, flat_profile) == pytest.approx(37.0)

    def test_corner_at_45(self, profile: PlateProfile) -> None:
        """Corner sensor at 45 degC: rho^2 = 5800 mm^2, k = 0.475."""
        corner = grid_position(1, 1, 20.0)
        expected = 22.0 + 23.0 * (1 - 0.475 * 5800.0 / 8100.0)
        assert local_temperature(corner, 45.0, profile) == pytest.approx(expected)
        assert expected == pytest.approx(37.177, abs=1e-3)

    def test_monotone_in_radius(self, profile: PlateProfile) -> None:
        """Further from center is cooler when set > ambient."""
        radii = [0.0, 10.0, 30.0, 50.0, 76.0]
        temps = [
            local_temperature(GridPosition(row=0, col=0, x_mm=r, y_mm=0.0), 40.0, profile)
            for r in radii
        ]
        assert temps == sorted(temps, reverse=True)

    def test_edge_stays_above_ambient(self, profile: PlateProfile) -> None:
        """k < 1 keeps even the plate edge above ambient."""
        edge = GridPosition(row=0, col=0, x_mm=90.0, y_mm=0.0)
        assert local_temperature(edge, 45.0, profile) > profile.ambient_c

    @pytest.mark.parametrize(
        ("set_c", "expected"),
        [(45.0, 34.075), (30.0, 29.2)],
    )
    def test_plate_edge_value(self, profile: PlateProfile, set_c: float, expected: float) -> None:
        """At rho = R the field is set - k(set) * (set - ambient)."""
        edge = GridPosition(row=0, col=0, x_mm=0.0, y_mm=profile.plate_radius_mm)
        assert local_temperature(edge, set_c, profile) == pytest.approx(expected, abs=1e-9)

    def test_underestimation_grows_over_staircase(
        self, profile: PlateProfile, protocol: Protocol
    ) -> None:
        """Mean array shortfall below the setpoint never shrinks as the plate heats."""
        positions = [grid_position(row, col, 20.0) for row in range(1, 5) for col in range(1, 9)]
        shortfalls = [
            set_c - float(np.mean([local_temperature(p, set_c, profile) for p in positions]))
            for set_c in staircase_setpoints(protocol)
        ]
        assert len(shortfalls) == 16
        assert all(b >= a for a, b in zip(shortfalls, shortfalls[1:], strict=False))
        assert shortfalls[-1] > shortfalls[0]

    def test_nonuniformity_grows_with_setpoint(self, profile: PlateProfile) -> None:
        """Center-to-corner spread increases from 30 to 45 degC."""
        corner = grid_position(4, 8, 20.0)
        spread_30 = 30.0 - local_temperature(corner, 30.0, profile)
        spread_45 = 45.0 - local_temperature(corner, 45.0, profile)
        assert spread_45 > spread_30


class TestPlateProfile:
    """Tests for profile validation."""

    def test_attenuation_reference(self, profile: PlateProfile) -> None:
        """k(30) equals the base coefficient."""
        assert profile.attenuation(30.0) == pytest.approx(0.1)

    def test_rejects_base_at_one(self) -> None:
        """Base attenuation must stay below 1."""
        with pytest.raises(ConfigError):
            PlateProfile(nonuniformity_base=1.0)

    def test_rejects_negative_radius(self) -> None:
        """Plate radius must be positive."""
        with pytest.raises(ConfigError):
            PlateProfile(plate_radius_mm=-1.0)

    def test_validate_for_steep_slope(self) -> None:
        """A slope that drives k to 1 within the protocol is rejected."""
        steep = PlateProfile(nonuniformity_slope=0.1)
        with pytest.raises(ConfigError, match="below 1"):
            steep.validate_for(Protocol())

    def test_validate_for_default_passes(self, profile: PlateProfile, protocol: Protocol) -> None:
        """Default profile is valid over the default staircase."""
        profile.validate_for(protocol)


class TestProtocol:
    """Tests for the staircase."""

    def test_default_staircase(self, protocol: Protocol) -> None:
        """30..45 inclusive in 1 degC steps."""
        assert staircase_setpoints(protocol) == [float(t) for t in range(30, 46)]

    def test_fractional_step_does_not_drift(self) -> None:
        """0.1 degC steps land exactly on decimal values."""
        points = staircase_setpoints(Protocol(start_c=30.0, end_c=31.0, step_c=0.1))
        assert len(points) == 11
        assert points[-1] == 31.0
        assert points[3] == 30.3

    def test_single_setpoint(self) -> None:
        """start == end gives one setpoint."""
        assert staircase_setpoints(Protocol(start_c=37.0, end_c=37.0)) == [37.0]

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"start_c": 46.0},
            {"step_c": 0.0},
            {"samples_per_setpoint": 0},
            {"set_accuracy_c": -0.1},
        ],
    )
    def test_invalid_protocol(self, kwargs: dict[str, float]) -> None:
        """Inconsistent protocols are rejected."""
        with pytest.raises(ConfigError):
            Protocol(**kwargs)


class TestPerturbSetpoint:
    """Tests for hotplate accuracy jitter."""

    def test_zero_accuracy_is_identity(self) -> None:
        """No jitter when the plate is exact."""
        rng = np.random.default_rng(0)
        assert perturb_setpoint(40.0, 0.0, rng) == 40.0

    def test_jitter_bounded(self) -> None:
        """Jitter stays within +/- accuracy."""
        rng = np.random.default_rng(1)
        draws = [perturb_setpoint(40.0, 0.15, rng) for _ in range(1000)]
        assert all(39.85 <= d <= 40.15 for d in draws)
        assert max(draws) - min(draws) > 0.2

    def test_negative_accuracy_rejected(self) -> None:
        """Accuracy must be non-negative."""
        with pytest.raises(ConfigError):
            perturb_setpoint(40.0, -0.1, np.random.default_rng(0))
