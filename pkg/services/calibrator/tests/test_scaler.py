"""Tests for feature standardization and the label map."""

import numpy as np
import pytest

from calibrator.scaler import LABEL_CENTER_C, LABEL_SCALE_C, Scaler, fit_scaler
from common import ScalerError
from rig_sim.dataset import Dataset


class TestFitScaler:
    """Tests for fit_scaler."""

    def test_standardizes_training_features(self, small_dataset: Dataset) -> None:
        """Transformed training columns have zero mean and unit std."""
        scaler = fit_scaler(small_dataset)
        z = scaler.transform_features(small_dataset.features())
        assert scaler.dim == 32
        assert np.abs(z.mean(axis=0)).max() < 1e-12
        assert z.std(axis=0) == pytest.approx(np.ones(32))

    def test_column_subset(self, small_dataset: Dataset) -> None:
        """Only the selected columns are fitted."""
        scaler = fit_scaler(small_dataset, columns=[16, 17, 18])
        assert scaler.dim == 3
        assert scaler.means[0] == pytest.approx(float(small_dataset.features([16]).mean()))

    def test_constant_column_rejected(self) -> None:
        """A zero-variance column names itself in the error."""
        rows = [[float(i + j) for j in range(32)] for i in range(4)]
        for row in rows:
            row[5] = 30.0
        ds = Dataset.from_rows([30.0, 31.0, 32.0, 33.0], rows)
        with pytest.raises(ScalerError, match=r"\[5\]"):
            fit_scaler(ds)


class TestScaler:
    """Tests for Scaler transforms."""

    def test_label_map(self) -> None:
        """30 and 45 degC land on -0.75 and 0.75."""
        scaler = Scaler(means=(0.0,), stds=(1.0,))
        assert LABEL_CENTER_C == 37.5
        assert LABEL_SCALE_C == 10.0
        assert scaler.transform_labels(np.array([30.0, 37.5, 45.0])) == pytest.approx(
            [-0.75, 0.0, 0.75]
        )

    def test_label_roundtrip(self) -> None:
        """inverse_labels undoes transform_labels."""
        scaler = Scaler(means=(0.0,), stds=(1.0,))
        labels = np.array([30.0, 33.5, 44.9])
        assert scaler.inverse_labels(scaler.transform_labels(labels)) == pytest.approx(labels)

    def test_feature_roundtrip(self) -> None:
        """inverse_features undoes transform_features."""
        scaler = Scaler(means=(36.0, 38.0), stds=(2.0, 0.5))
        x = np.array([[35.0, 38.25], [40.0, 37.0]])
        assert scaler.transform_features(x) == pytest.approx([[-0.5, 0.5], [2.0, -2.0]])
        assert scaler.inverse_features(scaler.transform_features(x)) == pytest.approx(x)

    def test_wrong_width_rejected(self) -> None:
        """Feature count must match."""
        with pytest.raises(ScalerError, match="Expected 2"):
            Scaler(means=(0.0, 0.0), stds=(1.0, 1.0)).transform_features(np.zeros((1, 3)))

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"means": (0.0,), "stds": (1.0, 1.0)},
            {"means": (0.0,), "stds": (0.0,)},
            {"means": (0.0,), "stds": (1.0,), "label_scale_c": 0.0},
        ],
    )
    def test_invalid(self, kwargs: dict[str, object]) -> None:
        """Inconsistent or degenerate scalers are rejected."""
        with pytest.raises(ScalerError):
            Scaler(**kwargs)  # type: ignore[arg-type]

    def test_dict_roundtrip(self) -> None:
        """as_dict / from_dict are inverses."""
        scaler = Scaler(means=(36.1, 37.2), stds=(1.5, 0.25), label_center_c=40.0)
        assert Scaler.from_dict(scaler.as_dict()) == scaler
