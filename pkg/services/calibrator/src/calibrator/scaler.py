"""
Feature standardization and the label map.

Readings are standardized per column on the training set. Labels use a
fixed affine map, (label - 37.5) / 10, so the 30..45 degC protocol lands in
[-0.75, 0.75], inside the range of a tanh output.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from common import ScalerError
from rig_sim.dataset import Dataset

FloatArray = npt.NDArray[np.float64]

LABEL_CENTER_C = 37.5
LABEL_SCALE_C = 10.0

# Standard deviations at or below this count as constant columns
_MIN_STD = 1e-12


@dataclass(frozen=True)
class Scaler:
    """Per-feature mean/std plus the label affine map."""

    means: tuple[float, ...]
    stds: tuple[float, ...]
    label_center_c: float = LABEL_CENTER_C
    label_scale_c: float = LABEL_SCALE_C

    def __post_init__(self) -> None:
        if len(self.means) != len(self.stds):
            raise ScalerError(f"{len(self.means)} means but {len(self.stds)} stds")
        if any(not s > _MIN_STD for s in self.stds):
            raise ScalerError("Standard deviations must be positive")
        if not self.label_scale_c > 0:
            raise ScalerError(f"label_scale_c must be positive, got {self.label_scale_c}")

    @property
    def dim(self) -> int:
        """Number of features."""
        return len(self.means)

    def transform_features(self, x: FloatArray) -> FloatArray:
        """Standardize an (n, dim) matrix."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dim:
            raise ScalerError(f"Expected {self.dim} features, got {x.shape[-1]}")
        return (x - np.asarray(self.means)) / np.asarray(self.stds)

    def inverse_features(self, z: FloatArray) -> FloatArray:
        """Undo transform_features."""
        return np.asarray(z, dtype=np.float64) * np.asarray(self.stds) + np.asarray(self.means)

    def transform_labels(self, labels_c: FloatArray) -> FloatArray:
        """Celsius labels to normalized targets."""
        return (np.asarray(labels_c, dtype=np.float64) - self.label_center_c) / self.label_scale_c

    def inverse_labels(self, normalized: FloatArray) -> FloatArray:
        """Normalized outputs back to Celsius."""
        return np.asarray(normalized, dtype=np.float64) * self.label_scale_c + self.label_center_c

    def as_dict(self) -> dict[str, Any]:
        """Plain-dict form for JSON documents."""
        return {
            "means": list(self.means),
            "stds": list(self.stds),
            "label_center_c": self.label_center_c,
            "label_scale_c": self.label_scale_c,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Scaler:
        """Inverse of as_dict."""
        return cls(
            means=tuple(float(v) for v in data["means"]),
            stds=tuple(float(v) for v in data["stds"]),
            label_center_c=float(data["label_center_c"]),
            label_scale_c=float(data["label_scale_c"]),
        )


def fit_scaler(train: Dataset, columns: Sequence[int] | None = None) -> Scaler:
    """Fit feature statistics on the training set (population std).

    Raises:
        ScalerError: If any selected column is constant.
    """
    x = train.features(columns)
    means = x.mean(axis=0)
    stds = x.std(axis=0)
    selected = list(columns) if columns is not None else list(range(x.shape[1]))
    constant = [c for c, s in zip(selected, stds, strict=True) if not s > _MIN_STD]
    if constant:
        raise ScalerError(f"Zero-variance feature column(s) {constant} in training data")
    return Scaler(means=tuple(float(m) for m in means), stds=tuple(float(s) for s in stds))
