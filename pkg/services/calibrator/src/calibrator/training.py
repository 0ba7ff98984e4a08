"""
Mini-batch Adam training, evaluation metrics, and reference predictors.

Training is single-threaded and fully determined by the datasets, the
architecture, and the two seeds in TrainConfig. The epoch shuffle is keyed
by epoch number, so a longer run with the same seeds replays a shorter one
exactly before continuing.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt

from common import ConfigError, DatasetError, DivergenceError, LossError, derive_rng
from common.seeding import STREAM_EPOCH_SHUFFLE
from rig_sim.dataset import Dataset

from .network import (
    LossKind,
    MlpArchitecture,
    backward,
    forward,
    init_params,
    loss_value,
    predict,
)
from .optimizer import DEFAULT_BETA1, DEFAULT_BETA2, DEFAULT_EPSILON, AdamState, adam_step
from .persistence import TrainedModel
from .scaler import LABEL_SCALE_C, Scaler, fit_scaler

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

# Accuracy reported for the physical rig, kept beside measured metrics for comparison
REFERENCE_ACCURACY_C = 0.12


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer and schedule settings."""

    loss_kind: LossKind = LossKind.MSE
    learning_rate: float = 0.01
    epochs: int = 300
    batch_size: int = 32
    beta1: float = DEFAULT_BETA1
    beta2: float = DEFAULT_BETA2
    epsilon: float = DEFAULT_EPSILON
    init_seed: int = 0
    shuffle_seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "loss_kind", LossKind(self.loss_kind))
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be at least 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be at least 1, got {self.batch_size}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError(f"Adam betas must lie in [0, 1), got {self.beta1}, {self.beta2}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.init_seed < 0 or self.shuffle_seed < 0:
            raise ConfigError("Seeds must be non-negative")

    def as_dict(self) -> dict[str, Any]:
        """Plain-dict form for JSON documents."""
        return {
            "loss_kind": self.loss_kind.value,
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "epsilon": self.epsilon,
            "init_seed": self.init_seed,
            "shuffle_seed": self.shuffle_seed,
        }


@dataclass
class TrainHistory:
    """Per-epoch losses in normalized space, evaluated after each epoch."""

    loss_kind: LossKind
    train_loss: list[float] = field(default_factory=list)
    test_loss: list[float] = field(default_factory=list)
    test_mse: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.train_loss)

    @property
    def min_test_loss(self) -> float:
        """Lowest test loss seen."""
        return min(self.test_loss)

    @property
    def min_test_epoch(self) -> int:
        """1-based epoch of the lowest test loss (first occurrence)."""
        return int(np.argmin(self.test_loss)) + 1

    def as_dict(self) -> dict[str, Any]:
        """Plain-dict form for JSON documents."""
        return {
            "loss_kind": self.loss_kind.value,
            "epochs": len(self),
            "train_loss": list(self.train_loss),
            "test_loss": list(self.test_loss),
            "test_mse": list(self.test_mse),
            "min_test_loss": self.min_test_loss,
            "min_test_epoch": self.min_test_epoch,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TrainHistory:
        """Inverse of as_dict (derived fields are recomputed)."""
        return cls(
            loss_kind=LossKind(data["loss_kind"]),
            train_loss=[float(v) for v in data["train_loss"]],
            test_loss=[float(v) for v in data["test_loss"]],
            test_mse=[float(v) for v in data["test_mse"]],
        )


# =============================================================================
# Training
# =============================================================================


def _normalized(
    ds: Dataset, arch: MlpArchitecture, scaler: Scaler
) -> tuple[FloatArray, FloatArray]:
    x = scaler.transform_features(ds.features(arch.input_columns))
    y = scaler.transform_labels(ds.labels())
    return x, y


def train(
    train_ds: Dataset,
    test_ds: Dataset,
    arch: MlpArchitecture | None = None,
    config: TrainConfig | None = None,
) -> tuple[TrainedModel, TrainHistory]:
    """Fit a network on train_ds, tracking test_ds after every epoch.

    The scaler is fitted on train_ds only.

    Returns:
        The trained model bundle and its per-epoch history.

    Raises:
        ConfigError: If batch_size exceeds the training set.
        ScalerError: If a training column is constant.
        DivergenceError: If a loss becomes non-finite (or leaves the msle domain).
    """
    arch = arch or MlpArchitecture()
    config = config or TrainConfig()
    n = len(train_ds)
    if config.batch_size > n:
        raise ConfigError(f"batch_size {config.batch_size} exceeds training set size {n}")

    scaler = fit_scaler(train_ds, arch.input_columns)
    x_train, y_train = _normalized(train_ds, arch, scaler)
    x_test, y_test = _normalized(test_ds, arch, scaler)

    params = init_params(arch, config.init_seed)
    state = AdamState.fresh(params)
    history = TrainHistory(loss_kind=config.loss_kind)

    logger.info(
        f"Training {list(arch.layer_sizes)} ({arch.hidden_activation}/{arch.output_activation}) "
        f"on {n} samples: loss={config.loss_kind}, lr={config.learning_rate}, "
        f"epochs={config.epochs}, batch={config.batch_size}"
    )

    for epoch in range(1, config.epochs + 1):
        order = derive_rng(config.shuffle_seed, STREAM_EPOCH_SHUFFLE, epoch).permutation(n)
        try:
            for start in range(0, n, config.batch_size):
                idx = order[start : start + config.batch_size]
                _, cache = forward(params, arch, x_train[idx])
                grads = backward(params, arch, cache, y_train[idx], config.loss_kind)
                params, state = adam_step(
                    params,
                    grads,
                    state,
                    config.learning_rate,
                    config.beta1,
                    config.beta2,
                    config.epsilon,
                )

            test_pred = predict(params, arch, x_test)
            train_loss = loss_value(config.loss_kind, predict(params, arch, x_train), y_train)
            test_loss = loss_value(config.loss_kind, test_pred, y_test)
            test_mse = loss_value(LossKind.MSE, test_pred, y_test)
        except LossError as e:
            raise DivergenceError(f"Loss undefined at epoch {epoch}: {e}", epoch=epoch) from e

        if not all(math.isfinite(v) for v in (train_loss, test_loss, test_mse)):
            raise DivergenceError(f"Non-finite loss at epoch {epoch}", epoch=epoch)

        history.train_loss.append(train_loss)
        history.test_loss.append(test_loss)
        history.test_mse.append(test_mse)
        logger.debug(
            f"epoch {epoch}/{config.epochs} train={train_loss:.6e} test={test_loss:.6e}"
        )

    logger.info(
        f"Training finished: train={history.train_loss[-1]:.4e} test={history.test_loss[-1]:.4e} "
        f"(min test {history.min_test_loss:.4e} at epoch {history.min_test_epoch})"
    )
    return TrainedModel(architecture=arch, scaler=scaler, params=params), history


# =============================================================================
# Metrics
# =============================================================================


@dataclass(frozen=True)
class Metrics:
    """Prediction quality on a labeled set, in degC unless noted."""

    mae_c: float
    rmse_c: float
    max_abs_err_c: float
    mse_normalized: float
    sample_count: int
    per_setpoint_mean_prediction: dict[float, float]

    def as_dict(self) -> dict[str, Any]:
        """Plain-dict form for JSON documents (setpoint keys as text)."""
        return {
            "mae_c": self.mae_c,
            "rmse_c": self.rmse_c,
            "max_abs_err_c": self.max_abs_err_c,
            "mse_normalized": self.mse_normalized,
            "sample_count": self.sample_count,
            "per_setpoint_mean_prediction": {
                f"{k:g}": v for k, v in sorted(self.per_setpoint_mean_prediction.items())
            },
        }


def compute_metrics(
    predictions_c: FloatArray | list[float],
    labels_c: FloatArray | list[float],
    scaler: Scaler | None = None,
) -> Metrics:
    """Metrics from aligned predictions and labels.

    mse_normalized uses the scaler's label map (the default map when no
    scaler is given).
    """
    p = np.asarray(predictions_c, dtype=np.float64)
    y = np.asarray(labels_c, dtype=np.float64)
    if p.shape != y.shape or p.size == 0:
        raise DatasetError(f"Need aligned non-empty predictions/labels, got {p.shape}, {y.shape}")

    label_scale = scaler.label_scale_c if scaler is not None else LABEL_SCALE_C
    err = p - y
    per_setpoint = {
        float(label): float(p[y == label].mean()) for label in sorted(set(y.tolist()))
    }
    return Metrics(
        mae_c=float(np.mean(np.abs(err))),
        rmse_c=float(np.sqrt(np.mean(err * err))),
        max_abs_err_c=float(np.max(np.abs(err))),
        mse_normalized=float(np.mean((err / label_scale) ** 2)),
        sample_count=int(p.size),
        per_setpoint_mean_prediction=per_setpoint,
    )


def evaluate(model: TrainedModel, test: Dataset) -> Metrics:
    """Score a trained model on a labeled set."""
    predictions = model.predict_celsius(test.features())
    return compute_metrics(predictions, test.labels(), model.scaler)


@dataclass(frozen=True)
class ReferenceMetrics:
    """Naive predictors: the array mean and each sensor on its own."""

    array_mean_mae_c: float
    array_mean_rmse_c: float
    sensor_mae_c: tuple[float, ...]
    sensor_rmse_c: tuple[float, ...]

    @property
    def best_sensor(self) -> int:
        """Sensor id with the lowest MAE."""
        return int(np.argmin(self.sensor_mae_c))

    def as_dict(self) -> dict[str, Any]:
        """Plain-dict form for JSON documents."""
        return {
            "array_mean_mae_c": self.array_mean_mae_c,
            "array_mean_rmse_c": self.array_mean_rmse_c,
            "best_sensor": self.best_sensor,
            "best_sensor_mae_c": self.sensor_mae_c[self.best_sensor],
            "sensor_mae_c": list(self.sensor_mae_c),
            "sensor_rmse_c": list(self.sensor_rmse_c),
        }


def reference_metrics(test: Dataset) -> ReferenceMetrics:
    """Errors of predicting the set temperature from raw readings alone."""
    x = test.features()
    y = test.labels()
    mean_err = x.mean(axis=1) - y
    sensor_err = x - y[:, np.newaxis]
    return ReferenceMetrics(
        array_mean_mae_c=float(np.mean(np.abs(mean_err))),
        array_mean_rmse_c=float(np.sqrt(np.mean(mean_err**2))),
        sensor_mae_c=tuple(float(v) for v in np.mean(np.abs(sensor_err), axis=0)),
        sensor_rmse_c=tuple(float(v) for v in np.sqrt(np.mean(sensor_err**2, axis=0))),
    )

