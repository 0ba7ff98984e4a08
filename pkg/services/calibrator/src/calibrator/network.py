"""
Feed-forward regression network written directly against numpy.

Layers are stored as (fan_in, fan_out) weight matrices applied to row-major
batches: z = a @ W + b. The network maps a normalized reading vector to one
normalized temperature.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np
import numpy.typing as npt

from common import ConfigError, LossError, derive_rng
from common.seeding import STREAM_INIT
from rig_sim.sensors import SENSOR_COUNT

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]


class Activation(StrEnum):
    """Layer nonlinearity."""

    TANH = "tanh"
    RELU = "relu"
    SIGMOID = "sigmoid"
    LINEAR = "linear"


class LossKind(StrEnum):
    """Regression loss."""

    MSE = "mse"
    MAE = "mae"
    RMSE = "rmse"
    MSLE = "msle"


HIDDEN_ACTIVATIONS = frozenset({Activation.TANH, Activation.RELU, Activation.SIGMOID})
OUTPUT_ACTIVATIONS = frozenset({Activation.TANH, Activation.LINEAR})


# =============================================================================
# Activations
# =============================================================================


def _sigmoid(z: FloatArray) -> FloatArray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


# Each entry: (f(z), f'(z) expressed through z and a = f(z))
_ACTIVATIONS: dict[
    Activation,
    tuple[Callable[[FloatArray], FloatArray], Callable[[FloatArray, FloatArray], FloatArray]],
] = {
    Activation.TANH: (np.tanh, lambda _z, a: 1.0 - a * a),
    Activation.RELU: (lambda z: np.maximum(z, 0.0), lambda z, _a: (z > 0).astype(np.float64)),
    Activation.SIGMOID: (_sigmoid, lambda _z, a: a * (1.0 - a)),
    Activation.LINEAR: (lambda z: z, lambda z, _a: np.ones_like(z)),
}


# =============================================================================
# Architecture and parameters
# =============================================================================


@dataclass(frozen=True)
class MlpArchitecture:
    """Layer widths, activations, and which reading columns feed the input."""

    hidden_layers: tuple[int, ...] = (20,)
    input_columns: tuple[int, ...] = tuple(range(SENSOR_COUNT))
    hidden_activation: Activation = Activation.TANH
    output_activation: Activation = Activation.TANH

    def __post_init__(self) -> None:
        # Coerce list inputs (e.g. from JSON) so the dataclass stays hashable
        object.__setattr__(self, "hidden_layers", tuple(int(w) for w in self.hidden_layers))
        object.__setattr__(self, "input_columns", tuple(int(c) for c in self.input_columns))
        object.__setattr__(self, "hidden_activation", Activation(self.hidden_activation))
        object.__setattr__(self, "output_activation", Activation(self.output_activation))

        if any(w < 1 for w in self.hidden_layers):
            raise ConfigError(f"Hidden layer widths must be >= 1, got {list(self.hidden_layers)}")
        if not self.input_columns:
            raise ConfigError("input_columns must not be empty")
        if len(set(self.input_columns)) != len(self.input_columns):
            raise ConfigError(f"input_columns has duplicates: {list(self.input_columns)}")
        if any(not 0 <= c < SENSOR_COUNT for c in self.input_columns):
            raise ConfigError(f"input_columns must lie in 0..{SENSOR_COUNT - 1}")
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ConfigError(f"Unsupported hidden activation {self.hidden_activation}")
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ConfigError(f"Unsupported output activation {self.output_activation}")

    @property
    def input_dim(self) -> int:
        """Number of reading components consumed."""
        return len(self.input_columns)

    @property
    def output_dim(self) -> int:
        """Always a single temperature."""
        return 1

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        """Widths from input to output, e.g. (32, 20, 1)."""
        return (self.input_dim, *self.hidden_layers, self.output_dim)

    @property
    def activations(self) -> tuple[Activation, ...]:
        """Activation applied after each weight layer."""
        return (self.hidden_activation,) * len(self.hidden_layers) + (self.output_activation,)

    def as_dict(self) -> dict[str, Any]:
        """Plain-dict form for JSON documents."""
        return {
            "hidden_layers": list(self.hidden_layers),
            "input_columns": list(self.input_columns),
            "hidden_activation": self.hidden_activation.value,
            "output_activation": self.output_activation.value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> MlpArchitecture:
        """Inverse of as_dict."""
        return cls(
            hidden_layers=tuple(data["hidden_layers"]),
            input_columns=tuple(data["input_columns"]),
            hidden_activation=Activation(data["hidden_activation"]),
            output_activation=Activation(data["output_activation"]),
        )


@dataclass
class MlpParams:
    """Per-layer weights (fan_in x fan_out) and biases (fan_out).

    Also used to carry gradients, which share the parameters' shapes.
    """

    weights: list[FloatArray]
    biases: list[FloatArray]

    def arrays(self) -> list[FloatArray]:
        """All arrays, interleaved W0, b0, W1, b1, ..."""
        out: list[FloatArray] = []
        for w, b in zip(self.weights, self.biases, strict=True):
            out.extend((w, b))
        return out

    @classmethod
    def from_arrays(cls, arrays: Sequence[FloatArray]) -> MlpParams:
        """Inverse of arrays()."""
        return cls(weights=list(arrays[0::2]), biases=list(arrays[1::2]))

    def copy(self) -> MlpParams:
        """Deep copy."""
        return MlpParams.from_arrays([a.copy() for a in self.arrays()])

    def zeros_like(self) -> MlpParams:
        """Same shapes, all zeros."""
        return MlpParams.from_arrays([np.zeros_like(a) for a in self.arrays()])

    def is_finite(self) -> bool:
        """True when no entry is NaN or infinite."""
        return all(bool(np.all(np.isfinite(a))) for a in self.arrays())

    def count(self) -> int:
        """Total number of scalar parameters."""
        return sum(a.size for a in self.arrays())

    def check_shapes(self, arch: MlpArchitecture) -> None:
        """Raise ConfigError unless the arrays fit the architecture."""
        sizes = arch.layer_sizes
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise ConfigError(
                f"Expected {len(sizes) - 1} layers for {list(sizes)}, got {len(self.weights)}"
            )
        for i, (w, b) in enumerate(zip(self.weights, self.biases, strict=True)):
            if w.shape != (sizes[i], sizes[i + 1]) or b.shape != (sizes[i + 1],):
                raise ConfigError(
                    f"Layer {i} has shapes {w.shape}/{b.shape}, "
                    f"expected {(sizes[i], sizes[i + 1])}/{(sizes[i + 1],)}"
                )


def init_params(arch: MlpArchitecture, seed: int) -> MlpParams:
    """Glorot-uniform weights in +/- sqrt(6 / (fan_in + fan_out)), zero biases."""
    rng = derive_rng(seed, STREAM_INIT)
    weights: list[FloatArray] = []
    biases: list[FloatArray] = []
    sizes = arch.layer_sizes
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:], strict=True):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpParams(weights=weights, biases=biases)


# =============================================================================
# Forward pass
# =============================================================================


@dataclass
class ForwardCache:
    """Everything the backward pass needs.

    post[0] is the input batch; pre[i] and post[i + 1] belong to layer i.
    """

    pre: list[FloatArray] = field(default_factory=list)
    post: list[FloatArray] = field(default_factory=list)


def _as_batch(x: FloatArray | Sequence[float]) -> FloatArray:
    batch = np.asarray(x, dtype=np.float64)
    if batch.ndim == 1:
        batch = batch[np.newaxis, :]
    return batch


def forward(
    params: MlpParams, arch: MlpArchitecture, x: FloatArray | Sequence[float]
) -> tuple[FloatArray, ForwardCache]:
    """Run a batch (n, input_dim) or a single vector through the network.

    Returns:
        Predictions of shape (n,) and the cache for backward().
    """
    a = _as_batch(x)
    if a.shape[1] != arch.input_dim:
        raise ConfigError(f"Input has {a.shape[1]} columns, network expects {arch.input_dim}")

    cache = ForwardCache(post=[a])
    for w, b, act in zip(params.weights, params.biases, arch.activations, strict=True):
        z = a @ w + b
        a = _ACTIVATIONS[act][0](z)
        cache.pre.append(z)
        cache.post.append(a)
    return a[:, 0], cache


def predict(params: MlpParams, arch: MlpArchitecture, x: FloatArray) -> FloatArray:
    """Normalized predictions for a batch."""
    return forward(params, arch, x)[0]


# =============================================================================
# Losses
# =============================================================================


def _check_msle_domain(predictions: FloatArray, labels: FloatArray) -> None:
    if np.any(predictions <= -1.0) or np.any(labels <= -1.0):
        worst = float(min(predictions.min(), labels.min()))
        raise LossError(f"msle needs values > -1, got {worst}")


def loss_value(
    kind: LossKind,
    predictions: FloatArray | Sequence[float],
    labels: FloatArray | Sequence[float],
) -> float:
    """Batch loss.

    mse, mae and msle are means of per-sample losses; rmse is the square
    root of the batch mse.

    Raises:
        LossError: On empty or mismatched inputs, or msle values <= -1.
    """
    p = np.asarray(predictions, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if p.shape != y.shape or p.size == 0:
        raise LossError(f"Loss needs equal non-empty inputs, got {p.shape} and {y.shape}")

    residual = p - y
    match LossKind(kind):
        case LossKind.MSE:
            return float(np.mean(residual * residual))
        case LossKind.MAE:
            return float(np.mean(np.abs(residual)))
        case LossKind.RMSE:
            return float(np.sqrt(np.mean(residual * residual)))
        case LossKind.MSLE:
            _check_msle_domain(p, y)
            log_residual = np.log1p(p) - np.log1p(y)
            return float(np.mean(log_residual * log_residual))
    raise LossError(f"Unknown loss kind {kind}")


def loss_gradient(kind: LossKind, predictions: FloatArray, labels: FloatArray) -> FloatArray:
    """d(batch loss)/d(prediction), one entry per sample.

    The mae subgradient at a zero residual is 0, and so is the rmse
    gradient when every residual is zero.
    """
    n = predictions.size
    residual = predictions - labels
    match LossKind(kind):
        case LossKind.MSE:
            return 2.0 * residual / n
        case LossKind.MAE:
            return np.sign(residual) / n
        case LossKind.RMSE:
            rmse = math.sqrt(float(np.mean(residual * residual)))
            if rmse == 0.0:
                return np.zeros_like(residual)
            return residual / (n * rmse)
        case LossKind.MSLE:
            _check_msle_domain(predictions, labels)
            log_residual = np.log1p(predictions) - np.log1p(labels)
            return 2.0 * log_residual / ((1.0 + predictions) * n)
    raise LossError(f"Unknown loss kind {kind}")


def batch_loss(
    params: MlpParams,
    arch: MlpArchitecture,
    x: FloatArray,
    labels: FloatArray,
    kind: LossKind,
) -> float:
    """Forward a batch and score it."""
    return loss_value(kind, predict(params, arch, x), labels)


# =============================================================================
# Backward pass and gradient oracle
# =============================================================================


def backward(
    params: MlpParams,
    arch: MlpArchitecture,
    cache: ForwardCache,
    labels: FloatArray | Sequence[float],
    kind: LossKind,
) -> MlpParams:
    """Exact gradient of the batch loss with respect to every parameter."""
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    predictions = cache.post[-1][:, 0]
    delta = loss_gradient(kind, predictions, y)[:, np.newaxis]

    n_layers = len(params.weights)
    grad_w: list[FloatArray] = [np.empty(0)] * n_layers
    grad_b: list[FloatArray] = [np.empty(0)] * n_layers
    for i in reversed(range(n_layers)):
        derivative = _ACTIVATIONS[arch.activations[i]][1]
        delta = delta * derivative(cache.pre[i], cache.post[i + 1])
        grad_w[i] = cache.post[i].T @ delta
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = delta @ params.weights[i].T

    return MlpParams(weights=grad_w, biases=grad_b)


def finite_diff_gradient(
    params: MlpParams,
    arch: MlpArchitecture,
    x: FloatArray | Sequence[float],
    labels: FloatArray | Sequence[float],
    kind: LossKind,
    h: float = 1e-5,
) -> MlpParams:
    """Central-difference gradient (L(theta + h) - L(theta - h)) / 2h, per parameter."""
    if not h > 0:
        raise ConfigError(f"Step h must be positive, got {h}")
    batch = _as_batch(x)
    y = np.asarray(labels, dtype=np.float64).reshape(-1)

    probe = params.copy()
    grads = params.zeros_like()
    for target, grad in zip(probe.arrays(), grads.arrays(), strict=True):
        flat_target = target.reshape(-1)
        flat_grad = grad.reshape(-1)
        for j in range(flat_target.size):
            original = flat_target[j]
            flat_target[j] = original + h
            upper = batch_loss(probe, arch, batch, y, kind)
            flat_target[j] = original - h
            lower = batch_loss(probe, arch, batch, y, kind)
            flat_target[j] = original
            flat_grad[j] = (upper - lower) / (2.0 * h)
    return grads
