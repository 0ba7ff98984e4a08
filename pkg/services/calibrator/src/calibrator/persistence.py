"""
Trained-model bundle and its JSON document.

The document is self-describing: architecture, scaler, and every parameter
array as nested lists of floats. json writes floats with repr(), so a
save/load cycle reproduces the parameters bit for bit.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt

from common import ConfigError, ModelFormatError, ScalerError

from .network import MlpArchitecture, MlpParams, predict
from .scaler import Scaler

logger = logging.getLogger(__name__)

MODEL_SCHEMA_VERSION = 1
MODEL_KIND = "thermoarray-mlp"

FloatArray = npt.NDArray[np.float64]


@dataclass
class TrainedModel:
    """Architecture, scaler, and parameters: everything needed to predict."""

    architecture: MlpArchitecture
    scaler: Scaler
    params: MlpParams

    def __post_init__(self) -> None:
        self.params.check_shapes(self.architecture)
        if self.scaler.dim != self.architecture.input_dim:
            raise ConfigError(
                f"Scaler has {self.scaler.dim} features, network expects "
                f"{self.architecture.input_dim}"
            )

    def predict_normalized(self, readings: FloatArray) -> FloatArray:
        """Normalized outputs for full 32-column reading rows."""
        x = np.asarray(readings, dtype=np.float64)
        if x.ndim == 1:
            x = x[np.newaxis, :]
        selected = x[:, list(self.architecture.input_columns)]
        return predict(self.params, self.architecture, self.scaler.transform_features(selected))

    def predict_celsius(self, readings: FloatArray) -> FloatArray:
        """Predicted set temperatures for full 32-column reading rows."""
        return self.scaler.inverse_labels(self.predict_normalized(readings))

    def as_dict(self) -> dict[str, Any]:
        """JSON document form."""
        return {
            "schema_version": MODEL_SCHEMA_VERSION,
            "kind": MODEL_KIND,
            "architecture": self.architecture.as_dict(),
            "scaler": self.scaler.as_dict(),
            "layers": [
                {"weights": w.tolist(), "biases": b.tolist()}
                for w, b in zip(self.params.weights, self.params.biases, strict=True)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TrainedModel:
        """Rebuild a model from its document.

        Raises:
            ModelFormatError: On a foreign, outdated, or inconsistent document.
        """
        if data.get("kind") != MODEL_KIND:
            raise ModelFormatError(f"Not a {MODEL_KIND} document (kind={data.get('kind')!r})")
        if data.get("schema_version") != MODEL_SCHEMA_VERSION:
            raise ModelFormatError(
                f"Unsupported model schema_version {data.get('schema_version')!r}, "
                f"expected {MODEL_SCHEMA_VERSION}"
            )
        try:
            architecture = MlpArchitecture.from_dict(data["architecture"])
            scaler = Scaler.from_dict(data["scaler"])
            params = MlpParams(
                weights=[np.array(layer["weights"], dtype=np.float64) for layer in data["layers"]],
                biases=[np.array(layer["biases"], dtype=np.float64) for layer in data["layers"]],
            )
            return cls(architecture=architecture, scaler=scaler, params=params)
        except (KeyError, TypeError, ValueError, ConfigError, ScalerError) as e:
            raise ModelFormatError(f"Malformed model document: {e}") from e


def model_to_json(model: TrainedModel) -> str:
    """Deterministic JSON text for a model."""
    return json.dumps(model.as_dict(), indent=2, sort_keys=True) + "\n"


def save_model(model: TrainedModel, destination: Path) -> Path:
    """Write the model document."""
    destination.parent.mkdir(parents=True, exist_ok=True)
    destination.write_text(model_to_json(model), encoding="utf-8")
    logger.info(f"Saved model ({model.params.count()} parameters) to {destination}")
    return destination


def load_model(source: Path) -> TrainedModel:
    """Read a model document written by save_model."""
    try:
        data = json.loads(source.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"{source} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ModelFormatError(f"{source} does not hold a JSON object")
    return TrainedModel.from_dict(data)
