"""
Ablation harness: train named variants of the baseline on one shared split.

Each variant is a small override of the baseline architecture/config (loss
kind, epochs, extra layer, activations, input columns) or of the data it
sees (component-shuffled train and/or test vectors). Variants run one after
another in declared order; a variant that diverges is recorded and the run
moves on.
"""

from __future__ import annotations

import json
import logging
import time
from collections.abc import Sequence
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

from common import ConfigError, ModelError
from rig_sim.dataset import Dataset, dataset_hash, shuffle_components, split, split_hash
from rig_sim.sensors import ANALOG_ROWS, COLS, SENSOR_COUNT

from .network import Activation, LossKind, MlpArchitecture
from .report import STATUS_DIVERGED, AblationReport, VariantResult
from .training import TrainConfig, TrainHistory, evaluate, train

logger = logging.getLogger(__name__)

BASELINE = "baseline"

ANALOG_COLUMNS = tuple(range(len(ANALOG_ROWS) * COLS))
DIGITAL_COLUMNS = tuple(range(len(ANALOG_ROWS) * COLS, SENSOR_COUNT))


@dataclass(frozen=True)
class VariantSpec:
    """Overrides relative to the baseline; None keeps the baseline value."""

    name: str
    description: str
    loss_kind: LossKind | None = None
    epochs: int | None = None
    extra_hidden_layer: int | None = None
    input_columns: tuple[int, ...] | None = None
    hidden_activation: Activation | None = None
    output_activation: Activation | None = None
    shuffle_train: bool = False
    shuffle_test: bool = False
    # Degradation factor vs baseline measured on the physical rig, for comparison only
    reference_factor: float | None = None

    def resolve(
        self, arch: MlpArchitecture, config: TrainConfig
    ) -> tuple[MlpArchitecture, TrainConfig]:
        """Apply the overrides to a baseline architecture and config."""
        arch_changes: dict[str, Any] = {}
        if self.extra_hidden_layer is not None:
            arch_changes["hidden_layers"] = (*arch.hidden_layers, self.extra_hidden_layer)
        if self.input_columns is not None:
            arch_changes["input_columns"] = self.input_columns
        if self.hidden_activation is not None:
            arch_changes["hidden_activation"] = self.hidden_activation
        if self.output_activation is not None:
            arch_changes["output_activation"] = self.output_activation

        config_changes: dict[str, Any] = {}
        if self.loss_kind is not None:
            config_changes["loss_kind"] = self.loss_kind
        if self.epochs is not None:
            config_changes["epochs"] = self.epochs
        return replace(arch, **arch_changes), replace(config, **config_changes)


VARIANTS: dict[str, VariantSpec] = {
    spec.name: spec
    for spec in (
        VariantSpec(BASELINE, "configured baseline network and training schedule"),
        VariantSpec("loss_mae", "mean absolute error loss", loss_kind=LossKind.MAE),
        VariantSpec("loss_rmse", "root mean squared error loss", loss_kind=LossKind.RMSE),
        VariantSpec("loss_msle", "mean squared log error loss", loss_kind=LossKind.MSLE),
        VariantSpec(
            "epochs_600", "baseline continued to 600 epochs", epochs=600, reference_factor=200
        ),
        VariantSpec(
            "extra_layer_12",
            "additional 12-unit hidden layer",
            extra_hidden_layer=12,
            reference_factor=2,
        ),
        VariantSpec(
            "shuffled_test",
            "baseline model scored on component-shuffled test vectors",
            shuffle_test=True,
            reference_factor=30,
        ),
        VariantSpec(
            "shuffled_train",
            "trained and scored on component-shuffled vectors",
            shuffle_train=True,
            shuffle_test=True,
            reference_factor=5,
        ),
        VariantSpec("digital_only", "digital sensors only", input_columns=DIGITAL_COLUMNS),
        VariantSpec("analog_only", "analog sensors only", input_columns=ANALOG_COLUMNS),
        VariantSpec("hidden_relu", "ReLU hidden layer", hidden_activation=Activation.RELU),
        VariantSpec("output_linear", "linear output layer", output_activation=Activation.LINEAR),
    )
}

DEFAULT_VARIANTS = tuple(VARIANTS)


def validate_variant_names(names: Sequence[str]) -> list[str]:
    """Violations for a requested variant list (empty when valid)."""
    violations: list[str] = []
    unknown = [n for n in names if n not in VARIANTS]
    if unknown:
        violations.append(f"unknown ablation variant(s) {unknown}; known: {list(VARIANTS)}")
    if len(set(names)) != len(names):
        violations.append(f"duplicate ablation variant names in {list(names)}")
    if BASELINE not in names:
        violations.append(f"ablation variants must include {BASELINE!r}")
    return violations


def _write_history(history: TrainHistory, name: str, history_dir: Path) -> Path:
    history_dir.mkdir(parents=True, exist_ok=True)
    path = history_dir / f"history_{name}.json"
    path.write_text(json.dumps(history.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def run_ablation(
    dataset: Dataset,
    variants: Sequence[str] = DEFAULT_VARIANTS,
    *,
    arch: MlpArchitecture | None = None,
    config: TrainConfig | None = None,
    train_fraction: float = 0.8,
    split_seed: int = 0,
    shuffle_seed: int = 0,
    history_dir: Path | None = None,
    config_hash: str | None = None,
) -> tuple[AblationReport, dict[str, TrainHistory]]:
    """Train every requested variant on one shared split.

    Args:
        dataset: Labeled dataset with all 32 columns.
        variants: Variant names in report order; must include the baseline.
        arch: Baseline architecture.
        config: Baseline training config (its seeds are shared by every variant).
        train_fraction: Split fraction.
        split_seed: Seed of the shared split.
        shuffle_seed: Seed of the component shuffle used by shuffled variants.
        history_dir: Where history_<variant>.json files go (not written if None).
        config_hash: Hash of the run configuration, recorded in the report.

    Returns:
        The report and each successful variant's history.

    Raises:
        ConfigError: On unknown, duplicate, or missing-baseline variant lists.
    """
    violations = validate_variant_names(variants)
    if violations:
        raise ConfigError("; ".join(violations))
    arch = arch or MlpArchitecture()
    config = config or TrainConfig()

    started = time.perf_counter()
    train_ds, test_ds = split(dataset, train_fraction, split_seed)
    train_shuffled, test_shuffled = train_ds, test_ds
    if any(VARIANTS[n].shuffle_train or VARIANTS[n].shuffle_test for n in variants):
        train_shuffled = shuffle_components(train_ds, shuffle_seed)
        test_shuffled = shuffle_components(test_ds, shuffle_seed)

    report = AblationReport(
        dataset_hash=dataset_hash(dataset),
        split_hash=split_hash(train_ds, test_ds),
        train_size=len(train_ds),
        test_size=len(test_ds),
        seeds={
            "split_seed": split_seed,
            "shuffle_seed": shuffle_seed,
            "init_seed": config.init_seed,
            "epoch_shuffle_seed": config.shuffle_seed,
        },
        config_hash=config_hash,
    )
    histories: dict[str, TrainHistory] = {}

    for name in variants:
        spec = VARIANTS[name]
        variant_arch, variant_config = spec.resolve(arch, config)
        fit_on = train_shuffled if spec.shuffle_train else train_ds
        score_on = test_shuffled if spec.shuffle_test else test_ds
        result = VariantResult(
            name=name,
            config={
                "description": spec.description,
                "architecture": variant_arch.as_dict(),
                "train": variant_config.as_dict(),
                "shuffle_train": spec.shuffle_train,
                "shuffle_test": spec.shuffle_test,
            },
            reference_factor=spec.reference_factor,
        )

        logger.info(f"Ablation variant {name}: {spec.description}")
        try:
            model, history = train(fit_on, score_on, variant_arch, variant_config)
        except ModelError as e:
            logger.warning(f"Variant {name} failed: {e}")
            result.status = STATUS_DIVERGED
            result.error = str(e)
            report.variants.append(result)
            continue

        metrics = evaluate(model, score_on)
        result.final_train_loss = history.train_loss[-1]
        result.final_test_loss = history.test_loss[-1]
        result.final_test_mse = history.test_mse[-1]
        result.mae_c = metrics.mae_c
        result.rmse_c = metrics.rmse_c
        result.min_test_loss = history.min_test_loss
        result.min_test_epoch = history.min_test_epoch
        if history_dir is not None:
            result.history_path = str(_write_history(history, name, history_dir))
        histories[name] = history
        report.variants.append(result)

    baseline_mse = report.variant(BASELINE).final_test_mse
    for result in report.variants:
        if result.final_test_mse is not None and baseline_mse:
            result.ratio_vs_baseline = result.final_test_mse / baseline_mse

    report.wall_time_s = round(time.perf_counter() - started, 3)
    logger.info(f"Ablation of {len(variants)} variant(s) finished in {report.wall_time_s} s")
    return report, histories
