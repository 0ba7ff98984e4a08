"""
Neural calibration for the 32-sensor hotplate rig.

A small fully connected network, trained from scratch with Adam, maps one
reading vector to the plate's set temperature. The package also carries the
ablation harness, its report, the SVG charts, and the thermoarray CLI.
"""

from .ablation import BASELINE, DEFAULT_VARIANTS, VARIANTS, VariantSpec, run_ablation
from .heatmap import (
    ColorScale,
    ReadingGrid,
    emit_heatmap_svg,
    emit_loss_curves_svg,
    emit_prediction_scatter_svg,
    grids_to_json,
    mean_grids,
)
from .network import (
    Activation,
    LossKind,
    MlpArchitecture,
    MlpParams,
    backward,
    finite_diff_gradient,
    forward,
    init_params,
    loss_gradient,
    loss_value,
    predict,
)
from .optimizer import AdamState, adam_step
from .persistence import TrainedModel, load_model, save_model
from .report import AblationReport, VariantResult, parse_report, render_report, write_report
from .run_config import RunConfig, load_config
from .scaler import Scaler, fit_scaler
from .training import (
    REFERENCE_ACCURACY_C,
    Metrics,
    ReferenceMetrics,
    TrainConfig,
    TrainHistory,
    compute_metrics,
    evaluate,
    reference_metrics,
    train,
)

__version__ = "0.1.0"

__all__ = [
    # Network
    "Activation",
    "LossKind",
    "MlpArchitecture",
    "MlpParams",
    "init_params",
    "forward",
    "predict",
    "backward",
    "loss_value",
    "loss_gradient",
    "finite_diff_gradient",
    # Optimizer
    "AdamState",
    "adam_step",
    # Scaling and training
    "Scaler",
    "fit_scaler",
    "TrainConfig",
    "TrainHistory",
    "train",
    "Metrics",
    "compute_metrics",
    "evaluate",
    "ReferenceMetrics",
    "reference_metrics",
    "REFERENCE_ACCURACY_C",
    # Persistence
    "TrainedModel",
    "save_model",
    "load_model",
    # Ablation
    "BASELINE",
    "VARIANTS",
    "DEFAULT_VARIANTS",
    "VariantSpec",
    "run_ablation",
    "AblationReport",
    "VariantResult",
    "render_report",
    "parse_report",
    "write_report",
    # Charts
    "ReadingGrid",
    "ColorScale",
    "mean_grids",
    "grids_to_json",
    "emit_heatmap_svg",
    "emit_prediction_scatter_svg",
    "emit_loss_curves_svg",
    # Config
    "RunConfig",
    "load_config",
]
