"""
thermoarray command-line entry point.

Subcommands:
    simulate            generate the staircase dataset from the run config
    ingest LOG          turn a logger serial capture into a dataset
    train DATASET       fit the baseline network and score it
    ablate DATASET      run the ablation variants and write the report
    heatmap DATASET     per-setpoint reading heatmaps

ablate draws one loss-curve SVG per trained variant plus a combined
loss_curves.svg; diverged variants have neither history nor chart.

Every subcommand writes its artifacts plus the resolved run_config.json
under the output directory and prints each artifact path on stdout. Logs go
to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from common import EXIT_OK, cli_error_handler
from rig_sim.dataset import (
    dataset_hash,
    generate,
    read_csv,
    split,
    split_hash,
    subsample_per_setpoint,
    write_csv,
)
from rig_sim.serial_log import ingest_serial_log

from .ablation import run_ablation
from .heatmap import (
    emit_heatmap_svg,
    emit_loss_curves_svg,
    emit_prediction_scatter_svg,
    grids_to_json,
    mean_grids,
)
from .persistence import save_model
from .report import write_report
from .run_config import ProcessSettings, RunConfig, load_config, write_sidecar
from .training import REFERENCE_ACCURACY_C, evaluate, reference_metrics, train

logger = logging.getLogger(__name__)

DATASET_FILE = "dataset.csv"
MODEL_FILE = "model.json"
METRICS_FILE = "metrics.json"
SCATTER_FILE = "predictions.svg"
LOSS_CURVES_FILE = "loss_curves.svg"
LOSS_CURVES_VARIANT_FILE = "loss_curves_{variant}.svg"
HEATMAP_FILE = "heatmap.svg"
HEATMAP_JSON_FILE = "heatmap.json"


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config) if args.config is not None else RunConfig.default()
    if args.seed_override is not None:
        config = config.with_seed_override(args.seed_override)
        logger.info(f"All seeds overridden with {args.seed_override}")
    return config


def _out_dir(args: argparse.Namespace, config: RunConfig) -> Path:
    out = args.out if args.out is not None else Path(config.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_text(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


def _emit(paths: Sequence[Path]) -> None:
    for path in paths:
        print(path)


# =============================================================================
# Subcommands
# =============================================================================


@cli_error_handler
def cmd_simulate(args: argparse.Namespace) -> int:
    """Generate a labeled dataset from the configured rig."""
    config = _resolve_config(args)
    out = _out_dir(args, config)
    ds = generate(
        config.array.build(),
        config.plate.profile(),
        config.plate.protocol(),
        config.thermistor.coefficients(),
        seed=config.dataset.seed,
        config_hash=config.config_hash(),
    )
    _emit([write_csv(ds, out / DATASET_FILE), write_sidecar(config, out)])
    return EXIT_OK


@cli_error_handler
def cmd_ingest(args: argparse.Namespace) -> int:
    """Convert a serial capture into a dataset, optionally subsampled."""
    config = _resolve_config(args)
    out = _out_dir(args, config)
    result = ingest_serial_log(args.log, config.dataset.window_ms)
    ds = result.dataset
    if config.dataset.subsample_per_setpoint is not None:
        ds = subsample_per_setpoint(
            ds, config.dataset.subsample_per_setpoint, config.dataset.subsample_seed
        )
    logger.info(
        f"Ingested {len(ds)} samples from {args.log} "
        f"({result.dropped_frames} incomplete frame(s) dropped, {result.lines_read} lines)"
    )
    _emit([write_csv(ds, out / DATASET_FILE), write_sidecar(config, out)])
    return EXIT_OK


@cli_error_handler
def cmd_train(args: argparse.Namespace) -> int:
    """Train the baseline network and write model, metrics and charts."""
    config = _resolve_config(args)
    out = _out_dir(args, config)
    ds = read_csv(args.dataset)
    train_ds, test_ds = split(ds, config.dataset.train_fraction, config.dataset.split_seed)

    model, history = train(
        train_ds, test_ds, config.train.architecture(), config.train.train_config()
    )
    metrics = evaluate(model, test_ds)
    references = reference_metrics(test_ds)
    logger.info(
        f"Test MAE {metrics.mae_c:.4f} degC, RMSE {metrics.rmse_c:.4f} degC "
        f"(array mean MAE {references.array_mean_mae_c:.4f} degC)"
    )

    metrics_doc = {
        "config_hash": config.config_hash(),
        "dataset_hash": dataset_hash(ds),
        "split_hash": split_hash(train_ds, test_ds),
        "train_size": len(train_ds),
        "test_size": len(test_ds),
        "metrics": metrics.as_dict(),
        "reference_predictors": references.as_dict(),
        "reference_accuracy_c": REFERENCE_ACCURACY_C,
    }
    predictions = model.predict_celsius(test_ds.features())
    paths = [
        save_model(model, out / MODEL_FILE),
        _write_text(out / METRICS_FILE, json.dumps(metrics_doc, indent=2, sort_keys=True) + "\n"),
        _write_text(
            out / "history_baseline.json",
            json.dumps(history.as_dict(), indent=2, sort_keys=True) + "\n",
        ),
        _write_text(out / SCATTER_FILE, emit_prediction_scatter_svg(test_ds, predictions)),
        _write_text(out / LOSS_CURVES_FILE, emit_loss_curves_svg({"baseline": history})),
        write_sidecar(config, out),
    ]
    _emit(paths)
    return EXIT_OK


@cli_error_handler
def cmd_ablate(args: argparse.Namespace) -> int:
    """Run the configured ablation variants on one shared split."""
    config = _resolve_config(args)
    out = _out_dir(args, config)
    ds = read_csv(args.dataset)

    report, histories = run_ablation(
        ds,
        config.ablation.variants,
        arch=config.train.architecture(),
        config=config.train.train_config(),
        train_fraction=config.dataset.train_fraction,
        split_seed=config.dataset.split_seed,
        shuffle_seed=config.ablation.shuffle_seed,
        history_dir=out,
        config_hash=config.config_hash(),
    )
    json_path, text_path = write_report(report, out)
    paths = [json_path, text_path]
    paths += [Path(v.history_path) for v in report.variants if v.history_path is not None]
    if histories:
        paths.append(_write_text(out / LOSS_CURVES_FILE, emit_loss_curves_svg(histories)))
    for name, history in histories.items():
        svg = emit_loss_curves_svg({name: history})
        paths.append(_write_text(out / LOSS_CURVES_VARIANT_FILE.format(variant=name), svg))
    paths.append(write_sidecar(config, out))
    _emit(paths)
    return EXIT_OK


@cli_error_handler
def cmd_heatmap(args: argparse.Namespace) -> int:
    """Mean reading per sensor position, one panel per setpoint."""
    config = _resolve_config(args)
    out = _out_dir(args, config)
    grids = mean_grids(read_csv(args.dataset), config.array.build())
    _emit(
        [
            _write_text(out / HEATMAP_FILE, emit_heatmap_svg(grids)),
            _write_text(out / HEATMAP_JSON_FILE, grids_to_json(grids)),
            write_sidecar(config, out),
        ]
    )
    return EXIT_OK


# =============================================================================
# Parser
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with global flags and one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="thermoarray",
        description="Sensor-array hotplate simulation and neural calibration",
        allow_abbrev=False,
    )
    parser.add_argument("--config", type=Path, default=None, help="run config JSON document")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument(
        "--seed-override", type=int, default=None, help="replace every seed in the config"
    )
    parser.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="overrides THERMOARRAY_LOG_LEVEL",
    )

    sub = parser.add_subparsers(dest="command", required=True)
    handlers: dict[str, Callable[[argparse.Namespace], int]] = {}

    sub.add_parser("simulate", help="generate a dataset CSV")
    handlers["simulate"] = cmd_simulate

    ingest = sub.add_parser("ingest", help="convert a serial log into a dataset CSV")
    ingest.add_argument("log", type=Path)
    handlers["ingest"] = cmd_ingest

    for name, handler, help_text in (
        ("train", cmd_train, "train the baseline network"),
        ("ablate", cmd_ablate, "run the ablation variants"),
        ("heatmap", cmd_heatmap, "render per-setpoint reading heatmaps"),
    ):
        command = sub.add_parser(name, help=help_text)
        command.add_argument("dataset", type=Path)
        handlers[name] = handler

    parser.set_defaults(handlers=handlers)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, configure logging, run one subcommand."""
    args = build_parser().parse_args(argv)
    level = args.log_level or ProcessSettings().log_level
    logging.basicConfig(
        level=level.upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    handler: Callable[[argparse.Namespace], int] = args.handlers[args.command]
    return handler(args)
