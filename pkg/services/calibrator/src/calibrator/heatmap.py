"""
Per-setpoint reading grids and SVG charts.

No plotting library: documents are assembled from strings with fixed
number formatting, so equal inputs always give byte-identical output.

Charts:
    emit_heatmap_svg              one 4x8 panel per setpoint, linear two-color ramp
    emit_prediction_scatter_svg   readings, reading means, prediction means vs set temperature
    emit_loss_curves_svg          per-epoch train/test losses, optional log10 axis
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from common import RenderError
from rig_sim.dataset import Dataset
from rig_sim.sensors import COLS, ROWS, ArraySpec

from .training import TrainHistory

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

LOG_FLOOR = 1e-12

# Palette
BG = "#ffffff"
FG = "#222222"
GRID = "#dddddd"
MUTED = "#888888"
COLD = "#2c7bb6"
HOT = "#d7191c"
SERIES_COLORS = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
    "#393b79",
    "#637939",
)


def _escape(text: str) -> str:
    """Escape XML special characters."""
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def _svg_open(width: int, height: int) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="{BG}"/>',
    ]


def _text(x: float, y: float, content: str, size: int = 11, anchor: str = "start") -> str:
    return (
        f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" font-size="{size}" '
        f'text-anchor="{anchor}" fill="{FG}">{_escape(content)}</text>'
    )


# =============================================================================
# Reading grids
# =============================================================================


@dataclass(frozen=True)
class ReadingGrid:
    """Mean reading per grid cell at one setpoint."""

    setpoint_c: float
    values: tuple[tuple[float, ...], ...]
    sample_count: int

    def __post_init__(self) -> None:
        if not self.values or not self.values[0]:
            raise RenderError("ReadingGrid needs at least one cell")
        if len({len(row) for row in self.values}) != 1:
            raise RenderError("ReadingGrid rows must have equal length")
        if self.sample_count < 1:
            raise RenderError(f"sample_count must be >= 1, got {self.sample_count}")

    @property
    def shape(self) -> tuple[int, int]:
        """(rows, cols)."""
        return len(self.values), len(self.values[0])

    def as_dict(self) -> dict[str, object]:
        """Companion JSON form."""
        rows, cols = self.shape
        return {
            "setpoint": self.setpoint_c,
            "rows": rows,
            "cols": cols,
            "sample_count": self.sample_count,
            "values": [list(row) for row in self.values],
        }


def mean_grids(ds: Dataset, array: ArraySpec) -> list[ReadingGrid]:
    """One 4x8 grid of mean readings per setpoint, ascending."""
    x = ds.features()
    labels = ds.labels()
    grids: list[ReadingGrid] = []
    for setpoint in ds.setpoints():
        mask = labels == setpoint
        means = x[mask].mean(axis=0)
        cells = [[0.0] * COLS for _ in range(ROWS)]
        for sensor in array.sensors:
            cells[sensor.position.row - 1][sensor.position.col - 1] = float(means[sensor.id])
        grids.append(
            ReadingGrid(
                setpoint_c=setpoint,
                values=tuple(tuple(row) for row in cells),
                sample_count=int(mask.sum()),
            )
        )
    return grids


def grids_to_json(grids: Sequence[ReadingGrid]) -> str:
    """Companion JSON for downstream tooling."""
    return json.dumps([g.as_dict() for g in grids], indent=2, sort_keys=True) + "\n"


# =============================================================================
# Heatmap
# =============================================================================


@dataclass(frozen=True)
class ColorScale:
    """Linear ramp from low_color (minimum) to high_color (maximum)."""

    low_color: str = COLD
    high_color: str = HOT

    @staticmethod
    def _rgb(color: str) -> tuple[int, int, int]:
        value = color.lstrip("#")
        if len(value) != 6:
            raise RenderError(f"Colors must be #rrggbb, got {color!r}")
        return int(value[0:2], 16), int(value[2:4], 16), int(value[4:6], 16)

    def color(self, value: float, vmin: float, vmax: float) -> str:
        """Interpolated #rrggbb for value within [vmin, vmax]."""
        t = 0.5 if vmax <= vmin else min(max((value - vmin) / (vmax - vmin), 0.0), 1.0)
        lo = self._rgb(self.low_color)
        hi = self._rgb(self.high_color)
        r, g, b = (round(a + (c - a) * t) for a, c in zip(lo, hi, strict=True))
        return f"#{r:02x}{g:02x}{b:02x}"


def emit_heatmap_svg(
    grids: Sequence[ReadingGrid],
    scale: ColorScale | None = None,
    panels_per_row: int = 4,
    cell_px: int = 22,
) -> str:
    """Heatmap panels on one shared color scale with a numeric legend."""
    if not grids:
        raise RenderError("Heatmap needs at least one grid")
    scale = scale or ColorScale()

    all_values = [v for g in grids for row in g.values for v in row]
    vmin, vmax = min(all_values), max(all_values)

    rows, cols = grids[0].shape
    panel_w = cols * cell_px + 16
    panel_h = rows * cell_px + 30
    n_across = min(panels_per_row, len(grids))
    n_down = math.ceil(len(grids) / n_across)
    legend_h = 60
    width = max(n_across * panel_w + 20, 320)
    height = n_down * panel_h + legend_h + 20

    parts = _svg_open(width, height)
    for i, grid in enumerate(grids):
        ox = 10 + (i % n_across) * panel_w
        oy = 10 + (i // n_across) * panel_h
        parts.append(f'<g class="panel" transform="translate({ox},{oy})">')
        parts.append(_text(0, 12, f"set {grid.setpoint_c:g} degC (n={grid.sample_count})", 11))
        for r, row in enumerate(grid.values):
            for c, value in enumerate(row):
                parts.append(
                    f'<rect class="cell" x="{c * cell_px}" y="{18 + r * cell_px}" '
                    f'width="{cell_px}" height="{cell_px}" '
                    f'fill="{scale.color(value, vmin, vmax)}"><title>{value:.3f}</title></rect>'
                )
        parts.append("</g>")

    # Legend: gradient bar with min / mid / max ticks
    ly = n_down * panel_h + 20
    bar_w = 240
    parts.append('<g class="legend">')
    parts.append(
        '<defs><linearGradient id="ramp" x1="0" x2="1" y1="0" y2="0">'
        f'<stop offset="0" stop-color="{scale.low_color}"/>'
        f'<stop offset="1" stop-color="{scale.high_color}"/></linearGradient></defs>'
    )
    parts.append(f'<rect x="10" y="{ly}" width="{bar_w}" height="12" fill="url(#ramp)"/>')
    for frac in (0.0, 0.5, 1.0):
        value = vmin + (vmax - vmin) * frac
        parts.append(_text(10 + bar_w * frac, ly + 28, f"{value:.2f}", 10, "middle"))
    parts.append(_text(10, ly + 46, "mean reading (degC), linear scale", 10))
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# =============================================================================
# Line/scatter plumbing
# =============================================================================


@dataclass(frozen=True)
class _Axes:
    left: float
    top: float
    width: float
    height: float
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def px(self, x: float) -> float:
        return self.left + (x - self.x_min) / (self.x_max - self.x_min) * self.width

    def py(self, y: float) -> float:
        return self.top + self.height - (y - self.y_min) / (self.y_max - self.y_min) * self.height


def _padded_range(values: Sequence[float], pad_fraction: float = 0.05) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if hi <= lo:
        return lo - 0.5, hi + 0.5
    pad = (hi - lo) * pad_fraction
    return lo - pad, hi + pad


def _frame(axes: _Axes, x_label: str, y_label: str, y_tick_fmt: str) -> list[str]:
    parts = [
        f'<rect x="{axes.left:.2f}" y="{axes.top:.2f}" width="{axes.width:.2f}" '
        f'height="{axes.height:.2f}" fill="none" stroke="{MUTED}"/>'
    ]
    for i in range(5):
        frac = i / 4
        y_val = axes.y_min + (axes.y_max - axes.y_min) * frac
        y = axes.py(y_val)
        parts.append(
            f'<line x1="{axes.left:.2f}" y1="{y:.2f}" x2="{axes.left + axes.width:.2f}" '
            f'y2="{y:.2f}" stroke="{GRID}"/>'
        )
        parts.append(_text(axes.left - 6, y + 4, format(y_val, y_tick_fmt), 10, "end"))
        x_val = axes.x_min + (axes.x_max - axes.x_min) * frac
        parts.append(
            _text(axes.px(x_val), axes.top + axes.height + 16, f"{x_val:.1f}", 10, "middle")
        )
    parts.append(
        _text(axes.left + axes.width / 2, axes.top + axes.height + 34, x_label, 11, "middle")
    )
    parts.append(_text(12, axes.top - 10, y_label, 11))
    return parts


def _polyline(
    points: Sequence[tuple[float, float]], color: str, css: str, dashed: bool, label: str
) -> str:
    coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    dash = ' stroke-dasharray="6 4"' if dashed else ""
    return (
        f'<polyline class="{css}" data-series="{_escape(label)}" points="{coords}" '
        f'fill="none" stroke="{color}" stroke-width="1.5"{dash}/>'
    )


def _legend(entries: Sequence[tuple[str, str]], x: float, y: float) -> list[str]:
    parts = ['<g class="legend">']
    for i, (label, color) in enumerate(entries):
        ey = y + i * 16
        parts.append(f'<rect x="{x:.2f}" y="{ey - 9:.2f}" width="10" height="10" fill="{color}"/>')
        parts.append(_text(x + 14, ey, label, 10))
    parts.append("</g>")
    return parts


# =============================================================================
# Prediction scatter
# =============================================================================


def emit_prediction_scatter_svg(
    test: Dataset,
    predictions_c: FloatArray | Sequence[float],
    width: int = 640,
    height: int = 440,
) -> str:
    """Set temperature vs raw readings, reading means, and prediction means.

    The dashed identity line marks a perfect calibration.

    Raises:
        RenderError: If predictions are empty or not aligned with the samples.
    """
    predictions = np.asarray(predictions_c, dtype=np.float64).reshape(-1)
    if predictions.size == 0:
        raise RenderError("No predictions to plot")
    if predictions.size != len(test):
        raise RenderError(f"{predictions.size} predictions for {len(test)} samples")

    x = test.features()
    labels = test.labels()
    setpoints = test.setpoints()
    reading_means = [float(x[labels == t].mean()) for t in setpoints]
    prediction_means = [float(predictions[labels == t].mean()) for t in setpoints]

    y_values = [float(x.min()), float(x.max()), float(predictions.min()), float(predictions.max())]
    y_values += [setpoints[0], setpoints[-1]]
    y_lo, y_hi = _padded_range(y_values)
    x_lo, x_hi = _padded_range(setpoints)
    axes = _Axes(70, 40, width - 250, height - 100, x_lo, x_hi, y_lo, y_hi)

    parts = _svg_open(width, height)
    parts += _frame(axes, "set temperature (degC)", "temperature (degC)", ".1f")

    lo, hi = max(x_lo, y_lo), min(x_hi, y_hi)
    parts.append(
        f'<line class="identity" x1="{axes.px(lo):.2f}" y1="{axes.py(lo):.2f}" '
        f'x2="{axes.px(hi):.2f}" y2="{axes.py(hi):.2f}" stroke="{COLD}" '
        f'stroke-dasharray="6 4"/>'
    )

    # Raw readings: every sensor of every sample
    for label, row in zip(labels, x, strict=True):
        cx = axes.px(float(label))
        for value in row:
            parts.append(
                f'<circle class="reading" cx="{cx:.2f}" cy="{axes.py(float(value)):.2f}" '
                f'r="1.5" fill="{MUTED}" fill-opacity="0.35"/>'
            )
    for setpoint, mean in zip(setpoints, reading_means, strict=True):
        parts.append(
            f'<circle class="reading-mean" cx="{axes.px(setpoint):.2f}" '
            f'cy="{axes.py(mean):.2f}" r="4" fill="{SERIES_COLORS[1]}"/>'
        )
    for setpoint, mean in zip(setpoints, prediction_means, strict=True):
        parts.append(
            f'<circle class="prediction-mean" cx="{axes.px(setpoint):.2f}" '
            f'cy="{axes.py(mean):.2f}" r="4" fill="{SERIES_COLORS[2]}"/>'
        )

    parts += _legend(
        [
            ("sensor readings", MUTED),
            ("mean reading per setpoint", SERIES_COLORS[1]),
            ("mean prediction per setpoint", SERIES_COLORS[2]),
            ("target (identity)", COLD),
        ],
        axes.left + axes.width + 16,
        axes.top + 10,
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# =============================================================================
# Loss curves
# =============================================================================


def emit_loss_curves_svg(
    histories: Mapping[str, TrainHistory],
    log_scale: bool = True,
    width: int = 720,
    height: int = 440,
) -> str:
    """Train (solid) and test (dashed) loss per epoch for each named history.

    With log_scale, losses at or below zero are clamped to LOG_FLOOR and the
    legend says so.

    Raises:
        RenderError: If there is no history or a history is empty.
    """
    if not histories:
        raise RenderError("No histories to plot")
    if any(len(h) == 0 for h in histories.values()):
        raise RenderError("Histories must hold at least one epoch")

    clamped = False

    def transform(values: Sequence[float]) -> list[float]:
        nonlocal clamped
        if not log_scale:
            return list(values)
        out = []
        for v in values:
            if v <= LOG_FLOOR:
                clamped = True
            out.append(math.log10(max(v, LOG_FLOOR)))
        return out

    curves: list[tuple[str, str, bool, list[float]]] = []
    for i, (name, history) in enumerate(histories.items()):
        color = SERIES_COLORS[i % len(SERIES_COLORS)]
        curves.append((f"{name} train", color, False, transform(history.train_loss)))
        curves.append((f"{name} test", color, True, transform(history.test_loss)))
    if clamped:
        logger.warning(f"Loss values at or below {LOG_FLOOR:g} clamped for the log axis")

    max_epochs = max(len(h) for h in histories.values())
    y_lo, y_hi = _padded_range([v for *_, values in curves for v in values])
    x_hi = float(max_epochs) if max_epochs > 1 else 2.0
    axes = _Axes(70, 40, width - 260, height - 100, 1.0, x_hi, y_lo, y_hi)

    parts = _svg_open(width, height)
    y_label = "log10 loss (normalized)" if log_scale else "loss (normalized)"
    parts += _frame(axes, "epoch", y_label, ".2f")
    for label, color, dashed, values in curves:
        points = [(axes.px(float(epoch)), axes.py(v)) for epoch, v in enumerate(values, start=1)]
        css = "test" if dashed else "train"
        parts.append(_polyline(points, color, css, dashed, label))

    entries = [(name, SERIES_COLORS[i % len(SERIES_COLORS)]) for i, name in enumerate(histories)]
    parts += _legend(entries, axes.left + axes.width + 16, axes.top + 10)
    notes_y = axes.top + 10 + len(entries) * 16 + 10
    parts.append(_text(axes.left + axes.width + 16, notes_y, "solid: train, dashed: test", 10))
    if clamped:
        parts.append(
            _text(axes.left + axes.width + 16, notes_y + 16, f"values <= {LOG_FLOOR:g} clamped", 10)
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
