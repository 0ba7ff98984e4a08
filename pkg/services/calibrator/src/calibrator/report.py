"""
Ablation report document: data model, JSON and text renderings.

JSON is the canonical form (schema-versioned, sorted keys); the text table
is for terminals and diffs. Both have a fixed column order.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

from common import ModelFormatError, RenderError

logger = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1

ReportFormat = Literal["text", "json"]

STATUS_OK = "ok"
STATUS_DIVERGED = "diverged"


@dataclass
class VariantResult:
    """Outcome of one ablation variant. Metric fields are None when it diverged."""

    name: str
    config: dict[str, Any]
    status: str = STATUS_OK
    final_train_loss: float | None = None
    final_test_loss: float | None = None
    final_test_mse: float | None = None
    mae_c: float | None = None
    rmse_c: float | None = None
    min_test_loss: float | None = None
    min_test_epoch: int | None = None
    ratio_vs_baseline: float | None = None
    reference_factor: float | None = None
    history_path: str | None = None
    error: str | None = None

    def as_dict(self) -> dict[str, Any]:
        """Plain-dict form for JSON documents."""
        return {
            "name": self.name,
            "config": self.config,
            "status": self.status,
            "final_train_loss": self.final_train_loss,
            "final_test_loss": self.final_test_loss,
            "final_test_mse": self.final_test_mse,
            "mae_c": self.mae_c,
            "rmse_c": self.rmse_c,
            "min_test_loss": self.min_test_loss,
            "min_test_epoch": self.min_test_epoch,
            "ratio_vs_baseline": self.ratio_vs_baseline,
            "reference_factor": self.reference_factor,
            "history_path": self.history_path,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> VariantResult:
        """Inverse of as_dict."""
        return cls(**{key: data[key] for key in cls.__dataclass_fields__})


@dataclass
class AblationReport:
    """All variants of one ablation run plus shared run metadata."""

    dataset_hash: str
    split_hash: str
    train_size: int
    test_size: int
    seeds: dict[str, int]
    config_hash: str | None = None
    wall_time_s: float = 0.0
    variants: list[VariantResult] = field(default_factory=list)
    schema_version: int = REPORT_SCHEMA_VERSION

    def variant(self, name: str) -> VariantResult:
        """Look up a variant by name."""
        for result in self.variants:
            if result.name == name:
                return result
        raise KeyError(name)

    def as_dict(self) -> dict[str, Any]:
        """Plain-dict form for JSON documents."""
        return {
            "schema_version": self.schema_version,
            "dataset_hash": self.dataset_hash,
            "split_hash": self.split_hash,
            "train_size": self.train_size,
            "test_size": self.test_size,
            "seeds": dict(self.seeds),
            "config_hash": self.config_hash,
            "wall_time_s": self.wall_time_s,
            "loss_space": "normalized labels: (label_c - 37.5) / 10",
            "variants": [v.as_dict() for v in self.variants],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> AblationReport:
        """Inverse of as_dict."""
        if data.get("schema_version") != REPORT_SCHEMA_VERSION:
            raise ModelFormatError(
                f"Unsupported report schema_version {data.get('schema_version')!r}"
            )
        try:
            return cls(
                dataset_hash=data["dataset_hash"],
                split_hash=data["split_hash"],
                train_size=int(data["train_size"]),
                test_size=int(data["test_size"]),
                seeds={k: int(v) for k, v in data["seeds"].items()},
                config_hash=data["config_hash"],
                wall_time_s=float(data["wall_time_s"]),
                variants=[VariantResult.from_dict(v) for v in data["variants"]],
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ModelFormatError(f"Malformed ablation report: {e}") from e


# =============================================================================
# Rendering
# =============================================================================

_COLUMNS = (
    "variant",
    "status",
    "train_loss",
    "test_loss",
    "test_mse",
    "mae_c",
    "rmse_c",
    "ratio",
    "reference",
    "min_epoch",
)


def _fmt(value: float | int | None, spec: str) -> str:
    if value is None:
        return "-"
    return format(value, spec)


def _row(result: VariantResult) -> list[str]:
    return [
        result.name,
        result.status,
        _fmt(result.final_train_loss, ".4e"),
        _fmt(result.final_test_loss, ".4e"),
        _fmt(result.final_test_mse, ".4e"),
        _fmt(result.mae_c, ".4f"),
        _fmt(result.rmse_c, ".4f"),
        _fmt(result.ratio_vs_baseline, ".2f"),
        _fmt(result.reference_factor, "g"),
        _fmt(result.min_test_epoch, "d"),
    ]


def _render_text(report: AblationReport) -> str:
    rows = [list(_COLUMNS), *(_row(v) for v in report.variants)]
    widths = [max(len(row[i]) for row in rows) for i in range(len(_COLUMNS))]

    def line(cells: list[str]) -> str:
        # Names left-aligned, numbers right-aligned
        padded = [cells[0].ljust(widths[0]), cells[1].ljust(widths[1])]
        padded += [cell.rjust(width) for cell, width in zip(cells[2:], widths[2:], strict=True)]
        return "  ".join(padded).rstrip()

    out = [
        f"dataset {report.dataset_hash[:16]}  split {report.split_hash[:16]}  "
        f"train {report.train_size}  test {report.test_size}",
        line(rows[0]),
        "  ".join("-" * w for w in widths),
        *(line(row) for row in rows[1:]),
    ]
    return "\n".join(out) + "\n"


def render_report(report: AblationReport, fmt: ReportFormat = "json") -> str:
    """Render as 'json' (canonical) or 'text' (aligned table)."""
    if fmt == "json":
        return json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n"
    if fmt == "text":
        return _render_text(report)
    raise RenderError(f"Unknown report format {fmt!r}")


def parse_report(text: str) -> AblationReport:
    """Parse the JSON rendering."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"Report is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ModelFormatError("Report does not hold a JSON object")
    return AblationReport.from_dict(data)


def write_report(report: AblationReport, out_dir: Path) -> tuple[Path, Path]:
    """Write report.json and report.txt under out_dir."""
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "report.json"
    text_path = out_dir / "report.txt"
    json_path.write_text(render_report(report, "json"), encoding="utf-8")
    text_path.write_text(render_report(report, "text"), encoding="utf-8")
    logger.info(f"Wrote ablation report for {len(report.variants)} variant(s) to {json_path}")
    return json_path, text_path
