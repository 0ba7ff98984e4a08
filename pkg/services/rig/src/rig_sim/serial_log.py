"""
Parser for the rig's serial log.

The logger prints one reading per line plus setpoint markers:

    # SET 37
    1700000000000,S00,36.8125
    1700000000012,S01,36.9375
    ...

Readings are grouped into frames: one reading from every sensor inside a
1.5 s window. Complete frames become samples labeled with the active
setpoint; incomplete frames are dropped and counted.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

from common import IngestError

from .dataset import Dataset, Provenance
from .sensors import SENSOR_COUNT

logger = logging.getLogger(__name__)

DEFAULT_FRAME_WINDOW_MS = 1500

# Matches: "1700000000000,S07,36.8125"
READING_PATTERN = re.compile(r"^\s*(\d+)\s*,\s*S(\d{2})\s*,\s*([+-]?\d+(?:\.\d*)?|[+-]?\.\d+)\s*$")

# Matches: "# SET 37" / "# SET 37.5"
SETPOINT_PATTERN = re.compile(r"^\s*#\s*SET\s+([+-]?\d+(?:\.\d*)?)\s*$")


@dataclass
class IngestResult:
    """Samples recovered from a log plus bookkeeping."""

    dataset: Dataset
    dropped_frames: int
    lines_read: int


@dataclass
class _Frame:
    opened_ms: int
    readings: dict[int, float]


def parse_serial_log(
    lines: Iterable[str],
    window_ms: int = DEFAULT_FRAME_WINDOW_MS,
    source: str = "<memory>",
) -> IngestResult:
    """
    Group serial-log lines into labeled 32-sensor frames.

    Args:
        lines: Log lines (with or without trailing newlines).
        window_ms: Maximum span of one frame.
        source: Name recorded in the dataset provenance.

    Returns:
        IngestResult with one sample per complete frame.

    Raises:
        IngestError: On malformed lines, unknown sensor ids, readings before
            the first SET marker, or a log with no complete frame.
    """
    labels: list[float] = []
    rows: list[list[float]] = []
    dropped = 0
    setpoint: float | None = None
    frame: _Frame | None = None
    line_number = 0

    def close_frame() -> None:
        nonlocal frame, dropped
        if frame is None:
            return
        if len(frame.readings) == SENSOR_COUNT:
            assert setpoint is not None
            labels.append(setpoint)
            rows.append([frame.readings[i] for i in range(SENSOR_COUNT)])
        else:
            dropped += 1
            missing = sorted(set(range(SENSOR_COUNT)) - set(frame.readings))
            logger.debug(
                f"Dropping incomplete frame opened at {frame.opened_ms} ms "
                f"(missing {len(missing)} sensor(s), first S{missing[0]:02d})"
            )
        frame = None

    for line_number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue

        marker = SETPOINT_PATTERN.match(line)
        if marker:
            close_frame()
            setpoint = float(marker.group(1))
            continue
        if line.startswith("#"):
            continue

        match = READING_PATTERN.match(line)
        if not match:
            raise IngestError(f"malformed line {line!r}", line=line_number)

        timestamp_ms = int(match.group(1))
        sensor_id = int(match.group(2))
        reading_c = float(match.group(3))

        if sensor_id >= SENSOR_COUNT:
            raise IngestError(f"unknown sensor id S{sensor_id:02d}", line=line_number)
        if setpoint is None:
            raise IngestError("reading before any SET marker", line=line_number)

        if frame is not None and (
            sensor_id in frame.readings or timestamp_ms - frame.opened_ms >= window_ms
        ):
            close_frame()
        if frame is None:
            frame = _Frame(opened_ms=timestamp_ms, readings={})
        frame.readings[sensor_id] = reading_c
        if len(frame.readings) == SENSOR_COUNT:
            close_frame()

    close_frame()

    if not rows:
        raise IngestError(
            f"no complete {SENSOR_COUNT}-sensor frame in {line_number} line(s) "
            f"({dropped} incomplete frame(s) dropped)"
        )

    logger.info(f"Ingested {len(rows)} frames from {source}, dropped {dropped} incomplete")
    dataset = Dataset.from_rows(labels, rows, Provenance(kind="ingested", source=source))
    return IngestResult(dataset=dataset, dropped_frames=dropped, lines_read=line_number)


def ingest_serial_log(source: Path, window_ms: int = DEFAULT_FRAME_WINDOW_MS) -> IngestResult:
    """Read and parse a serial log file."""
    with source.open(encoding="utf-8") as handle:
        return parse_serial_log(handle, window_ms=window_ms, source=str(source))
