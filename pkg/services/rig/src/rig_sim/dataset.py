"""
Labeled reading-vector datasets: generation, CSV persistence, splitting,
subsampling, and component shuffling.

Labels are always the nominal hotplate setpoint, never the jittered plate
state the sensors actually saw.
"""

from __future__ import annotations

import csv
import hashlib
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import numpy.typing as npt

from common import CsvParseError, DatasetError, SplitError, SubsampleError, derive_rng
from common.seeding import STREAM_COMPONENT_SHUFFLE, STREAM_GENERATE, STREAM_SPLIT, STREAM_SUBSAMPLE

from .plate import PlateProfile, Protocol, staircase_setpoints
from .sensors import SENSOR_COUNT, ArraySpec, read_array
from .thermistor import ThermistorCoefficients

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
READING_DECIMALS = 4
CSV_HEADER = ["set_temp_c", *(f"s{i:02d}" for i in range(SENSOR_COUNT))]

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True)
class Sample:
    """One 32-component reading vector and its setpoint label."""

    readings: tuple[float, ...]
    label_c: float
    setpoint_index: int
    sample_index: int

    def __post_init__(self) -> None:
        if len(self.readings) != SENSOR_COUNT:
            raise DatasetError(
                f"Sample {self.sample_index} has {len(self.readings)} readings, "
                f"expected {SENSOR_COUNT}"
            )


@dataclass(frozen=True)
class Provenance:
    """Where a dataset came from."""

    kind: str  # "simulated" | "ingested" | "csv" | "derived"
    seed: int | None = None
    config_hash: str | None = None
    source: str | None = None


@dataclass(frozen=True)
class Dataset:
    """Ordered, immutable collection of samples."""

    samples: tuple[Sample, ...]
    provenance: Provenance = field(default_factory=lambda: Provenance(kind="derived"))
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        if not self.samples:
            raise DatasetError("Dataset must contain at least one sample")

    def __len__(self) -> int:
        return len(self.samples)

    @classmethod
    def from_rows(
        cls,
        labels: Sequence[float],
        readings: Sequence[Sequence[float]],
        provenance: Provenance | None = None,
    ) -> Dataset:
        """Build a dataset from row data, assigning indices.

        sample_index follows row order; setpoint_index is the label's rank
        among the distinct labels.
        """
        ranks = {label: i for i, label in enumerate(sorted(set(labels)))}
        samples = tuple(
            Sample(
                readings=tuple(float(v) for v in row),
                label_c=float(label),
                setpoint_index=ranks[label],
                sample_index=i,
            )
            for i, (label, row) in enumerate(zip(labels, readings, strict=True))
        )
        return cls(samples=samples, provenance=provenance or Provenance(kind="derived"))

    def features(self, columns: Sequence[int] | None = None) -> FloatArray:
        """Readings as an (n, d) matrix, optionally restricted to some columns."""
        matrix = np.array([s.readings for s in self.samples], dtype=np.float64)
        if columns is not None:
            matrix = matrix[:, list(columns)]
        return matrix

    def labels(self) -> FloatArray:
        """Setpoint labels as a length-n vector."""
        return np.array([s.label_c for s in self.samples], dtype=np.float64)

    def setpoints(self) -> list[float]:
        """Distinct labels in ascending order."""
        return sorted({s.label_c for s in self.samples})

    def with_samples(self, samples: Iterable[Sample]) -> Dataset:
        """Derived dataset sharing this one's provenance."""
        return replace(self, samples=tuple(samples))


# =============================================================================
# Generation
# =============================================================================


def generate(
    array: ArraySpec,
    profile: PlateProfile,
    protocol: Protocol,
    coeffs: ThermistorCoefficients,
    seed: int,
    config_hash: str | None = None,
) -> Dataset:
    """Simulate the staircase protocol over the array.

    Each sample draws from its own stream keyed by (seed, sample_index), so
    the output does not depend on generation order.
    """
    profile.validate_for(protocol)
    setpoints = staircase_setpoints(protocol)

    samples: list[Sample] = []
    for setpoint_index, set_c in enumerate(setpoints):
        for _ in range(protocol.samples_per_setpoint):
            sample_index = len(samples)
            rng = derive_rng(seed, STREAM_GENERATE, sample_index)
            readings = read_array(array, profile, set_c, coeffs, rng, protocol.set_accuracy_c)
            samples.append(
                Sample(
                    readings=tuple(round(v, READING_DECIMALS) for v in readings),
                    label_c=set_c,
                    setpoint_index=setpoint_index,
                    sample_index=sample_index,
                )
            )

    logger.info(
        f"Generated {len(samples)} samples over {len(setpoints)} setpoints "
        f"({setpoints[0]}..{setpoints[-1]} degC, seed={seed})"
    )
    return Dataset(
        samples=tuple(samples),
        provenance=Provenance(kind="simulated", seed=seed, config_hash=config_hash),
    )


# =============================================================================
# CSV persistence
# =============================================================================


def _format_value(value: float) -> str:
    return f"{value:.{READING_DECIMALS}f}"


def dataset_to_csv_text(ds: Dataset) -> str:
    """Render the dataset as CSV text (header plus one row per sample, LF endings)."""
    lines = [",".join(CSV_HEADER)]
    for sample in ds.samples:
        lines.append(",".join(_format_value(v) for v in (sample.label_c, *sample.readings)))
    return "\n".join(lines) + "\n"


def write_csv(ds: Dataset, destination: Path) -> Path:
    """Write the dataset to destination as UTF-8 CSV."""
    destination.parent.mkdir(parents=True, exist_ok=True)
    with destination.open("w", encoding="utf-8", newline="") as handle:
        handle.write(dataset_to_csv_text(ds))
    logger.info(f"Wrote {len(ds)} samples to {destination}")
    return destination


def dataset_hash(ds: Dataset) -> str:
    """SHA-256 of the dataset's CSV rendering."""
    return hashlib.sha256(dataset_to_csv_text(ds).encode("utf-8")).hexdigest()


def parse_csv_lines(lines: Iterable[str], source: str = "<memory>") -> Dataset:
    """Parse dataset CSV lines (header first).

    Raises:
        CsvParseError: On a bad header, wrong arity, or non-numeric field.
        DatasetError: If there are no sample rows.
    """
    labels: list[float] = []
    rows: list[list[float]] = []
    for line_number, fields in enumerate(csv.reader(lines), start=1):
        if line_number == 1:
            if fields != CSV_HEADER:
                raise CsvParseError("unexpected header", line=line_number)
            continue
        if not fields:
            continue
        if len(fields) != len(CSV_HEADER):
            raise CsvParseError(
                f"expected {len(CSV_HEADER)} fields, got {len(fields)}", line=line_number
            )
        try:
            values = [float(v) for v in fields]
        except ValueError as e:
            raise CsvParseError(f"non-numeric field: {e}", line=line_number) from e
        labels.append(values[0])
        rows.append(values[1:])

    if not rows:
        raise DatasetError(f"{source} contains no samples")
    return Dataset.from_rows(labels, rows, Provenance(kind="csv", source=source))


def read_csv(source: Path) -> Dataset:
    """Read a dataset CSV written by write_csv."""
    with source.open(encoding="utf-8", newline="") as handle:
        return parse_csv_lines(handle, source=str(source))


# =============================================================================
# Splitting, subsampling, shuffling
# =============================================================================


def split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded random train/test partition.

    The first floor(n * train_fraction) entries of a seeded permutation go
    to train. Each side keeps the original sample order.

    Raises:
        SplitError: If the fraction is outside (0, 1) or a side would be empty.
    """
    if not 0 < train_fraction < 1:
        raise SplitError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = len(ds)
    n_train = int(np.floor(n * train_fraction))
    if n_train == 0 or n_train == n:
        raise SplitError(f"Split of {n} samples at {train_fraction} leaves an empty side")

    order = derive_rng(seed, STREAM_SPLIT).permutation(n)
    train_idx = np.sort(order[:n_train])
    test_idx = np.sort(order[n_train:])
    train = ds.with_samples(ds.samples[i] for i in train_idx)
    test = ds.with_samples(ds.samples[i] for i in test_idx)
    return train, test


def split_hash(train: Dataset, test: Dataset) -> str:
    """Fingerprint of a partition by sample indices."""
    text = ",".join(str(s.sample_index) for s in train.samples)
    text += "|" + ",".join(str(s.sample_index) for s in test.samples)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def shuffle_components(ds: Dataset, seed: int) -> Dataset:
    """Permute each vector's readings independently, destroying the spatial map.

    Permutations are keyed by (seed, sample_index), so a sample shuffles the
    same way whichever dataset (or split side) it appears in.
    """
    shuffled: list[Sample] = []
    for sample in ds.samples:
        perm = derive_rng(seed, STREAM_COMPONENT_SHUFFLE, sample.sample_index).permutation(
            SENSOR_COUNT
        )
        shuffled.append(replace(sample, readings=tuple(sample.readings[i] for i in perm)))
    return ds.with_samples(shuffled)


def subsample_per_setpoint(ds: Dataset, n: int, seed: int) -> Dataset:
    """Keep n uniformly chosen samples per setpoint (without replacement).

    Order is preserved within each setpoint and samples are reindexed.

    Raises:
        SubsampleError: If a setpoint holds fewer than n samples.
    """
    if n < 1:
        raise SubsampleError(f"Subsample size must be at least 1, got {n}", setpoint_c=float("nan"))

    groups: dict[float, list[Sample]] = {}
    for sample in ds.samples:
        groups.setdefault(sample.label_c, []).append(sample)

    kept: list[Sample] = []
    for setpoint_index, label in enumerate(sorted(groups)):
        members = groups[label]
        if len(members) < n:
            raise SubsampleError(
                f"Setpoint {label} degC has {len(members)} samples, {n} requested",
                setpoint_c=label,
            )
        rng = derive_rng(seed, STREAM_SUBSAMPLE, setpoint_index)
        chosen = np.sort(rng.choice(len(members), size=n, replace=False))
        kept.extend(members[i] for i in chosen)

    # Reindex so the result satisfies the CSV index conventions
    kept.sort(key=lambda s: (s.label_c, s.sample_index))
    ranks = {label: i for i, label in enumerate(sorted(groups))}
    reindexed = [
        replace(s, setpoint_index=ranks[s.label_c], sample_index=i) for i, s in enumerate(kept)
    ]
    logger.info(f"Subsampled {len(ds)} -> {len(reindexed)} samples ({n} per setpoint)")
    return ds.with_samples(reindexed)
