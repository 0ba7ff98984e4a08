"""Tests for dataset generation, CSV persistence, and the split/shuffle tools."""

from collections import Counter
from pathlib import Path

import numpy as np
import pytest

from common import ConfigError, CsvParseError, DatasetError, SplitError, SubsampleError
from rig_sim.dataset import (
    CSV_HEADER,
    Dataset,
    Sample,
    dataset_hash,
    dataset_to_csv_text,
    generate,
    parse_csv_lines,
    read_csv,
    shuffle_components,
    split,
    split_hash,
    subsample_per_setpoint,
    write_csv,
)
from rig_sim.plate import PlateProfile, Protocol
from rig_sim.sensors import SENSOR_COUNT, ArraySpec
from rig_sim.thermistor import ThermistorCoefficients

PROPERTY_CASES = 1000


def _random_dataset(rng: np.random.Generator, n: int) -> Dataset:
    labels = [float(rng.integers(30, 46)) for _ in range(n)]
    rows = [[round(float(v), 4) for v in rng.uniform(20.0, 50.0, SENSOR_COUNT)] for _ in range(n)]
    return Dataset.from_rows(labels, rows)


class TestGenerate:
    """Tests for simulated datasets."""

    def test_default_shape(self, default_dataset: Dataset) -> None:
        """16 setpoints x 50 vectors."""
        assert len(default_dataset) == 800
        assert default_dataset.setpoints() == [float(t) for t in range(30, 46)]
        assert Counter(s.label_c for s in default_dataset.samples) == {
            float(t): 50 for t in range(30, 46)
        }

    def test_indices(self, default_dataset: Dataset) -> None:
        """sample_index follows order; setpoint_index follows label rank."""
        for i, sample in enumerate(default_dataset.samples):
            assert sample.sample_index == i
            assert sample.setpoint_index == int(sample.label_c) - 30

    def test_provenance(self, default_dataset: Dataset) -> None:
        """Simulated datasets record their seed."""
        assert default_dataset.provenance.kind == "simulated"
        assert default_dataset.provenance.seed == 42

    def test_array_underestimates_increasingly(self, default_dataset: Dataset) -> None:
        """Mean reading deficit is negative and grows with the setpoint."""
        x = default_dataset.features()
        labels = default_dataset.labels()
        deficits = [float(x[labels == t].mean()) - t for t in default_dataset.setpoints()]
        assert all(d < 0 for d in deficits)
        rises = sum(1 for a, b in zip(deficits, deficits[1:], strict=False) if b > a)
        assert rises <= 1

    def test_deterministic(
        self, default_array: ArraySpec, ntc_coeffs: ThermistorCoefficients
    ) -> None:
        """Same seed reproduces; another seed does not."""
        protocol = Protocol(start_c=30.0, end_c=31.0, samples_per_setpoint=3)
        first = generate(default_array, PlateProfile(), protocol, ntc_coeffs, seed=1)
        second = generate(default_array, PlateProfile(), protocol, ntc_coeffs, seed=1)
        other = generate(default_array, PlateProfile(), protocol, ntc_coeffs, seed=2)
        assert first.samples == second.samples
        assert first.samples != other.samples

    def test_readings_track_setpoint(self, default_dataset: Dataset) -> None:
        """Per-setpoint mean reading rises with the setpoint."""
        means = [
            np.mean([s.readings for s in default_dataset.samples if s.label_c == t])
            for t in default_dataset.setpoints()
        ]
        assert means == sorted(means)

    def test_readings_rounded(self, small_dataset: Dataset) -> None:
        """Stored readings carry at most four decimals."""
        for sample in small_dataset.samples:
            assert all(v == round(v, 4) for v in sample.readings)

    def test_rejects_steep_profile(
        self, default_array: ArraySpec, ntc_coeffs: ThermistorCoefficients
    ) -> None:
        """Profiles that invert the field over the protocol fail fast."""
        with pytest.raises(ConfigError):
            generate(
                default_array,
                PlateProfile(nonuniformity_slope=0.1),
                Protocol(),
                ntc_coeffs,
                seed=0,
            )


class TestDatasetType:
    """Tests for Sample and Dataset invariants."""

    def test_sample_arity(self) -> None:
        """Samples need exactly 32 readings."""
        with pytest.raises(DatasetError):
            Sample(readings=(1.0,) * 31, label_c=30.0, setpoint_index=0, sample_index=0)

    def test_empty_dataset(self) -> None:
        """Datasets cannot be empty."""
        with pytest.raises(DatasetError):
            Dataset(samples=())

    def test_features_columns(self, small_dataset: Dataset) -> None:
        """Column selection keeps the requested readings."""
        full = small_dataset.features()
        digital = small_dataset.features(range(16, 32))
        assert full.shape == (40, 32)
        assert digital.shape == (40, 16)
        np.testing.assert_array_equal(digital, full[:, 16:])


class TestCsv:
    """Tests for CSV persistence."""

    def test_header(self, small_dataset: Dataset) -> None:
        """Header names the label then s00..s31."""
        first_line = dataset_to_csv_text(small_dataset).splitlines()[0]
        assert first_line.split(",") == CSV_HEADER
        assert CSV_HEADER[1] == "s00"
        assert CSV_HEADER[-1] == "s31"

    def test_file_roundtrip(self, small_dataset: Dataset, tmp_path: Path) -> None:
        """Written then read back, samples are identical."""
        path = write_csv(small_dataset, tmp_path / "nested" / "dataset.csv")
        reloaded = read_csv(path)
        assert reloaded.samples == small_dataset.samples
        assert reloaded.provenance.kind == "csv"

    def test_roundtrip_property(self) -> None:
        """Random datasets survive text rendering and parsing."""
        rng = np.random.default_rng(2024)
        for _ in range(PROPERTY_CASES):
            ds = _random_dataset(rng, int(rng.integers(1, 6)))
            reloaded = parse_csv_lines(dataset_to_csv_text(ds).splitlines())
            assert reloaded.samples == ds.samples

    def test_hash_stable(self, small_dataset: Dataset, tmp_path: Path) -> None:
        """Hash survives a file roundtrip and changes with content."""
        reloaded = read_csv(write_csv(small_dataset, tmp_path / "d.csv"))
        assert dataset_hash(reloaded) == dataset_hash(small_dataset)
        trimmed = small_dataset.with_samples(small_dataset.samples[:-1])
        assert dataset_hash(trimmed) != dataset_hash(small_dataset)

    def test_bad_header(self) -> None:
        """A foreign header is rejected on line 1."""
        with pytest.raises(CsvParseError) as exc_info:
            parse_csv_lines(["a,b,c", "1,2,3"])
        assert exc_info.value.line == 1

    def test_wrong_arity_reports_line(self) -> None:
        """Short rows report their line number."""
        row = ",".join(["30.0"] * 33)
        with pytest.raises(CsvParseError) as exc_info:
            parse_csv_lines([",".join(CSV_HEADER), row, "30.0,1.0"])
        assert exc_info.value.line == 3

    def test_non_numeric_field(self) -> None:
        """Non-numeric values are rejected."""
        row = ",".join(["30.0", "abc", *(["1.0"] * 31)])
        with pytest.raises(CsvParseError) as exc_info:
            parse_csv_lines([",".join(CSV_HEADER), row])
        assert exc_info.value.line == 2

    def test_header_only(self) -> None:
        """A file without samples is a dataset error."""
        with pytest.raises(DatasetError):
            parse_csv_lines([",".join(CSV_HEADER)])


class TestSplit:
    """Tests for the train/test partition."""

    def test_default_sizes(self, default_dataset: Dataset) -> None:
        """0.8 of 800 gives 640 / 160."""
        train, test = split(default_dataset, 0.8, seed=42)
        assert len(train) == 640
        assert len(test) == 160

    def test_deterministic(self, default_dataset: Dataset) -> None:
        """Same seed, same partition."""
        first = split(default_dataset, 0.8, seed=7)
        second = split(default_dataset, 0.8, seed=7)
        assert split_hash(*first) == split_hash(*second)
        assert split_hash(*first) != split_hash(*split(default_dataset, 0.8, seed=8))

    def test_partition_property(self) -> None:
        """Sides are disjoint, cover the input, keep order, and have the floor size."""
        rng = np.random.default_rng(99)
        for case in range(PROPERTY_CASES):
            n = int(rng.integers(2, 40))
            ds = _random_dataset(rng, n)
            fraction = float(rng.uniform(0.05, 0.95))
            n_train = int(np.floor(n * fraction))
            if n_train in (0, n):
                with pytest.raises(SplitError):
                    split(ds, fraction, seed=case)
                continue
            train, test = split(ds, fraction, seed=case)
            train_ids = [s.sample_index for s in train.samples]
            test_ids = [s.sample_index for s in test.samples]
            assert len(train_ids) == n_train
            assert set(train_ids).isdisjoint(test_ids)
            assert sorted(train_ids + test_ids) == list(range(n))
            assert train_ids == sorted(train_ids)
            assert test_ids == sorted(test_ids)

    @pytest.mark.parametrize("fraction", [0.0, 1.0, -0.2, 1.5])
    def test_bad_fraction(self, small_dataset: Dataset, fraction: float) -> None:
        """Fractions outside (0, 1) are rejected."""
        with pytest.raises(SplitError):
            split(small_dataset, fraction, seed=0)

    def test_too_small(self, small_dataset: Dataset) -> None:
        """A single-sample dataset cannot be split."""
        one = small_dataset.with_samples(small_dataset.samples[:1])
        with pytest.raises(SplitError):
            split(one, 0.5, seed=0)


class TestShuffleComponents:
    """Tests for per-vector component shuffling."""

    def test_multiset_and_labels_preserved(self) -> None:
        """Each vector keeps its values and label."""
        rng = np.random.default_rng(5)
        for case in range(PROPERTY_CASES):
            ds = _random_dataset(rng, int(rng.integers(1, 4)))
            shuffled = shuffle_components(ds, seed=case)
            for before, after in zip(ds.samples, shuffled.samples, strict=True):
                assert sorted(before.readings) == sorted(after.readings)
                assert before.label_c == after.label_c
                assert before.sample_index == after.sample_index

    def test_actually_permutes(self, small_dataset: Dataset) -> None:
        """Most vectors change order."""
        shuffled = shuffle_components(small_dataset, seed=1)
        changed = sum(
            a.readings != b.readings
            for a, b in zip(small_dataset.samples, shuffled.samples, strict=True)
        )
        assert changed > len(small_dataset) // 2

    def test_consistent_across_split(self, small_dataset: Dataset) -> None:
        """Shuffling a split side matches shuffling the whole then splitting."""
        train, _ = split(small_dataset, 0.5, seed=3)
        whole_then_split, _ = split(shuffle_components(small_dataset, seed=4), 0.5, seed=3)
        assert shuffle_components(train, seed=4).samples == whole_then_split.samples


class TestSubsample:
    """Tests for per-setpoint subsampling."""

    def test_counts(self, default_dataset: Dataset) -> None:
        """Exactly n samples per setpoint, reindexed."""
        sub = subsample_per_setpoint(default_dataset, 5, seed=0)
        assert len(sub) == 80
        assert Counter(s.label_c for s in sub.samples) == {float(t): 5 for t in range(30, 46)}
        assert [s.sample_index for s in sub.samples] == list(range(80))

    def test_subset_of_original(self, small_dataset: Dataset) -> None:
        """Subsampled readings come from the original dataset."""
        originals = {s.readings for s in small_dataset.samples}
        sub = subsample_per_setpoint(small_dataset, 3, seed=2)
        assert all(s.readings in originals for s in sub.samples)

    def test_deterministic(self, small_dataset: Dataset) -> None:
        """Same seed, same subsample."""
        first = subsample_per_setpoint(small_dataset, 4, seed=9)
        second = subsample_per_setpoint(small_dataset, 4, seed=9)
        assert first.samples == second.samples

    def test_too_few(self, small_dataset: Dataset) -> None:
        """Asking for more than a setpoint holds names the setpoint."""
        with pytest.raises(SubsampleError) as exc_info:
            subsample_per_setpoint(small_dataset, 11, seed=0)
        assert exc_info.value.setpoint_c == 30.0
