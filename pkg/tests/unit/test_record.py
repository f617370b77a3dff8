"""
记录模型、CSV 读写与预处理测试
"""

from fractions import Fraction

import numpy as np
import pytest

from src.config.config_parser import PreprocessConfig
from src.exceptions import (
    EmptyRecordError,
    LengthMismatchError,
    MalformedRowError,
    OutOfRangeError,
    TooShortError,
)
from src.record.csv_io import (
    LABELS_FILE,
    load_csv,
    load_labels,
    load_trace_directory,
    save_csv,
    save_labels,
)
from src.record.ctg_record import BinaryLabel, CtgRecord
from src.record.preprocessor import SignalPreprocessor, preprocess


pytestmark = pytest.mark.unit


class TestCtgRecord:
    """CtgRecord 测试"""

    def test_duration_and_rate(self, make_record):
        record = make_record(duration_s=1200.0, fs=4.0)
        assert record.n_samples == 4800
        assert record.sample_rate_hz == Fraction(4)
        assert record.duration_s == 1200.0
        assert record.times()[1] == 0.25

    def test_arrays_are_read_only(self, make_record):
        record = make_record()
        with pytest.raises(ValueError):
            record.fhr[0] = 100.0

    def test_fhr_out_of_range(self):
        with pytest.raises(OutOfRangeError):
            CtgRecord(np.array([140.0, 260.0]), np.array([10.0, 10.0]), 4, np.zeros(2, bool), "r")

    def test_gap_samples_are_not_range_checked(self):
        record = CtgRecord(np.array([140.0, np.nan]), np.array([10.0, 10.0]), 4,
                           np.array([False, True]), "r")
        assert record.gap_mask.tolist() == [False, True]

    def test_uc_out_of_range(self):
        with pytest.raises(OutOfRangeError):
            CtgRecord(np.array([140.0]), np.array([120.0]), 4, np.zeros(1, bool), "r")

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            CtgRecord(np.array([140.0, 141.0]), np.array([10.0]), 4, np.zeros(2, bool), "r")

    def test_with_label(self, make_record):
        labelled = make_record().with_label(BinaryLabel.ABNORMAL)
        assert labelled.reference_label is BinaryLabel.ABNORMAL
        assert labelled.record_id == "const"

    def test_binary_label_parse(self):
        assert BinaryLabel.parse(" Abnormal ") is BinaryLabel.ABNORMAL
        with pytest.raises(ValueError):
            BinaryLabel.parse("suspicious")


class TestCsvIo:
    """CSV 读写测试"""

    def test_gaps_from_empty_and_zero_cells(self, fixtures_dir):
        record = load_csv(fixtures_dir / "traces" / "short_with_gaps.csv")

        assert record.record_id == "short_with_gaps"
        assert record.sample_rate_hz == Fraction(4)
        assert record.gap_mask.tolist() == [False, True, False, True, False]
        assert np.isnan(record.fhr[1]) and np.isnan(record.fhr[3])
        assert record.fhr[2] == 141.5

    def test_missing_field_reports_line(self, fixtures_dir):
        with pytest.raises(MalformedRowError) as exc_info:
            load_csv(fixtures_dir / "traces" / "missing_field.csv")
        assert exc_info.value.line == 3

    def test_extra_field_is_malformed(self, tmp_path):
        path = tmp_path / "extra.csv"
        path.write_text("t_s,fhr_bpm,uc\n0,140,10\n0.25,141,11,99\n", encoding="utf-8")
        with pytest.raises(MalformedRowError):
            load_csv(path)

    def test_short_column_is_length_mismatch(self, tmp_path):
        path = tmp_path / "short_uc.csv"
        path.write_text("t_s,fhr_bpm,uc\n0,140,10\n0.25,141,11\n0.5,142\n0.75,143\n", encoding="utf-8")
        with pytest.raises(LengthMismatchError) as exc_info:
            load_csv(path)
        assert exc_info.value.lengths == {"t_s": 4, "fhr_bpm": 4, "uc": 2}

    def test_header_aliases_and_default_rate(self, fixtures_dir):
        record = load_csv(fixtures_dir / "traces" / "aliased_headers.csv", default_rate=2.0)
        assert record.n_samples == 2
        assert record.sample_rate_hz == Fraction(2)
        assert record.fhr.tolist() == [140.0, 141.0]

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(EmptyRecordError):
            load_csv(path)

    def test_header_only(self, tmp_path):
        path = tmp_path / "header.csv"
        path.write_text("t_s,fhr_bpm,uc\n", encoding="utf-8")
        with pytest.raises(EmptyRecordError):
            load_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_csv(tmp_path / "absent.csv")

    def test_save_then_load_preserves_record(self, tmp_path, fixtures_dir):
        original = load_csv(fixtures_dir / "traces" / "short_with_gaps.csv")
        path = save_csv(original, tmp_path / "short_with_gaps.csv")

        assert load_csv(path) == original
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "t_s,fhr_bpm,uc"
        assert lines[2] == "0.25,,12"

    def test_labels_file(self, tmp_path):
        path = save_labels({"b": BinaryLabel.ABNORMAL, "a": BinaryLabel.NORMAL}, tmp_path / LABELS_FILE)
        assert path.read_text(encoding="utf-8").splitlines() == [
            "record_id,label", "a,normal", "b,abnormal",
        ]
        assert load_labels(path) == {"a": BinaryLabel.NORMAL, "b": BinaryLabel.ABNORMAL}

    def test_invalid_label_value(self, tmp_path):
        path = tmp_path / LABELS_FILE
        path.write_text("record_id,label\na,normal\nb,suspicious\n", encoding="utf-8")
        with pytest.raises(MalformedRowError) as exc_info:
            load_labels(path)
        assert exc_info.value.line == 3

    def test_trace_directory(self, tmp_path, make_record):
        save_csv(make_record(record_id="b", duration_s=10.0), tmp_path / "b.csv")
        save_csv(make_record(record_id="a", duration_s=10.0), tmp_path / "a.csv")
        save_labels({"a": BinaryLabel.NORMAL}, tmp_path / LABELS_FILE)

        records = load_trace_directory(tmp_path, load_labels(tmp_path / LABELS_FILE))

        assert [r.record_id for r in records] == ["a", "b"]
        assert records[0].reference_label is BinaryLabel.NORMAL
        assert records[1].reference_label is None


class TestPreprocessor:
    """SignalPreprocessor 测试"""

    @staticmethod
    def _record_with_gap(gap_s: float, fs: float = 4.0) -> CtgRecord:
        n = int(1200 * fs)
        fhr = np.full(n, 140.0)
        gap = np.zeros(n, dtype=bool)
        start = int(300 * fs)
        gap[start:start + int(gap_s * fs)] = True
        fhr[gap] = np.nan
        return CtgRecord(fhr, np.full(n, 10.0), fs, gap, "gap")

    def test_short_gap_is_interpolated(self):
        fhr, _ = preprocess(self._record_with_gap(10.0))
        assert fhr.valid_mask.all()
        assert np.all(fhr.values == 140.0)

    def test_long_gap_stays_invalid(self):
        fhr, _ = preprocess(self._record_with_gap(20.0))
        assert np.count_nonzero(~fhr.valid_mask) == 80
        assert np.all(np.isnan(fhr.values[~fhr.valid_mask]))

    def test_leading_gap_is_not_filled(self):
        n = 4800
        gap = np.zeros(n, dtype=bool)
        gap[:8] = True
        fhr = np.where(gap, np.nan, 140.0)
        clean, _ = preprocess(CtgRecord(fhr, np.full(n, 10.0), 4, gap, "lead"))
        assert not clean.valid_mask[:8].any()

    def test_median_root_is_idempotent(self):
        rng = np.random.default_rng(3)
        values = 140.0 + rng.normal(0.0, 3.0, 4800)
        record = CtgRecord(values, np.full(4800, 10.0), 4, np.zeros(4800, bool), "noisy")
        pre = SignalPreprocessor(PreprocessConfig(max_median_passes=500))

        once, _ = pre.preprocess(record)
        again = CtgRecord(once.values, np.full(4800, 10.0), 4, ~once.valid_mask, "noisy")
        twice, _ = pre.preprocess(again)

        assert twice == once

    def test_spike_is_removed(self):
        values = np.full(4800, 140.0)
        values[1000] = 200.0
        fhr, _ = preprocess(CtgRecord(values, np.full(4800, 10.0), 4, np.zeros(4800, bool), "spike"))
        assert fhr.values[1000] == 140.0

    def test_too_short(self, make_record):
        with pytest.raises(TooShortError):
            preprocess(make_record(duration_s=599.0))

    def test_min_duration_is_configurable(self, make_record):
        fhr, uc = preprocess(make_record(duration_s=120.0), PreprocessConfig(min_duration_s=60.0))
        assert fhr.duration_s == 120.0
        assert uc.valid_mask.all()
