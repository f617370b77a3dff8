"""
二分类指标测试
"""

import random

import pytest

from src.evaluation.metrics import Confusion, accuracy, confusion, f1_score
from src.record.ctg_record import BinaryLabel

A, N = BinaryLabel.ABNORMAL, BinaryLabel.NORMAL


pytestmark = pytest.mark.unit


def _labels(tp=0, fp=0, tn=0, fn=0):
    """按混淆矩阵计数构造 (预测, 参考) 序列"""
    predicted = [A] * tp + [A] * fp + [N] * tn + [N] * fn
    expected = [A] * tp + [N] * fp + [N] * tn + [A] * fn
    return predicted, expected


class TestConfusion:
    """混淆矩阵与指标"""

    def test_balanced_errors(self):
        predicted, expected = _labels(tp=20, fp=5, tn=20, fn=5)
        assert confusion(predicted, expected) == Confusion(20, 5, 20, 5)
        assert accuracy(predicted, expected) == pytest.approx(0.8)
        assert f1_score(predicted, expected) == pytest.approx(0.8)

    def test_single_miss(self):
        predicted, expected = _labels(tp=25, fp=0, tn=24, fn=1)
        assert accuracy(predicted, expected) == pytest.approx(0.98)
        assert f1_score(predicted, expected) == pytest.approx(50 / 51)

    def test_no_positives_anywhere(self):
        predicted, expected = _labels(tn=10)
        assert f1_score(predicted, expected) == 1.0
        assert accuracy(predicted, expected) == 1.0

    def test_failed_prediction_counts_as_wrong(self):
        result = confusion([None, None, A], [A, N, A])
        assert result == Confusion(tp=1, fp=1, tn=0, fn=1)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            confusion([A, N], [A])

    def test_empty_accuracy(self):
        assert Confusion().accuracy == 0.0

    def test_matches_direct_count(self):
        rng = random.Random(5)
        for _ in range(50):
            n = rng.randint(1, 40)
            predicted = [rng.choice([A, N, None]) for _ in range(n)]
            expected = [rng.choice([A, N]) for _ in range(n)]
            correct = sum(p is e for p, e in zip(predicted, expected))

            result = confusion(predicted, expected)

            assert result.n == n
            assert result.accuracy == pytest.approx(correct / n)
            assert result.to_dict() == {"tp": result.tp, "fp": result.fp,
                                        "tn": result.tn, "fn": result.fn}
