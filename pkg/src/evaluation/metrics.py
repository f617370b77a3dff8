"""
二分类指标

正类为 ABNORMAL；准确率 = (tp + tn) / n，F1 = 2tp / (2tp + fp + fn)
"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from src.record.ctg_record import BinaryLabel

POSITIVE = BinaryLabel.ABNORMAL


@dataclass(frozen=True)
class Confusion:
    """混淆矩阵计数"""
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.n if self.n else 0.0

    @property
    def f1(self) -> float:
        """没有任何正例也没有任何阳性预测时记为 1.0"""
        denominator = 2 * self.tp + self.fp + self.fn
        return 2 * self.tp / denominator if denominator else 1.0

    def to_dict(self) -> Dict[str, int]:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def confusion(predicted: Sequence[Optional[BinaryLabel]],
              expected: Sequence[BinaryLabel]) -> Confusion:
    """由预测与参考标签计算混淆矩阵

    预测为 None（该记录分析失败）时按判错计：参考为异常记 fn，参考为正常记 fp。

    Raises:
        ValueError: 两个序列长度不同
    """
    if len(predicted) != len(expected):
        raise ValueError(f"预测与标签数量不一致: {len(predicted)} != {len(expected)}")

    truth = np.array([label is POSITIVE for label in expected], dtype=bool)
    failed = np.array([p is None for p in predicted], dtype=bool)
    positive = np.array([p is POSITIVE for p in predicted], dtype=bool)
    # 失败记录的预测取参考标签的反面
    positive = np.where(failed, ~truth, positive)

    return Confusion(
        tp=int(np.sum(positive & truth)),
        fp=int(np.sum(positive & ~truth)),
        tn=int(np.sum(~positive & ~truth)),
        fn=int(np.sum(~positive & truth)),
    )


def accuracy(predicted: Sequence[Optional[BinaryLabel]], expected: Sequence[BinaryLabel]) -> float:
    return confusion(predicted, expected).accuracy


def f1_score(predicted: Sequence[Optional[BinaryLabel]], expected: Sequence[BinaryLabel]) -> float:
    return confusion(predicted, expected).f1
