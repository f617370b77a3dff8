"""
评估模块 (evaluation)

二分类指标与重复试验的批量评估
"""

from src.evaluation.evaluator import (
    EvalReport,
    Evaluator,
    RecordSampler,
    RecordVerdict,
    TrialResult,
    evaluate,
    evaluate_records,
)
from src.evaluation.metrics import Confusion, accuracy, confusion, f1_score

__all__ = [
    "Confusion",
    "EvalReport",
    "Evaluator",
    "RecordSampler",
    "RecordVerdict",
    "TrialResult",
    "accuracy",
    "confusion",
    "evaluate",
    "evaluate_records",
    "f1_score",
]
