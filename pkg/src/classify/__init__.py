"""
判读模块 (classify)

特征规则表与整体聚合
"""

from src.classify.aggregator import aggregate, assess_evidence, overall_class
from src.classify.feature_rules import (
    assess_feature,
    assess_features,
    classify_accelerations,
    classify_baseline,
    classify_decelerations,
    classify_sinusoidal,
    classify_variability,
)
from src.classify.models import (
    AnalysisMode,
    FeatureAssessment,
    FeatureClass,
    FeatureKind,
    OverallAssessment,
)

__all__ = [
    "AnalysisMode",
    "FeatureAssessment",
    "FeatureClass",
    "FeatureKind",
    "OverallAssessment",
    "aggregate",
    "assess_evidence",
    "assess_feature",
    "assess_features",
    "classify_accelerations",
    "classify_baseline",
    "classify_decelerations",
    "classify_sinusoidal",
    "classify_variability",
    "overall_class",
]
