"""
分析模块 (analysis)

基线、变异性、加速/减速、宫缩、减速分型与正弦波型的检测
"""

from src.analysis.baseline import BaselineEstimator, estimate_baseline
from src.analysis.contractions import ContractionDetector, detect_contractions
from src.analysis.decel_typing import (
    DecelerationTyper,
    atypical_features,
    classify_timing,
    type_decelerations,
)
from src.analysis.episodes import ExcursionDetector, detect_excursions, split_by_kind
from src.analysis.pipeline import AnalysisPipeline, FeatureEvidence, extract_evidence
from src.analysis.sinusoidal import SinusoidalDetector, detect_sinusoidal
from src.analysis.variability import VariabilityAnalyzer, variability_profile

__all__ = [
    "AnalysisPipeline",
    "BaselineEstimator",
    "ContractionDetector",
    "DecelerationTyper",
    "ExcursionDetector",
    "FeatureEvidence",
    "SinusoidalDetector",
    "VariabilityAnalyzer",
    "atypical_features",
    "classify_timing",
    "detect_contractions",
    "detect_excursions",
    "detect_sinusoidal",
    "estimate_baseline",
    "extract_evidence",
    "split_by_kind",
    "type_decelerations",
    "variability_profile",
]
