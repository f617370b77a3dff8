"""
整体判读聚合

任一特征病理或至少两个特征可疑 → 病理；恰好一个可疑 → 可疑；否则正常
"""

from collections import Counter
from typing import Dict, Iterable, Optional, Sequence

from src.analysis.pipeline import FeatureEvidence
from src.classify.feature_rules import assess_features
from src.classify.models import (
    AnalysisMode,
    FeatureAssessment,
    FeatureClass,
    FeatureKind,
    OverallAssessment,
)
from src.config.config_parser import AnalyzerConfig
from src.exceptions import WrongFeatureSetError


def overall_class(classes: Iterable[FeatureClass]) -> FeatureClass:
    """按聚合规则由五个特征类别得到整体类别（与顺序无关）"""
    counts = Counter(classes)
    if counts[FeatureClass.PATHOLOGICAL] >= 1 or counts[FeatureClass.SUSPICIOUS] >= 2:
        return FeatureClass.PATHOLOGICAL
    if counts[FeatureClass.SUSPICIOUS] == 1:
        return FeatureClass.SUSPICIOUS
    return FeatureClass.NORMAL


def _rule_clause(classes: Sequence[FeatureClass]) -> str:
    pathological = sum(c is FeatureClass.PATHOLOGICAL for c in classes)
    suspicious = sum(c is FeatureClass.SUSPICIOUS for c in classes)
    if pathological:
        return f"Overall pathological: {pathological} feature(s) pathological."
    if suspicious >= 2:
        return f"Overall pathological: {suspicious} features suspicious."
    if suspicious == 1:
        return "Overall suspicious: one feature suspicious."
    return "Overall normal: all features within normal ranges."


def order_features(features: Sequence[FeatureAssessment]) -> Dict[FeatureKind, FeatureAssessment]:
    """按固定特征顺序排列，缺失或重复时报错

    Raises:
        WrongFeatureSetError: 特征种类缺失或重复
    """
    counts = Counter(f.feature for f in features)
    if len(features) != len(FeatureKind) or any(counts[k] != 1 for k in FeatureKind):
        raise WrongFeatureSetError([f.feature.value for f in features])
    by_kind = {f.feature: f for f in features}
    return {kind: by_kind[kind] for kind in FeatureKind.ordered()}


def aggregate(features: Sequence[FeatureAssessment], record_id: str = "") -> OverallAssessment:
    """聚合五个特征判读

    Args:
        features: 每种特征恰好一个判读，顺序任意
        record_id: 记录编号

    Returns:
        OverallAssessment: 整体判读，特征按固定顺序排列

    Raises:
        WrongFeatureSetError: 特征种类缺失或重复
    """
    ordered = list(order_features(features).values())
    classes = [f.feature_class for f in ordered]
    explanation = " ".join(
        [f"{f.feature.title}: {f.explanation}" for f in ordered] + [_rule_clause(classes)]
    )
    return OverallAssessment(
        record_id=record_id,
        feature_class=overall_class(classes),
        explanation=explanation,
        features=tuple(ordered),
        mode=AnalysisMode.MULTI,
    )


def assess_evidence(evidence: FeatureEvidence,
                    config: Optional[AnalyzerConfig] = None) -> OverallAssessment:
    """规则表 + 聚合：由特征证据直接得到整体判读"""
    cfg = config or AnalyzerConfig()
    features = assess_features(evidence, cfg.classify, cfg.decelerations)
    return aggregate(features, record_id=evidence.record_id)
