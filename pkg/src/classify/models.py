"""
判读结果数据模型

特征类别、单特征判读与整体判读，以及 JSON 结果格式
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import total_ordering
from typing import Any, Dict, Tuple

from src.record.ctg_record import BinaryLabel


@total_ordering
class FeatureClass(Enum):
    """三级判读类别，按严重程度排序：NORMAL < SUSPICIOUS < PATHOLOGICAL"""
    NORMAL = "normal"
    SUSPICIOUS = "suspicious"
    PATHOLOGICAL = "pathological"

    @property
    def severity(self) -> int:
        return list(type(self)).index(self)

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, FeatureClass):
            return NotImplemented
        return self.severity < other.severity

    def to_binary(self) -> BinaryLabel:
        """可疑与病理均归入异常"""
        return BinaryLabel.NORMAL if self is FeatureClass.NORMAL else BinaryLabel.ABNORMAL

    @classmethod
    def parse(cls, text: str) -> "FeatureClass":
        return cls(str(text).strip().lower())


class FeatureKind(Enum):
    """五个判读特征，定义顺序即结果中的固定顺序"""
    BASELINE = "baseline"
    VARIABILITY = "variability"
    ACCELERATIONS = "accelerations"
    DECELERATIONS = "decelerations"
    SINUSOIDAL = "sinusoidal"

    @classmethod
    def ordered(cls) -> Tuple["FeatureKind", ...]:
        return tuple(cls)

    @property
    def title(self) -> str:
        return self.value.capitalize()


class AnalysisMode(Enum):
    """多智能体 / 单次提示"""
    MULTI = "multi"
    DIRECT = "direct"


@dataclass(frozen=True)
class FeatureAssessment:
    """单个特征的判读"""
    feature: FeatureKind
    feature_class: FeatureClass
    explanation: str
    evidence: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.explanation.strip():
            raise ValueError(f"{self.feature.value} 的判读说明为空")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "feature": self.feature.value,
            "class": self.feature_class.value,
            "explanation": self.explanation,
            "evidence": self.evidence,
        }


@dataclass(frozen=True)
class OverallAssessment:
    """整体判读

    binary 为 NORMAL 当且仅当 feature_class 为 NORMAL；
    单次提示模式下 features 为空且 features_omitted 为 True。
    """
    record_id: str
    feature_class: FeatureClass
    explanation: str
    features: Tuple[FeatureAssessment, ...] = ()
    mode: AnalysisMode = AnalysisMode.MULTI
    features_omitted: bool = False

    @property
    def binary(self) -> BinaryLabel:
        return self.feature_class.to_binary()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "record_id": self.record_id,
            "mode": self.mode.value,
            "overall": {
                "class": self.feature_class.value,
                "binary": self.binary.value,
                "explanation": self.explanation,
            },
            "features": [f.to_dict() for f in self.features],
            "features_omitted": self.features_omitted,
        }
