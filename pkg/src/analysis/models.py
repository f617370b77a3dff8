"""
分析结果数据模型

基线、变异性、事件（加速/减速/宫缩）、减速分型与正弦波型的结果类型
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, Optional, Tuple

from src.exceptions import OutOfRangeError


class EpisodeKind(Enum):
    """事件类型"""
    ACCELERATION = "acceleration"
    DECELERATION = "deceleration"
    CONTRACTION = "contraction"


class DecelType(Enum):
    """减速类型"""
    EARLY = "early"
    VARIABLE = "variable"
    LATE = "late"
    PROLONGED = "prolonged"
    ATYPICAL_VARIABLE = "atypical_variable"


class AtypicalFeature(Enum):
    """非典型变异减速特征"""
    LOSS_OF_SHOULDER = "loss_of_shoulder"
    SLOW_RETURN = "slow_return"
    PROLONGED_ELEVATED_BASELINE = "prolonged_elevated_baseline"
    BIPHASIC = "biphasic"
    LOSS_OF_OSCILLATION = "loss_of_oscillation"
    LOWER_BASELINE_RESUMPTION = "lower_baseline_resumption"


class SinusoidalStatus(Enum):
    """正弦波型状态"""
    NONE = "none"
    PSEUDOSINUSOIDAL = "pseudosinusoidal"
    TRUE_SINUSOIDAL = "true_sinusoidal"


def _round(value: Optional[float], digits: int = 3) -> Optional[float]:
    return None if value is None else round(float(value), digits)


@dataclass(frozen=True)
class BaselineEstimate:
    """基线估计

    determinable 为 False 时 value_bpm 为 None
    """
    value_bpm: Optional[float]
    determinable: bool
    coverage_s: float
    iterations: int

    def __post_init__(self):
        if self.determinable and self.value_bpm is None:
            raise OutOfRangeError("value_bpm", float("nan"))
        if not self.determinable and self.value_bpm is not None:
            object.__setattr__(self, "value_bpm", None)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value_bpm": _round(self.value_bpm),
            "determinable": self.determinable,
            "coverage_s": _round(self.coverage_s, 2),
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class MinuteVariability:
    """单分钟变异性"""
    index: int
    amplitude_bpm: float
    oscillations_per_min: int
    assessable: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "minute": self.index,
            "amplitude_bpm": _round(self.amplitude_bpm, 2),
            "oscillations_per_min": self.oscillations_per_min,
            "assessable": self.assessable,
        }


@dataclass(frozen=True)
class VariabilityProfile:
    """变异性概况"""
    minutes: Tuple[MinuteVariability, ...]
    low_var_longest_run_s: float
    high_var_longest_run_s: float
    normal_fraction: float
    median_oscillations: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "low_var_longest_run_s": self.low_var_longest_run_s,
            "high_var_longest_run_s": self.high_var_longest_run_s,
            "normal_fraction": _round(self.normal_fraction),
            "median_oscillations": _round(self.median_oscillations, 2),
            "minutes": [m.to_dict() for m in self.minutes],
        }


@dataclass(frozen=True)
class Episode:
    """检测到的偏移事件

    amplitude_bpm 对宫缩而言是 UC 单位；onset_to_extremum_s 为起点到峰/谷的时间
    """
    kind: EpisodeKind
    onset_s: float
    extremum_s: float
    offset_s: float
    amplitude_bpm: float
    onset_to_extremum_s: float = 0.0

    def __post_init__(self):
        if not (self.onset_s < self.extremum_s <= self.offset_s):
            raise OutOfRangeError("extremum_s", self.extremum_s)

    @property
    def duration_s(self) -> float:
        return self.offset_s - self.onset_s

    def overlaps(self, other: "Episode") -> bool:
        """两个事件的时间区间是否相交"""
        return self.onset_s <= other.offset_s and other.onset_s <= self.offset_s

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "onset_s": _round(self.onset_s, 2),
            "extremum_s": _round(self.extremum_s, 2),
            "offset_s": _round(self.offset_s, 2),
            "duration_s": _round(self.duration_s, 2),
            "amplitude_bpm": _round(self.amplitude_bpm, 2),
        }


@dataclass(frozen=True)
class TypedDeceleration:
    """分型后的减速"""
    episode: Episode
    decel_type: DecelType
    atypical_features: FrozenSet[AtypicalFeature] = field(default_factory=frozenset)
    associated_contraction: Optional[Episode] = None
    onset_to_nadir_s: float = 0.0
    sub3min: bool = False
    overlapped_contractions: int = 0

    def __post_init__(self):
        if self.decel_type is DecelType.ATYPICAL_VARIABLE and not self.atypical_features:
            raise OutOfRangeError("atypical_features", 0)

    def to_dict(self) -> Dict[str, Any]:
        data = self.episode.to_dict()
        data.update({
            "type": self.decel_type.value,
            "onset_to_nadir_s": _round(self.onset_to_nadir_s, 2),
            "atypical_features": sorted(f.value for f in self.atypical_features),
            "associated_contraction_peak_s": (
                _round(self.associated_contraction.extremum_s, 2)
                if self.associated_contraction else None
            ),
            "sub3min": self.sub3min,
            "overlapped_contractions": self.overlapped_contractions,
        })
        return data


@dataclass(frozen=True)
class SinusoidalFinding:
    """正弦波型检测结果

    status 为 NONE 时 span 为空，测量值来自最长的规则周期段
    """
    status: SinusoidalStatus
    span: Optional[Tuple[float, float]]
    amplitude_bpm: float
    frequency_cpm: float
    smoothness: float

    def __post_init__(self):
        if self.status is SinusoidalStatus.NONE and self.span is not None:
            object.__setattr__(self, "span", None)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status.value,
            "span": None if self.span is None else [_round(v, 2) for v in self.span],
            "amplitude_bpm": _round(self.amplitude_bpm, 2),
            "frequency_cpm": _round(self.frequency_cpm, 3),
            "smoothness": _round(self.smoothness, 4),
        }
