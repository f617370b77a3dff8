"""
合成场景定义

描述一条合成 CTG 记录的全部参数，并提供 JSON 场景文件的加载与校验
"""

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import jsonschema
import numpy as np

from src.exceptions import OutOfRangeError, OverlapError, ScenarioValidationError

TRAPEZOID = "trapezoid"
RAISED_COSINE = "raised_cosine"
SHAPES = (TRAPEZOID, RAISED_COSINE)

ATYPICAL_VARIANTS = ("biphasic", "slow_return", "lower_resumption", "loss_of_oscillation", "no_shoulders")

# 高斯宫缩半高宽与标准差之比
FWHM_PER_SIGMA = 2.355
# 宫缩检测阈值（高出张力）
CONTRACTION_LEVEL = 15.0

SHOULDER_WIDTH_S = 12.0
SHOULDER_BPM = 10.0
SLOW_RETURN_S = 45.0
BIPHASIC_MIN_AMPLITUDE = 25.0
BIPHASIC_MIN_MIDDLE_S = 45.0

# 每个振荡周期的幅度系数（乘以半带宽），在上穿零点处切换
AMPLITUDE_PATTERN = (1.0, 0.55, 0.85, 0.65, 0.75)


@dataclass
class VariabilitySegment:
    """覆盖全局带宽的变异性区段"""
    start_s: float
    duration_s: float
    amplitude_bpm: float

    @property
    def end_s(self) -> float:
        return self.start_s + self.duration_s


@dataclass
class VariabilitySpec:
    """基础变异性：amplitude_bpm 为峰谷带宽"""
    amplitude_bpm: float = 10.0
    cycles_per_min: float = 4.0
    regular: bool = False
    segments: List[VariabilitySegment] = field(default_factory=list)

    def bandwidth_at(self, time_s: float) -> float:
        for segment in self.segments:
            if segment.start_s <= time_s < segment.end_s:
                return segment.amplitude_bpm
        return self.amplitude_bpm

    def cycle_index(self, t: np.ndarray) -> np.ndarray:
        """每个时刻所在的振荡周期编号（第一次上穿零点前为 -1）"""
        return np.floor(self.cycles_per_min / 60.0 * np.asarray(t, dtype=float) - 0.25).astype(int)

    def half_amplitude(self, t: np.ndarray) -> np.ndarray:
        """每个时刻所在周期的振幅（半带宽乘以周期系数）"""
        f = self.cycles_per_min / 60.0
        k = self.cycle_index(t)
        cycles, index = np.unique(k, return_inverse=True)
        starts = np.maximum((cycles + 0.25) / f, 0.0)
        bandwidth = np.array([self.bandwidth_at(float(s)) for s in starts])[index]
        if self.regular:
            return bandwidth / 2.0
        return np.take(AMPLITUDE_PATTERN, np.mod(k, len(AMPLITUDE_PATTERN))) * bandwidth / 2.0


@dataclass
class AccelerationSpec:
    onset_s: float
    duration_s: float
    amplitude_bpm: float
    shape: str = TRAPEZOID

    @property
    def offset_s(self) -> float:
        return self.onset_s + self.duration_s

    @property
    def peak_s(self) -> float:
        return self.onset_s + self.duration_s / 2.0


@dataclass
class DecelerationSpec:
    onset_s: float
    duration_s: float
    amplitude_bpm: float
    onset_to_nadir_s: float
    shape: str = TRAPEZOID
    lag_to_contraction_s: Optional[float] = None
    shoulders: Optional[bool] = None
    atypical: List[str] = field(default_factory=list)
    companion_width_s: float = 90.0
    companion_amplitude: float = 50.0

    @property
    def offset_s(self) -> float:
        return self.onset_s + self.duration_s

    @property
    def has_shoulders(self) -> bool:
        """梯形默认带肩峰，no_shoulders 变体去掉肩峰"""
        if "no_shoulders" in self.atypical:
            return False
        if self.shoulders is None:
            return self.shape == TRAPEZOID
        return self.shoulders

    @property
    def nadir_s(self) -> float:
        """最低点时间：梯形取平台中点，升余弦取下降结束"""
        if self.shape == RAISED_COSINE:
            return self.onset_s + self.onset_to_nadir_s
        return self.onset_s + self.duration_s / 2.0

    def companion(self) -> Optional["ContractionSpec"]:
        """按 lag_to_contraction_s 安排的伴随宫缩：其检测起点比减速起点早 lag 秒"""
        if self.lag_to_contraction_s is None:
            return None
        spec = ContractionSpec(peak_s=0.0, width_s=self.companion_width_s,
                               amplitude=self.companion_amplitude)
        spec.peak_s = self.onset_s - self.lag_to_contraction_s + spec.half_span_s
        return spec


@dataclass
class ContractionSpec:
    """高斯宫缩：width_s 为半高宽，amplitude 为高出张力的峰值"""
    peak_s: float
    width_s: float
    amplitude: float

    @property
    def sigma_s(self) -> float:
        return self.width_s / FWHM_PER_SIGMA

    @property
    def half_span_s(self) -> float:
        """峰值到高出张力 CONTRACTION_LEVEL 处的距离，幅度不足时为 0"""
        if self.amplitude <= CONTRACTION_LEVEL:
            return 0.0
        return self.sigma_s * math.sqrt(2.0 * math.log(self.amplitude / CONTRACTION_LEVEL))

    @property
    def onset_s(self) -> float:
        return self.peak_s - self.half_span_s

    @property
    def offset_s(self) -> float:
        return self.peak_s + self.half_span_s


@dataclass
class SinusoidSpec:
    amplitude_bpm: float
    cpm: float
    start_s: float
    duration_s: float
    waveform: str = "sine"

    @property
    def end_s(self) -> float:
        return self.start_s + self.duration_s


@dataclass
class Scenario:
    """合成场景"""
    baseline_bpm: float
    variability: VariabilitySpec = field(default_factory=VariabilitySpec)
    accelerations: List[AccelerationSpec] = field(default_factory=list)
    decelerations: List[DecelerationSpec] = field(default_factory=list)
    contractions: List[ContractionSpec] = field(default_factory=list)
    sinusoidal: Optional[SinusoidSpec] = None
    noise_bpm: float = 0.0
    seed: int = 0
    duration_s: float = 1200.0
    sample_rate_hz: float = 4.0
    uc_tone: float = 10.0
    record_id: Optional[str] = None

    @property
    def name(self) -> str:
        return self.record_id or f"synth_{self.seed:06d}"

    def all_contractions(self) -> List[ContractionSpec]:
        """显式宫缩与减速伴随宫缩，按峰值排序"""
        companions = [c for c in (d.companion() for d in self.decelerations) if c is not None]
        return sorted(self.contractions + companions, key=lambda c: c.peak_s)

    def validate(self) -> None:
        """检查场景不变量

        Raises:
            OutOfRangeError: 参数越界或时间超出记录
            OverlapError: 同类事件重叠
        """
        if self.duration_s <= 0:
            raise OutOfRangeError("duration_s", self.duration_s)
        if self.sample_rate_hz <= 0:
            raise OutOfRangeError("sample_rate_hz", self.sample_rate_hz)
        if self.noise_bpm < 0:
            raise OutOfRangeError("noise_bpm", self.noise_bpm)
        if self.variability.amplitude_bpm < 0 or self.variability.cycles_per_min <= 0:
            raise OutOfRangeError("variability", self.variability.amplitude_bpm)

        for segment in self.variability.segments:
            self._check_span("variability.segments", segment.start_s, segment.end_s)
        for accel in self.accelerations:
            if accel.shape not in SHAPES:
                raise OutOfRangeError("accelerations.shape", float("nan"))
            self._check_span("accelerations", accel.onset_s, accel.offset_s)
        for decel in self.decelerations:
            self._check_deceleration(decel)
        for contraction in self.contractions:
            if contraction.width_s <= 0 or contraction.amplitude < 0:
                raise OutOfRangeError("contractions.width_s", contraction.width_s)
            self._check_span("contractions", contraction.peak_s, contraction.peak_s)
        if self.sinusoidal is not None:
            if self.sinusoidal.cpm <= 0 or self.sinusoidal.waveform not in ("sine", "triangle"):
                raise OutOfRangeError("sinusoidal.cpm", self.sinusoidal.cpm)
            self._check_span("sinusoidal", self.sinusoidal.start_s, self.sinusoidal.end_s)

        self._check_overlap("acceleration", [(a.onset_s, a.offset_s) for a in self.accelerations])
        self._check_overlap("deceleration", [(d.onset_s, d.offset_s) for d in self.decelerations])
        self._check_overlap("contraction", [
            (c.peak_s - c.width_s / 2, c.peak_s + c.width_s / 2) for c in self.all_contractions()
        ])

    def _check_deceleration(self, decel: DecelerationSpec) -> None:
        if decel.shape not in SHAPES:
            raise OutOfRangeError("decelerations.shape", float("nan"))
        unknown = set(decel.atypical) - set(ATYPICAL_VARIANTS)
        if unknown:
            raise OutOfRangeError(f"decelerations.atypical[{sorted(unknown)[0]}]", float("nan"))
        if decel.onset_to_nadir_s <= 0 or decel.onset_to_nadir_s >= decel.duration_s:
            raise OutOfRangeError("decelerations.onset_to_nadir_s", decel.onset_to_nadir_s)
        if decel.shape == TRAPEZOID:
            recovery = SLOW_RETURN_S if "slow_return" in decel.atypical else decel.onset_to_nadir_s
            if decel.duration_s < decel.onset_to_nadir_s + recovery:
                raise OutOfRangeError("decelerations.duration_s", decel.duration_s)
        if "biphasic" in decel.atypical:
            if decel.amplitude_bpm < BIPHASIC_MIN_AMPLITUDE:
                raise OutOfRangeError("decelerations.amplitude_bpm", decel.amplitude_bpm)
            if decel.duration_s - 2 * decel.onset_to_nadir_s < BIPHASIC_MIN_MIDDLE_S:
                raise OutOfRangeError("decelerations.duration_s", decel.duration_s)
        if decel.lag_to_contraction_s is not None and decel.companion_amplitude <= CONTRACTION_LEVEL:
            raise OutOfRangeError("decelerations.companion_amplitude", decel.companion_amplitude)
        self._check_span("decelerations", decel.onset_s, decel.offset_s)

    def _check_span(self, name: str, start: float, end: float) -> None:
        if start < 0 or end > self.duration_s or end < start:
            raise OutOfRangeError(name, start if start < 0 or end < start else end)

    @staticmethod
    def _check_overlap(kind: str, spans: List[Tuple[float, float]]) -> None:
        ordered = sorted(spans)
        for (a0, a1), (b0, b1) in zip(ordered, ordered[1:]):
            if b0 < a1:
                raise OverlapError(kind, a0, b0)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        if self.sinusoidal is None:
            data.pop("sinusoidal")
        if self.record_id is None:
            data.pop("record_id")
        for decel in data["decelerations"]:
            for key in ("lag_to_contraction_s", "shoulders"):
                if decel[key] is None:
                    decel.pop(key)
        return data


_NUMBER = {"type": "number"}
_NON_NEGATIVE = {"type": "number", "minimum": 0}
_POSITIVE = {"type": "number", "exclusiveMinimum": 0}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["baseline_bpm"],
    "additionalProperties": False,
    "properties": {
        "record_id": {"type": "string", "minLength": 1},
        "baseline_bpm": {"type": "number", "minimum": 30, "maximum": 250},
        "duration_s": _POSITIVE,
        "sample_rate_hz": _POSITIVE,
        "uc_tone": {"type": "number", "minimum": 0, "maximum": 100},
        "noise_bpm": _NON_NEGATIVE,
        "seed": {"type": "integer", "minimum": 0},
        "variability": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "amplitude_bpm": _NON_NEGATIVE,
                "cycles_per_min": _POSITIVE,
                "regular": {"type": "boolean"},
                "segments": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["start_s", "duration_s", "amplitude_bpm"],
                        "additionalProperties": False,
                        "properties": {
                            "start_s": _NON_NEGATIVE,
                            "duration_s": _POSITIVE,
                            "amplitude_bpm": _NON_NEGATIVE,
                        },
                    },
                },
            },
        },
        "accelerations": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["onset_s", "duration_s", "amplitude_bpm"],
                "additionalProperties": False,
                "properties": {
                    "onset_s": _NON_NEGATIVE,
                    "duration_s": _POSITIVE,
                    "amplitude_bpm": _NON_NEGATIVE,
                    "shape": {"type": "string", "enum": list(SHAPES)},
                },
            },
        },
        "decelerations": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["onset_s", "duration_s", "amplitude_bpm", "onset_to_nadir_s"],
                "additionalProperties": False,
                "properties": {
                    "onset_s": _NON_NEGATIVE,
                    "duration_s": _POSITIVE,
                    "amplitude_bpm": _NON_NEGATIVE,
                    "onset_to_nadir_s": _POSITIVE,
                    "shape": {"type": "string", "enum": list(SHAPES)},
                    "lag_to_contraction_s": _NUMBER,
                    "shoulders": {"type": "boolean"},
                    "atypical": {
                        "type": "array",
                        "items": {"type": "string", "enum": list(ATYPICAL_VARIANTS)},
                        "uniqueItems": True,
                    },
                    "companion_width_s": _POSITIVE,
                    "companion_amplitude": _POSITIVE,
                },
            },
        },
        "contractions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["peak_s", "width_s", "amplitude"],
                "additionalProperties": False,
                "properties": {
                    "peak_s": _NON_NEGATIVE,
                    "width_s": _POSITIVE,
                    "amplitude": _NON_NEGATIVE,
                },
            },
        },
        "sinusoidal": {
            "type": "object",
            "required": ["amplitude_bpm", "cpm", "start_s", "duration_s"],
            "additionalProperties": False,
            "properties": {
                "amplitude_bpm": _NON_NEGATIVE,
                "cpm": _POSITIVE,
                "start_s": _NON_NEGATIVE,
                "duration_s": _POSITIVE,
                "waveform": {"type": "string", "enum": ["sine", "triangle"]},
            },
        },
    },
}


class ScenarioLoader:
    """场景文件加载器

    职责：
    1. 读取 JSON 场景文件
    2. 用 JSON Schema 校验字段
    3. 转换为 Scenario 并检查时间/重叠不变量
    """

    def load(self, path: Union[str, Path]) -> Scenario:
        """加载场景文件

        Raises:
            FileNotFoundError: 文件不存在
            ScenarioValidationError: JSON 格式或字段错误
            OutOfRangeError / OverlapError: 场景不变量不成立
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"场景文件不存在: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ScenarioValidationError(f"场景文件 JSON 格式错误: {e}")
        return self.from_dict(data)

    def from_dict(self, data: Dict[str, Any]) -> Scenario:
        """从字典构造并校验场景"""
        try:
            jsonschema.validate(instance=data, schema=SCENARIO_SCHEMA)
        except jsonschema.ValidationError as e:
            path = ".".join(str(p) for p in e.absolute_path) or "<root>"
            raise ScenarioValidationError(f"场景验证失败: {path}: {e.message}")

        variability = dict(data.get("variability", {}))
        variability["segments"] = [VariabilitySegment(**s) for s in variability.get("segments", [])]
        sinusoidal = data.get("sinusoidal")

        scenario = Scenario(
            baseline_bpm=data["baseline_bpm"],
            variability=VariabilitySpec(**variability),
            accelerations=[AccelerationSpec(**a) for a in data.get("accelerations", [])],
            decelerations=[DecelerationSpec(**d) for d in data.get("decelerations", [])],
            contractions=[ContractionSpec(**c) for c in data.get("contractions", [])],
            sinusoidal=SinusoidSpec(**sinusoidal) if sinusoidal else None,
            **{k: data[k] for k in ("noise_bpm", "seed", "duration_s", "sample_rate_hz",
                                    "uc_tone", "record_id") if k in data},
        )
        scenario.validate()
        return scenario
