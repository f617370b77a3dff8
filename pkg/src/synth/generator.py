"""
合成记录生成器

FHR = 基线 + 变异性振荡 + 事件形状 + 噪声；UC = 张力 + 高斯宫缩
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from src.record.ctg_record import FHR_MAX_BPM, FHR_MIN_BPM, UC_MAX, UC_MIN, CtgRecord
from src.synth.ground_truth import GroundTruth, derive_ground_truth
from src.synth.scenario import (
    RAISED_COSINE,
    SHOULDER_BPM,
    SHOULDER_WIDTH_S,
    SLOW_RETURN_S,
    AccelerationSpec,
    ContractionSpec,
    DecelerationSpec,
    Scenario,
    SinusoidSpec,
    VariabilitySpec,
)
from src.utils.logger import get_logger

LOWER_RESUMPTION_PRE = (90.0, 2.5)
LOWER_RESUMPTION_POST = (150.0, -4.0)


def _ramp(x: np.ndarray) -> np.ndarray:
    return np.clip(x, 0.0, 1.0)


def _half_cosine(x: np.ndarray) -> np.ndarray:
    """0→1 的升余弦过渡，x 在 [0, 1] 之外时截断"""
    return (1.0 - np.cos(math.pi * np.clip(x, 0.0, 1.0))) / 2.0


def variability_wave(t: np.ndarray, spec: VariabilitySpec) -> np.ndarray:
    """变异性振荡：从波谷开始，幅度在每次上穿零点时切换"""
    f = spec.cycles_per_min / 60.0
    return spec.half_amplitude(t) * np.sin(2 * math.pi * f * t - math.pi / 2)


def sinusoid_wave(t: np.ndarray, spec: SinusoidSpec) -> np.ndarray:
    phase = 2 * math.pi * spec.cpm / 60.0 * (t - spec.start_s) - math.pi / 2
    if spec.waveform == "triangle":
        return spec.amplitude_bpm * (2 / math.pi) * np.arcsin(np.sin(phase))
    return spec.amplitude_bpm * np.sin(phase)


def acceleration_shape(t: np.ndarray, spec: AccelerationSpec) -> np.ndarray:
    """梯形（坡长 min(10, 时长/4)）或升余弦加速"""
    x = t - spec.onset_s
    d = spec.duration_s
    if spec.shape == RAISED_COSINE:
        inside = (x >= 0) & (x <= d)
        return np.where(inside, spec.amplitude_bpm * (1 - np.cos(2 * math.pi * x / d)) / 2, 0.0)
    ramp = min(10.0, d / 4.0)
    return spec.amplitude_bpm * np.minimum(_ramp(x / ramp), _ramp((d - x) / ramp))


def deceleration_depth(t: np.ndarray, spec: DecelerationSpec) -> np.ndarray:
    """减速深度（正值），包含 biphasic / slow_return 变体"""
    x = t - spec.onset_s
    d = spec.duration_s
    otn = spec.onset_to_nadir_s
    a = spec.amplitude_bpm

    if spec.shape == RAISED_COSINE:
        descent = _half_cosine(x / otn)
        recovery = 1.0 - _half_cosine((x - otn) / (d - otn))
        return np.where((x >= 0) & (x <= d), a * np.where(x < otn, descent, recovery), 0.0)

    if "biphasic" in spec.atypical:
        middle = d - 2 * otn
        second = 0.8 * a
        knots_t = np.array([0, otn, 0.2 * middle, 0.1 * middle, 0.35 * middle, 0.1 * middle,
                            0.25 * middle, otn]).cumsum()
        knots_v = np.array([0, a, a, second - 12.0, second - 12.0, second, second, 0])
        return np.where((x >= 0) & (x <= d), np.interp(x, knots_t, knots_v), 0.0)

    recovery = SLOW_RETURN_S if "slow_return" in spec.atypical else otn
    return a * np.minimum(_ramp(x / otn), _ramp((d - x) / recovery))


def shoulder_shape(t: np.ndarray, spec: DecelerationSpec) -> np.ndarray:
    """减速前后各一个 12 秒宽的升余弦小幅上升"""
    out = np.zeros_like(t)
    for start in (spec.onset_s - SHOULDER_WIDTH_S, spec.offset_s):
        x = (t - start) / SHOULDER_WIDTH_S
        inside = (x >= 0) & (x <= 1)
        out += np.where(inside, SHOULDER_BPM * (1 - np.cos(2 * math.pi * x)) / 2, 0.0)
    return out


def contraction_shape(t: np.ndarray, spec: ContractionSpec) -> np.ndarray:
    return spec.amplitude * np.exp(-((t - spec.peak_s) ** 2) / (2 * spec.sigma_s ** 2))


class TraceGenerator:
    """合成记录生成器

    相同场景（含 seed）生成逐位相同的记录；不同 seed 只影响噪声。
    """

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger or get_logger("synth")

    def generate(self, scenario: Scenario) -> CtgRecord:
        """按场景生成记录

        Raises:
            OutOfRangeError: 参数越界
            OverlapError: 同类事件重叠
        """
        scenario.validate()
        fs = scenario.sample_rate_hz
        n = int(round(scenario.duration_s * fs))
        t = np.arange(n) / fs

        fhr = self._fhr(t, scenario)
        uc = np.full(n, float(scenario.uc_tone))
        for contraction in scenario.all_contractions():
            uc += contraction_shape(t, contraction)

        record = CtgRecord(
            fhr=np.clip(fhr, FHR_MIN_BPM, FHR_MAX_BPM),
            uc=np.clip(uc, UC_MIN, UC_MAX),
            sample_rate_hz=fs,
            gap_mask=np.zeros(n, dtype=bool),
            record_id=scenario.name,
        )
        self.logger.debug(
            f"生成 {record.record_id}: {n} 样本, 加速 {len(scenario.accelerations)}, "
            f"减速 {len(scenario.decelerations)}, 宫缩 {len(scenario.all_contractions())}"
        )
        return record

    def _fhr(self, t: np.ndarray, scenario: Scenario) -> np.ndarray:
        oscillation = variability_wave(t, scenario.variability)

        sinusoid = scenario.sinusoidal
        if sinusoid is not None:
            inside = (t >= sinusoid.start_s) & (t < sinusoid.end_s)
            oscillation = np.where(inside, sinusoid_wave(t, sinusoid), oscillation)

        episodes = np.zeros_like(t)
        for accel in scenario.accelerations:
            episodes += acceleration_shape(t, accel)
        for decel in scenario.decelerations:
            episodes -= deceleration_depth(t, decel)
            if decel.has_shoulders:
                episodes += shoulder_shape(t, decel)
            if "loss_of_oscillation" in decel.atypical:
                oscillation[(t >= decel.onset_s) & (t <= decel.offset_s)] = 0.0
            if "lower_resumption" in decel.atypical:
                episodes += self._resumption_offsets(t, decel)

        fhr = scenario.baseline_bpm + oscillation + episodes
        if scenario.noise_bpm > 0:
            rng = np.random.default_rng(scenario.seed)
            fhr = fhr + rng.normal(0.0, scenario.noise_bpm, size=t.shape)
        return fhr

    @staticmethod
    def _resumption_offsets(t: np.ndarray, decel: DecelerationSpec) -> np.ndarray:
        pre_s, pre_bpm = LOWER_RESUMPTION_PRE
        post_s, post_bpm = LOWER_RESUMPTION_POST
        out = np.zeros_like(t)
        out[(t >= decel.onset_s - pre_s) & (t < decel.onset_s)] = pre_bpm
        out[(t > decel.offset_s) & (t <= decel.offset_s + post_s)] = post_bpm
        return out


def generate(scenario: Scenario) -> Tuple[CtgRecord, GroundTruth]:
    """生成记录并计算真值"""
    return TraceGenerator().generate(scenario), derive_ground_truth(scenario)
