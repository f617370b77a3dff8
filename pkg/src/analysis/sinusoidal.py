"""
正弦波型检测

把去趋势后的胎心率切分为周期，找出幅度与周期都稳定的规则段，
再用频带能量占比与三次谐波失真区分平滑的真正弦波型与锯齿状的假正弦波型
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from src.analysis.models import BaselineEstimate, Episode, SinusoidalFinding, SinusoidalStatus
from src.config.config_parser import SinusoidalConfig
from src.exceptions import TooShortError
from src.record.ctg_record import MIN_ANALYSIS_S, CleanSignal
from src.utils.logger import get_logger
from src.utils.signal_helper import moving_mean, segmentwise, true_runs, window_samples

# Hann 窗主瓣半宽（频点数）
HANN_LOBE_BINS = 2


@dataclass(frozen=True)
class Cycle:
    """两次上穿之间的一个周期（样本下标，半开区间）"""
    start: int
    end: int
    half_range: float


@dataclass(frozen=True)
class RegularRun:
    """连续的规则周期段"""
    start: int
    end: int
    amplitude_bpm: float
    frequency_cpm: float
    smoothness: float

    def span_s(self, fs: float) -> float:
        return (self.end - self.start) / fs


def band_fraction(values: np.ndarray, fs: float, low_hz: float, high_hz: float,
                  max_hz: float) -> float:
    """去均值后 [low_hz, high_hz] 频带能量占 (0, max_hz] 总能量的比例"""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return 0.0
    power = np.abs(np.fft.rfft(values - values.mean())) ** 2
    freqs = np.fft.rfftfreq(values.size, d=1.0 / fs)
    total = power[(freqs > 0) & (freqs <= max_hz)].sum()
    if total <= 0:
        return 0.0
    band = power[(freqs >= low_hz) & (freqs <= high_hz)].sum()
    return float(band / total)


def harmonic_distortion(values: np.ndarray, fs: float, low_hz: float, high_hz: float) -> float:
    """三次谐波与基频的幅度比

    基频取 [low_hz, high_hz] 内加 Hann 窗后的功率峰，基频与三次谐波
    各取峰两侧 HANN_LOBE_BINS 个频点内的功率。正弦接近 0，三角波为 1/9。
    没有基频能量时返回 inf。
    """
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float("inf")
    windowed = (values - values.mean()) * np.hanning(values.size)
    power = np.abs(np.fft.rfft(windowed)) ** 2
    freqs = np.fft.rfftfreq(values.size, d=1.0 / fs)
    in_band = np.flatnonzero((freqs >= low_hz) & (freqs <= high_hz))
    if in_band.size == 0:
        return float("inf")

    peak = in_band[np.argmax(power[in_band])]
    lobe = HANN_LOBE_BINS * (freqs[1] - freqs[0])
    fundamental = power[np.abs(freqs - freqs[peak]) <= lobe].sum()
    if fundamental <= 0:
        return float("inf")
    third = power[np.abs(freqs - 3.0 * freqs[peak]) <= lobe].sum()
    return float(np.sqrt(third / fundamental))


def shape_smoothness(values: np.ndarray, fs: float, config: SinusoidalConfig) -> float:
    """平滑度 = 频带能量占比 × (1 - 三次谐波幅度比 / harmonic_tolerance)，截断到 [0, 1]

    锯齿状（三角波）波形基频占比虽接近 1，但三次谐波把平滑度压到 smooth_threshold 以下
    """
    fraction = band_fraction(values, fs, config.band_low_hz, config.band_high_hz, config.max_freq_hz)
    distortion = harmonic_distortion(values, fs, config.band_low_hz, config.band_high_hz)
    penalty = max(0.0, 1.0 - distortion / config.harmonic_tolerance)
    return float(fraction * penalty)


class SinusoidalDetector:
    """正弦波型检测器

    职责：
    1. 以 detrend_s 滑动平均去趋势，按带滞回的上穿切分周期
    2. 相邻周期幅度比与周期比都不超过 regularity_ratio 的周期组成规则段
    3. 规则段满足幅度/频率范围且平滑度足够时判为真或假正弦波型
    """

    def __init__(self, config: Optional[SinusoidalConfig] = None,
                 logger: Optional[logging.Logger] = None):
        self.config = config or SinusoidalConfig()
        self.logger = logger or get_logger("sinusoidal")

    def detect(self, fhr: CleanSignal, baseline: Optional[BaselineEstimate] = None,
               accels: Sequence[Episode] = ()) -> SinusoidalFinding:
        """检测正弦波型

        Args:
            fhr: 预处理后的胎心率
            baseline: 基线估计（去趋势不依赖它，保留以便统一调用）
            accels: 已接受的加速

        Returns:
            SinusoidalFinding: 检测结果

        Raises:
            TooShortError: 时长不足 600 秒
        """
        if fhr.duration_s < MIN_ANALYSIS_S:
            raise TooShortError(fhr.duration_s, MIN_ANALYSIS_S)

        cfg = self.config
        fs = fhr.fs
        size = window_samples(cfg.detrend_s, fs)
        detrended = segmentwise(fhr.values, fhr.valid_mask, lambda seg: seg - moving_mean(seg, size))

        runs: List[RegularRun] = []
        for start, end in true_runs(fhr.valid_mask):
            cycles = self.cycles(detrended[start:end], offset=start)
            runs.extend(self._regular_runs(cycles, detrended, fs))

        true_runs_found = [
            r for r in runs
            if self._qualifies(r)
            and r.span_s(fs) >= cfg.min_span_s
            and r.smoothness >= cfg.smooth_threshold
            and not any(self._overlaps(r, a, fs) for a in accels)
        ]
        pseudo_runs = [
            r for r in runs
            if self._qualifies(r) and r.span_s(fs) >= cfg.pseudo_min_span_s
        ]

        if true_runs_found:
            status, chosen = SinusoidalStatus.TRUE_SINUSOIDAL, self._longest(true_runs_found)
        elif pseudo_runs:
            status, chosen = SinusoidalStatus.PSEUDOSINUSOIDAL, self._longest(pseudo_runs)
        else:
            status, chosen = SinusoidalStatus.NONE, self._longest(runs) if runs else None

        if chosen is None:
            return SinusoidalFinding(SinusoidalStatus.NONE, None, 0.0, 0.0, 0.0)

        finding = SinusoidalFinding(
            status=status,
            span=(chosen.start / fs, chosen.end / fs),
            amplitude_bpm=chosen.amplitude_bpm,
            frequency_cpm=chosen.frequency_cpm,
            smoothness=chosen.smoothness,
        )
        self.logger.debug(
            f"正弦波型: {status.value}, 幅度 {chosen.amplitude_bpm:.1f} bpm, "
            f"频率 {chosen.frequency_cpm:.2f} cpm, 平滑度 {chosen.smoothness:.3f}, "
            f"跨度 {chosen.span_s(fs):.0f}s"
        )
        return finding

    def cycles(self, detrended: np.ndarray, offset: int = 0) -> List[Cycle]:
        """按带滞回的上穿切分周期"""
        h = self.config.crossing_hysteresis_bpm
        ups: List[int] = []
        low = False
        for i, x in enumerate(detrended):
            if x < -h:
                low = True
            elif low and x > h:
                ups.append(i)
                low = False

        return [
            Cycle(
                start=offset + a,
                end=offset + b,
                half_range=float(detrended[a:b].max() - detrended[a:b].min()) / 2.0,
            )
            for a, b in zip(ups, ups[1:])
        ]

    def _regular_runs(self, cycles: List[Cycle], detrended: np.ndarray,
                      fs: float) -> List[RegularRun]:
        ratio = self.config.regularity_ratio
        groups: List[List[Cycle]] = []
        for cycle in cycles:
            if groups:
                prev = groups[-1][-1]
                steady = (
                    max(cycle.half_range, prev.half_range) <= ratio * min(cycle.half_range, prev.half_range)
                    and max(cycle.end - cycle.start, prev.end - prev.start)
                    <= ratio * min(cycle.end - cycle.start, prev.end - prev.start)
                )
                if steady:
                    groups[-1].append(cycle)
                    continue
            groups.append([cycle])

        runs = []
        for group in groups:
            start, end = group[0].start, group[-1].end
            minutes = (end - start) / fs / 60.0
            runs.append(RegularRun(
                start=start,
                end=end,
                amplitude_bpm=float(np.mean([c.half_range for c in group])),
                frequency_cpm=len(group) / minutes,
                smoothness=self._smoothness(detrended[start:end], fs),
            ))
        return runs

    def _smoothness(self, values: np.ndarray, fs: float) -> float:
        """滑动窗口内平滑度的最小值，段短于一个窗口时取整段"""
        cfg = self.config
        window = window_samples(cfg.window_s, fs)
        step = window_samples(cfg.step_s, fs)

        if len(values) <= window:
            return shape_smoothness(values, fs, cfg)
        return min(
            shape_smoothness(values[i:i + window], fs, cfg)
            for i in range(0, len(values) - window + 1, step)
        )

    def _qualifies(self, run: RegularRun) -> bool:
        cfg = self.config
        return (
            cfg.min_amplitude_bpm <= run.amplitude_bpm <= cfg.max_amplitude_bpm
            and cfg.min_cpm <= run.frequency_cpm <= cfg.max_cpm
            and run.smoothness >= cfg.pseudo_threshold
        )

    @staticmethod
    def _overlaps(run: RegularRun, accel: Episode, fs: float) -> bool:
        return accel.onset_s <= run.end / fs and run.start / fs <= accel.offset_s

    @staticmethod
    def _longest(runs: Sequence[RegularRun]) -> RegularRun:
        return max(runs, key=lambda r: (r.end - r.start, -r.start))


def detect_sinusoidal(fhr: CleanSignal, baseline: Optional[BaselineEstimate] = None,
                      accels: Sequence[Episode] = (),
                      config: Optional[SinusoidalConfig] = None) -> SinusoidalFinding:
    """检测正弦波型的便捷函数"""
    return SinusoidalDetector(config).detect(fhr, baseline, accels)
