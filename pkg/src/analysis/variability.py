"""
变异性分析

按 1 分钟分段计算振幅带宽与振荡频率，并统计低/高变异的最长持续时间
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from src.analysis.models import BaselineEstimate, Episode, MinuteVariability, VariabilityProfile
from src.config.config_parser import VariabilityConfig
from src.exceptions import TooShortError
from src.record.ctg_record import MIN_ANALYSIS_S, CleanSignal
from src.utils.logger import get_logger

SECONDS_PER_MINUTE = 60.0


class VariabilityAnalyzer:
    """变异性分析器

    每分钟的振幅 = 保留样本的最大值减最小值（以分钟均值去趋势）；
    振荡次数 = 以分钟均值为参考、带 ±crossing_hysteresis_bpm 滞回的上穿次数，
    滞回状态跨分钟延续。保留样本不足一半的分钟标记为不可评估，
    既不计入也不打断连续段。
    """

    def __init__(self, config: Optional[VariabilityConfig] = None,
                 logger: Optional[logging.Logger] = None):
        self.config = config or VariabilityConfig()
        self.logger = logger or get_logger("variability")

    def profile(self, fhr: CleanSignal, baseline: Optional[BaselineEstimate] = None,
                exclude: Sequence[Episode] = ()) -> VariabilityProfile:
        """计算变异性概况

        Args:
            fhr: 预处理后的胎心率
            baseline: 基线估计（可以不可确定，分钟去趋势不依赖它）
            exclude: 需要排除的事件（加速/减速）

        Returns:
            VariabilityProfile: 变异性概况

        Raises:
            TooShortError: 时长不足 600 秒
        """
        if fhr.duration_s < MIN_ANALYSIS_S:
            raise TooShortError(fhr.duration_s, MIN_ANALYSIS_S)

        cfg = self.config
        fs = fhr.fs
        per_minute = int(round(SECONDS_PER_MINUTE * fs))
        n_minutes = fhr.n_samples // per_minute

        retained = fhr.valid_mask.copy()
        times = fhr.times()
        for episode in exclude:
            retained &= ~((times >= episode.onset_s) & (times <= episode.offset_s))

        minutes: List[MinuteVariability] = []
        high_state: Optional[bool] = None

        for k in range(n_minutes):
            window = slice(k * per_minute, (k + 1) * per_minute)
            keep = retained[window]
            values = fhr.values[window][keep]
            assessable = keep.sum() >= cfg.min_minute_fraction * per_minute

            if values.size == 0:
                minutes.append(MinuteVariability(k, 0.0, 0, assessable=False))
                continue

            centered = values - values.mean()
            amplitude = float(centered.max() - centered.min())

            crossings = 0
            for x in centered:
                if high_state is None:
                    high_state = x > 0
                elif not high_state and x > cfg.crossing_hysteresis_bpm:
                    high_state = True
                    crossings += 1
                elif high_state and x < -cfg.crossing_hysteresis_bpm:
                    high_state = False

            minutes.append(MinuteVariability(k, amplitude, crossings, assessable=bool(assessable)))

        return self.summarize(minutes)

    def summarize(self, minutes: Sequence[MinuteVariability]) -> VariabilityProfile:
        """由逐分钟结果汇总连续段、正常占比与振荡中位数"""
        cfg = self.config
        low_run = self._longest_run(minutes, lambda m: m.amplitude_bpm < cfg.low_threshold_bpm)
        high_run = self._longest_run(minutes, lambda m: m.amplitude_bpm > cfg.high_threshold_bpm)

        assessed = [m for m in minutes if m.assessable]
        normal = [m for m in assessed if self._amplitude_normal(m)]
        normal_fraction = len(normal) / len(assessed) if assessed else 0.0
        median_osc = float(np.median([m.oscillations_per_min for m in normal])) if normal else None

        self.logger.debug(
            f"变异性: 低变异最长 {low_run:.0f}s, 高变异最长 {high_run:.0f}s, "
            f"正常占比 {normal_fraction:.2f}, 振荡中位数 {median_osc}"
        )
        return VariabilityProfile(
            minutes=tuple(minutes),
            low_var_longest_run_s=low_run,
            high_var_longest_run_s=high_run,
            normal_fraction=normal_fraction,
            median_oscillations=median_osc,
        )

    def _amplitude_normal(self, minute: MinuteVariability) -> bool:
        cfg = self.config
        return cfg.low_threshold_bpm <= minute.amplitude_bpm <= cfg.high_threshold_bpm

    @staticmethod
    def _longest_run(minutes: Sequence[MinuteVariability], predicate) -> float:
        """满足条件的连续可评估分钟的最长时长（秒），不可评估分钟被跨过"""
        longest = current = 0
        for minute in minutes:
            if not minute.assessable:
                continue
            if predicate(minute):
                current += 1
                longest = max(longest, current)
            else:
                current = 0
        return longest * SECONDS_PER_MINUTE


def variability_profile(fhr: CleanSignal, baseline: Optional[BaselineEstimate] = None,
                        exclude: Sequence[Episode] = (),
                        config: Optional[VariabilityConfig] = None) -> VariabilityProfile:
    """计算变异性概况的便捷函数"""
    return VariabilityAnalyzer(config).profile(fhr, baseline, exclude)
