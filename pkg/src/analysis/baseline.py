"""
基线估计

从平滑后胎心率直方图众数出发的迭代截尾均值
"""

import logging
from typing import Optional

import numpy as np

from src.analysis.models import BaselineEstimate
from src.config.config_parser import BaselineConfig
from src.exceptions import AllGapsError, TooShortError
from src.record.ctg_record import FHR_MAX_BPM, FHR_MIN_BPM, MIN_ANALYSIS_S, CleanSignal
from src.utils.logger import get_logger
from src.utils.signal_helper import moving_mean, segmentwise, window_samples


class BaselineEstimator:
    """基线估计器

    职责：
    1. 以 60 秒滑动平均后的 FHR 的 1 bpm 直方图众数作为初值
    2. 反复剔除偏离当前估计超过 exclusion_band_bpm 的样本并重算均值
    3. 以保留样本的时长判断基线是否可确定
    """

    def __init__(self, config: Optional[BaselineConfig] = None,
                 logger: Optional[logging.Logger] = None):
        self.config = config or BaselineConfig()
        self.logger = logger or get_logger("baseline")

    def estimate(self, fhr: CleanSignal) -> BaselineEstimate:
        """估计基线

        Args:
            fhr: 预处理后的胎心率

        Returns:
            BaselineEstimate: 基线估计

        Raises:
            TooShortError: 时长不足 600 秒
            AllGapsError: 没有有效样本
        """
        if fhr.duration_s < MIN_ANALYSIS_S:
            raise TooShortError(fhr.duration_s, MIN_ANALYSIS_S)
        if not fhr.valid_mask.any():
            raise AllGapsError("胎心率没有有效样本，无法估计基线")

        cfg = self.config
        fs = fhr.fs
        samples = fhr.values[fhr.valid_mask]

        size = window_samples(cfg.mode_smoothing_s, fs)
        smoothed = segmentwise(fhr.values, fhr.valid_mask, lambda seg: moving_mean(seg, size))
        bins, counts = np.unique(np.round(smoothed[fhr.valid_mask]), return_counts=True)
        estimate = float(bins[int(np.argmax(counts))])

        iterations = 0
        for iteration in range(1, cfg.max_iter + 1):
            included = np.abs(samples - estimate) <= cfg.exclusion_band_bpm
            if not included.any():
                break
            updated = float(samples[included].mean())
            iterations = iteration
            change = abs(updated - estimate)
            estimate = updated
            if change < cfg.convergence_bpm:
                break

        included = np.abs(samples - estimate) <= cfg.exclusion_band_bpm
        coverage_s = float(np.count_nonzero(included) / fs)
        determinable = (
            coverage_s >= cfg.min_coverage_s
            and FHR_MIN_BPM <= estimate <= FHR_MAX_BPM
        )

        if determinable:
            self.logger.debug(f"基线 {estimate:.2f} bpm，覆盖 {coverage_s:.0f}s，迭代 {iterations} 次")
        else:
            self.logger.warning(
                f"⚠️ 基线无法确定：覆盖 {coverage_s:.0f}s < {cfg.min_coverage_s:.0f}s"
            )

        return BaselineEstimate(
            value_bpm=estimate if determinable else None,
            determinable=determinable,
            coverage_s=coverage_s,
            iterations=iterations,
        )


def estimate_baseline(fhr: CleanSignal, config: Optional[BaselineConfig] = None) -> BaselineEstimate:
    """估计基线的便捷函数"""
    return BaselineEstimator(config).estimate(fhr)
