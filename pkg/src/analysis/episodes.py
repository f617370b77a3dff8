"""
加速/减速检测

以基线 ±deadband 为死区寻找偏移区段，再在滑动中值平滑后的偏差上向外细化边界
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.ndimage import median_filter

from src.analysis.models import BaselineEstimate, Episode, EpisodeKind
from src.config.config_parser import EpisodeConfig
from src.exceptions import BaselineIndeterminableError
from src.record.ctg_record import CleanSignal
from src.utils.logger import get_logger
from src.utils.signal_helper import segmentwise, true_runs, window_samples

ABOVE = 1
BELOW = -1


def running_median(values: np.ndarray, valid: np.ndarray, window_s: float, fs: float) -> np.ndarray:
    """逐有效区段的居中滑动中值，无效位置为 NaN"""
    size = window_samples(window_s, fs, odd=True)
    return segmentwise(values, valid, lambda seg: median_filter(seg, size=size, mode="nearest"))


def baseline_deviation(fhr: CleanSignal, baseline: BaselineEstimate) -> np.ndarray:
    """相对基线的偏差，无效位置为 NaN"""
    return np.where(fhr.valid_mask, fhr.values - baseline.value_bpm, np.nan)


class ExcursionDetector:
    """加速/减速检测器

    职责：
    1. 找出原始偏差超出死区的区段，短于 reentry_s 的回落合并为同一区段
    2. 峰值偏差超过 min_amplitude_bpm 的区段作为候选
    3. 在平滑偏差上把起止点向外推到偏差不再减小处
    4. 按幅度与时长阈值接受事件
    """

    def __init__(self, config: Optional[EpisodeConfig] = None,
                 logger: Optional[logging.Logger] = None):
        self.config = config or EpisodeConfig()
        self.logger = logger or get_logger("episodes")

    def detect(self, fhr: CleanSignal, baseline: BaselineEstimate) -> List[Episode]:
        """检测加速与减速

        Args:
            fhr: 预处理后的胎心率
            baseline: 基线估计，必须可确定

        Returns:
            List[Episode]: 按起点排序的加速与减速

        Raises:
            BaselineIndeterminableError: 基线无法确定
        """
        if not baseline.determinable:
            raise BaselineIndeterminableError("基线无法确定，不能检测加速/减速")

        cfg = self.config
        fs = fhr.fs
        valid = fhr.valid_mask
        n = fhr.n_samples

        deviation = baseline_deviation(fhr, baseline)
        smoothed = running_median(deviation, valid, cfg.smoothing_s, fs)
        candidates = self._candidates(deviation, valid, fs)
        search = window_samples(cfg.boundary_search_s, fs)

        episodes: List[Episode] = []
        last_offset = -1
        for k, (start, end, side) in enumerate(candidates):
            lower = candidates[k - 1][1] if k > 0 else 0
            upper = candidates[k + 1][0] - 1 if k + 1 < len(candidates) else n - 1
            onset, offset = self._refine(side * smoothed, valid, start, end, lower, upper, search)
            if onset <= last_offset:
                onset = last_offset + 1

            episode = self._build(side, onset, offset, deviation, smoothed, valid, fs)
            if episode is None:
                continue
            episodes.append(episode)
            last_offset = offset

        self.logger.debug(
            f"检测到 {sum(e.kind is EpisodeKind.ACCELERATION for e in episodes)} 次加速, "
            f"{sum(e.kind is EpisodeKind.DECELERATION for e in episodes)} 次减速"
        )
        return episodes

    def _candidates(self, deviation: np.ndarray, valid: np.ndarray,
                    fs: float) -> List[Tuple[int, int, int]]:
        cfg = self.config
        reentry = window_samples(cfg.reentry_s, fs)
        found: List[Tuple[int, int, int]] = []

        for side in (ABOVE, BELOW):
            signed = np.where(valid, side * np.nan_to_num(deviation), 0.0)
            merged: List[List[int]] = []
            for start, end in true_runs(signed > cfg.deadband_bpm):
                if merged and start - merged[-1][1] < reentry and valid[merged[-1][1]:start].all():
                    merged[-1][1] = end
                else:
                    merged.append([start, end])
            for start, end in merged:
                if signed[start:end].max() > cfg.min_amplitude_bpm:
                    found.append((start, end, side))

        return sorted(found)

    @staticmethod
    def _refine(signed: np.ndarray, valid: np.ndarray, start: int, end: int,
                lower: int, upper: int, search: int) -> Tuple[int, int]:
        """向外细化起止点（样本下标，止点含在内）"""
        floor = max(lower, start - search)
        i = start - 1
        while i >= floor and valid[i] and signed[i] > 0 and signed[i] <= signed[i + 1]:
            i -= 1

        ceiling = min(upper, end - 1 + search)
        j = end
        while j <= ceiling and valid[j] and signed[j] > 0 and signed[j] <= signed[j - 1]:
            j += 1

        return i + 1, j - 1

    def _build(self, side: int, onset: int, offset: int, deviation: np.ndarray,
               smoothed: np.ndarray, valid: np.ndarray, fs: float) -> Optional[Episode]:
        cfg = self.config
        span = slice(onset, offset + 1)
        if offset <= onset:
            return None

        amplitude = float(np.nanmax(side * deviation[span]))
        signed = np.where(valid[span], side * smoothed[span], -np.inf)
        peak = int(np.argmax(signed))
        if peak == 0:
            return None
        reach = int(np.flatnonzero(signed >= cfg.nadir_fraction * signed[peak])[0])

        duration_s = (offset - onset) / fs
        if amplitude <= cfg.min_amplitude_bpm or duration_s <= cfg.min_duration_s:
            return None

        return Episode(
            kind=EpisodeKind.ACCELERATION if side == ABOVE else EpisodeKind.DECELERATION,
            onset_s=onset / fs,
            extremum_s=(onset + peak) / fs,
            offset_s=offset / fs,
            amplitude_bpm=amplitude,
            onset_to_extremum_s=reach / fs,
        )


def detect_excursions(fhr: CleanSignal, baseline: BaselineEstimate,
                      config: Optional[EpisodeConfig] = None) -> List[Episode]:
    """检测加速与减速的便捷函数"""
    return ExcursionDetector(config).detect(fhr, baseline)


def split_by_kind(episodes: List[Episode]) -> Tuple[List[Episode], List[Episode]]:
    """把事件列表拆分为 (加速, 减速)"""
    accels = [e for e in episodes if e.kind is EpisodeKind.ACCELERATION]
    decels = [e for e in episodes if e.kind is EpisodeKind.DECELERATION]
    return accels, decels
