"""
信号预处理

缺失插值与中值滤波
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.ndimage import median_filter

from src.config.config_parser import PreprocessConfig
from src.exceptions import TooShortError
from src.record.ctg_record import CleanSignal, CtgRecord
from src.utils.logger import get_logger
from src.utils.signal_helper import true_runs, window_samples


class SignalPreprocessor:
    """信号预处理器

    职责：
    1. 对不超过 max_gap_s 的内部缺失做线性插值，较长缺失保持无效
    2. 对每个连续有效区段做中值滤波直到输出不再变化（中值根），保证幂等
    """

    def __init__(self, config: Optional[PreprocessConfig] = None,
                 logger: Optional[logging.Logger] = None):
        self.config = config or PreprocessConfig()
        self.logger = logger or get_logger("preprocess")

    def preprocess(self, record: CtgRecord) -> Tuple[CleanSignal, CleanSignal]:
        """预处理一条记录

        Args:
            record: CTG 记录

        Returns:
            Tuple[CleanSignal, CleanSignal]: (fhr, uc)

        Raises:
            TooShortError: 记录时长不足
        """
        if record.duration_s < self.config.min_duration_s:
            raise TooShortError(record.duration_s, self.config.min_duration_s)

        fs = record.fs
        fhr_valid = ~record.gap_mask
        uc_valid = np.isfinite(record.uc)

        fhr = self._clean(record.fhr, fhr_valid, fs, self.config.fhr_median_s)
        uc = self._clean(record.uc, uc_valid, fs, self.config.uc_median_s)

        self.logger.debug(
            f"{record.record_id}: FHR 有效 {fhr.valid_seconds:.0f}s, "
            f"UC 有效 {uc.valid_seconds:.0f}s"
        )
        return fhr, uc

    def _clean(self, values: np.ndarray, valid: np.ndarray,
               fs: float, median_s: float) -> CleanSignal:
        values, valid = self.fill_short_gaps(values, valid, fs)
        size = window_samples(median_s, fs, odd=True)
        values = self.median_root(values, valid, size)
        return CleanSignal(values=values, sample_rate_hz=fs, valid_mask=valid)

    def fill_short_gaps(self, values: np.ndarray, valid: np.ndarray,
                        fs: float) -> Tuple[np.ndarray, np.ndarray]:
        """线性插值不超过 max_gap_s 的内部缺失

        首尾的缺失没有两侧参考值，保持无效。
        """
        values = np.array(values, dtype=float)
        valid = np.array(valid, dtype=bool)
        values[~valid] = np.nan
        limit = self.config.max_gap_s * fs

        for start, end in true_runs(~valid):
            if start == 0 or end == len(values) or end - start > limit:
                continue
            positions = np.arange(start, end)
            values[start:end] = np.interp(
                positions,
                [start - 1, end],
                [values[start - 1], values[end]],
            )
            valid[start:end] = True

        return values, valid

    def median_root(self, values: np.ndarray, valid: np.ndarray, size: int) -> np.ndarray:
        """逐区段重复中值滤波直到不再变化"""
        out = np.array(values, dtype=float)
        for start, end in true_runs(valid):
            segment = out[start:end]
            for _ in range(self.config.max_median_passes):
                filtered = median_filter(segment, size=size, mode="nearest")
                if np.array_equal(filtered, segment):
                    break
                segment = filtered
            out[start:end] = segment
        return out


def preprocess(record: CtgRecord,
               config: Optional[PreprocessConfig] = None) -> Tuple[CleanSignal, CleanSignal]:
    """预处理记录的便捷函数"""
    return SignalPreprocessor(config).preprocess(record)
