"""
宫缩检测

以宫缩通道低百分位数为基础张力，寻找高出张力足够幅度且持续足够久的区段
"""

import logging
from typing import List, Optional

import numpy as np

from src.analysis.models import Episode, EpisodeKind
from src.config.config_parser import ContractionConfig
from src.record.ctg_record import CleanSignal
from src.utils.logger import get_logger
from src.utils.signal_helper import true_runs


class ContractionDetector:
    """宫缩检测器"""

    def __init__(self, config: Optional[ContractionConfig] = None,
                 logger: Optional[logging.Logger] = None):
        self.config = config or ContractionConfig()
        self.logger = logger or get_logger("contractions")

    def tone(self, uc: CleanSignal) -> Optional[float]:
        """基础张力 = 有效 UC 的 tone_percentile 百分位数"""
        samples = uc.values[uc.valid_mask]
        if samples.size == 0:
            return None
        return float(np.percentile(samples, self.config.tone_percentile))

    def detect(self, uc: CleanSignal) -> List[Episode]:
        """检测宫缩

        Args:
            uc: 预处理后的宫缩信号

        Returns:
            List[Episode]: 按起点排序的宫缩，可以为空
        """
        cfg = self.config
        tone = self.tone(uc)
        if tone is None:
            self.logger.warning("⚠️ UC 没有有效样本，跳过宫缩检测")
            return []

        fs = uc.fs
        above = np.where(uc.valid_mask, np.nan_to_num(uc.values) - tone, 0.0)
        min_len = cfg.min_duration_s * fs

        contractions: List[Episode] = []
        for start, end in true_runs(above >= cfg.min_amplitude):
            if end - start < min_len:
                continue
            peak = start + int(np.argmax(above[start:end]))
            if peak == start:
                continue
            contractions.append(Episode(
                kind=EpisodeKind.CONTRACTION,
                onset_s=start / fs,
                extremum_s=peak / fs,
                offset_s=(end - 1) / fs,
                amplitude_bpm=float(above[peak]),
                onset_to_extremum_s=(peak - start) / fs,
            ))

        self.logger.debug(f"张力 {tone:.1f}，检测到 {len(contractions)} 次宫缩")
        return contractions


def detect_contractions(uc: CleanSignal, config: Optional[ContractionConfig] = None) -> List[Episode]:
    """检测宫缩的便捷函数"""
    return ContractionDetector(config).detect(uc)
