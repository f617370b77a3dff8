"""
减速分型

按时长、下降速度和与宫缩的时间关系给每次减速分型，并检测突发减速的非典型特征
"""

import logging
from typing import FrozenSet, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy.signal import find_peaks

from src.analysis.episodes import baseline_deviation, running_median
from src.analysis.models import (
    AtypicalFeature,
    BaselineEstimate,
    DecelType,
    Episode,
    TypedDeceleration,
)
from src.config.config_parser import DecelerationConfig
from src.exceptions import BaselineIndeterminableError
from src.record.ctg_record import CleanSignal
from src.utils.logger import get_logger
from src.utils.signal_helper import moving_mean, window_samples


def classify_timing(onset_s: float, extremum_s: float, offset_s: float,
                    onset_to_nadir_s: float, contraction: Optional[Episode],
                    has_atypical: bool,
                    config: Optional[DecelerationConfig] = None) -> Tuple[DecelType, bool]:
    """按决策顺序确定减速类型

    检测器与合成数据的真值共用这一函数。

    Args:
        onset_s: 起点
        extremum_s: 最低点
        offset_s: 止点
        onset_to_nadir_s: 起点到最低点的时间
        contraction: 关联的宫缩（可以为空）
        has_atypical: 是否存在非典型特征（只对突发减速有意义）
        config: 分型配置

    Returns:
        Tuple[DecelType, bool]: (类型, 是否为不足 3 分钟的延长减速)
    """
    cfg = config or DecelerationConfig()
    duration = offset_s - onset_s

    if duration > cfg.prolonged_s:
        return DecelType.PROLONGED, False

    if onset_to_nadir_s < cfg.abrupt_onset_to_nadir_s:
        return (DecelType.ATYPICAL_VARIABLE if has_atypical else DecelType.VARIABLE), False

    # 无法关联宫缩的渐进减速按晚期处理，不论时长
    if contraction is None:
        return DecelType.LATE, False

    if (abs(extremum_s - contraction.extremum_s) <= cfg.early_nadir_window_s
            and contraction.onset_s <= onset_s <= contraction.offset_s):
        return DecelType.EARLY, False
    if (onset_s - contraction.onset_s > cfg.late_onset_lag_s
            and offset_s > contraction.offset_s):
        return DecelType.LATE, False

    # 关联了宫缩但时序既非早期也非晚期
    if cfg.sub3min_s < duration <= cfg.prolonged_s:
        return DecelType.PROLONGED, True
    return DecelType.LATE, False


def associate_contraction(decel: Episode, contractions: Sequence[Episode],
                          window_s: float = 60.0) -> Optional[Episode]:
    """找出与减速关联的宫缩

    优先取时间区间与减速相交的宫缩（多个时取峰值离最低点最近的），
    否则取峰值离最低点 window_s 以内最近的宫缩。
    """
    overlapping = [c for c in contractions if c.overlaps(decel)]
    pool = overlapping or [
        c for c in contractions if abs(c.extremum_s - decel.extremum_s) <= window_s
    ]
    if not pool:
        return None
    return min(pool, key=lambda c: (abs(c.extremum_s - decel.extremum_s), c.onset_s))


def count_overlapped(decel: Episode, contractions: Sequence[Episode]) -> int:
    """减速区间覆盖到的宫缩个数"""
    return sum(1 for c in contractions if c.overlaps(decel))


class AtypicalFeatureDetector:
    """非典型特征检测器

    所有窗口在记录边界处截断；截断后为空的窗口不判定对应特征。
    """

    def __init__(self, config: Optional[DecelerationConfig] = None):
        self.config = config or DecelerationConfig()

    def detect(self, decel: Episode, deviation: np.ndarray, smoothed: np.ndarray,
               valid: np.ndarray, fs: float) -> FrozenSet[AtypicalFeature]:
        """检测一次减速的非典型特征

        Args:
            decel: 减速事件
            deviation: 相对基线的偏差（无效位置为 NaN）
            smoothed: 滑动中值平滑后的偏差
            valid: 有效掩码
            fs: 采样率

        Returns:
            FrozenSet[AtypicalFeature]: 满足的特征集合
        """
        cfg = self.config
        n = len(deviation)
        onset = int(round(decel.onset_s * fs))
        offset = int(round(decel.offset_s * fs))

        def window(start: int, end: int) -> np.ndarray:
            start, end = max(0, start), min(n, end)
            if end <= start:
                return np.empty(0)
            return deviation[start:end][valid[start:end]]

        shoulder = window_samples(cfg.shoulder_window_s, fs)
        around = window_samples(cfg.resumption_window_s, fs)
        before_shoulder = window(onset - shoulder, onset)
        after_shoulder = window(offset + 1, offset + 1 + shoulder)
        before = window(onset - around, onset)
        after = window(offset + 1, offset + 1 + around)

        found: Set[AtypicalFeature] = set()

        if ((before_shoulder.size and before_shoulder.max() < cfg.shoulder_rise_bpm)
                or (after_shoulder.size and after_shoulder.max() < cfg.shoulder_rise_bpm)):
            found.add(AtypicalFeature.LOSS_OF_SHOULDER)

        depth = np.where(valid[onset:offset + 1], -smoothed[onset:offset + 1], -np.inf)
        peak = int(np.argmax(depth))
        recovered = np.flatnonzero(depth >= cfg.recovery_fraction * depth[peak])
        if (offset - (onset + int(recovered[-1]))) / fs > cfg.slow_return_s:
            found.add(AtypicalFeature.SLOW_RETURN)

        if after.size and after.mean() >= cfg.elevated_baseline_bpm:
            found.add(AtypicalFeature.PROLONGED_ELEVATED_BASELINE)

        if self._is_biphasic(deviation[onset:offset + 1], fs):
            found.add(AtypicalFeature.BIPHASIC)

        quarter = (offset - onset + 1) // 4
        center = slice(onset + quarter, offset + 1 - quarter)
        residual = (deviation[center] - smoothed[center])[valid[center]]
        if residual.size >= 2 and residual.max() - residual.min() < cfg.oscillation_floor_bpm:
            found.add(AtypicalFeature.LOSS_OF_OSCILLATION)

        if before.size and after.size and after.mean() <= before.mean() - cfg.lower_resumption_bpm:
            found.add(AtypicalFeature.LOWER_BASELINE_RESUMPTION)

        return frozenset(found)

    def _is_biphasic(self, span: np.ndarray, fs: float) -> bool:
        cfg = self.config
        depth = moving_mean(-np.nan_to_num(span), window_samples(cfg.biphasic_smoothing_s, fs))
        troughs, _ = find_peaks(depth, height=cfg.biphasic_depth_bpm,
                                prominence=cfg.biphasic_recovery_bpm)
        return len(troughs) >= 2


class DecelerationTyper:
    """减速分型器

    职责：
    1. 为每次减速关联宫缩并统计覆盖的宫缩数
    2. 对突发减速检测非典型特征
    3. 按决策顺序给出唯一的类型
    """

    def __init__(self, config: Optional[DecelerationConfig] = None,
                 logger: Optional[logging.Logger] = None):
        self.config = config or DecelerationConfig()
        self.logger = logger or get_logger("decel_typing")
        self.features = AtypicalFeatureDetector(self.config)

    def type_decelerations(self, decels: Sequence[Episode], contractions: Sequence[Episode],
                           fhr: CleanSignal, baseline: BaselineEstimate) -> List[TypedDeceleration]:
        """给每次减速分型

        Raises:
            BaselineIndeterminableError: 有减速但基线无法确定
        """
        if not decels:
            return []
        if not baseline.determinable:
            raise BaselineIndeterminableError("基线无法确定，不能给减速分型")

        cfg = self.config
        fs = fhr.fs
        deviation = baseline_deviation(fhr, baseline)
        smoothed = running_median(deviation, fhr.valid_mask, cfg.oscillation_median_s, fs)

        typed: List[TypedDeceleration] = []
        for decel in decels:
            contraction = associate_contraction(decel, contractions, cfg.association_window_s)
            abrupt = (
                decel.onset_to_extremum_s < cfg.abrupt_onset_to_nadir_s
                and decel.duration_s <= cfg.prolonged_s
            )
            features = (
                self.features.detect(decel, deviation, smoothed, fhr.valid_mask, fs)
                if abrupt else frozenset()
            )
            decel_type, sub3min = classify_timing(
                decel.onset_s, decel.extremum_s, decel.offset_s,
                decel.onset_to_extremum_s, contraction, bool(features), cfg,
            )
            typed.append(TypedDeceleration(
                episode=decel,
                decel_type=decel_type,
                atypical_features=features,
                associated_contraction=contraction,
                onset_to_nadir_s=decel.onset_to_extremum_s,
                sub3min=sub3min,
                overlapped_contractions=count_overlapped(decel, contractions),
            ))
            self.logger.debug(
                f"减速 {decel.onset_s:.0f}-{decel.offset_s:.0f}s: {decel_type.value}"
                f"{' ' + ','.join(sorted(f.value for f in features)) if features else ''}"
            )

        return typed


def atypical_features(decel: Episode, fhr: CleanSignal, baseline: BaselineEstimate,
                      config: Optional[DecelerationConfig] = None) -> FrozenSet[AtypicalFeature]:
    """检测单次减速非典型特征的便捷函数"""
    cfg = config or DecelerationConfig()
    deviation = baseline_deviation(fhr, baseline)
    smoothed = running_median(deviation, fhr.valid_mask, cfg.oscillation_median_s, fhr.fs)
    return AtypicalFeatureDetector(cfg).detect(decel, deviation, smoothed, fhr.valid_mask, fhr.fs)


def type_decelerations(decels: Sequence[Episode], contractions: Sequence[Episode],
                       fhr: CleanSignal, baseline: BaselineEstimate,
                       config: Optional[DecelerationConfig] = None) -> List[TypedDeceleration]:
    """减速分型的便捷函数"""
    return DecelerationTyper(config).type_decelerations(decels, contractions, fhr, baseline)
