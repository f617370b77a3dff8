"""
CTG 记录数据模型

定义胎心率/宫缩配对采样序列及预处理后的信号类型
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from src.exceptions import LengthMismatchError, OutOfRangeError

FHR_MIN_BPM = 30.0
FHR_MAX_BPM = 250.0
UC_MIN = 0.0
UC_MAX = 100.0

# 分析所需的最短时长（秒）
MIN_ANALYSIS_S = 600.0


class BinaryLabel(Enum):
    """二分类参考标签（可疑病例归入异常）"""
    NORMAL = "normal"
    ABNORMAL = "abnormal"

    @classmethod
    def parse(cls, text: str) -> "BinaryLabel":
        """解析标签文本（不区分大小写）

        Raises:
            ValueError: 文本不是 normal/abnormal
        """
        return cls(str(text).strip().lower())


def _as_rate(rate: Union[Fraction, float, int]) -> Fraction:
    value = Fraction(rate).limit_denominator(1000)
    if value <= 0:
        raise OutOfRangeError("sample_rate_hz", float(rate))
    return value


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class CtgRecord:
    """CTG 记录

    fhr 在缺失位置为 NaN；构造后数组只读，可在线程间共享。
    """
    fhr: np.ndarray
    uc: np.ndarray
    sample_rate_hz: Fraction
    gap_mask: np.ndarray
    record_id: str
    reference_label: Optional[BinaryLabel] = None

    def __post_init__(self):
        fhr = _frozen_array(self.fhr, float)
        uc = _frozen_array(self.uc, float)
        gap = _frozen_array(self.gap_mask, bool)

        if not (len(fhr) == len(uc) == len(gap)):
            raise LengthMismatchError({"fhr": len(fhr), "uc": len(uc), "gap_mask": len(gap)})

        valid_fhr = fhr[~gap]
        if valid_fhr.size and (
            np.any(~np.isfinite(valid_fhr))
            or valid_fhr.min() < FHR_MIN_BPM
            or valid_fhr.max() > FHR_MAX_BPM
        ):
            bad = valid_fhr[~np.isfinite(valid_fhr) | (valid_fhr < FHR_MIN_BPM) | (valid_fhr > FHR_MAX_BPM)]
            raise OutOfRangeError("fhr", float(bad[0]))

        finite_uc = uc[np.isfinite(uc)]
        if finite_uc.size and (finite_uc.min() < UC_MIN or finite_uc.max() > UC_MAX):
            bad = finite_uc[(finite_uc < UC_MIN) | (finite_uc > UC_MAX)]
            raise OutOfRangeError("uc", float(bad[0]))

        object.__setattr__(self, "fhr", fhr)
        object.__setattr__(self, "uc", uc)
        object.__setattr__(self, "gap_mask", gap)
        object.__setattr__(self, "sample_rate_hz", _as_rate(self.sample_rate_hz))

    @property
    def fs(self) -> float:
        """采样率（浮点数，便于数值计算）"""
        return float(self.sample_rate_hz)

    @property
    def n_samples(self) -> int:
        return len(self.fhr)

    @property
    def duration_s(self) -> float:
        """记录时长（秒）= 样本数 / 采样率"""
        return float(self.n_samples / self.sample_rate_hz)

    def times(self) -> np.ndarray:
        """每个样本的时间（秒）"""
        return np.arange(self.n_samples) / self.fs

    def with_label(self, label: Optional[BinaryLabel]) -> "CtgRecord":
        """返回带有参考标签的新记录"""
        return CtgRecord(
            fhr=self.fhr,
            uc=self.uc,
            sample_rate_hz=self.sample_rate_hz,
            gap_mask=self.gap_mask,
            record_id=self.record_id,
            reference_label=label,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CtgRecord):
            return NotImplemented
        return (
            self.record_id == other.record_id
            and self.sample_rate_hz == other.sample_rate_hz
            and self.reference_label == other.reference_label
            and np.array_equal(self.gap_mask, other.gap_mask)
            and np.array_equal(self.fhr, other.fhr, equal_nan=True)
            and np.array_equal(self.uc, other.uc, equal_nan=True)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class CleanSignal:
    """预处理后的信号

    valid_mask 为 True 的位置不含 NaN；无效位置保持 NaN。
    """
    values: np.ndarray
    sample_rate_hz: Fraction
    valid_mask: np.ndarray

    def __post_init__(self):
        values = _frozen_array(self.values, float)
        valid = _frozen_array(self.valid_mask, bool)
        if len(values) != len(valid):
            raise LengthMismatchError({"values": len(values), "valid_mask": len(valid)})
        if np.any(~np.isfinite(values[valid])):
            raise OutOfRangeError("values", float("nan"))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "valid_mask", valid)
        object.__setattr__(self, "sample_rate_hz", _as_rate(self.sample_rate_hz))

    @property
    def fs(self) -> float:
        return float(self.sample_rate_hz)

    @property
    def n_samples(self) -> int:
        return len(self.values)

    @property
    def duration_s(self) -> float:
        return float(self.n_samples / self.sample_rate_hz)

    @property
    def valid_seconds(self) -> float:
        """有效样本对应的时长（秒）"""
        return float(np.count_nonzero(self.valid_mask) / self.fs)

    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) / self.fs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CleanSignal):
            return NotImplemented
        return (
            self.sample_rate_hz == other.sample_rate_hz
            and np.array_equal(self.valid_mask, other.valid_mask)
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    __hash__ = None
