"""
信号处理工具

提供游程查找、窗口换算和滑动平均等共用的数组辅助函数
"""

from typing import List, Tuple

import numpy as np
from scipy.ndimage import uniform_filter1d


def true_runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """查找布尔数组中连续为 True 的区间

    Args:
        mask: 一维布尔数组

    Returns:
        List[Tuple[int, int]]: 半开区间 [start, end) 列表，按起点排序
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.size == 0:
        return []
    padded = np.concatenate(([False], mask, [False])).astype(np.int8)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    return [(int(s), int(e)) for s, e in zip(starts, ends)]


def window_samples(window_s: float, fs: float, odd: bool = False) -> int:
    """把以秒为单位的窗口换算为样本数

    Args:
        window_s: 窗口长度（秒）
        fs: 采样率（Hz）
        odd: 是否强制为奇数（中值滤波需要居中窗口）

    Returns:
        int: 至少为 1 的样本数
    """
    size = max(1, int(round(window_s * fs)))
    if odd and size % 2 == 0:
        size += 1
    return size


def moving_mean(values: np.ndarray, size: int) -> np.ndarray:
    """居中滑动平均，边界按最近值延拓

    输入中不能含有 NaN，调用方需先按有效区段切分。
    """
    if size <= 1:
        return np.asarray(values, dtype=float).copy()
    return uniform_filter1d(np.asarray(values, dtype=float), size=size, mode="nearest")


def segmentwise(values: np.ndarray, valid: np.ndarray, func) -> np.ndarray:
    """对每个连续有效区段分别应用 func，无效位置保持 NaN

    Args:
        values: 原始数组
        valid: 有效掩码
        func: 接受一维数组并返回同长度数组的函数

    Returns:
        np.ndarray: 处理后的数组
    """
    out = np.full(len(values), np.nan)
    for start, end in true_runs(valid):
        out[start:end] = func(np.asarray(values[start:end], dtype=float))
    return out
