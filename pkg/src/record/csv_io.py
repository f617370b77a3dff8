"""
CSV 读写

读取和保存规范格式的轨迹文件（t_s,fhr_bpm,uc），以及轨迹目录和标签文件
"""

import logging
import re
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd

from src.exceptions import (
    EmptyRecordError,
    LengthMismatchError,
    MalformedRowError,
)
from src.record.ctg_record import (
    FHR_MAX_BPM,
    FHR_MIN_BPM,
    UC_MAX,
    UC_MIN,
    BinaryLabel,
    CtgRecord,
)
from src.utils.logger import get_logger

PathLike = Union[str, Path]

LABELS_FILE = "labels.csv"

# 表头别名 -> 规范列名
COLUMN_ALIASES = {
    "t_s": "t_s",
    "fhr_bpm": "fhr_bpm",
    "fhr": "fhr_bpm",
    "uc": "uc",
    "toco": "uc",
}

_LINE_PATTERN = re.compile(r"line (\d+)")


def _format_number(value: float) -> str:
    """最短往返十进制表示（140.0 -> "140"）"""
    return np.format_float_positional(float(value), trim='-')


def _read_frame(path: Path) -> pd.DataFrame:
    """以字符串方式读取 CSV，保留空单元格

    Raises:
        EmptyRecordError: 文件为空
        MalformedRowError: 字段数超出表头
    """
    try:
        return pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        raise EmptyRecordError(f"文件为空: {path}")
    except pd.errors.ParserError as e:
        match = _LINE_PATTERN.search(str(e))
        raise MalformedRowError(int(match.group(1)) if match else None, str(e))


def _canonical_columns(frame: pd.DataFrame) -> pd.DataFrame:
    renamed = {}
    for column in frame.columns:
        key = str(column).strip().lower()
        if key in COLUMN_ALIASES:
            renamed[column] = COLUMN_ALIASES[key]
    frame = frame.rename(columns=renamed)

    missing = [name for name in ("fhr_bpm", "uc") if name not in frame.columns]
    if missing:
        raise MalformedRowError(1, f"表头缺少列: {', '.join(missing)}")

    columns = [name for name in ("t_s", "fhr_bpm", "uc") if name in frame.columns]
    return frame[columns]


def _check_lengths(frame: pd.DataFrame) -> None:
    """检查各列长度

    行中缺少的字段在 pandas 中表现为 NaN。只出现在列尾部的缺失视为该列较短
    （LengthMismatch），出现在中间的缺失视为格式错误的行。
    """
    lengths: Dict[str, int] = {}
    for column in frame.columns:
        missing = frame[column].isna().to_numpy()
        present = np.flatnonzero(~missing)
        length = int(present[-1]) + 1 if present.size else 0
        holes = np.flatnonzero(missing[:length])
        if holes.size:
            # 表头占第 1 行
            raise MalformedRowError(int(holes[0]) + 2, f"列 {column} 缺少字段")
        lengths[column] = length

    if len(set(lengths.values())) > 1:
        raise LengthMismatchError(lengths)


def _sample_rate(frame: pd.DataFrame, default_rate: float) -> Fraction:
    if "t_s" not in frame.columns:
        return Fraction(default_rate).limit_denominator(1000)

    times = pd.to_numeric(frame["t_s"], errors="coerce")
    bad = np.flatnonzero(times.isna().to_numpy())
    if bad.size:
        raise MalformedRowError(int(bad[0]) + 2, f"t_s 不是数值: {frame['t_s'].iloc[bad[0]]!r}")

    if len(times) < 2:
        return Fraction(default_rate).limit_denominator(1000)

    step = float(np.median(np.diff(times.to_numpy())))
    if step <= 0:
        raise MalformedRowError(None, "t_s 必须严格递增")
    return Fraction(1.0 / step).limit_denominator(1000)


def load_csv(
    path: PathLike,
    label: Optional[BinaryLabel] = None,
    default_rate: float = 4.0,
    logger: Optional[logging.Logger] = None,
) -> CtgRecord:
    """读取轨迹文件

    Args:
        path: CSV 文件路径，文件名（不含扩展名）作为 record_id
        label: 参考标签（可选）
        default_rate: 没有 t_s 列时使用的采样率
        logger: 日志记录器（可选）

    Returns:
        CtgRecord: 读取的记录

    Raises:
        FileNotFoundError: 文件不存在
        MalformedRowError: 行格式错误
        LengthMismatchError: 列长度不一致
        EmptyRecordError: 没有样本
    """
    logger = logger or get_logger("record")
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"轨迹文件不存在: {path.absolute()}")

    frame = _canonical_columns(_read_frame(path))
    if frame.empty:
        raise EmptyRecordError(f"文件没有样本: {path}")

    _check_lengths(frame)
    rate = _sample_rate(frame, default_rate)

    fhr = pd.to_numeric(frame["fhr_bpm"], errors="coerce").to_numpy(dtype=float)
    uc = pd.to_numeric(frame["uc"], errors="coerce").to_numpy(dtype=float)

    gap = (
        np.isnan(fhr)
        | (fhr == 0)
        | (fhr < FHR_MIN_BPM)
        | (fhr > FHR_MAX_BPM)
        | np.isnan(uc)
    )
    fhr[gap] = np.nan
    uc = np.clip(uc, UC_MIN, UC_MAX)

    record = CtgRecord(
        fhr=fhr,
        uc=uc,
        sample_rate_hz=rate,
        gap_mask=gap,
        record_id=path.stem,
        reference_label=label,
    )
    logger.debug(
        f"读取记录 {record.record_id}: {record.n_samples} 个样本, "
        f"{rate} Hz, 缺失 {int(gap.sum())} 个"
    )
    return record


def save_csv(record: CtgRecord, path: PathLike) -> Path:
    """保存为规范格式的 CSV

    缺失位置写为空的 FHR 单元格，保证 读→写→读 结果一致

    Returns:
        Path: 写入的文件路径
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    rate = record.sample_rate_hz
    frame = pd.DataFrame({
        "t_s": [_format_number(i / rate) for i in range(record.n_samples)],
        "fhr_bpm": ["" if np.isnan(v) else _format_number(v) for v in record.fhr],
        "uc": ["" if np.isnan(v) else _format_number(v) for v in record.uc],
    })
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    return path


def load_labels(path: PathLike) -> Dict[str, BinaryLabel]:
    """读取标签文件（record_id,label）

    Raises:
        FileNotFoundError: 文件不存在
        MalformedRowError: 缺少列或标签值非法
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"标签文件不存在: {path.absolute()}")

    frame = _read_frame(path)
    frame.columns = [str(c).strip().lower() for c in frame.columns]
    if "record_id" not in frame.columns or "label" not in frame.columns:
        raise MalformedRowError(1, "标签文件需要 record_id,label 两列")

    labels: Dict[str, BinaryLabel] = {}
    for index, (record_id, text) in enumerate(zip(frame["record_id"], frame["label"])):
        try:
            labels[str(record_id).strip()] = BinaryLabel.parse(text)
        except ValueError:
            raise MalformedRowError(index + 2, f"非法标签: {text!r}")
    return labels


def save_labels(labels: Dict[str, BinaryLabel], path: PathLike) -> Path:
    """保存标签文件，按 record_id 排序"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ids = sorted(labels)
    frame = pd.DataFrame({
        "record_id": ids,
        "label": [labels[i].value for i in ids],
    })
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    return path


def load_trace_directory(
    directory: PathLike,
    labels: Optional[Dict[str, BinaryLabel]] = None,
    default_rate: float = 4.0,
    logger: Optional[logging.Logger] = None,
) -> List[CtgRecord]:
    """读取轨迹目录 <dir>/<record_id>.csv

    Args:
        directory: 目录路径
        labels: record_id -> 标签（可选）
        default_rate: 没有 t_s 列时使用的采样率
        logger: 日志记录器（可选）

    Returns:
        List[CtgRecord]: 按 record_id 排序的记录
    """
    logger = logger or get_logger("record")
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"轨迹目录不存在: {directory.absolute()}")

    labels = labels or {}
    records = []
    for csv_path in sorted(directory.glob("*.csv")):
        if csv_path.name == LABELS_FILE:
            continue
        records.append(load_csv(csv_path, labels.get(csv_path.stem), default_rate, logger))

    records.sort(key=lambda r: r.record_id)
    logger.info(f"从 {directory} 读取 {len(records)} 条记录")
    return records
