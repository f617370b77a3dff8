"""
记录模块 (record)

提供 CTG 记录的数据模型、CSV 读写和信号预处理
"""

from src.record.ctg_record import BinaryLabel, CleanSignal, CtgRecord
from src.record.csv_io import load_csv, load_labels, load_trace_directory, save_csv, save_labels
from src.record.preprocessor import SignalPreprocessor, preprocess

__all__ = [
    "BinaryLabel",
    "CleanSignal",
    "CtgRecord",
    "SignalPreprocessor",
    "load_csv",
    "load_labels",
    "load_trace_directory",
    "preprocess",
    "save_csv",
    "save_labels",
]
