"""
日志工具

项目根日志器为 CtgAnalyzer，各组件使用其子日志器 CtgAnalyzer.<组件>。
控制台输出写到 stderr，stdout 只留给命令行的 JSON 结果。
"""

import sys
import logging
from pathlib import Path
from typing import Optional, TextIO

from src.config.config_parser import AnalyzerConfig

ROOT_LOGGER_NAME = "CtgAnalyzer"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

# 远程后端的 HTTP 客户端日志，只在 DEBUG 时放开
THIRD_PARTY_LOGGERS = ("aiohttp",)


def setup_logger(config: AnalyzerConfig, verbose: bool = False,
                 stream: Optional[TextIO] = None) -> logging.Logger:
    """配置项目根日志器

    重复调用时先移除旧的处理器，因此在同一进程里多次执行命令行
    （例如测试中）不会产生重复输出。

    Args:
        config: 配置数据对象（使用 log_level 与 log_file）
        verbose: 为 True 时忽略配置的级别，强制 DEBUG
        stream: 控制台输出流（默认 sys.stderr）

    Returns:
        logging.Logger: 配置好的根日志器
    """
    level = logging.DEBUG if verbose else getattr(logging, config.log_level)

    logger = logging.getLogger(ROOT_LOGGER_NAME)
    logger.setLevel(level)
    logger.propagate = False
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)

    console_handler = logging.StreamHandler(stream or sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if config.log_file:
        log_file_path = Path(config.log_file)
        log_file_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_file_path, mode='a', encoding='utf-8')
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

        logger.debug(f"日志文件: {log_file_path.absolute()}")

    third_party_level = logging.DEBUG if level == logging.DEBUG else logging.WARNING
    for name in THIRD_PARTY_LOGGERS:
        logging.getLogger(name).setLevel(third_party_level)

    return logger


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """获取日志记录器

    Args:
        name: 组件名称，例如 "orchestrator"；为空时返回根日志器

    Returns:
        logging.Logger: 日志记录器
    """
    if name:
        return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")
    return logging.getLogger(ROOT_LOGGER_NAME)
