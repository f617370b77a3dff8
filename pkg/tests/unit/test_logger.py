"""
日志工具测试
"""

import io
import logging

import pytest

from src.config.config_parser import AnalyzerConfig
from src.utils.logger import ROOT_LOGGER_NAME, get_logger, setup_logger


pytestmark = pytest.mark.unit


@pytest.fixture(autouse=True)
def reset_root_logger():
    """每个测试结束后移除根日志器上的处理器"""
    yield
    logger = logging.getLogger(ROOT_LOGGER_NAME)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()


class TestSetupLogger:
    """setup_logger 测试"""

    def test_child_logger_reaches_console(self):
        stream = io.StringIO()
        setup_logger(AnalyzerConfig(), stream=stream)

        get_logger("orchestrator").info("特征智能体完成")
        get_logger("orchestrator").debug("证据细节")

        output = stream.getvalue()
        assert "CtgAnalyzer.orchestrator - INFO - 特征智能体完成" in output
        assert "证据细节" not in output

    def test_verbose_enables_debug(self):
        stream = io.StringIO()
        logger = setup_logger(AnalyzerConfig(), verbose=True, stream=stream)

        get_logger("baseline").debug("迭代 2 次")

        assert logger.level == logging.DEBUG
        assert "迭代 2 次" in stream.getvalue()
        assert logging.getLogger("aiohttp").level == logging.DEBUG

    def test_repeated_setup_does_not_duplicate_output(self):
        setup_logger(AnalyzerConfig())
        stream = io.StringIO()
        logger = setup_logger(AnalyzerConfig(), stream=stream)

        get_logger().warning("基线无法确定")

        assert len(logger.handlers) == 1
        assert stream.getvalue().count("基线无法确定") == 1

    def test_log_file_creates_parent_directory(self, tmp_path):
        log_file = tmp_path / "logs" / "nested" / "ctg.log"
        setup_logger(AnalyzerConfig(log_file=str(log_file)), stream=io.StringIO())

        get_logger("evaluator").info("试验 1 完成")
        for handler in logging.getLogger(ROOT_LOGGER_NAME).handlers:
            handler.flush()

        assert log_file.read_text(encoding="utf-8").strip().endswith("试验 1 完成")

    def test_third_party_quiet_unless_debug(self):
        setup_logger(AnalyzerConfig(), stream=io.StringIO())
        assert logging.getLogger("aiohttp").level == logging.WARNING


def test_get_logger_names():
    assert get_logger().name == "CtgAnalyzer"
    assert get_logger("render").name == "CtgAnalyzer.render"
