"""
模型回复解析测试
"""

import pytest

from src.agents.reply_parser import parse_reply
from src.classify.models import FeatureClass
from src.exceptions import ReplyParseError


pytestmark = pytest.mark.unit


def _reply(fixtures_dir, name):
    return (fixtures_dir / "replies" / name).read_text(encoding="utf-8")


class TestParseReply:
    """parse_reply 测试"""

    def test_dash_separated(self, fixtures_dir):
        cls, explanation = parse_reply(_reply(fixtures_dir, "dash_separated.txt"))
        assert cls is FeatureClass.PATHOLOGICAL
        assert explanation == "late decelerations present"

    def test_labelled_markdown(self, fixtures_dir):
        cls, explanation = parse_reply(_reply(fixtures_dir, "labelled_markdown.txt"))
        assert cls is FeatureClass.SUSPICIOUS
        assert explanation == (
            "Only one acceleration is visible in the 20-minute window.\n"
            "The remaining features are within normal limits."
        )

    def test_bare_token(self):
        assert parse_reply("normal") == (FeatureClass.NORMAL, "")

    def test_token_is_case_insensitive(self):
        cls, explanation = parse_reply("PATHOLOGICAL: baseline below 100 bpm")
        assert cls is FeatureClass.PATHOLOGICAL
        assert explanation == "baseline below 100 bpm"

    def test_classification_line_after_preamble(self):
        text = "Looking at the tracing.\nClassification: Normal\nExplanation: stable baseline"
        assert parse_reply(text) == (FeatureClass.NORMAL, "stable baseline")

    def test_conflicting_tokens(self, fixtures_dir):
        raw = _reply(fixtures_dir, "ambiguous.txt")
        with pytest.raises(ReplyParseError) as exc_info:
            parse_reply(raw)
        assert exc_info.value.raw == raw

    def test_no_token(self, fixtures_dir):
        with pytest.raises(ReplyParseError) as exc_info:
            parse_reply(_reply(fixtures_dir, "no_token.txt"))
        assert exc_info.value.reason == "未找到分类标记"

    def test_token_inside_sentence_is_not_a_classification(self):
        with pytest.raises(ReplyParseError):
            parse_reply("The baseline looks normal to me.")
