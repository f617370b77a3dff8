"""
模型回复解析

在回复中寻找以分类词开头的行（可带 Classification 标签与 Markdown 标记），
其余部分作为说明。找不到或同一行出现多个不同分类词时报错，不做默认。
"""

import re
from typing import List, Optional, Tuple

from src.classify.models import FeatureClass
from src.exceptions import ReplyParseError

_MARKUP = re.compile(r"[*_`#>]")
_LABEL = re.compile(
    r"^(?:(?:final|overall)\s+)?(?:classification|class|category)\s*[:：\-]?\s*",
    re.IGNORECASE,
)
_TOKEN = re.compile(r"\b(normal|suspicious|pathological)\b", re.IGNORECASE)
_LEADING_TOKEN = re.compile(r"^(normal|suspicious|pathological)\b", re.IGNORECASE)
_SEPARATORS = " \t—–-:：.,;*"
_EXPLANATION_LABEL = re.compile(r"^(?:explanation|reason|rationale)\s*[:：]\s*", re.IGNORECASE)


def _clean(line: str) -> str:
    text = _MARKUP.sub("", line).strip()
    return text.lstrip("-• ").strip()


def _classification_line(lines: List[str]) -> Optional[Tuple[int, str]]:
    """第一个以分类词开头的行：(行号, 去掉标签后的文本)"""
    for index, line in enumerate(lines):
        text = _LABEL.sub("", _clean(line), count=1)
        if _LEADING_TOKEN.match(text):
            return index, text
    return None


def parse_reply(text: str) -> Tuple[FeatureClass, str]:
    """解析一条模型回复

    Args:
        text: 回复原文

    Returns:
        Tuple[FeatureClass, str]: (类别, 说明)；说明可能为空字符串

    Raises:
        ReplyParseError: 没有分类行，或分类行中出现多个不同的分类词
    """
    lines = text.splitlines()
    found = _classification_line(lines)
    if found is None:
        raise ReplyParseError(text, "未找到分类标记")
    index, line = found

    tokens = {token.lower() for token in _TOKEN.findall(line)}
    if len(tokens) != 1:
        raise ReplyParseError(text, f"分类行包含多个分类词: {sorted(tokens)}")
    feature_class = FeatureClass.parse(tokens.pop())

    remainder = _LEADING_TOKEN.sub("", line, count=1).lstrip(_SEPARATORS).rstrip()
    following = [line.strip() for line in lines[index + 1:] if line.strip()]
    if following:
        following[0] = _EXPLANATION_LABEL.sub("", _MARKUP.sub("", following[0]).strip())
    parts = [part for part in [remainder] + following if part]
    return feature_class, "\n".join(parts).strip()
