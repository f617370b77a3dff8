"""
提示词库

从随包附带的纯文本文件组装各智能体的提示词。
每个特征的提示词由 Definition、Rule、Role、Example Output 四节组成，
减速特征在 Definition 之后多一节 Type；agent.prompt_dir 可以逐个文件覆盖。
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from src.classify.models import AnalysisMode, FeatureKind
from src.exceptions import UnknownFeatureError
from src.utils.logger import get_logger

BUNDLED_PROMPT_DIR = Path(__file__).resolve().parent / "prompts"

AGGREGATOR = "aggregator"

SECTION_SEPARATOR = "\n\n"

FEATURE_SECTIONS: Tuple[str, ...] = ("definition", "rule", "role", "example_output")
DECELERATION_SECTIONS: Tuple[str, ...] = ("definition", "type", "rule", "role", "example_output")

AgentName = Union[FeatureKind, str]


def resolve_agent(name: AgentName) -> AgentName:
    """把名称解析为 FeatureKind 或 AGGREGATOR

    Raises:
        UnknownFeatureError: 既不是特征也不是聚合智能体
    """
    if isinstance(name, FeatureKind):
        return name
    key = str(name).strip().lower()
    if key == AGGREGATOR:
        return AGGREGATOR
    try:
        return FeatureKind(key)
    except ValueError:
        raise UnknownFeatureError(str(name)) from None


def sections_for(kind: FeatureKind) -> Tuple[str, ...]:
    return DECELERATION_SECTIONS if kind is FeatureKind.DECELERATIONS else FEATURE_SECTIONS


class PromptLibrary:
    """提示词库

    职责：
    1. 读取并缓存提示词片段（覆盖目录优先，其次随包目录）
    2. 组装特征、聚合与单次提示三种提示词
    """

    def __init__(self, prompt_dir: Optional[Union[str, Path]] = None,
                 logger: Optional[logging.Logger] = None):
        """初始化提示词库

        Args:
            prompt_dir: 覆盖目录，其中存在的同名文件替换随包文件
            logger: 日志记录器
        """
        self.prompt_dir = Path(prompt_dir) if prompt_dir else None
        self.logger = logger or get_logger("prompts")
        self._cache: Dict[str, str] = {}

    def fragment(self, name: str) -> str:
        """读取一个片段（不含文件末尾换行）

        Raises:
            FileNotFoundError: 随包目录中也不存在该片段
        """
        if name not in self._cache:
            path = BUNDLED_PROMPT_DIR / f"{name}.txt"
            if self.prompt_dir is not None:
                override = self.prompt_dir / f"{name}.txt"
                if override.is_file():
                    self.logger.debug(f"使用覆盖提示词: {override}")
                    path = override
            self._cache[name] = path.read_text(encoding="utf-8").rstrip("\n")
        return self._cache[name]

    def feature_prompt(self, kind: FeatureKind) -> str:
        return SECTION_SEPARATOR.join(
            self.fragment(f"{kind.value}_{section}") for section in sections_for(kind)
        )

    def aggregator_prompt(self) -> str:
        return SECTION_SEPARATOR.join(
            [self.fragment("overall_rule"), self.fragment("aggregator_instruction")]
        )

    def direct_prompt(self) -> str:
        """单次提示：整体规则与指令在前，随后是五个特征的完整提示词"""
        parts: List[str] = [self.fragment("overall_rule"), self.fragment("direct_instruction")]
        parts.extend(self.feature_prompt(kind) for kind in FeatureKind.ordered())
        return SECTION_SEPARATOR.join(parts)

    def render(self, name: AgentName = AGGREGATOR,
               mode: AnalysisMode = AnalysisMode.MULTI) -> str:
        """组装提示词

        单次提示模式下无论 name 为何都返回完整拼接（name 仍需合法）。

        Args:
            name: 特征种类、特征名称或 AGGREGATOR
            mode: 分析模式

        Returns:
            str: 提示词文本

        Raises:
            UnknownFeatureError: 未知名称
        """
        agent = resolve_agent(name)
        if mode is AnalysisMode.DIRECT:
            return self.direct_prompt()
        if agent == AGGREGATOR:
            return self.aggregator_prompt()
        return self.feature_prompt(agent)


def render_prompt(name: AgentName = AGGREGATOR, mode: AnalysisMode = AnalysisMode.MULTI,
                  prompt_dir: Optional[Union[str, Path]] = None) -> str:
    """组装提示词的便捷函数"""
    return PromptLibrary(prompt_dir).render(name, mode)
