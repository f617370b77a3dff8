"""
智能体模块 (agents)

五个特征智能体与聚合智能体的编排，规则引擎与远程模型两种后端，
提示词库与回复解析
"""

from src.agents.base_backend import AgentContext, BaseBackend
from src.agents.orchestrator import AgentOrchestrator, AgentResult, create_backend, run_pipeline
from src.agents.prompt_library import AGGREGATOR, PromptLibrary, render_prompt
from src.agents.remote_backend import RemoteBackend
from src.agents.reply_parser import parse_reply
from src.agents.rule_backend import RuleBackend

__all__ = [
    "AGGREGATOR",
    "AgentContext",
    "AgentOrchestrator",
    "AgentResult",
    "BaseBackend",
    "PromptLibrary",
    "RemoteBackend",
    "RuleBackend",
    "create_backend",
    "parse_reply",
    "render_prompt",
    "run_pipeline",
]
