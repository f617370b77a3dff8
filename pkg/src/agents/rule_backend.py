"""
规则引擎后端

用本地规则表充当五个特征智能体与聚合智能体，输出与直接调用
规则表 + 聚合完全一致
"""

import dataclasses
import logging
from typing import Optional, Sequence

from src.agents.base_backend import AgentContext, BaseBackend
from src.classify.aggregator import aggregate, assess_evidence
from src.classify.feature_rules import assess_feature
from src.classify.models import AnalysisMode, FeatureAssessment, FeatureKind, OverallAssessment
from src.utils.logger import get_logger


class RuleBackend(BaseBackend):
    """规则引擎后端（纯函数、可重入）"""

    name = "rules"

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger or get_logger("rules")

    async def prepare(self, context: AgentContext) -> None:
        await context.ensure_evidence()

    async def assess_feature(self, context: AgentContext, kind: FeatureKind) -> FeatureAssessment:
        evidence = await context.ensure_evidence()
        cfg = context.config
        assessment = assess_feature(kind, evidence, cfg.classify, cfg.decelerations)
        self.logger.debug(f"{context.record_id} {kind.value}: {assessment.feature_class.value}")
        return assessment

    async def aggregate(self, context: AgentContext,
                        features: Sequence[FeatureAssessment]) -> OverallAssessment:
        return aggregate(features, record_id=context.record_id)

    async def direct(self, context: AgentContext) -> OverallAssessment:
        evidence = await context.ensure_evidence()
        overall = assess_evidence(evidence, context.config)
        return dataclasses.replace(
            overall, features=(), mode=AnalysisMode.DIRECT, features_omitted=True
        )
