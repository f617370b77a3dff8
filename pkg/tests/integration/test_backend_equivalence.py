"""
规则后端等价性测试

规则后端经编排器得到的结果必须与直接调用规则表 + 聚合完全一致
"""

import pytest

from src.agents.orchestrator import run_pipeline
from src.agents.rule_backend import RuleBackend
from src.classify.aggregator import assess_evidence
from src.classify.models import AnalysisMode


pytestmark = [pytest.mark.integration, pytest.mark.slow]

SEEDS = range(100)


async def test_multi_agent_equals_rule_table(synth_corpus):
    backend = RuleBackend()
    for seed in SEEDS:
        case = synth_corpus.case(seed)
        overall = await run_pipeline(case.record, AnalysisMode.MULTI, backend)
        assert overall == assess_evidence(case.evidence), seed


async def test_direct_mode_keeps_overall_class(synth_corpus):
    backend = RuleBackend()
    for seed in SEEDS[:20]:
        case = synth_corpus.case(seed)
        overall = await run_pipeline(case.record, AnalysisMode.DIRECT, backend)

        assert overall.feature_class is assess_evidence(case.evidence).feature_class
        assert overall.features_omitted
        assert overall.to_dict()["features"] == []
