"""
智能体编排

多智能体模式：五个特征智能体并发执行，全部完成后运行聚合智能体；
单次提示模式：一次请求直接得到整体判读。
"""

import asyncio
import logging
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Union

from src.agents.base_backend import AgentContext, BaseBackend
from src.agents.remote_backend import RemoteBackend
from src.agents.rule_backend import RuleBackend
from src.classify.models import (
    AnalysisMode,
    FeatureAssessment,
    FeatureClass,
    FeatureKind,
    OverallAssessment,
)
from src.config.config_parser import AnalyzerConfig
from src.exceptions import AgentFailedError, AgentTimeoutError
from src.record.ctg_record import CtgRecord
from src.utils.logger import get_logger

BACKENDS = ("rules", "remote")


@dataclass(frozen=True)
class AgentResult:
    """单个特征智能体的执行结果"""
    feature: FeatureKind
    assessment: FeatureAssessment
    latency_ms: float
    backend: str

    @property
    def feature_class(self) -> FeatureClass:
        return self.assessment.feature_class

    @property
    def explanation(self) -> str:
        return self.assessment.explanation


def create_backend(name: str, config: Optional[AnalyzerConfig] = None,
                   logger: Optional[logging.Logger] = None) -> BaseBackend:
    """按名称创建后端

    Raises:
        ValueError: 未知后端名称
    """
    cfg = config or AnalyzerConfig()
    if name == "rules":
        return RuleBackend(logger)
    if name == "remote":
        return RemoteBackend(cfg.agent, logger=logger)
    raise ValueError(f"未知后端: {name}，可选 {', '.join(BACKENDS)}")


class AgentOrchestrator:
    """智能体编排器

    职责：
    1. 为每个特征智能体创建任务，信号量限制并发数，单个智能体有超时
    2. 任一智能体失败时取消其余任务，整条流水线失败
    3. 按特征固定顺序（而非完成顺序）交给聚合智能体
    """

    def __init__(self, backend: BaseBackend, config: Optional[AnalyzerConfig] = None,
                 logger: Optional[logging.Logger] = None):
        self.backend = backend
        self.config = config or AnalyzerConfig()
        self.logger = logger or get_logger("orchestrator")

    @property
    def agent_timeout_s(self) -> float:
        """单个智能体的总时限（含后端内部重试）"""
        return self.config.agent.agent_timeout_s

    async def _bounded(self, coro, agent: str):
        try:
            return await asyncio.wait_for(coro, timeout=self.agent_timeout_s)
        except asyncio.TimeoutError:
            raise AgentTimeoutError(agent, self.agent_timeout_s) from None

    async def _run_agent(self, context: AgentContext, kind: FeatureKind,
                         semaphore: asyncio.Semaphore) -> AgentResult:
        async with semaphore:
            started = time.perf_counter()
            try:
                assessment = await asyncio.wait_for(
                    self.backend.assess_feature(context, kind), timeout=self.agent_timeout_s
                )
            except asyncio.TimeoutError:
                raise AgentFailedError(
                    kind.value, AgentTimeoutError(kind.value, self.agent_timeout_s)
                ) from None
            except Exception as e:
                # 后端的任何异常都归到该特征名下，CancelledError 不是 Exception 子类
                raise AgentFailedError(kind.value, e) from e
            latency_ms = (time.perf_counter() - started) * 1000.0
        return AgentResult(kind, assessment, round(latency_ms, 3), self.backend.name)

    async def run_features(self, context: AgentContext) -> List[AgentResult]:
        """并发运行五个特征智能体

        Returns:
            List[AgentResult]: 按特征固定顺序排列

        Raises:
            AgentFailedError: 任一特征智能体失败（其余任务被取消）
        """
        semaphore = asyncio.Semaphore(self.config.agent.max_concurrency)
        tasks: Dict[FeatureKind, asyncio.Task] = {
            kind: asyncio.create_task(self._run_agent(context, kind, semaphore))
            for kind in FeatureKind.ordered()
        }
        try:
            results = await asyncio.gather(*tasks.values())
        except BaseException:
            for task in tasks.values():
                if not task.done():
                    task.cancel()
            await asyncio.gather(*tasks.values(), return_exceptions=True)
            raise

        by_kind = {result.feature: result for result in results}
        return [by_kind[kind] for kind in FeatureKind.ordered()]

    async def run(self, record: CtgRecord,
                  mode: AnalysisMode = AnalysisMode.MULTI) -> OverallAssessment:
        """分析一条记录

        Args:
            record: CTG 记录
            mode: 多智能体或单次提示

        Returns:
            OverallAssessment: 整体判读

        Raises:
            AgentFailedError: 某个特征智能体失败
            CtgAnalyzerError: 证据提取、聚合或单次提示请求失败
        """
        context = AgentContext(record=record, config=self.config)
        await self.backend.prepare(context)

        if mode is AnalysisMode.DIRECT:
            overall = await self._bounded(self.backend.direct(context), "direct")
        else:
            results = await self.run_features(context)
            for result in results:
                self.logger.debug(
                    f"{record.record_id} {result.feature.value}: {result.feature_class.value} "
                    f"({result.latency_ms:.1f} ms)"
                )
            overall = await self._bounded(
                self.backend.aggregate(context, [r.assessment for r in results]), "aggregator"
            )

        self.logger.info(
            f"{record.record_id}: {overall.feature_class.value} "
            f"（{mode.value} / {self.backend.name}）"
        )
        return overall


async def run_pipeline(record: CtgRecord, mode: Union[AnalysisMode, str] = AnalysisMode.MULTI,
                       backend: Union[BaseBackend, str] = "rules",
                       config: Optional[AnalyzerConfig] = None) -> OverallAssessment:
    """分析一条记录的便捷函数

    backend 为名称时在函数内创建并关闭后端；传入实例时由调用方负责关闭。
    """
    cfg = config or AnalyzerConfig()
    mode = AnalysisMode(mode) if isinstance(mode, str) else mode
    if isinstance(backend, BaseBackend):
        return await AgentOrchestrator(backend, cfg).run(record, mode)
    async with create_backend(backend, cfg) as owned:
        return await AgentOrchestrator(owned, cfg).run(record, mode)
