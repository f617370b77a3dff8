"""
批量评估

按采样配置重复多次试验，每次试验对抽样记录运行流水线，
把整体类别映射为二分类后计算准确率与 F1
"""

import asyncio
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from src.agents.base_backend import BaseBackend
from src.agents.orchestrator import AgentOrchestrator, create_backend
from src.classify.models import AnalysisMode, FeatureClass, OverallAssessment
from src.config.config_parser import AnalyzerConfig
from src.evaluation.metrics import Confusion, confusion
from src.exceptions import CtgAnalyzerError, MissingLabelError
from src.record.ctg_record import BinaryLabel, CtgRecord
from src.utils.logger import get_logger


@dataclass(frozen=True)
class RecordVerdict:
    """一条记录在一次试验中的判读"""
    record_id: str
    label: BinaryLabel
    predicted_class: Optional[FeatureClass] = None
    error: Optional[str] = None

    @property
    def predicted_binary(self) -> Optional[BinaryLabel]:
        return self.predicted_class.to_binary() if self.predicted_class else None

    @property
    def correct(self) -> bool:
        return self.predicted_binary is self.label

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "record_id": self.record_id,
            "label": self.label.value,
            "predicted_class": self.predicted_class.value if self.predicted_class else None,
            "predicted_binary": self.predicted_binary.value if self.predicted_binary else None,
        }
        if self.error is not None:
            data["error"] = self.error
        return data


@dataclass(frozen=True)
class TrialResult:
    """一次试验"""
    index: int
    verdicts: List[RecordVerdict]
    confusion: Confusion

    @property
    def accuracy(self) -> float:
        return self.confusion.accuracy

    @property
    def f1(self) -> float:
        return self.confusion.f1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "accuracy": self.accuracy,
            "f1": self.f1,
            "confusion": self.confusion.to_dict(),
            "records": [v.to_dict() for v in self.verdicts],
        }


@dataclass
class EvalReport:
    """评估报告"""
    trials: List[TrialResult]
    sample: Optional[int] = None
    balanced: bool = False
    seed: int = 0
    mode: str = AnalysisMode.MULTI.value
    backend: str = "rules"
    n_records: int = 0

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean([t.accuracy for t in self.trials])) if self.trials else 0.0

    @property
    def mean_f1(self) -> float:
        return float(np.mean([t.f1 for t in self.trials])) if self.trials else 0.0

    def summary_line(self) -> str:
        return (
            f"Accuracy {self.mean_accuracy * 100:.2f}% | F1 {self.mean_f1 * 100:.2f}% "
            f"({len(self.trials)} trials x {self.n_records} records, {self.mode}/{self.backend})"
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_records": self.n_records,
            "trials": len(self.trials),
            "sample": self.sample,
            "balanced": self.balanced,
            "seed": self.seed,
            "mode": self.mode,
            "backend": self.backend,
            "per_trial": [t.to_dict() for t in self.trials],
            "mean_accuracy": self.mean_accuracy,
            "mean_f1": self.mean_f1,
        }


@dataclass
class RecordSampler:
    """记录抽样

    sample 为 None 时使用全部记录；balanced 时正常/异常各取一半
    （奇数时异常多一条）。每次试验用 (seed, trial) 派生独立的随机数流。
    """
    sample: Optional[int] = None
    balanced: bool = False
    seed: int = 0
    logger: logging.Logger = field(default_factory=lambda: get_logger("sampler"), repr=False)

    def draw(self, records: Sequence[CtgRecord], labels: Dict[str, BinaryLabel],
             trial: int = 0) -> List[CtgRecord]:
        """抽取一次试验的记录，按 record_id 排序返回"""
        if self.sample is None or (not self.balanced and self.sample >= len(records)):
            return sorted(records, key=lambda r: r.record_id)

        rng = np.random.default_rng([self.seed, trial])
        pool = sorted(records, key=lambda r: r.record_id)
        if not self.balanced:
            picked = rng.choice(len(pool), size=self.sample, replace=False)
            return sorted((pool[i] for i in picked), key=lambda r: r.record_id)

        chosen: List[CtgRecord] = []
        quotas = {BinaryLabel.NORMAL: self.sample // 2,
                  BinaryLabel.ABNORMAL: self.sample - self.sample // 2}
        for label, quota in quotas.items():
            group = [r for r in pool if labels[r.record_id] is label]
            if len(group) < quota:
                self.logger.warning(
                    f"⚠️ {label.value} 记录只有 {len(group)} 条，少于抽样需要的 {quota} 条"
                )
                quota = len(group)
            if quota == 0:
                continue
            picked = rng.choice(len(group), size=quota, replace=False)
            chosen.extend(group[i] for i in picked)
        return sorted(chosen, key=lambda r: r.record_id)


class Evaluator:
    """批量评估器

    职责：
    1. 为每条记录确定参考标签并按采样配置抽样
    2. 以 jobs 为上限并发分析记录（失败记录带 error 计为判错）
    3. 汇总每次试验的混淆矩阵与指标
    """

    def __init__(self, backend: BaseBackend, config: Optional[AnalyzerConfig] = None,
                 mode: AnalysisMode = AnalysisMode.MULTI,
                 logger: Optional[logging.Logger] = None):
        self.backend = backend
        self.config = config or AnalyzerConfig()
        self.mode = mode
        self.logger = logger or get_logger("evaluation")
        self.orchestrator = AgentOrchestrator(backend, self.config)

    @staticmethod
    def resolve_labels(records: Sequence[CtgRecord],
                       labels: Optional[Dict[str, BinaryLabel]] = None) -> Dict[str, BinaryLabel]:
        """标签文件优先，其次记录自带的标签

        Raises:
            MissingLabelError: 某条记录没有标签
        """
        labels = labels or {}
        resolved: Dict[str, BinaryLabel] = {}
        for record in records:
            label = labels.get(record.record_id, record.reference_label)
            if label is None:
                raise MissingLabelError(record.record_id)
            resolved[record.record_id] = label
        return resolved

    async def _verdict(self, record: CtgRecord, label: BinaryLabel,
                       semaphore: asyncio.Semaphore) -> RecordVerdict:
        async with semaphore:
            try:
                overall: OverallAssessment = await self.orchestrator.run(record, self.mode)
            except (CtgAnalyzerError, FileNotFoundError) as e:
                self.logger.error(f"记录 {record.record_id} 分析失败: {e}", exc_info=True)
                return RecordVerdict(record.record_id, label, error=str(e))
        return RecordVerdict(record.record_id, label, overall.feature_class)

    async def run_trial(self, index: int, records: Sequence[CtgRecord],
                        labels: Dict[str, BinaryLabel],
                        cache: Optional[Dict[str, RecordVerdict]] = None) -> TrialResult:
        jobs = max(1, self.config.evaluation.jobs)
        semaphore = asyncio.Semaphore(jobs)

        pending = [r for r in records if cache is None or r.record_id not in cache]
        fresh = await asyncio.gather(
            *(self._verdict(r, labels[r.record_id], semaphore) for r in pending)
        )
        known = {v.record_id: v for v in fresh}
        if cache is not None:
            cache.update(known)
            known = cache

        verdicts = [known[r.record_id] for r in sorted(records, key=lambda r: r.record_id)]
        matrix = confusion([v.predicted_binary for v in verdicts], [v.label for v in verdicts])
        self.logger.info(
            f"第 {index + 1} 次试验完成: 准确率 {matrix.accuracy:.4f}, F1 {matrix.f1:.4f}, "
            f"混淆 {matrix.to_dict()}"
        )
        return TrialResult(index, verdicts, matrix)

    async def evaluate_async(self, records: Sequence[CtgRecord],
                             labels: Optional[Dict[str, BinaryLabel]] = None,
                             trials: Optional[int] = None,
                             sampler: Optional[RecordSampler] = None) -> EvalReport:
        """运行全部试验

        Raises:
            MissingLabelError: 参与抽样的记录缺少标签
        """
        eval_cfg = self.config.evaluation
        trials = eval_cfg.trials if trials is None else trials
        sampler = sampler or RecordSampler(eval_cfg.sample, eval_cfg.balanced, eval_cfg.seed)

        if sampler.balanced:
            resolved = self.resolve_labels(records, labels)
        else:
            resolved = {}
            for record in records:
                label = (labels or {}).get(record.record_id, record.reference_label)
                if label is not None:
                    resolved[record.record_id] = label
        if not records:
            self.logger.warning("⚠️ 没有可评估的记录")

        # 规则后端是确定性的，同一记录在多次试验中只分析一次
        cache: Optional[Dict[str, RecordVerdict]] = {} if self.backend.name == "rules" else None

        results: List[TrialResult] = []
        n_records = 0
        for index in range(trials):
            drawn = sampler.draw(records, resolved, index)
            self.resolve_labels(drawn, resolved)
            n_records = len(drawn)
            results.append(await self.run_trial(index, drawn, resolved, cache))

        report = EvalReport(
            trials=results,
            sample=sampler.sample,
            balanced=sampler.balanced,
            seed=sampler.seed,
            mode=self.mode.value,
            backend=self.backend.name,
            n_records=n_records,
        )
        self.logger.info(f"✅ 评估完成: {report.summary_line()}")
        return report

    def evaluate(self, records: Sequence[CtgRecord],
                 labels: Optional[Dict[str, BinaryLabel]] = None,
                 trials: Optional[int] = None,
                 sampler: Optional[RecordSampler] = None) -> EvalReport:
        return asyncio.run(self.evaluate_async(records, labels, trials, sampler))


async def evaluate_records(records: Sequence[CtgRecord],
                           labels: Optional[Dict[str, BinaryLabel]] = None,
                           trials: int = 5,
                           sampler: Optional[RecordSampler] = None,
                           backend: Union[BaseBackend, str] = "rules",
                           mode: AnalysisMode = AnalysisMode.MULTI,
                           config: Optional[AnalyzerConfig] = None) -> EvalReport:
    """批量评估的便捷函数（异步）"""
    cfg = config or AnalyzerConfig()
    if isinstance(backend, BaseBackend):
        return await Evaluator(backend, cfg, mode).evaluate_async(records, labels, trials, sampler)
    async with create_backend(backend, cfg) as owned:
        return await Evaluator(owned, cfg, mode).evaluate_async(records, labels, trials, sampler)


def evaluate(records: Sequence[CtgRecord],
             labels: Optional[Dict[str, BinaryLabel]] = None,
             trials: int = 5,
             sampler: Optional[RecordSampler] = None,
             backend: Union[BaseBackend, str] = "rules",
             mode: AnalysisMode = AnalysisMode.MULTI,
             config: Optional[AnalyzerConfig] = None) -> EvalReport:
    """批量评估的便捷函数"""
    return asyncio.run(evaluate_records(records, labels, trials, sampler, backend, mode, config))
