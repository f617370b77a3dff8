"""
特征证据流水线

预处理 → 基线 → 宫缩 → 加速/减速与分型 → 变异性 → 正弦波型，
产出五个特征判读所需的全部证据
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from src.analysis.baseline import BaselineEstimator
from src.analysis.contractions import ContractionDetector
from src.analysis.decel_typing import DecelerationTyper
from src.analysis.episodes import ExcursionDetector, split_by_kind
from src.analysis.models import (
    BaselineEstimate,
    Episode,
    SinusoidalFinding,
    TypedDeceleration,
    VariabilityProfile,
)
from src.analysis.sinusoidal import SinusoidalDetector
from src.analysis.variability import VariabilityAnalyzer
from src.config.config_parser import AnalyzerConfig
from src.record.ctg_record import CleanSignal, CtgRecord
from src.record.preprocessor import SignalPreprocessor
from src.utils.logger import get_logger


@dataclass(frozen=True)
class FeatureEvidence:
    """一条记录的全部特征证据"""
    record_id: str
    duration_s: float
    baseline: BaselineEstimate
    variability: VariabilityProfile
    accelerations: List[Episode]
    decelerations: List[TypedDeceleration]
    contractions: List[Episode]
    sinusoidal: SinusoidalFinding
    fhr: Optional[CleanSignal] = field(default=None, compare=False, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "record_id": self.record_id,
            "duration_s": round(self.duration_s, 2),
            "baseline": self.baseline.to_dict(),
            "variability": self.variability.to_dict(),
            "accelerations": [e.to_dict() for e in self.accelerations],
            "decelerations": [d.to_dict() for d in self.decelerations],
            "contractions": [c.to_dict() for c in self.contractions],
            "sinusoidal": self.sinusoidal.to_dict(),
        }


class AnalysisPipeline:
    """特征证据流水线

    各分析器无状态，同一个流水线实例可以在多个线程间共享。
    """

    def __init__(self, config: Optional[AnalyzerConfig] = None,
                 logger: Optional[logging.Logger] = None):
        self.config = config or AnalyzerConfig()
        self.logger = logger or get_logger("pipeline")

        cfg = self.config
        self.preprocessor = SignalPreprocessor(cfg.preprocess)
        self.baseline_estimator = BaselineEstimator(cfg.baseline)
        self.contraction_detector = ContractionDetector(cfg.contractions)
        self.excursion_detector = ExcursionDetector(cfg.episodes)
        self.decel_typer = DecelerationTyper(cfg.decelerations)
        self.variability_analyzer = VariabilityAnalyzer(cfg.variability)
        self.sinusoidal_detector = SinusoidalDetector(cfg.sinusoidal)

    def extract(self, record: CtgRecord) -> FeatureEvidence:
        """从记录中提取特征证据

        基线无法确定时跳过加速/减速检测，两者均为空列表。这是偏向病理的
        保守处理：加速判读因没有加速而为病理，整体判读随之为病理。

        Raises:
            TooShortError: 记录过短
            AllGapsError: 胎心率全部缺失
        """
        fhr, uc = self.preprocessor.preprocess(record)
        baseline = self.baseline_estimator.estimate(fhr)
        contractions = self.contraction_detector.detect(uc)

        accels: List[Episode] = []
        typed: List[TypedDeceleration] = []
        if baseline.determinable:
            accels, decels = split_by_kind(self.excursion_detector.detect(fhr, baseline))
            typed = self.decel_typer.type_decelerations(decels, contractions, fhr, baseline)
        else:
            self.logger.warning(f"⚠️ {record.record_id}: 基线无法确定，跳过加速/减速检测，加速按病理判读")

        excluded = accels + [d.episode for d in typed]
        variability = self.variability_analyzer.profile(fhr, baseline, exclude=excluded)
        sinusoidal = self.sinusoidal_detector.detect(fhr, baseline, accels)

        self.logger.debug(
            f"{record.record_id}: 基线 {baseline.value_bpm}, 加速 {len(accels)}, "
            f"减速 {len(typed)}, 宫缩 {len(contractions)}, 正弦 {sinusoidal.status.value}"
        )
        return FeatureEvidence(
            record_id=record.record_id,
            duration_s=record.duration_s,
            baseline=baseline,
            variability=variability,
            accelerations=accels,
            decelerations=typed,
            contractions=contractions,
            sinusoidal=sinusoidal,
            fhr=fhr,
        )


def extract_evidence(record: CtgRecord, config: Optional[AnalyzerConfig] = None) -> FeatureEvidence:
    """提取特征证据的便捷函数"""
    return AnalysisPipeline(config).extract(record)
