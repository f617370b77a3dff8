"""
合成场景真值

只由场景参数推导各特征类别，不读取生成的样本；
减速分型与变异性汇总与检测器共用同一套规则函数
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.analysis.decel_typing import associate_contraction, classify_timing, count_overlapped
from src.analysis.models import (
    AtypicalFeature,
    BaselineEstimate,
    Episode,
    EpisodeKind,
    MinuteVariability,
    SinusoidalFinding,
    SinusoidalStatus,
    TypedDeceleration,
    VariabilityProfile,
)
from src.analysis.pipeline import FeatureEvidence
from src.analysis.variability import VariabilityAnalyzer
from src.classify.aggregator import assess_evidence
from src.classify.models import FeatureClass, FeatureKind, OverallAssessment
from src.config.config_parser import AnalyzerConfig
from src.record.ctg_record import BinaryLabel
from src.synth.scenario import RAISED_COSINE, DecelerationSpec, Scenario

# 基线估计保留 ±8 bpm 以内的样本
BASELINE_BAND_BPM = 8.0

# 三角波的基频能量占比与三次谐波幅度比
TRIANGLE_FUNDAMENTAL_SHARE = 96.0 / math.pi ** 4
TRIANGLE_THIRD_HARMONIC = 1.0 / 9.0

_ATYPICAL_FLAGS = {
    "biphasic": AtypicalFeature.BIPHASIC,
    "slow_return": AtypicalFeature.SLOW_RETURN,
    "lower_resumption": AtypicalFeature.LOWER_BASELINE_RESUMPTION,
    "loss_of_oscillation": AtypicalFeature.LOSS_OF_OSCILLATION,
    "no_shoulders": AtypicalFeature.LOSS_OF_SHOULDER,
}


@dataclass(frozen=True)
class GroundTruth:
    """场景真值：解析得到的特征证据与判读"""
    record_id: str
    evidence: FeatureEvidence
    assessment: OverallAssessment

    @property
    def classes(self) -> Dict[FeatureKind, FeatureClass]:
        return {f.feature: f.feature_class for f in self.assessment.features}

    @property
    def overall(self) -> FeatureClass:
        return self.assessment.feature_class

    @property
    def binary(self) -> BinaryLabel:
        return self.assessment.binary

    @property
    def expected_episodes(self) -> List[Episode]:
        """期望检测到的加速与减速，按起点排序"""
        episodes = list(self.evidence.accelerations) + [d.episode for d in self.evidence.decelerations]
        return sorted(episodes, key=lambda e: e.onset_s)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "record_id": self.record_id,
            "overall": self.overall.value,
            "binary": self.binary.value,
            "features": {kind.value: cls.value for kind, cls in self.classes.items()},
            "evidence": self.evidence.to_dict(),
        }


def _in_band_fraction(half_amplitude: np.ndarray, triangle: np.ndarray) -> np.ndarray:
    """振幅为 a 的正弦（或三角波）落在 ±8 bpm 以内的时间比例"""
    a = np.maximum(half_amplitude, 1e-9)
    ratio = np.minimum(BASELINE_BAND_BPM / a, 1.0)
    sine = (2.0 / math.pi) * np.arcsin(ratio)
    return np.where(triangle, ratio, sine)


def _nadir_reach_s(spec: DecelerationSpec, fraction: float) -> float:
    """起点到深度首次达到 fraction 倍的时间"""
    if spec.shape == RAISED_COSINE:
        return spec.onset_to_nadir_s * math.acos(1.0 - 2.0 * fraction) / math.pi
    return spec.onset_to_nadir_s * fraction


class GroundTruthBuilder:
    """真值推导器

    职责：
    1. 解析计算基线覆盖时长和事件时间
    2. 用检测器的分型与汇总函数得到减速类型和变异性概况
    3. 用规则表与聚合规则得到特征类别和整体类别
    """

    def __init__(self, config: Optional[AnalyzerConfig] = None):
        self.config = config or AnalyzerConfig()

    def build(self, scenario: Scenario) -> GroundTruth:
        scenario.validate()
        fs = scenario.sample_rate_hz
        t = np.arange(int(round(scenario.duration_s * fs))) / fs

        half_amplitude, triangle, cpm = self._envelope(t, scenario)
        accels = self._accelerations(scenario)
        decel_specs = self._accepted_decelerations(scenario)
        in_episode = self._episode_mask(t, [(a.onset_s, a.offset_s) for a in accels]
                                        + [(d.onset_s, d.offset_s) for d in decel_specs])

        coverage = float(np.sum(_in_band_fraction(half_amplitude, triangle)[~in_episode]) / fs)
        determinable = coverage >= self.config.baseline.min_coverage_s
        baseline = BaselineEstimate(
            value_bpm=float(scenario.baseline_bpm) if determinable else None,
            determinable=determinable,
            coverage_s=coverage,
            iterations=0,
        )

        contractions = self._contractions(scenario)
        if determinable:
            typed = [self._typed(spec, contractions, scenario) for spec in decel_specs]
        else:
            accels, typed = [], []
            in_episode = np.zeros_like(t, dtype=bool)

        variability = self._variability(t, half_amplitude, cpm, in_episode, fs)
        sinusoidal = self._sinusoidal(scenario, accels)

        evidence = FeatureEvidence(
            record_id=scenario.name,
            duration_s=scenario.duration_s,
            baseline=baseline,
            variability=variability,
            accelerations=accels,
            decelerations=typed,
            contractions=contractions,
            sinusoidal=sinusoidal,
        )
        return GroundTruth(scenario.name, evidence, assess_evidence(evidence, self.config))

    @staticmethod
    def _envelope(t: np.ndarray, scenario: Scenario) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """每个时刻的振荡振幅、是否为三角波、振荡频率"""
        half_amplitude = scenario.variability.half_amplitude(t)
        cpm = np.full_like(t, scenario.variability.cycles_per_min)
        triangle = np.zeros_like(t, dtype=bool)

        for decel in scenario.decelerations:
            if "loss_of_oscillation" in decel.atypical:
                half_amplitude[(t >= decel.onset_s) & (t <= decel.offset_s)] = 0.0

        sinusoid = scenario.sinusoidal
        if sinusoid is not None:
            inside = (t >= sinusoid.start_s) & (t < sinusoid.end_s)
            half_amplitude[inside] = sinusoid.amplitude_bpm
            cpm[inside] = sinusoid.cpm
            triangle[inside] = sinusoid.waveform == "triangle"
        return half_amplitude, triangle, cpm

    @staticmethod
    def _episode_mask(t: np.ndarray, spans: List[Tuple[float, float]]) -> np.ndarray:
        mask = np.zeros_like(t, dtype=bool)
        for onset, offset in spans:
            mask |= (t >= onset) & (t <= offset)
        return mask

    def _accelerations(self, scenario: Scenario) -> List[Episode]:
        cfg = self.config.episodes
        return [
            Episode(EpisodeKind.ACCELERATION, a.onset_s, a.peak_s, a.offset_s, a.amplitude_bpm,
                    a.duration_s / 2.0)
            for a in sorted(scenario.accelerations, key=lambda a: a.onset_s)
            if a.amplitude_bpm > cfg.min_amplitude_bpm and a.duration_s > cfg.min_duration_s
        ]

    def _accepted_decelerations(self, scenario: Scenario) -> List[DecelerationSpec]:
        cfg = self.config.episodes
        return [
            d for d in sorted(scenario.decelerations, key=lambda d: d.onset_s)
            if d.amplitude_bpm > cfg.min_amplitude_bpm and d.duration_s > cfg.min_duration_s
        ]

    @staticmethod
    def _contractions(scenario: Scenario) -> List[Episode]:
        episodes = []
        for spec in scenario.all_contractions():
            onset = max(spec.onset_s, 0.0)
            offset = min(spec.offset_s, scenario.duration_s)
            if spec.half_span_s <= 0 or offset - onset < 45.0 or not onset < spec.peak_s <= offset:
                continue
            episodes.append(Episode(EpisodeKind.CONTRACTION, onset, spec.peak_s, offset,
                                    spec.amplitude, spec.peak_s - onset))
        return episodes

    def _typed(self, spec: DecelerationSpec, contractions: List[Episode],
               scenario: Scenario) -> TypedDeceleration:
        cfg = self.config.decelerations
        otn = _nadir_reach_s(spec, self.config.episodes.nadir_fraction)
        episode = Episode(EpisodeKind.DECELERATION, spec.onset_s, spec.nadir_s, spec.offset_s,
                          spec.amplitude_bpm, otn)

        abrupt = otn < cfg.abrupt_onset_to_nadir_s and spec.duration_s <= cfg.prolonged_s
        features = set()
        if abrupt:
            features = {_ATYPICAL_FLAGS[flag] for flag in spec.atypical}
            if not spec.has_shoulders:
                features.add(AtypicalFeature.LOSS_OF_SHOULDER)
            if scenario.variability.bandwidth_at(spec.onset_s) < cfg.oscillation_floor_bpm:
                features.add(AtypicalFeature.LOSS_OF_OSCILLATION)

        contraction = associate_contraction(episode, contractions, cfg.association_window_s)
        decel_type, sub3min = classify_timing(
            spec.onset_s, spec.nadir_s, spec.offset_s, otn, contraction, bool(features), cfg,
        )
        return TypedDeceleration(
            episode=episode,
            decel_type=decel_type,
            atypical_features=frozenset(features),
            associated_contraction=contraction,
            onset_to_nadir_s=otn,
            sub3min=sub3min,
            overlapped_contractions=count_overlapped(episode, contractions),
        )

    def _variability(self, t: np.ndarray, half_amplitude: np.ndarray, cpm: np.ndarray,
                     in_episode: np.ndarray, fs: float) -> VariabilityProfile:
        cfg = self.config.variability
        per_minute = int(round(60.0 * fs))
        minutes = []
        for k in range(len(t) // per_minute):
            window = slice(k * per_minute, (k + 1) * per_minute)
            keep = ~in_episode[window]
            if not keep.any():
                minutes.append(MinuteVariability(k, 0.0, 0, assessable=False))
                continue
            amplitude = float(2.0 * half_amplitude[window][keep].max())
            middle = cpm[window][per_minute // 2]
            minutes.append(MinuteVariability(
                index=k,
                amplitude_bpm=amplitude,
                oscillations_per_min=int(math.floor(middle + 0.5)),
                assessable=bool(keep.sum() >= cfg.min_minute_fraction * per_minute),
            ))
        return VariabilityAnalyzer(cfg).summarize(minutes)

    def _sinusoidal(self, scenario: Scenario, accels: List[Episode]) -> SinusoidalFinding:
        cfg = self.config.sinusoidal
        spec = scenario.sinusoidal
        if spec is None:
            return SinusoidalFinding(SinusoidalStatus.NONE, None, 0.0, 0.0, 0.0)

        if spec.waveform == "triangle":
            penalty = max(0.0, 1.0 - TRIANGLE_THIRD_HARMONIC / cfg.harmonic_tolerance)
            smoothness = TRIANGLE_FUNDAMENTAL_SHARE * penalty
        else:
            smoothness = 1.0
        in_range = (
            cfg.min_amplitude_bpm <= spec.amplitude_bpm <= cfg.max_amplitude_bpm
            and cfg.min_cpm <= spec.cpm <= cfg.max_cpm
            and smoothness >= cfg.pseudo_threshold
        )
        overlapped = any(a.onset_s <= spec.end_s and spec.start_s <= a.offset_s for a in accels)

        if in_range and spec.duration_s >= cfg.min_span_s and smoothness >= cfg.smooth_threshold \
                and not overlapped:
            status = SinusoidalStatus.TRUE_SINUSOIDAL
        elif in_range and spec.duration_s >= cfg.pseudo_min_span_s:
            status = SinusoidalStatus.PSEUDOSINUSOIDAL
        else:
            status = SinusoidalStatus.NONE
        return SinusoidalFinding(status, (spec.start_s, spec.end_s), spec.amplitude_bpm,
                                 spec.cpm, smoothness)


def derive_ground_truth(scenario: Scenario, config: Optional[AnalyzerConfig] = None) -> GroundTruth:
    """由场景参数推导真值"""
    return GroundTruthBuilder(config).build(scenario)
