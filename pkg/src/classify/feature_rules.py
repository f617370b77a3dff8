"""
特征规则表

把每个特征的证据映射为 正常/可疑/病理 三级类别，并生成英文说明
"""

import math
from typing import List, Optional, Sequence

from src.analysis.models import (
    BaselineEstimate,
    DecelType,
    Episode,
    SinusoidalFinding,
    SinusoidalStatus,
    TypedDeceleration,
    VariabilityProfile,
)
from src.analysis.pipeline import FeatureEvidence
from src.classify.models import FeatureAssessment, FeatureClass, FeatureKind
from src.config.config_parser import ClassifyConfig, DecelerationConfig

BASELINE_NORMAL = (110, 160)
BASELINE_SUSPICIOUS = ((100, 109), (161, 180))

LOW_VAR_PATHOLOGICAL_S = 900.0
LOW_VAR_SUSPICIOUS_S = 600.0
HIGH_VAR_PATHOLOGICAL_S = 600.0
HIGH_VAR_SUSPICIOUS_S = 300.0
NORMAL_MINUTE_FRACTION = 0.5
OSCILLATION_RANGE = (3.0, 5.0)


def round_half_away(value: float) -> int:
    """四舍五入到整数（.5 远离零）"""
    return int(math.copysign(math.floor(abs(value) + 0.5), value))


def classify_baseline(est: BaselineEstimate) -> FeatureAssessment:
    """基线判读：110-160 正常，100-109/161-180 可疑，其余病理；无法确定视为可疑"""
    evidence = est.to_dict()
    if not est.determinable:
        return FeatureAssessment(
            FeatureKind.BASELINE, FeatureClass.SUSPICIOUS,
            f"Baseline could not be determined (only {est.coverage_s:.0f} s of stable signal); "
            f"treated as suspicious.",
            evidence,
        )

    bpm = round_half_away(est.value_bpm)
    evidence["rounded_bpm"] = bpm
    low, high = BASELINE_NORMAL
    if low <= bpm <= high:
        cls, band = FeatureClass.NORMAL, "within 110-160 bpm"
    elif any(a <= bpm <= b for a, b in BASELINE_SUSPICIOUS):
        cls, band = FeatureClass.SUSPICIOUS, "in the 100-109 or 161-180 bpm band"
    else:
        cls, band = FeatureClass.PATHOLOGICAL, "below 100 or above 180 bpm"
    return FeatureAssessment(
        FeatureKind.BASELINE, cls, f"Baseline {bpm} bpm is {band}.", evidence,
    )


def classify_variability(profile: VariabilityProfile) -> FeatureAssessment:
    """变异性判读

    病理：低变异持续 ≥15 分钟或高变异持续 ≥10 分钟；
    可疑：低变异 10-15 分钟、高变异 5-10 分钟、正常幅度分钟不足一半、
    或幅度正常时振荡频率中位数超出 3-5 次/分。
    """
    low = profile.low_var_longest_run_s
    high = profile.high_var_longest_run_s
    evidence = profile.to_dict()
    evidence.pop("minutes", None)
    evidence["assessable_minutes"] = sum(1 for m in profile.minutes if m.assessable)

    if low >= LOW_VAR_PATHOLOGICAL_S or high >= HIGH_VAR_PATHOLOGICAL_S:
        reason = (
            f"amplitude below 5 bpm for {low / 60:.0f} min" if low >= LOW_VAR_PATHOLOGICAL_S
            else f"amplitude above 25 bpm for {high / 60:.0f} min"
        )
        return FeatureAssessment(FeatureKind.VARIABILITY, FeatureClass.PATHOLOGICAL,
                                 f"Variability is pathological: {reason}.", evidence)

    reasons: List[str] = []
    if LOW_VAR_SUSPICIOUS_S <= low:
        reasons.append(f"amplitude below 5 bpm for {low / 60:.0f} min")
    if HIGH_VAR_SUSPICIOUS_S <= high:
        reasons.append(f"amplitude above 25 bpm for {high / 60:.0f} min")
    if profile.normal_fraction < NORMAL_MINUTE_FRACTION:
        reasons.append(f"normal amplitude in only {profile.normal_fraction:.0%} of minutes")
    osc = profile.median_oscillations
    if osc is not None and not (OSCILLATION_RANGE[0] <= osc <= OSCILLATION_RANGE[1]):
        reasons.append(f"median {osc:g} oscillations per minute outside 3-5")

    if reasons:
        return FeatureAssessment(FeatureKind.VARIABILITY, FeatureClass.SUSPICIOUS,
                                 f"Variability is suspicious: {'; '.join(reasons)}.", evidence)
    return FeatureAssessment(
        FeatureKind.VARIABILITY, FeatureClass.NORMAL,
        f"Variability is normal: 5-25 bpm amplitude in {profile.normal_fraction:.0%} of minutes"
        f" with {osc:g} oscillations per minute." if osc is not None
        else "Variability is normal.",
        evidence,
    )


def is_contraction_locked(accel: Episode, contractions: Sequence[Episode],
                          window_s: float = 30.0) -> bool:
    """加速峰值是否落在某次宫缩峰值 ±window_s 以内"""
    return any(abs(accel.extremum_s - c.extremum_s) <= window_s for c in contractions)


def classify_accelerations(accels: Sequence[Episode], contractions: Sequence[Episode],
                           config: Optional[ClassifyConfig] = None) -> FeatureAssessment:
    """加速判读：无加速病理，1 次可疑，≥2 次正常（随宫缩周期性出现时可疑）"""
    cfg = config or ClassifyConfig()
    count = len(accels)
    locked = sum(1 for a in accels if is_contraction_locked(a, contractions, cfg.lock_window_s))
    evidence = {
        "count": count,
        "contractions": len(contractions),
        "contraction_locked": locked,
        "episodes": [a.to_dict() for a in accels],
    }

    if count == 0:
        return FeatureAssessment(FeatureKind.ACCELERATIONS, FeatureClass.PATHOLOGICAL,
                                 "No accelerations were found.", evidence)
    if count == 1:
        return FeatureAssessment(FeatureKind.ACCELERATIONS, FeatureClass.SUSPICIOUS,
                                 "Only one acceleration was found.", evidence)
    if len(contractions) >= cfg.min_locked_contractions and locked / count >= cfg.lock_fraction:
        return FeatureAssessment(
            FeatureKind.ACCELERATIONS, FeatureClass.SUSPICIOUS,
            f"{locked} of {count} accelerations coincide with contraction peaks "
            f"(periodic with contractions).",
            evidence,
        )
    return FeatureAssessment(FeatureKind.ACCELERATIONS, FeatureClass.NORMAL,
                             f"{count} accelerations were found.", evidence)


def is_pathological_deceleration(decel: TypedDeceleration, max_contractions: int = 2) -> bool:
    """晚期、非典型变异、≥3 分钟延长减速或持续超过 max_contractions 次宫缩的延长减速"""
    if decel.decel_type in (DecelType.LATE, DecelType.ATYPICAL_VARIABLE):
        return True
    if decel.decel_type is DecelType.PROLONGED:
        return not decel.sub3min or decel.overlapped_contractions > max_contractions
    return False


def classify_decelerations(typed: Sequence[TypedDeceleration],
                           max_contractions: int = 2) -> FeatureAssessment:
    """减速判读：无减速正常；出现病理型减速为病理；其余为可疑"""
    evidence = {
        "count": len(typed),
        "types": sorted({d.decel_type.value for d in typed}),
        "episodes": [d.to_dict() for d in typed],
    }
    if not typed:
        return FeatureAssessment(FeatureKind.DECELERATIONS, FeatureClass.NORMAL,
                                 "No decelerations were found.", evidence)

    summary = ", ".join(
        f"{d.decel_type.value.replace('_', ' ')}"
        f"{' (<3 min)' if d.sub3min else ''} at {d.episode.onset_s:.0f} s"
        for d in typed
    )
    if any(is_pathological_deceleration(d, max_contractions) for d in typed):
        return FeatureAssessment(FeatureKind.DECELERATIONS, FeatureClass.PATHOLOGICAL,
                                 f"Pathological decelerations present: {summary}.", evidence)
    return FeatureAssessment(FeatureKind.DECELERATIONS, FeatureClass.SUSPICIOUS,
                             f"Decelerations present: {summary}.", evidence)


_SINUSOIDAL_CLASSES = {
    SinusoidalStatus.NONE: (FeatureClass.NORMAL, "No sinusoidal pattern was found."),
    SinusoidalStatus.PSEUDOSINUSOIDAL: (FeatureClass.SUSPICIOUS, "A pseudosinusoidal pattern was found"),
    SinusoidalStatus.TRUE_SINUSOIDAL: (FeatureClass.PATHOLOGICAL, "A true sinusoidal pattern was found"),
}


def classify_sinusoidal(finding: SinusoidalFinding) -> FeatureAssessment:
    """正弦波型判读：无正常，假正弦可疑，真正弦病理"""
    cls, text = _SINUSOIDAL_CLASSES[finding.status]
    if finding.span is not None:
        start, end = finding.span
        text = (
            f"{text} from {start:.0f} s to {end:.0f} s "
            f"({finding.amplitude_bpm:.1f} bpm, {finding.frequency_cpm:.1f} cycles/min)."
        )
    return FeatureAssessment(FeatureKind.SINUSOIDAL, cls, text, finding.to_dict())


def assess_features(evidence: FeatureEvidence,
                    config: Optional[ClassifyConfig] = None,
                    decel_config: Optional[DecelerationConfig] = None) -> List[FeatureAssessment]:
    """按固定顺序给出五个特征判读"""
    return [assess_feature(kind, evidence, config, decel_config) for kind in FeatureKind.ordered()]


def assess_feature(kind: FeatureKind, evidence: FeatureEvidence,
                   config: Optional[ClassifyConfig] = None,
                   decel_config: Optional[DecelerationConfig] = None) -> FeatureAssessment:
    """只判读一个特征"""
    if kind is FeatureKind.BASELINE:
        return classify_baseline(evidence.baseline)
    if kind is FeatureKind.VARIABILITY:
        return classify_variability(evidence.variability)
    if kind is FeatureKind.ACCELERATIONS:
        return classify_accelerations(evidence.accelerations, evidence.contractions, config)
    if kind is FeatureKind.DECELERATIONS:
        return classify_decelerations(
            evidence.decelerations, (decel_config or DecelerationConfig()).max_contractions
        )
    return classify_sinusoidal(evidence.sinusoidal)
