"""
特征规则表与聚合规则测试
"""

import itertools
import random

import pytest

from src.analysis.models import (
    AtypicalFeature,
    BaselineEstimate,
    DecelType,
    Episode,
    EpisodeKind,
    MinuteVariability,
    SinusoidalFinding,
    SinusoidalStatus,
    TypedDeceleration,
    VariabilityProfile,
)
from src.classify.aggregator import aggregate, overall_class
from src.classify.feature_rules import (
    classify_accelerations,
    classify_baseline,
    classify_decelerations,
    classify_sinusoidal,
    classify_variability,
    round_half_away,
)
from src.classify.models import FeatureAssessment, FeatureClass, FeatureKind
from src.exceptions import OutOfRangeError, WrongFeatureSetError
from src.record.ctg_record import BinaryLabel

N, S, P = FeatureClass.NORMAL, FeatureClass.SUSPICIOUS, FeatureClass.PATHOLOGICAL


pytestmark = pytest.mark.unit


def _baseline(value):
    return BaselineEstimate(value_bpm=value, determinable=True, coverage_s=900.0, iterations=2)


def _profile(low=0.0, high=0.0, normal_fraction=1.0, osc=4.0):
    minutes = (MinuteVariability(0, 10.0, 4),)
    return VariabilityProfile(minutes, low, high, normal_fraction, osc)


def _accel(peak):
    return Episode(EpisodeKind.ACCELERATION, peak - 15.0, peak, peak + 15.0, 20.0, 15.0)


def _contraction(peak):
    return Episode(EpisodeKind.CONTRACTION, peak - 40.0, peak, peak + 40.0, 50.0, 40.0)


def _typed(decel_type, sub3min=False, overlapped=0, features=frozenset()):
    episode = Episode(EpisodeKind.DECELERATION, 100.0, 130.0, 160.0, 25.0, 30.0)
    return TypedDeceleration(episode, decel_type, features, sub3min=sub3min,
                             overlapped_contractions=overlapped)


def _finding(status):
    span = None if status is SinusoidalStatus.NONE else (100.0, 800.0)
    return SinusoidalFinding(status, span, 10.0, 4.0, 0.98)


class TestBaselineRule:
    """基线规则"""

    @pytest.mark.parametrize("bpm, expected", [
        (99, P), (100, S), (109, S), (110, N), (160, N), (161, S), (180, S), (181, P),
    ])
    def test_band_edges(self, bpm, expected):
        assert classify_baseline(_baseline(float(bpm))).feature_class is expected

    def test_rounds_half_away_from_zero(self):
        assert round_half_away(109.5) == 110
        assert round_half_away(160.49) == 160
        assert classify_baseline(_baseline(109.5)).feature_class is N
        assert classify_baseline(_baseline(160.5)).feature_class is S

    def test_indeterminable_is_suspicious(self):
        estimate = BaselineEstimate(None, False, 300.0, 5)
        assessment = classify_baseline(estimate)
        assert assessment.feature_class is S
        assert "could not be determined" in assessment.explanation


class TestVariabilityRule:
    """变异性规则"""

    @pytest.mark.parametrize("profile, expected", [
        (_profile(), N),
        (_profile(low=900.0), P),
        (_profile(low=840.0), S),
        (_profile(low=600.0), S),
        (_profile(low=540.0), N),
        (_profile(high=600.0), P),
        (_profile(high=300.0), S),
        (_profile(high=240.0), N),
        (_profile(normal_fraction=0.49), S),
        (_profile(normal_fraction=0.5), N),
        (_profile(osc=2.5), S),
        (_profile(osc=5.5), S),
        (_profile(osc=None), N),
    ])
    def test_thresholds(self, profile, expected):
        assert classify_variability(profile).feature_class is expected

    def test_explanation_names_reason(self):
        assessment = classify_variability(_profile(high=660.0))
        assert "above 25 bpm for 11 min" in assessment.explanation


class TestAccelerationRule:
    """加速规则"""

    def test_none_is_pathological(self):
        assert classify_accelerations([], []).feature_class is P

    def test_single_is_suspicious(self):
        assert classify_accelerations([_accel(100.0)], []).feature_class is S

    def test_two_unlocked_are_normal(self):
        accels = [_accel(100.0), _accel(400.0)]
        contractions = [_contraction(250.0), _contraction(600.0)]
        assert classify_accelerations(accels, contractions).feature_class is N

    def test_contraction_locked_are_suspicious(self):
        accels = [_accel(250.0), _accel(610.0)]
        contractions = [_contraction(250.0), _contraction(600.0)]
        assessment = classify_accelerations(accels, contractions)
        assert assessment.feature_class is S
        assert assessment.evidence["contraction_locked"] == 2

    def test_locking_needs_two_contractions(self):
        accels = [_accel(250.0), _accel(260.0)]
        assert classify_accelerations(accels, [_contraction(250.0)]).feature_class is N


class TestDecelerationRule:
    """减速规则"""

    def test_none_is_normal(self):
        assert classify_decelerations([]).feature_class is N

    @pytest.mark.parametrize("typed, expected", [
        (_typed(DecelType.EARLY), S),
        (_typed(DecelType.VARIABLE), S),
        (_typed(DecelType.LATE), P),
        (_typed(DecelType.ATYPICAL_VARIABLE, features=frozenset({AtypicalFeature.BIPHASIC})), P),
        (_typed(DecelType.PROLONGED, sub3min=True, overlapped=1), S),
        (_typed(DecelType.PROLONGED, sub3min=True, overlapped=3), P),
        (_typed(DecelType.PROLONGED), P),
    ])
    def test_single_deceleration(self, typed, expected):
        assert classify_decelerations([typed]).feature_class is expected

    def test_any_pathological_dominates(self):
        typed = [_typed(DecelType.EARLY), _typed(DecelType.LATE), _typed(DecelType.VARIABLE)]
        assert classify_decelerations(typed).feature_class is P

    def test_atypical_requires_features(self):
        with pytest.raises(OutOfRangeError):
            _typed(DecelType.ATYPICAL_VARIABLE)


class TestSinusoidalRule:
    """正弦波型规则"""

    @pytest.mark.parametrize("status, expected", [
        (SinusoidalStatus.NONE, N),
        (SinusoidalStatus.PSEUDOSINUSOIDAL, S),
        (SinusoidalStatus.TRUE_SINUSOIDAL, P),
    ])
    def test_status_mapping(self, status, expected):
        assert classify_sinusoidal(_finding(status)).feature_class is expected


def _brute_force_overall(classes):
    """逐条照搬聚合规则的参照实现"""
    pathological = len([c for c in classes if c == P])
    suspicious = len([c for c in classes if c == S])
    if pathological > 0:
        return P
    if suspicious > 1:
        return P
    if suspicious == 1:
        return S
    return N


def _assessments(classes):
    return [
        FeatureAssessment(kind, cls, f"{kind.title} is {cls.value}.")
        for kind, cls in zip(FeatureKind.ordered(), classes)
    ]


class TestAggregation:
    """聚合规则"""

    def test_full_truth_table(self):
        combos = list(itertools.product(FeatureClass, repeat=len(FeatureKind)))
        assert len(combos) == 243
        for classes in combos:
            overall = aggregate(_assessments(classes), record_id="table")
            assert overall.feature_class is _brute_force_overall(classes), classes
            assert (overall.binary is BinaryLabel.NORMAL) == (overall.feature_class is N)

    def test_order_independent(self):
        rng = random.Random(11)
        for classes in itertools.islice(itertools.product(FeatureClass, repeat=5), 0, 243, 7):
            features = _assessments(classes)
            shuffled = features[:]
            rng.shuffle(shuffled)
            assert aggregate(shuffled) == aggregate(features)

    def test_features_reported_in_fixed_order(self):
        features = list(reversed(_assessments([N, S, N, N, N])))
        overall = aggregate(features, record_id="r1")
        assert [f.feature for f in overall.features] == list(FeatureKind.ordered())
        assert overall.record_id == "r1"
        assert overall.explanation.startswith("Baseline: ")
        assert overall.explanation.endswith("Overall suspicious: one feature suspicious.")

    def test_two_suspicious_is_pathological(self):
        assert overall_class([S, S, N, N, N]) is P

    def test_missing_feature(self):
        with pytest.raises(WrongFeatureSetError):
            aggregate(_assessments([N] * 5)[:4])

    def test_duplicate_feature(self):
        features = _assessments([N] * 5)
        features[4] = FeatureAssessment(FeatureKind.BASELINE, N, "again")
        with pytest.raises(WrongFeatureSetError):
            aggregate(features)

    def test_empty_explanation_rejected(self):
        with pytest.raises(ValueError):
            FeatureAssessment(FeatureKind.BASELINE, N, "  ")

    def test_to_dict_layout(self):
        data = aggregate(_assessments([N] * 5), record_id="r2").to_dict()
        assert data["overall"] == {
            "class": "normal",
            "binary": "normal",
            "explanation": data["overall"]["explanation"],
        }
        assert data["mode"] == "multi"
        assert data["features_omitted"] is False
        assert [f["feature"] for f in data["features"]] == [k.value for k in FeatureKind]
