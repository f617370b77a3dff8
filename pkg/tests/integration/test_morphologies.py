"""
减速形态与正弦波型判别测试

四种典型减速各 20 个种子实例；双相与低基线恢复触发非典型变异减速；
正弦、三角波与正常变异性三种波形
"""

import numpy as np
import pytest

from src.analysis.models import AtypicalFeature, DecelType, SinusoidalStatus
from src.analysis.pipeline import extract_evidence
from src.classify.aggregator import assess_evidence
from src.classify.models import FeatureClass, FeatureKind
from src.synth.generator import generate
from src.synth.sampler import ScenarioSampler
from src.synth.scenario import AccelerationSpec, DecelerationSpec, SinusoidSpec, TRAPEZOID


pytestmark = pytest.mark.integration

DECEL_ONSET_S = 420.0


def _accelerations():
    return [AccelerationSpec(120.0, 40.0, 25.0), AccelerationSpec(960.0, 40.0, 25.0)]


def _morphology(make_scenario, kind: str, seed: int):
    """用采样器的形态参数在固定位置放一次减速"""
    rng = np.random.default_rng(seed)
    block = getattr(ScenarioSampler(), f"_{kind}")(rng)
    return make_scenario(
        accelerations=_accelerations(),
        decelerations=block.make(DECEL_ONSET_S),
        record_id=f"{kind}_{seed:02d}",
    )


def _types(decelerations):
    return [d.decel_type for d in decelerations]


@pytest.mark.parametrize("kind, expected", [
    ("early", DecelType.EARLY),
    ("variable", DecelType.VARIABLE),
    ("late", DecelType.LATE),
    ("prolonged", DecelType.PROLONGED),
])
def test_canonical_morphology(make_scenario, kind, expected):
    for seed in range(20):
        scenario = _morphology(make_scenario, kind, seed)
        if kind == "variable":
            scenario.decelerations[0].atypical = []
        record, truth = generate(scenario)
        evidence = extract_evidence(record)

        assert _types(truth.evidence.decelerations) == [expected], scenario
        assert _types(evidence.decelerations) == [expected], scenario


class TestAtypicalVariable:
    """非典型变异减速"""

    @staticmethod
    def _typed(make_scenario, decel: DecelerationSpec):
        record, truth = generate(make_scenario(accelerations=_accelerations(), decelerations=[decel]))
        return extract_evidence(record).decelerations, truth.evidence.decelerations

    def test_biphasic(self, make_scenario):
        decel = DecelerationSpec(500.0, 76.0, 30.0, 8.0, shape=TRAPEZOID, atypical=["biphasic"])
        detected, truth = self._typed(make_scenario, decel)

        assert _types(truth) == [DecelType.ATYPICAL_VARIABLE]
        assert _types(detected) == [DecelType.ATYPICAL_VARIABLE]
        assert AtypicalFeature.BIPHASIC in detected[0].atypical_features

    def test_lower_baseline_resumption(self, make_scenario):
        decel = DecelerationSpec(500.0, 40.0, 25.0, 8.0, shape=TRAPEZOID,
                                 atypical=["lower_resumption"])
        detected, truth = self._typed(make_scenario, decel)

        assert _types(truth) == [DecelType.ATYPICAL_VARIABLE]
        assert _types(detected) == [DecelType.ATYPICAL_VARIABLE]
        assert AtypicalFeature.LOWER_BASELINE_RESUMPTION in detected[0].atypical_features

    def test_clean_variable_has_no_features(self, make_scenario):
        decel = DecelerationSpec(500.0, 40.0, 25.0, 8.0, shape=TRAPEZOID)
        detected, _ = self._typed(make_scenario, decel)

        assert _types(detected) == [DecelType.VARIABLE]
        assert detected[0].atypical_features == frozenset()


class TestSinusoidalDiscrimination:
    """正弦波型判别"""

    @staticmethod
    def _sinusoidal(scenario):
        record, truth = generate(scenario)
        evidence = extract_evidence(record)
        detected = {f.feature: f.feature_class for f in assess_evidence(evidence).features}
        return evidence.sinusoidal, detected[FeatureKind.SINUSOIDAL], truth

    def test_pure_sine_is_pathological(self, make_scenario):
        scenario = make_scenario(sinusoidal=SinusoidSpec(10.0, 4.0, 240.0, 720.0))
        finding, cls, truth = self._sinusoidal(scenario)

        assert finding.status is SinusoidalStatus.TRUE_SINUSOIDAL
        assert cls is FeatureClass.PATHOLOGICAL
        assert truth.classes[FeatureKind.SINUSOIDAL] is FeatureClass.PATHOLOGICAL

    def test_triangle_wave_is_pseudosinusoidal(self, make_scenario):
        scenario = make_scenario(sinusoidal=SinusoidSpec(10.0, 4.0, 300.0, 480.0, waveform="triangle"))
        finding, cls, truth = self._sinusoidal(scenario)

        assert finding.status is SinusoidalStatus.PSEUDOSINUSOIDAL
        assert cls is FeatureClass.SUSPICIOUS
        assert truth.classes[FeatureKind.SINUSOIDAL] is FeatureClass.SUSPICIOUS

    def test_long_triangle_wave_stays_pseudosinusoidal(self, make_scenario):
        """12 分钟三角波满足时长，但锯齿形状使平滑度低于真正弦阈值"""
        scenario = make_scenario(sinusoidal=SinusoidSpec(10.0, 4.0, 240.0, 720.0, waveform="triangle"))
        finding, cls, truth = self._sinusoidal(scenario)

        assert finding.status is SinusoidalStatus.PSEUDOSINUSOIDAL
        assert finding.smoothness < 0.6
        assert cls is FeatureClass.SUSPICIOUS
        assert truth.evidence.sinusoidal.status is SinusoidalStatus.PSEUDOSINUSOIDAL
        assert truth.classes[FeatureKind.SINUSOIDAL] is FeatureClass.SUSPICIOUS

    def test_long_sine_keeps_high_smoothness(self, make_scenario):
        finding, _, _ = self._sinusoidal(make_scenario(sinusoidal=SinusoidSpec(10.0, 4.0, 240.0, 720.0)))

        assert finding.smoothness >= 0.6

    def test_normal_variability_is_not_sinusoidal(self, make_scenario):
        finding, cls, _ = self._sinusoidal(make_scenario(accelerations=_accelerations()))

        assert finding.status is SinusoidalStatus.NONE
        assert cls is FeatureClass.NORMAL
