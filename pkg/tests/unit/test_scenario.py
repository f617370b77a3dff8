"""
合成场景、生成器与真值测试
"""

import numpy as np
import pytest

from src.analysis.models import DecelType
from src.classify.models import FeatureClass, FeatureKind
from src.exceptions import OutOfRangeError, OverlapError, ScenarioValidationError
from src.record.ctg_record import BinaryLabel
from src.synth.generator import TraceGenerator, generate
from src.synth.ground_truth import derive_ground_truth
from src.synth.sampler import ScenarioSampler, sample_scenarios
from src.synth.scenario import (
    AccelerationSpec,
    ContractionSpec,
    DecelerationSpec,
    ScenarioLoader,
    SinusoidSpec,
)


pytestmark = pytest.mark.unit


class TestScenarioLoader:
    """ScenarioLoader 测试"""

    def test_load_late_deceleration(self, fixtures_dir):
        scenario = ScenarioLoader().load(fixtures_dir / "scenarios" / "late_deceleration.json")

        assert scenario.name == "late_decel"
        assert len(scenario.accelerations) == 2
        assert scenario.decelerations[0].shape == "raised_cosine"
        assert len(scenario.all_contractions()) == 1

    def test_overlapping_events(self, fixtures_dir):
        with pytest.raises(OverlapError) as exc_info:
            ScenarioLoader().load(fixtures_dir / "scenarios" / "overlapping_accelerations.json")
        assert exc_info.value.kind == "acceleration"

    def test_schema_error_names_field(self):
        with pytest.raises(ScenarioValidationError, match="accelerations.0"):
            ScenarioLoader().from_dict({
                "baseline_bpm": 140,
                "accelerations": [{"onset_s": 100, "duration_s": 30}],
            })

    def test_unknown_top_level_key(self):
        with pytest.raises(ScenarioValidationError):
            ScenarioLoader().from_dict({"baseline_bpm": 140, "contraction_rate": 3})

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ScenarioValidationError):
            ScenarioLoader().load(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ScenarioLoader().load(tmp_path / "absent.json")

    def test_to_dict_loads_back(self, make_scenario):
        scenario = make_scenario(
            accelerations=[AccelerationSpec(200.0, 40.0, 20.0)],
            sinusoidal=SinusoidSpec(10.0, 4.0, 500.0, 600.0),
        )
        assert ScenarioLoader().from_dict(scenario.to_dict()) == scenario


class TestScenarioInvariants:
    """Scenario.validate 测试"""

    def test_event_beyond_record(self, make_scenario):
        scenario = make_scenario(accelerations=[AccelerationSpec(1180.0, 40.0, 20.0)])
        with pytest.raises(OutOfRangeError):
            scenario.validate()

    def test_nadir_must_precede_offset(self, make_scenario):
        scenario = make_scenario(decelerations=[DecelerationSpec(300.0, 60.0, 30.0, 60.0)])
        with pytest.raises(OutOfRangeError):
            scenario.validate()

    def test_biphasic_needs_depth(self, make_scenario):
        decel = DecelerationSpec(300.0, 80.0, 20.0, 10.0, atypical=["biphasic"])
        with pytest.raises(OutOfRangeError):
            make_scenario(decelerations=[decel]).validate()

    def test_companion_contractions_may_not_overlap(self, make_scenario):
        decel = DecelerationSpec(300.0, 60.0, 20.0, 10.0, lag_to_contraction_s=10.0)
        scenario = make_scenario(
            decelerations=[decel],
            contractions=[ContractionSpec(peak_s=320.0, width_s=60.0, amplitude=40.0)],
        )
        with pytest.raises(OverlapError):
            scenario.validate()


class TestGenerator:
    """TraceGenerator 测试"""

    def test_same_scenario_same_samples(self, make_scenario):
        scenario = make_scenario(noise_bpm=2.0, seed=9)
        first = TraceGenerator().generate(scenario)
        second = TraceGenerator().generate(scenario)
        assert first == second

    def test_seed_only_changes_noise(self, make_scenario):
        a = TraceGenerator().generate(make_scenario(noise_bpm=2.0, seed=1))
        b = TraceGenerator().generate(make_scenario(noise_bpm=2.0, seed=2))
        quiet = TraceGenerator().generate(make_scenario())

        assert not np.array_equal(a.fhr, b.fhr)
        assert np.abs(a.fhr - quiet.fhr).mean() < 3.0

    def test_record_shape(self, make_scenario):
        record = TraceGenerator().generate(make_scenario(record_id="shape"))
        assert record.record_id == "shape"
        assert record.n_samples == 4800
        assert not record.gap_mask.any()
        assert np.all(record.uc == 10.0)

    def test_contraction_raises_uc(self, make_scenario):
        scenario = make_scenario(contractions=[ContractionSpec(peak_s=600.0, width_s=60.0, amplitude=50.0)])
        record = TraceGenerator().generate(scenario)
        assert record.uc[2400] == pytest.approx(60.0)


class TestGroundTruth:
    """真值推导测试"""

    def test_quiet_scenario_without_accelerations(self, make_scenario):
        truth = derive_ground_truth(make_scenario())

        assert truth.classes[FeatureKind.BASELINE] is FeatureClass.NORMAL
        assert truth.classes[FeatureKind.VARIABILITY] is FeatureClass.NORMAL
        assert truth.classes[FeatureKind.ACCELERATIONS] is FeatureClass.PATHOLOGICAL
        assert truth.binary is BinaryLabel.ABNORMAL

    def test_normal_scenario(self, make_scenario):
        accels = [AccelerationSpec(200.0, 40.0, 20.0), AccelerationSpec(800.0, 40.0, 20.0)]
        truth = derive_ground_truth(make_scenario(accelerations=accels))

        assert set(truth.classes.values()) == {FeatureClass.NORMAL}
        assert truth.overall is FeatureClass.NORMAL
        assert [e.onset_s for e in truth.expected_episodes] == [200.0, 800.0]

    def test_late_deceleration_fixture(self, fixtures_dir):
        scenario = ScenarioLoader().load(fixtures_dir / "scenarios" / "late_deceleration.json")
        record, truth = generate(scenario)

        decel = truth.evidence.decelerations[0]
        assert decel.decel_type is DecelType.LATE
        assert decel.associated_contraction is not None
        assert truth.classes[FeatureKind.DECELERATIONS] is FeatureClass.PATHOLOGICAL
        assert truth.overall is FeatureClass.PATHOLOGICAL
        assert record.record_id == truth.record_id == "late_decel"

    def test_to_dict(self, make_scenario):
        data = derive_ground_truth(make_scenario(record_id="td")).to_dict()
        assert data["record_id"] == "td"
        assert set(data["features"]) == {k.value for k in FeatureKind}


class TestSampler:
    """ScenarioSampler 测试"""

    def test_same_seed_same_scenario(self):
        sampler = ScenarioSampler()
        assert sampler.sample(3) == sampler.sample(3)

    def test_sampled_scenarios_are_valid(self):
        for scenario in sample_scenarios(10, seed=40):
            scenario.validate()
            assert scenario.duration_s == 1200.0

    def test_noise_is_carried(self):
        assert ScenarioSampler().sample(5, noise_bpm=2.0).noise_bpm == 2.0
