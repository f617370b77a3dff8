"""
配置解析与验证测试
"""

import json
import os

import pytest

from src.config.config_parser import AnalyzerConfig, ConfigParser
from src.config.config_validator import ConfigValidator
from src.exceptions import ConfigValidationError


pytestmark = pytest.mark.unit


class TestConfigParser:
    """ConfigParser 测试"""

    def test_parse_valid_rules_config(self, fixtures_dir):
        config = ConfigParser(str(fixtures_dir / "configs" / "valid_rules_config.json")).parse()

        assert config.agent.backend == "rules"
        assert config.agent.mode == "multi"
        assert config.render.episode_markers is True
        assert config.evaluation.trials == 3
        assert config.evaluation.seed == 7
        assert config.log_level == "DEBUG"
        assert config.log_file is None

    def test_missing_sections_fall_back_to_defaults(self, fixtures_dir):
        config = ConfigParser(str(fixtures_dir / "configs" / "valid_rules_config.json")).parse()

        assert config.preprocess.min_duration_s == 600.0
        assert config.baseline.exclusion_band_bpm == 8.0
        assert config.sinusoidal.smooth_threshold == 0.6
        assert config.decelerations.prolonged_s == 180.0
        assert config.evaluation.jobs == 1

    def test_parse_remote_config_resolves_prompt_dir(self, fixtures_dir):
        parser = ConfigParser(str(fixtures_dir / "configs" / "valid_remote_config.json"))
        config = parser.parse()

        assert config.agent.backend == "remote"
        assert config.agent.mode == "direct"
        assert config.agent.model == "vision-large"
        assert config.agent.max_retries == 2
        assert config.agent.api_key_env == "CTG_TEST_KEY"
        assert os.path.isabs(config.agent.prompt_dir)
        assert config.agent.prompt_dir == str(parser.project_root / "tests" / "fixtures" / "prompts")

    def test_axis_lists_become_tuples(self):
        config = ConfigParser("unused.json").parse_dict({"render": {"fhr_axis": [60, 200]}})
        assert config.render.fhr_axis == (60.0, 200.0)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ConfigParser(str(tmp_path / "absent.json")).parse()

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{ not json", encoding="utf-8")
        with pytest.raises(json.JSONDecodeError):
            ConfigParser(str(path)).parse()

    @pytest.mark.parametrize("name", [
        "invalid_sinusoidal_thresholds_config.json",
        "invalid_agent_url_config.json",
        "invalid_unknown_section_config.json",
    ])
    def test_invalid_configs_rejected(self, fixtures_dir, name):
        with pytest.raises(ConfigValidationError):
            ConfigParser(str(fixtures_dir / "configs" / name)).parse()


class TestConfigValidator:
    """ConfigValidator 测试"""

    def test_empty_config_is_valid(self):
        ConfigValidator().validate({})

    def test_top_level_must_be_object(self):
        with pytest.raises(ConfigValidationError, match="JSON 对象"):
            ConfigValidator().validate([1, 2])

    def test_unknown_key_in_section(self):
        with pytest.raises(ConfigValidationError, match="baseline"):
            ConfigValidator().validate({"baseline": {"window": 10}})

    def test_unknown_section_names_supported_sections(self):
        with pytest.raises(ConfigValidationError, match="server"):
            ConfigValidator().validate({"server": {}})

    def test_variability_thresholds_order(self):
        with pytest.raises(ConfigValidationError, match="low_threshold_bpm"):
            ConfigValidator().validate({"variability": {"low_threshold_bpm": 30}})

    def test_band_order(self):
        with pytest.raises(ConfigValidationError, match="band_low_hz"):
            ConfigValidator().validate({"sinusoidal": {"band_low_hz": 0.1}})

    def test_axis_order(self):
        with pytest.raises(ConfigValidationError, match="fhr_axis"):
            ConfigValidator().validate({"render": {"fhr_axis": [210, 50]}})

    def test_invalid_backend(self):
        with pytest.raises(ConfigValidationError):
            ConfigValidator().validate({"agent": {"backend": "local"}})

    def test_invalid_log_level(self):
        with pytest.raises(ConfigValidationError):
            ConfigValidator().validate({"logging": {"level": "VERBOSE"}})

    def test_sample_must_be_positive(self):
        with pytest.raises(ConfigValidationError):
            ConfigValidator().validate({"evaluation": {"sample": 0}})

    def test_agent_timeout_must_be_positive(self):
        with pytest.raises(ConfigValidationError, match="agent_timeout_s"):
            ConfigValidator().validate({"agent": {"agent_timeout_s": 0}})

    def test_harmonic_tolerance_must_be_positive(self):
        with pytest.raises(ConfigValidationError, match="harmonic_tolerance"):
            ConfigValidator().validate({"sinusoidal": {"harmonic_tolerance": 0}})


def test_default_config_matches_validator_defaults():
    config = AnalyzerConfig()
    assert config.agent.timeout_s == ConfigValidator.DEFAULT_TIMEOUT_S
    assert config.agent.agent_timeout_s == ConfigValidator.DEFAULT_AGENT_TIMEOUT_S == 120.0
    assert config.agent.max_concurrency == ConfigValidator.DEFAULT_MAX_CONCURRENCY
    assert config.render.px_per_cm == ConfigValidator.DEFAULT_PX_PER_CM
    assert config.evaluation.trials == 5
