"""
配置验证器

负责验证配置参数的合法性
"""

from typing import Any, Dict

import jsonschema

from src.exceptions import ConfigValidationError


def _number(minimum: float = None, exclusive_minimum: float = None, maximum: float = None) -> Dict[str, Any]:
    schema: Dict[str, Any] = {"type": "number"}
    if minimum is not None:
        schema["minimum"] = minimum
    if exclusive_minimum is not None:
        schema["exclusiveMinimum"] = exclusive_minimum
    if maximum is not None:
        schema["maximum"] = maximum
    return schema


def _integer(minimum: int = None, maximum: int = None) -> Dict[str, Any]:
    schema: Dict[str, Any] = {"type": "integer"}
    if minimum is not None:
        schema["minimum"] = minimum
    if maximum is not None:
        schema["maximum"] = maximum
    return schema


def _section(properties: Dict[str, Any]) -> Dict[str, Any]:
    return {"type": "object", "properties": properties, "additionalProperties": False}


_AXIS = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}


class ConfigValidator:
    """配置验证器

    验证配置参数的类型、范围和合法性。结构检查使用 JSON Schema，
    Schema 无法表达的跨字段约束在 _validate_<section>_config 中检查。
    """

    # 预处理默认值
    DEFAULT_MAX_GAP_S = 15.0
    DEFAULT_FHR_MEDIAN_S = 2.5
    DEFAULT_UC_MEDIAN_S = 10.0
    DEFAULT_MIN_DURATION_S = 600.0
    DEFAULT_SAMPLE_RATE_HZ = 4.0
    DEFAULT_MAX_MEDIAN_PASSES = 50

    # 基线默认值
    DEFAULT_EXCLUSION_BAND_BPM = 8.0
    DEFAULT_MAX_ITER = 5
    DEFAULT_CONVERGENCE_BPM = 0.5
    DEFAULT_MODE_SMOOTHING_S = 60.0

    # 智能体默认值
    DEFAULT_BACKEND = "rules"
    DEFAULT_MODE = "multi"
    DEFAULT_BASE_URL = "http://127.0.0.1:8000/v1"
    DEFAULT_MODEL = "default"
    DEFAULT_TIMEOUT_S = 120.0
    DEFAULT_AGENT_TIMEOUT_S = 120.0
    DEFAULT_MAX_RETRIES = 1
    DEFAULT_MAX_CONCURRENCY = 5
    DEFAULT_API_KEY_ENV = "CTG_AGENT_API_KEY"

    # 绘图默认值
    DEFAULT_PX_PER_CM = 40
    DEFAULT_PAPER_SPEED = 1.0

    # 评估默认值
    DEFAULT_TRIALS = 5

    VALID_BACKENDS = ["rules", "remote"]
    VALID_MODES = ["multi", "direct"]
    VALID_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]

    SCHEMAS: Dict[str, Dict[str, Any]] = {
        "preprocess": _section({
            "max_gap_s": _number(minimum=0),
            "fhr_median_s": _number(exclusive_minimum=0),
            "uc_median_s": _number(exclusive_minimum=0),
            "min_duration_s": _number(minimum=0),
            "default_sample_rate_hz": _number(exclusive_minimum=0),
            "max_median_passes": _integer(minimum=1),
        }),
        "baseline": _section({
            "exclusion_band_bpm": _number(exclusive_minimum=0),
            "max_iter": _integer(minimum=1),
            "convergence_bpm": _number(exclusive_minimum=0),
            "min_coverage_s": _number(minimum=0),
            "mode_smoothing_s": _number(minimum=0),
        }),
        "variability": _section({
            "low_threshold_bpm": _number(minimum=0),
            "high_threshold_bpm": _number(minimum=0),
            "crossing_hysteresis_bpm": _number(minimum=0),
            "min_minute_fraction": _number(minimum=0, maximum=1),
        }),
        "episodes": _section({
            "deadband_bpm": _number(minimum=0),
            "reentry_s": _number(minimum=0),
            "min_amplitude_bpm": _number(minimum=0),
            "min_duration_s": _number(minimum=0),
            "smoothing_s": _number(minimum=0),
            "boundary_search_s": _number(minimum=0),
            "nadir_fraction": _number(exclusive_minimum=0, maximum=1),
        }),
        "decelerations": _section({
            "abrupt_onset_to_nadir_s": _number(exclusive_minimum=0),
            "prolonged_s": _number(exclusive_minimum=0),
            "sub3min_s": _number(minimum=0),
            "early_nadir_window_s": _number(minimum=0),
            "late_onset_lag_s": _number(minimum=0),
            "association_window_s": _number(minimum=0),
            "max_contractions": _integer(minimum=0),
            "shoulder_window_s": _number(exclusive_minimum=0),
            "shoulder_rise_bpm": _number(minimum=0),
            "slow_return_s": _number(minimum=0),
            "recovery_fraction": _number(exclusive_minimum=0, maximum=1),
            "biphasic_depth_bpm": _number(minimum=0),
            "biphasic_recovery_bpm": _number(minimum=0),
            "biphasic_smoothing_s": _number(minimum=0),
            "oscillation_floor_bpm": _number(minimum=0),
            "oscillation_median_s": _number(exclusive_minimum=0),
            "resumption_window_s": _number(exclusive_minimum=0),
            "lower_resumption_bpm": _number(minimum=0),
            "elevated_baseline_bpm": _number(minimum=0),
        }),
        "contractions": _section({
            "min_amplitude": _number(minimum=0),
            "min_duration_s": _number(minimum=0),
            "tone_percentile": _number(minimum=0, maximum=100),
        }),
        "sinusoidal": _section({
            "window_s": _number(exclusive_minimum=0),
            "step_s": _number(exclusive_minimum=0),
            "band_low_hz": _number(exclusive_minimum=0),
            "band_high_hz": _number(exclusive_minimum=0),
            "max_freq_hz": _number(exclusive_minimum=0),
            "smooth_threshold": _number(minimum=0, maximum=1),
            "pseudo_threshold": _number(minimum=0, maximum=1),
            "min_amplitude_bpm": _number(minimum=0),
            "max_amplitude_bpm": _number(minimum=0),
            "min_cpm": _number(minimum=0),
            "max_cpm": _number(minimum=0),
            "min_span_s": _number(minimum=0),
            "pseudo_min_span_s": _number(minimum=0),
            "detrend_s": _number(exclusive_minimum=0),
            "crossing_hysteresis_bpm": _number(minimum=0),
            "regularity_ratio": _number(minimum=1),
            "harmonic_tolerance": _number(exclusive_minimum=0),
        }),
        "classify": _section({
            "lock_window_s": _number(minimum=0),
            "lock_fraction": _number(minimum=0, maximum=1),
            "min_locked_contractions": _integer(minimum=0),
        }),
        "agent": _section({
            "backend": {"enum": VALID_BACKENDS},
            "mode": {"enum": VALID_MODES},
            "base_url": {"type": "string", "pattern": "^https?://"},
            "model": {"type": "string", "minLength": 1},
            "timeout_s": _number(exclusive_minimum=0),
            "agent_timeout_s": _number(exclusive_minimum=0),
            "max_retries": _integer(minimum=0),
            "max_concurrency": _integer(minimum=1),
            "api_key_env": {"type": "string", "minLength": 1},
            "prompt_dir": {"type": ["string", "null"]},
            "temperature": _number(minimum=0),
            "attach_image": {"type": "boolean"},
        }),
        "render": _section({
            "px_per_cm": _integer(minimum=1),
            "paper_speed_cm_per_min": _number(exclusive_minimum=0),
            "fhr_axis": _AXIS,
            "uc_axis": _AXIS,
            "fhr_panel_px": _integer(minimum=20),
            "uc_panel_px": _integer(minimum=20),
            "episode_markers": {"type": "boolean"},
        }),
        "evaluation": _section({
            "trials": _integer(minimum=1),
            "sample": {"type": ["integer", "null"], "minimum": 1},
            "balanced": {"type": "boolean"},
            "seed": _integer(),
            "jobs": _integer(minimum=1),
        }),
        "logging": _section({
            "level": {"enum": VALID_LOG_LEVELS},
            "file": {"type": ["string", "null"]},
        }),
    }

    def validate(self, config: Dict[str, Any]) -> None:
        """验证配置字典

        Args:
            config: 配置字典

        Raises:
            ConfigValidationError: 验证失败时抛出
        """
        if not isinstance(config, dict):
            raise ConfigValidationError("配置文件顶层必须是 JSON 对象")

        unknown = sorted(set(config) - set(self.SCHEMAS))
        if unknown:
            raise ConfigValidationError(
                f"未知的配置段: {', '.join(unknown)}，"
                f"支持的配置段: {', '.join(self.SCHEMAS)}"
            )

        # 只验证存在的配置部分
        for section, schema in self.SCHEMAS.items():
            if section not in config:
                continue
            try:
                jsonschema.validate(config[section], schema)
            except jsonschema.ValidationError as e:
                path = ".".join([section] + [str(p) for p in e.absolute_path])
                raise ConfigValidationError(f"配置验证失败: {path}: {e.message}")

        try:
            if "sinusoidal" in config:
                self._validate_sinusoidal_config(config)
            if "variability" in config:
                self._validate_variability_config(config)
            if "render" in config:
                self._validate_render_config(config)
        except (KeyError, ValueError, TypeError) as e:
            raise ConfigValidationError(f"配置验证失败: {e}")

    def _validate_sinusoidal_config(self, config: Dict[str, Any]) -> None:
        """验证正弦波检测配置的跨字段约束

        Raises:
            ConfigValidationError: 阈值或频带顺序不正确
        """
        section = config["sinusoidal"]

        pseudo = section.get("pseudo_threshold", 0.35)
        smooth = section.get("smooth_threshold", 0.6)
        if pseudo >= smooth:
            raise ConfigValidationError(
                f"pseudo_threshold ({pseudo}) 必须小于 smooth_threshold ({smooth})"
            )

        low = section.get("band_low_hz", 0.05)
        high = section.get("band_high_hz", 0.0833)
        top = section.get("max_freq_hz", 0.5)
        if not (low < high <= top):
            raise ConfigValidationError(
                f"频带必须满足 band_low_hz < band_high_hz <= max_freq_hz，"
                f"当前值: {low}, {high}, {top}"
            )

    def _validate_variability_config(self, config: Dict[str, Any]) -> None:
        """验证变异性阈值顺序"""
        section = config["variability"]
        low = section.get("low_threshold_bpm", 5.0)
        high = section.get("high_threshold_bpm", 25.0)
        if low >= high:
            raise ConfigValidationError(
                f"low_threshold_bpm ({low}) 必须小于 high_threshold_bpm ({high})"
            )

    def _validate_render_config(self, config: Dict[str, Any]) -> None:
        """验证坐标轴范围"""
        section = config["render"]
        for name in ("fhr_axis", "uc_axis"):
            if name in section:
                lower, upper = section[name]
                if lower >= upper:
                    raise ConfigValidationError(
                        f"{name} 下限必须小于上限，当前值: [{lower}, {upper}]"
                    )
