"""
配置文件解析器

负责加载、解析和验证 JSON 配置文件
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from .config_validator import ConfigValidator


@dataclass
class PreprocessConfig:
    """预处理配置"""
    max_gap_s: float = ConfigValidator.DEFAULT_MAX_GAP_S
    fhr_median_s: float = ConfigValidator.DEFAULT_FHR_MEDIAN_S
    uc_median_s: float = ConfigValidator.DEFAULT_UC_MEDIAN_S
    min_duration_s: float = ConfigValidator.DEFAULT_MIN_DURATION_S
    default_sample_rate_hz: float = ConfigValidator.DEFAULT_SAMPLE_RATE_HZ
    max_median_passes: int = ConfigValidator.DEFAULT_MAX_MEDIAN_PASSES


@dataclass
class BaselineConfig:
    """基线估计配置"""
    exclusion_band_bpm: float = ConfigValidator.DEFAULT_EXCLUSION_BAND_BPM
    max_iter: int = ConfigValidator.DEFAULT_MAX_ITER
    convergence_bpm: float = ConfigValidator.DEFAULT_CONVERGENCE_BPM
    min_coverage_s: float = 600.0
    mode_smoothing_s: float = ConfigValidator.DEFAULT_MODE_SMOOTHING_S


@dataclass
class VariabilityConfig:
    """变异性配置"""
    low_threshold_bpm: float = 5.0
    high_threshold_bpm: float = 25.0
    crossing_hysteresis_bpm: float = 1.0
    min_minute_fraction: float = 0.5


@dataclass
class EpisodeConfig:
    """加速/减速检测配置"""
    deadband_bpm: float = 5.0
    reentry_s: float = 5.0
    min_amplitude_bpm: float = 15.0
    min_duration_s: float = 15.0
    smoothing_s: float = 15.0
    boundary_search_s: float = 30.0
    nadir_fraction: float = 0.95


@dataclass
class DecelerationConfig:
    """减速分型与非典型特征配置"""
    abrupt_onset_to_nadir_s: float = 30.0
    prolonged_s: float = 180.0
    sub3min_s: float = 90.0
    early_nadir_window_s: float = 15.0
    late_onset_lag_s: float = 20.0
    association_window_s: float = 60.0
    max_contractions: int = 2
    shoulder_window_s: float = 20.0
    shoulder_rise_bpm: float = 5.0
    slow_return_s: float = 30.0
    recovery_fraction: float = 0.9
    biphasic_depth_bpm: float = 15.0
    biphasic_recovery_bpm: float = 10.0
    biphasic_smoothing_s: float = 5.0
    oscillation_floor_bpm: float = 3.0
    oscillation_median_s: float = 15.0
    resumption_window_s: float = 60.0
    lower_resumption_bpm: float = 5.0
    elevated_baseline_bpm: float = 10.0


@dataclass
class ContractionConfig:
    """宫缩检测配置"""
    min_amplitude: float = 15.0
    min_duration_s: float = 45.0
    tone_percentile: float = 10.0


@dataclass
class SinusoidalConfig:
    """正弦波型检测配置"""
    window_s: float = 600.0
    step_s: float = 60.0
    band_low_hz: float = 0.05
    band_high_hz: float = 0.0833
    max_freq_hz: float = 0.5
    smooth_threshold: float = 0.6
    pseudo_threshold: float = 0.35
    min_amplitude_bpm: float = 5.0
    max_amplitude_bpm: float = 15.0
    min_cpm: float = 3.0
    max_cpm: float = 5.0
    min_span_s: float = 600.0
    pseudo_min_span_s: float = 120.0
    detrend_s: float = 60.0
    crossing_hysteresis_bpm: float = 1.0
    regularity_ratio: float = 1.25
    harmonic_tolerance: float = 0.2


@dataclass
class ClassifyConfig:
    """规则表配置"""
    lock_window_s: float = 30.0
    lock_fraction: float = 0.8
    min_locked_contractions: int = 2


@dataclass
class AgentConfig:
    """智能体后端配置

    API 密钥只从 api_key_env 指定的环境变量读取。
    timeout_s 是单次请求的超时，agent_timeout_s 是单个智能体含重试的总时限
    """
    backend: str = ConfigValidator.DEFAULT_BACKEND
    mode: str = ConfigValidator.DEFAULT_MODE
    base_url: str = ConfigValidator.DEFAULT_BASE_URL
    model: str = ConfigValidator.DEFAULT_MODEL
    timeout_s: float = ConfigValidator.DEFAULT_TIMEOUT_S
    agent_timeout_s: float = ConfigValidator.DEFAULT_AGENT_TIMEOUT_S
    max_retries: int = ConfigValidator.DEFAULT_MAX_RETRIES
    max_concurrency: int = ConfigValidator.DEFAULT_MAX_CONCURRENCY
    api_key_env: str = ConfigValidator.DEFAULT_API_KEY_ENV
    prompt_dir: Optional[str] = None
    temperature: float = 0.0
    attach_image: bool = True


@dataclass
class RenderConfig:
    """走纸图绘制配置"""
    px_per_cm: int = ConfigValidator.DEFAULT_PX_PER_CM
    paper_speed_cm_per_min: float = ConfigValidator.DEFAULT_PAPER_SPEED
    fhr_axis: Tuple[float, float] = (50.0, 210.0)
    uc_axis: Tuple[float, float] = (0.0, 100.0)
    fhr_panel_px: int = 320
    uc_panel_px: int = 160
    episode_markers: bool = False


@dataclass
class EvaluationConfig:
    """批量评估配置"""
    trials: int = ConfigValidator.DEFAULT_TRIALS
    sample: Optional[int] = None
    balanced: bool = False
    seed: int = 0
    jobs: int = 1


@dataclass
class AnalyzerConfig:
    """完整配置数据对象"""

    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    baseline: BaselineConfig = field(default_factory=BaselineConfig)
    variability: VariabilityConfig = field(default_factory=VariabilityConfig)
    episodes: EpisodeConfig = field(default_factory=EpisodeConfig)
    decelerations: DecelerationConfig = field(default_factory=DecelerationConfig)
    contractions: ContractionConfig = field(default_factory=ContractionConfig)
    sinusoidal: SinusoidalConfig = field(default_factory=SinusoidalConfig)
    classify: ClassifyConfig = field(default_factory=ClassifyConfig)
    agent: AgentConfig = field(default_factory=AgentConfig)
    render: RenderConfig = field(default_factory=RenderConfig)
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)

    # 日志配置
    log_level: str = "INFO"
    log_file: Optional[str] = None


# 配置段名称 -> 数据类
SECTION_TYPES = {
    "preprocess": PreprocessConfig,
    "baseline": BaselineConfig,
    "variability": VariabilityConfig,
    "episodes": EpisodeConfig,
    "decelerations": DecelerationConfig,
    "contractions": ContractionConfig,
    "sinusoidal": SinusoidalConfig,
    "classify": ClassifyConfig,
    "agent": AgentConfig,
    "render": RenderConfig,
    "evaluation": EvaluationConfig,
}


class ConfigParser:
    """配置文件解析器

    负责加载 JSON 配置文件，解析并验证配置参数
    """

    def __init__(self, config_path: str, validator: Optional[ConfigValidator] = None):
        """初始化解析器

        Args:
            config_path: 配置文件路径
            validator: 配置验证器（可选，默认创建新实例）
        """
        self.config_path = Path(config_path)
        self.validator = validator or ConfigValidator()

        # 获取项目根目录（用于解析相对路径）
        self.project_root = Path(__file__).parent.parent.parent

    def parse(self) -> AnalyzerConfig:
        """解析配置文件

        Returns:
            AnalyzerConfig: 配置数据对象

        Raises:
            FileNotFoundError: 配置文件不存在
            json.JSONDecodeError: JSON 格式错误
            ConfigValidationError: 配置验证失败
        """
        # 1. 加载 JSON 文件
        config_dict = self._load_json()
        return self.parse_dict(config_dict)

    def parse_dict(self, config_dict: Dict[str, Any]) -> AnalyzerConfig:
        """解析已加载的配置字典（测试与库调用使用）"""
        # 2. 验证用户提供的配置段（默认值不参与 additionalProperties 检查）
        self.validator.validate(config_dict)

        # 3. 应用默认值
        config_dict = self._apply_defaults(config_dict)

        # 4. 解析相对路径为绝对路径
        config_dict = self._resolve_paths(config_dict)

        # 5. 转换为 AnalyzerConfig 对象
        return self._convert_to_config_data(config_dict)

    def _load_json(self) -> Dict[str, Any]:
        """加载 JSON 文件

        Raises:
            FileNotFoundError: 配置文件不存在
            json.JSONDecodeError: JSON 格式错误
        """
        if not self.config_path.exists():
            raise FileNotFoundError(
                f"配置文件不存在: {self.config_path.absolute()}"
            )

        try:
            with open(self.config_path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise json.JSONDecodeError(
                f"配置文件 JSON 格式错误: {e.msg}",
                e.doc,
                e.pos
            )

    def _apply_defaults(self, config: Dict[str, Any]) -> Dict[str, Any]:
        """应用默认值

        各配置段缺省的键由数据类默认值补齐，这里只补齐段本身
        """
        config = {key: dict(value) for key, value in config.items()}
        for section in SECTION_TYPES:
            config.setdefault(section, {})

        config.setdefault("logging", {})
        config["logging"].setdefault("level", "INFO")
        config["logging"].setdefault("file", None)

        return config

    def _resolve_paths(self, config: Dict[str, Any]) -> Dict[str, Any]:
        """解析相对路径为绝对路径"""
        if config["logging"].get("file"):
            config["logging"]["file"] = str(
                self._resolve_relative_path(config["logging"]["file"])
            )

        if config["agent"].get("prompt_dir"):
            config["agent"]["prompt_dir"] = str(
                self._resolve_relative_path(config["agent"]["prompt_dir"])
            )

        return config

    def _resolve_relative_path(self, relative_path: str) -> Path:
        """解析相对路径为绝对路径（相对于项目根目录）"""
        path = Path(relative_path)

        if path.is_absolute():
            return path

        return self.project_root / path

    def _convert_to_config_data(self, config: Dict[str, Any]) -> AnalyzerConfig:
        """将配置字典转换为 AnalyzerConfig 对象"""
        sections = {}
        for name, section_type in SECTION_TYPES.items():
            values = dict(config[name])
            for key in ("fhr_axis", "uc_axis"):
                if key in values:
                    values[key] = tuple(float(v) for v in values[key])
            sections[name] = section_type(**values)

        logging_config = config["logging"]
        return AnalyzerConfig(
            **sections,
            log_level=logging_config["level"],
            log_file=logging_config["file"],
        )

