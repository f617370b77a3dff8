"""
pytest 公共夹具

提供默认配置、常数记录工厂、合成场景工厂与按种子缓存的合成语料
"""

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Optional

import numpy as np
import pytest

# 添加项目根目录到 Python 路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.analysis.pipeline import FeatureEvidence, extract_evidence
from src.config.config_parser import AnalyzerConfig
from src.record.ctg_record import BinaryLabel, CtgRecord
from src.synth.generator import generate
from src.synth.ground_truth import GroundTruth
from src.synth.sampler import ScenarioSampler
from src.synth.scenario import Scenario, VariabilitySpec

FIXTURES_DIR = Path(__file__).parent / "fixtures"

# 正常变异性：带宽 8.3 bpm、每分钟 4 个振荡
NORMAL_VARIABILITY = (8.3, 4.0)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture
def default_config() -> AnalyzerConfig:
    return AnalyzerConfig()


def constant_record(fhr: float = 140.0, uc: float = 10.0, duration_s: float = 1200.0,
                    fs: float = 4.0, record_id: str = "const",
                    label: Optional[BinaryLabel] = None) -> CtgRecord:
    n = int(round(duration_s * fs))
    return CtgRecord(
        fhr=np.full(n, fhr),
        uc=np.full(n, uc),
        sample_rate_hz=fs,
        gap_mask=np.zeros(n, dtype=bool),
        record_id=record_id,
        reference_label=label,
    )


@pytest.fixture
def make_record() -> Callable[..., CtgRecord]:
    """常数记录工厂"""
    return constant_record


def normal_scenario(**overrides) -> Scenario:
    """基线 140、正常变异性、无事件的 20 分钟场景"""
    amplitude, cpm = NORMAL_VARIABILITY
    values = dict(baseline_bpm=140.0, variability=VariabilitySpec(amplitude, cpm))
    values.update(overrides)
    return Scenario(**values)


@pytest.fixture
def make_scenario() -> Callable[..., Scenario]:
    return normal_scenario


@dataclass
class SynthCase:
    """一个种子对应的场景、记录与真值，证据按需提取"""
    scenario: Scenario
    record: CtgRecord
    truth: GroundTruth
    _evidence: Optional[FeatureEvidence] = None

    @property
    def evidence(self) -> FeatureEvidence:
        if self._evidence is None:
            self._evidence = extract_evidence(self.record)
        return self._evidence


class SynthCorpus:
    """按 (种子, 噪声) 缓存的随机合成语料，多个测试模块共用"""

    def __init__(self):
        self._sampler = ScenarioSampler()
        self._cases: Dict[tuple, SynthCase] = {}

    def case(self, seed: int, noise_bpm: float = 0.0) -> SynthCase:
        key = (seed, noise_bpm)
        if key not in self._cases:
            scenario = self._sampler.sample(seed, noise_bpm)
            record, truth = generate(scenario)
            self._cases[key] = SynthCase(scenario, record, truth)
        return self._cases[key]


@pytest.fixture(scope="session")
def synth_corpus() -> SynthCorpus:
    return SynthCorpus()
