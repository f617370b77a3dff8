"""
合成数据模块 (synth)

参数化 CTG 场景、记录生成器、符号真值与随机场景采样
"""

from src.synth.generator import TraceGenerator, generate
from src.synth.ground_truth import GroundTruth, GroundTruthBuilder, derive_ground_truth
from src.synth.sampler import ScenarioSampler, sample_scenario, sample_scenarios
from src.synth.scenario import (
    AccelerationSpec,
    ContractionSpec,
    DecelerationSpec,
    Scenario,
    ScenarioLoader,
    SinusoidSpec,
    VariabilitySegment,
    VariabilitySpec,
)

__all__ = [
    "AccelerationSpec",
    "ContractionSpec",
    "DecelerationSpec",
    "GroundTruth",
    "GroundTruthBuilder",
    "Scenario",
    "ScenarioLoader",
    "ScenarioSampler",
    "SinusoidSpec",
    "TraceGenerator",
    "VariabilitySegment",
    "VariabilitySpec",
    "derive_ground_truth",
    "generate",
    "sample_scenario",
    "sample_scenarios",
]
