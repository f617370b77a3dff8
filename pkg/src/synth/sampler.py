"""
随机场景采样

按种子生成参数远离规则阈值的合成场景，用于检测器闭环测试与批量评估数据
"""

import logging
from dataclasses import dataclass, replace
from typing import Any, Callable, List, Optional, Tuple

import numpy as np

from src.config.config_parser import AnalyzerConfig
from src.exceptions import CtgAnalyzerError, ScenarioValidationError
from src.synth.ground_truth import derive_ground_truth
from src.synth.scenario import (
    RAISED_COSINE,
    SHOULDER_WIDTH_S,
    TRAPEZOID,
    AccelerationSpec,
    ContractionSpec,
    DecelerationSpec,
    Scenario,
    SinusoidSpec,
    VariabilitySegment,
    VariabilitySpec,
)
from src.utils.logger import get_logger

MAX_ATTEMPTS = 200

# 记录首尾留白与事件间距
EDGE_S = 60.0
MIN_GAP_S = 60.0
GAP_JITTER_S = 30.0
MIN_PEAK_SPACING_S = 240.0
UNLOCKED_CLEARANCE_S = 60.0

# 真值离阈值过近的场景会被拒绝
RUN_THRESHOLDS_S = (300.0, 600.0, 900.0)
RUN_MARGIN_S = 60.0
COVERAGE_REJECT = (500.0, 700.0)
NORMAL_FRACTION_REJECT = (0.45, 0.55)

BASELINE_BANDS = {
    "normal": ((120.0, 150.0),),
    "suspicious": ((102.0, 107.0), (165.0, 175.0)),
    "pathological": ((88.0, 96.0), (186.0, 192.0)),
}
BASELINE_WEIGHTS = {"normal": 0.8, "suspicious": 0.12, "pathological": 0.08}

REGIME_WEIGHTS = {"normal": 0.72, "low": 0.08, "suspicious_low": 0.05, "high": 0.15}
SINUSOID_WEIGHTS = {"none": 0.8, "true": 0.08, "pseudo": 0.12}
DECEL_WEIGHTS = {"none": 0.4, "variable": 0.2, "early": 0.12, "late": 0.14, "prolonged": 0.14}
ACCEL_COUNT_WEIGHTS = (0.1, 0.15, 0.4, 0.35)
LOCKED_PROBABILITY = 0.15
NO_SHOULDER_PROBABILITY = 0.25

CPM_CHOICES = (3.5, 4.0, 4.5)
NORMAL_BANDWIDTH = (8.0, 8.6)


@dataclass
class _Block:
    """待排布的事件块，时间相对锚点（事件起点）"""
    start: float
    end: float
    make: Callable[[float], Any]
    peak: Optional[float] = None


class ScenarioSampler:
    """随机场景采样器

    职责：
    1. 按权重抽取基线、变异性类型、正弦段、加速与减速
    2. 把事件块依次排布在记录中，保证间距与宫缩峰间隔
    3. 推导真值，拒绝离分类阈值过近的场景并重抽
    """

    def __init__(self, config: Optional[AnalyzerConfig] = None,
                 logger: Optional[logging.Logger] = None):
        self.config = config or AnalyzerConfig()
        self.logger = logger or get_logger("sampler")

    def sample(self, seed: int, noise_bpm: float = 0.0, duration_s: float = 1200.0) -> Scenario:
        """抽取一个场景

        同一种子总是得到同一个场景；noise_bpm 只影响生成时的噪声。

        Raises:
            ScenarioValidationError: 多次重抽仍未得到合格场景
        """
        rng = np.random.default_rng(seed)
        for attempt in range(1, MAX_ATTEMPTS + 1):
            scenario = self._draw(rng, duration_s)
            if scenario is None:
                continue
            scenario.seed = seed
            scenario.noise_bpm = noise_bpm
            scenario.record_id = f"synth_{seed:06d}"
            try:
                scenario.validate()
            except CtgAnalyzerError as e:
                self.logger.debug(f"种子 {seed} 第 {attempt} 次抽样无效: {e}")
                continue
            if self._well_separated(scenario):
                self.logger.debug(f"种子 {seed}: 第 {attempt} 次抽样通过")
                return scenario

        raise ScenarioValidationError(f"种子 {seed} 在 {MAX_ATTEMPTS} 次抽样内未得到合格场景")

    # ------------------------------------------------------------------
    # 抽样
    # ------------------------------------------------------------------

    @staticmethod
    def _pick(rng: np.random.Generator, weights: dict) -> str:
        names = list(weights)
        return str(rng.choice(names, p=np.array(list(weights.values())) / sum(weights.values())))

    def _baseline(self, rng: np.random.Generator) -> float:
        bands = BASELINE_BANDS[self._pick(rng, BASELINE_WEIGHTS)]
        low, high = bands[int(rng.integers(len(bands)))]
        return round(float(rng.uniform(low, high)), 1)

    def _draw(self, rng: np.random.Generator, duration_s: float) -> Optional[Scenario]:
        regime = self._pick(rng, REGIME_WEIGHTS)
        scenario = Scenario(baseline_bpm=self._baseline(rng), duration_s=duration_s)
        cpm = float(rng.choice(CPM_CHOICES))
        windows = [(EDGE_S, duration_s - EDGE_S)]
        blocks: List[_Block] = []

        if regime == "high":
            scenario.variability = VariabilitySpec(float(rng.uniform(40.0, 44.0)), cpm)
            return scenario

        if regime == "low":
            scenario.variability = VariabilitySpec(float(rng.uniform(0.0, 0.5)), cpm)
            blocks += [self._late(rng) for _ in range(int(rng.integers(0, 3)))]

        elif regime == "suspicious_low":
            scenario.variability = VariabilitySpec(float(rng.uniform(*NORMAL_BANDWIDTH)), cpm)
            first = int(rng.integers(1, 8))
            segment = VariabilitySegment(first * 60.0, 720.0, float(rng.uniform(0.0, 0.5)))
            scenario.variability.segments = [segment]
            windows = [(EDGE_S, segment.start_s), (segment.end_s, duration_s - EDGE_S)]
            blocks += [self._acceleration(rng, locked=False) for _ in range(int(rng.integers(2, 4)))]

        else:
            scenario.variability = VariabilitySpec(float(rng.uniform(*NORMAL_BANDWIDTH)), cpm)
            sinusoid = self._pick(rng, SINUSOID_WEIGHTS)
            if sinusoid != "none":
                blocks.append(self._sinusoid(rng, true=sinusoid == "true"))
                accels = 0 if sinusoid == "true" else int(rng.integers(0, 4))
                blocks += [self._acceleration(rng, locked=False) for _ in range(accels)]
            else:
                count = int(rng.choice(len(ACCEL_COUNT_WEIGHTS), p=ACCEL_COUNT_WEIGHTS))
                locked = count >= 2 and rng.random() < LOCKED_PROBABILITY
                blocks += [self._acceleration(rng, locked=locked) for _ in range(count)]
                blocks += self._decelerations(rng)

        order = rng.permutation(len(blocks))
        placed = self._layout([blocks[i] for i in order], windows, rng)
        if placed is None:
            return None

        for item in placed:
            if isinstance(item, AccelerationSpec):
                scenario.accelerations.append(item)
            elif isinstance(item, DecelerationSpec):
                scenario.decelerations.append(item)
            elif isinstance(item, ContractionSpec):
                scenario.contractions.append(item)
            elif isinstance(item, SinusoidSpec):
                scenario.sinusoidal = item
        scenario.accelerations.sort(key=lambda a: a.onset_s)
        scenario.decelerations.sort(key=lambda d: d.onset_s)
        scenario.contractions.sort(key=lambda c: c.peak_s)
        return scenario

    def _acceleration(self, rng: np.random.Generator, locked: bool) -> _Block:
        duration = round(float(rng.uniform(25.0, 60.0)), 1)
        amplitude = round(float(rng.uniform(20.0, 30.0)), 1)
        if not locked:
            return _Block(0.0, duration, lambda t: [AccelerationSpec(t, duration, amplitude)])

        contraction = ContractionSpec(0.0, float(rng.uniform(60.0, 90.0)), float(rng.uniform(40.0, 60.0)))
        reach = max(contraction.width_s / 2.0, contraction.half_span_s)
        middle = duration / 2.0

        def make(t: float) -> list:
            return [
                AccelerationSpec(t, duration, amplitude),
                ContractionSpec(t + middle, contraction.width_s, contraction.amplitude),
            ]

        return _Block(min(0.0, middle - reach), max(duration, middle + reach), make, peak=middle)

    def _decelerations(self, rng: np.random.Generator) -> List[_Block]:
        kind = self._pick(rng, DECEL_WEIGHTS)
        if kind == "none":
            return []
        if kind == "prolonged":
            return [self._prolonged(rng)]
        count = int(rng.integers(1, 3))
        factory = {"variable": self._variable, "early": self._early, "late": self._late}[kind]
        return [factory(rng) for _ in range(count)]

    @staticmethod
    def _deceleration_block(spec: DecelerationSpec) -> _Block:
        """以减速起点为锚点，足迹覆盖肩峰与伴随宫缩"""
        start, end = -SHOULDER_WIDTH_S, spec.duration_s + SHOULDER_WIDTH_S
        peak = None
        companion = spec.companion()
        if companion is not None:
            reach = max(companion.width_s / 2.0, companion.half_span_s)
            peak = companion.peak_s - spec.onset_s
            start, end = min(start, peak - reach), max(end, peak + reach)

        def make(t: float) -> list:
            return [replace(spec, onset_s=t, atypical=list(spec.atypical))]

        return _Block(start, end, make, peak=peak)

    def _variable(self, rng: np.random.Generator) -> _Block:
        otn = round(float(rng.uniform(5.0, 12.0)), 1)
        plateau = round(float(rng.uniform(20.0, 30.0)), 1)
        atypical = ["no_shoulders"] if rng.random() < NO_SHOULDER_PROBABILITY else []
        return self._deceleration_block(DecelerationSpec(
            onset_s=0.0, duration_s=2 * otn + plateau, amplitude_bpm=round(float(rng.uniform(20.0, 30.0)), 1),
            onset_to_nadir_s=otn, shape=TRAPEZOID, atypical=atypical,
        ))

    def _early(self, rng: np.random.Generator) -> _Block:
        otn = round(float(rng.uniform(55.0, 60.0)), 1)
        spec = DecelerationSpec(
            onset_s=0.0, duration_s=2 * otn, amplitude_bpm=round(float(rng.uniform(20.0, 30.0)), 1),
            onset_to_nadir_s=otn, shape=RAISED_COSINE, companion_width_s=120.0,
        )
        probe = ContractionSpec(0.0, spec.companion_width_s, spec.companion_amplitude)
        # 伴随宫缩峰值落在最低点 ±3 秒以内
        spec.lag_to_contraction_s = probe.half_span_s - otn + float(rng.uniform(-3.0, 3.0))
        return self._deceleration_block(spec)

    def _late(self, rng: np.random.Generator) -> _Block:
        otn = round(float(rng.uniform(55.0, 65.0)), 1)
        recovery = round(float(rng.uniform(45.0, 60.0)), 1)
        return self._deceleration_block(DecelerationSpec(
            onset_s=0.0, duration_s=otn + recovery, amplitude_bpm=round(float(rng.uniform(20.0, 30.0)), 1),
            onset_to_nadir_s=otn, shape=RAISED_COSINE,
            lag_to_contraction_s=round(float(rng.uniform(35.0, 45.0)), 1), companion_width_s=80.0,
        ))

    def _prolonged(self, rng: np.random.Generator) -> _Block:
        return self._deceleration_block(DecelerationSpec(
            onset_s=0.0, duration_s=round(float(rng.uniform(200.0, 260.0)), 1),
            amplitude_bpm=round(float(rng.uniform(20.0, 30.0)), 1),
            onset_to_nadir_s=15.0, shape=TRAPEZOID,
        ))

    def _sinusoid(self, rng: np.random.Generator, true: bool) -> _Block:
        if true:
            amplitude, duration, waveform = rng.uniform(6.0, 11.0), rng.uniform(690.0, 840.0), "sine"
        else:
            # 三角波无论多长都是假正弦波型，正弦只能靠时长不足
            waveform = "sine" if rng.random() < 0.5 else "triangle"
            longest = 480.0 if waveform == "sine" else 840.0
            amplitude, duration = rng.uniform(6.0, 11.0), rng.uniform(240.0, longest)
        cpm = round(float(rng.uniform(3.5, 4.5)), 2)
        amplitude, duration = round(float(amplitude), 1), round(float(duration), 1)
        return _Block(0.0, duration, lambda t: [SinusoidSpec(amplitude, cpm, t, duration, waveform)])

    @staticmethod
    def _layout(blocks: List[_Block], windows: List[Tuple[float, float]],
                rng: np.random.Generator) -> Optional[list]:
        """依次把事件块放进可用窗口，放不下时返回 None"""
        placed: list = []
        last_peak = -np.inf
        window_index = 0
        cursor = windows[0][0] - MIN_GAP_S

        for block in blocks:
            while window_index < len(windows):
                window_start, window_end = windows[window_index]
                anchor = max(cursor + MIN_GAP_S + rng.uniform(0.0, GAP_JITTER_S), window_start) - block.start
                if block.peak is not None:
                    anchor = max(anchor, last_peak + MIN_PEAK_SPACING_S - block.peak)
                if anchor + block.end <= window_end:
                    break
                window_index += 1
                if window_index < len(windows):
                    cursor = windows[window_index][0] - MIN_GAP_S
            else:
                return None

            anchor = round(float(anchor), 1)
            placed.extend(block.make(anchor))
            cursor = anchor + block.end
            if block.peak is not None:
                last_peak = anchor + block.peak
        return placed

    # ------------------------------------------------------------------
    # 拒绝条件
    # ------------------------------------------------------------------

    def _well_separated(self, scenario: Scenario) -> bool:
        peaks = [c.peak_s for c in scenario.all_contractions()]
        if any(b - a < MIN_PEAK_SPACING_S for a, b in zip(peaks, peaks[1:])):
            return False

        locked = {round(c.peak_s, 3) for c in scenario.contractions}
        for accel in scenario.accelerations:
            if round(accel.peak_s, 3) in locked:
                continue
            if any(abs(accel.peak_s - p) < UNLOCKED_CLEARANCE_S for p in peaks):
                return False

        truth = derive_ground_truth(scenario, self.config)
        evidence = truth.evidence
        if COVERAGE_REJECT[0] < evidence.baseline.coverage_s < COVERAGE_REJECT[1]:
            return False
        runs = (evidence.variability.low_var_longest_run_s, evidence.variability.high_var_longest_run_s)
        if any(abs(run - threshold) <= RUN_MARGIN_S for run in runs for threshold in RUN_THRESHOLDS_S):
            return False
        low, high = NORMAL_FRACTION_REJECT
        return not (low <= evidence.variability.normal_fraction <= high)


def sample_scenario(seed: int, noise_bpm: float = 0.0, duration_s: float = 1200.0) -> Scenario:
    """按种子抽取一个场景"""
    return ScenarioSampler().sample(seed, noise_bpm, duration_s)


def sample_scenarios(count: int, seed: int = 0, noise_bpm: float = 0.0) -> List[Scenario]:
    """抽取种子 seed 到 seed+count-1 的场景"""
    sampler = ScenarioSampler()
    return [sampler.sample(seed + i, noise_bpm) for i in range(count)]
