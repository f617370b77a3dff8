"""
走纸图场景

把记录换算为像素坐标：上方 FHR 面板、下方 UC 面板，
SVG 与 PNG 两种输出共用同一个场景
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.analysis.pipeline import FeatureEvidence
from src.config.config_parser import RenderConfig
from src.exceptions import TooShortError
from src.record.ctg_record import MIN_ANALYSIS_S, CtgRecord
from src.utils.signal_helper import true_runs

PANEL_GAP_PX = 20
FHR_GRID_BPM = 10.0
UC_GRID = 20.0
NORMAL_BAND_BPM = (110.0, 160.0)
MARKER_PX = 8.0

Point = Tuple[float, float]


@dataclass(frozen=True)
class Panel:
    """一个信号面板：纵轴 [low, high] 映射到 [top, top + height]"""
    name: str
    top: float
    height: float
    low: float
    high: float

    @property
    def bottom(self) -> float:
        return self.top + self.height

    def y(self, value: float) -> float:
        """数值到纵坐标（超出坐标轴范围的值截断到边界）"""
        clipped = min(max(value, self.low), self.high)
        return self.top + (self.high - clipped) / (self.high - self.low) * self.height

    def ys(self, values: np.ndarray) -> np.ndarray:
        clipped = np.clip(values, self.low, self.high)
        return self.top + (self.high - clipped) / (self.high - self.low) * self.height


@dataclass(frozen=True)
class Marker:
    """事件标记：在 panel 顶部画一条短竖线"""
    panel: str
    x: float
    kind: str


@dataclass
class TraceScene:
    """一条记录的完整绘制几何"""
    record_id: str
    width: float
    height: float
    fhr_panel: Panel
    uc_panel: Panel
    fhr_lines: List[List[Point]] = field(default_factory=list)
    uc_lines: List[List[Point]] = field(default_factory=list)
    minute_xs: List[float] = field(default_factory=list)
    fhr_grid: List[Tuple[float, float]] = field(default_factory=list)
    uc_grid: List[Tuple[float, float]] = field(default_factory=list)
    markers: List[Marker] = field(default_factory=list)


def _round(values: np.ndarray) -> np.ndarray:
    return np.round(values, 2)


def _polylines(xs: np.ndarray, ys: np.ndarray, valid: np.ndarray) -> List[List[Point]]:
    """按有效区段切分折线，缺失处断开而不是连线"""
    lines = []
    for start, end in true_runs(valid):
        lines.append([(float(x), float(y)) for x, y in zip(xs[start:end], ys[start:end])])
    return lines


def _grid(panel: Panel, step: float) -> List[Tuple[float, float]]:
    """(数值, 纵坐标) 网格线列表"""
    first = np.ceil(panel.low / step) * step
    values = np.arange(first, panel.high + step / 2, step)
    return [(float(v), float(round(panel.y(v), 2))) for v in values]


def build_scene(record: CtgRecord, config: Optional[RenderConfig] = None,
                evidence: Optional[FeatureEvidence] = None) -> TraceScene:
    """计算走纸图场景

    Args:
        record: CTG 记录
        config: 绘制配置
        evidence: 特征证据（开启 episode_markers 时用于画事件标记）

    Returns:
        TraceScene: 场景几何

    Raises:
        TooShortError: 记录时长不足 600 秒
    """
    cfg = config or RenderConfig()
    if record.duration_s < MIN_ANALYSIS_S:
        raise TooShortError(record.duration_s, MIN_ANALYSIS_S)

    px_per_s = cfg.paper_speed_cm_per_min * cfg.px_per_cm / 60.0
    width = round(record.duration_s * px_per_s, 2)
    fhr_panel = Panel("fhr", 0.0, float(cfg.fhr_panel_px), *cfg.fhr_axis)
    uc_top = float(cfg.fhr_panel_px + PANEL_GAP_PX)
    uc_panel = Panel("uc", uc_top, float(cfg.uc_panel_px), *cfg.uc_axis)

    xs = _round(record.times() * px_per_s)
    fhr_valid = ~record.gap_mask & np.isfinite(record.fhr)
    uc_valid = np.isfinite(record.uc)
    fhr_ys = _round(fhr_panel.ys(np.nan_to_num(record.fhr, nan=fhr_panel.low)))
    uc_ys = _round(uc_panel.ys(np.nan_to_num(record.uc, nan=uc_panel.low)))

    minutes = int(np.floor(record.duration_s / 60.0))
    scene = TraceScene(
        record_id=record.record_id,
        width=width,
        height=uc_panel.bottom,
        fhr_panel=fhr_panel,
        uc_panel=uc_panel,
        fhr_lines=_polylines(xs, fhr_ys, fhr_valid),
        uc_lines=_polylines(xs, uc_ys, uc_valid),
        minute_xs=[round(m * 60.0 * px_per_s, 2) for m in range(minutes + 1)],
        fhr_grid=_grid(fhr_panel, FHR_GRID_BPM),
        uc_grid=_grid(uc_panel, UC_GRID),
    )
    if cfg.episode_markers and evidence is not None:
        scene.markers = _markers(evidence, px_per_s)
    return scene


def _markers(evidence: FeatureEvidence, px_per_s: float) -> List[Marker]:
    markers: List[Marker] = []
    for accel in evidence.accelerations:
        markers.append(Marker("fhr", round(accel.extremum_s * px_per_s, 2), "acceleration"))
    for decel in evidence.decelerations:
        markers.append(Marker("fhr", round(decel.episode.extremum_s * px_per_s, 2), decel.decel_type.value))
    for contraction in evidence.contractions:
        markers.append(Marker("uc", round(contraction.extremum_s * px_per_s, 2), "contraction"))
    return sorted(markers, key=lambda m: (m.x, m.panel))


def band_rect(panel: Panel, band: Sequence[float] = NORMAL_BAND_BPM) -> Tuple[float, float]:
    """阴影带的 (top, height)"""
    top = round(panel.y(band[1]), 2)
    bottom = round(panel.y(band[0]), 2)
    return top, round(bottom - top, 2)
