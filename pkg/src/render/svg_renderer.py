"""
SVG 走纸图

把场景序列化为 SVG 1.1 文本；相同输入与配置产生逐字节相同的输出
"""

from pathlib import Path
from typing import List, Optional, Union
from xml.sax.saxutils import escape, quoteattr

from src.analysis.pipeline import FeatureEvidence
from src.config.config_parser import RenderConfig
from src.record.ctg_record import CtgRecord
from src.render.scene import MARKER_PX, Panel, Point, TraceScene, band_rect, build_scene

GRID_COLOR = "#f2b8b8"
MINUTE_COLOR = "#e08a8a"
BAND_COLOR = "#eef6ee"
TRACE_COLOR = "#1a1a1a"
MARKER_COLORS = {"acceleration": "#2e7d32", "contraction": "#1565c0"}
DEFAULT_MARKER_COLOR = "#c62828"


def _num(value: float) -> str:
    return f"{value:.2f}"


def _points(line: List[Point]) -> str:
    return " ".join(f"{_num(x)},{_num(y)}" for x, y in line)


class SvgRenderer:
    """SVG 渲染器（无状态，可在线程间共享）"""

    def __init__(self, config: Optional[RenderConfig] = None):
        self.config = config or RenderConfig()

    def render(self, record: CtgRecord, evidence: Optional[FeatureEvidence] = None) -> str:
        """渲染一条记录

        Raises:
            TooShortError: 记录时长不足 600 秒
        """
        return self.render_scene(build_scene(record, self.config, evidence))

    def render_scene(self, scene: TraceScene) -> str:
        w, h = _num(scene.width), _num(scene.height)
        parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
            f'viewBox="0 0 {w} {h}">',
            f"<title>{escape(scene.record_id)}</title>",
            f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>',
        ]

        top, height = band_rect(scene.fhr_panel)
        parts.append(f'<rect class="normal-band" x="0" y="{_num(top)}" width="{w}" '
                     f'height="{_num(height)}" fill="{BAND_COLOR}"/>')

        for panel, grid in ((scene.fhr_panel, scene.fhr_grid), (scene.uc_panel, scene.uc_grid)):
            parts.extend(self._panel(scene, panel, grid))

        for line in scene.fhr_lines:
            parts.append(self._polyline("fhr", line))
        for line in scene.uc_lines:
            parts.append(self._polyline("uc", line))

        for marker in scene.markers:
            panel = scene.fhr_panel if marker.panel == "fhr" else scene.uc_panel
            color = MARKER_COLORS.get(marker.kind, DEFAULT_MARKER_COLOR)
            parts.append(
                f'<line class="marker" data-kind={quoteattr(marker.kind)} x1="{_num(marker.x)}" '
                f'y1="{_num(panel.top)}" x2="{_num(marker.x)}" y2="{_num(panel.top + MARKER_PX)}" '
                f'stroke="{color}" stroke-width="2"/>'
            )

        parts.append("</svg>")
        return "\n".join(parts) + "\n"

    @staticmethod
    def _panel(scene: TraceScene, panel: Panel, grid) -> List[str]:
        parts = [f'<g class="{panel.name}-grid">']
        for value, y in grid:
            parts.append(f'<line x1="0" y1="{_num(y)}" x2="{_num(scene.width)}" y2="{_num(y)}" '
                         f'stroke="{GRID_COLOR}" stroke-width="0.5"/>')
        for x in scene.minute_xs:
            parts.append(f'<line x1="{_num(x)}" y1="{_num(panel.top)}" x2="{_num(x)}" '
                         f'y2="{_num(panel.bottom)}" stroke="{MINUTE_COLOR}" stroke-width="0.5"/>')
        for value, y in grid[::3]:
            parts.append(f'<text x="2" y="{_num(y - 2)}" font-size="9" '
                         f'font-family="sans-serif" fill="#666666">{value:g}</text>')
        parts.append("</g>")
        return parts

    @staticmethod
    def _polyline(name: str, line: List[Point]) -> str:
        return (f'<polyline class="{name}" fill="none" stroke="{TRACE_COLOR}" stroke-width="1" '
                f'points="{_points(line)}"/>')


def render_svg(record: CtgRecord, config: Optional[RenderConfig] = None,
               evidence: Optional[FeatureEvidence] = None) -> str:
    """渲染 SVG 文本的便捷函数"""
    return SvgRenderer(config).render(record, evidence)


def write_svg(record: CtgRecord, path: Union[str, Path], config: Optional[RenderConfig] = None,
              evidence: Optional[FeatureEvidence] = None) -> Path:
    """渲染并写入 SVG 文件，父目录不存在时创建"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_svg(record, config, evidence), encoding="utf-8")
    return path
