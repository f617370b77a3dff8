"""
PNG 走纸图

用 Pillow 按同一场景绘制位图，供远程后端作为图片附件发送
"""

import base64
import io
import math
from pathlib import Path
from typing import Optional, Union

from PIL import Image, ImageDraw

from src.analysis.pipeline import FeatureEvidence
from src.config.config_parser import RenderConfig
from src.record.ctg_record import CtgRecord
from src.render.scene import MARKER_PX, TraceScene, band_rect, build_scene

BACKGROUND = (255, 255, 255)
BAND = (238, 246, 238)
GRID = (242, 184, 184)
MINUTE = (224, 138, 138)
TRACE = (26, 26, 26)
MARKER = (198, 40, 40)


def paint_scene(scene: TraceScene) -> Image.Image:
    """把场景画到 RGB 图片上，尺寸与 SVG 相同（向上取整到整像素）"""
    size = (math.ceil(scene.width), math.ceil(scene.height))
    image = Image.new("RGB", size, color=BACKGROUND)
    draw = ImageDraw.Draw(image)

    top, height = band_rect(scene.fhr_panel)
    draw.rectangle([(0, top), (scene.width, top + height)], fill=BAND)

    for panel, grid in ((scene.fhr_panel, scene.fhr_grid), (scene.uc_panel, scene.uc_grid)):
        for _, y in grid:
            draw.line([(0, y), (scene.width, y)], fill=GRID, width=1)
        for x in scene.minute_xs:
            draw.line([(x, panel.top), (x, panel.bottom)], fill=MINUTE, width=1)
        for value, y in grid[::3]:
            draw.text((2, y - 11), f"{value:g}", fill=(102, 102, 102))

    for line in scene.fhr_lines + scene.uc_lines:
        if len(line) == 1:
            draw.point(line, fill=TRACE)
        else:
            draw.line(line, fill=TRACE, width=1)

    for marker in scene.markers:
        panel = scene.fhr_panel if marker.panel == "fhr" else scene.uc_panel
        draw.line([(marker.x, panel.top), (marker.x, panel.top + MARKER_PX)], fill=MARKER, width=2)

    return image


def render_png(record: CtgRecord, config: Optional[RenderConfig] = None,
               evidence: Optional[FeatureEvidence] = None) -> bytes:
    """渲染 PNG 字节串

    Raises:
        TooShortError: 记录时长不足 600 秒
    """
    image = paint_scene(build_scene(record, config, evidence))
    buffer = io.BytesIO()
    image.save(buffer, format="PNG")
    return buffer.getvalue()


def png_data_url(png: bytes) -> str:
    """PNG 字节串转为 data URL"""
    return "data:image/png;base64," + base64.b64encode(png).decode("ascii")


def write_png(record: CtgRecord, path: Union[str, Path], config: Optional[RenderConfig] = None,
              evidence: Optional[FeatureEvidence] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(render_png(record, config, evidence))
    return path
