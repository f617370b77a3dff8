"""
绘制模块 (render)

按 1 cm/min 走纸速度绘制 FHR/UC 走纸图，输出 SVG 与 PNG
"""

from src.render.raster import paint_scene, png_data_url, render_png, write_png
from src.render.scene import Panel, TraceScene, build_scene
from src.render.svg_renderer import SvgRenderer, render_svg, write_svg

__all__ = [
    "Panel",
    "SvgRenderer",
    "TraceScene",
    "build_scene",
    "paint_scene",
    "png_data_url",
    "render_png",
    "render_svg",
    "write_png",
    "write_svg",
]
