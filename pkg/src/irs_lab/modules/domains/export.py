"""Polygon export: SVG drawn with matplotlib, and a structured-text side list."""

import io
import logging
import math
from pathlib import Path
from typing import Optional, Tuple, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from irs_lab.modules.domains.polygon import HyperbolicPolygon, describe_side, polygon_area  # noqa: E402
from irs_lab.modules.hyperbolic.models import klein_to_uhp  # noqa: E402

logger = logging.getLogger(__name__)

_SAMPLES_PER_SIDE = 256
_INSIDE = 1.0 - 1e-9


def side_paths(polygon: HyperbolicPolygon, n: int = _SAMPLES_PER_SIDE):
    """Half-plane polylines of the sides, sampled along their Klein chords.

    Pieces outside the disk (frame edges, free ends) are dropped.
    """
    t = np.linspace(0.0, 1.0, n)[:, None]
    paths = []
    for i, side in enumerate(polygon.sides):
        p, q = polygon.vertices[i], polygon.vertices[(i + 1) % len(polygon)]
        chord = (1.0 - t) * p + t * q
        inside = np.hypot(chord[:, 0], chord[:, 1]) < _INSIDE
        if side is None or not np.any(inside):
            continue
        x, y = klein_to_uhp(chord[inside, 0], chord[inside, 1])
        paths.append((side, np.asarray(x), np.asarray(y)))
    return paths


def default_viewport(polygon: HyperbolicPolygon) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    xs, ys = [], []
    for _, x, y in side_paths(polygon, 64):
        finite = np.isfinite(x) & np.isfinite(y) & (y < 50.0)
        xs.append(x[finite])
        ys.append(y[finite])
    if not xs or not sum(len(x) for x in xs):
        return (-2.0, 2.0), (0.0, 3.0)
    x, y = np.concatenate(xs), np.concatenate(ys)
    pad = 0.1 * max(float(np.ptp(x)), 1e-3)
    return (float(np.min(x)) - pad, float(np.max(x)) + pad), (0.0, float(np.max(y)) + pad)


def render_svg(
    polygon: HyperbolicPolygon,
    x_range: Optional[Tuple[float, float]] = None,
    y_range: Optional[Tuple[float, float]] = None,
    stroke_width: float = 1.0,
    title: Optional[str] = None,
) -> str:
    """The polygon drawn in the upper half-plane as an SVG document."""
    default_x, default_y = default_viewport(polygon)
    x_range = x_range or default_x
    y_range = y_range or default_y

    fig, ax = plt.subplots(figsize=(6, 6 * (y_range[1] - y_range[0]) / max(x_range[1] - x_range[0], 1e-9)))
    try:
        ax.axhline(0.0, color="0.6", linewidth=0.5 * stroke_width)
        for side, x, y in side_paths(polygon):
            colour = "tab:red" if side.kind == "axis" else "tab:blue"
            ax.plot(x, y, color=colour, linewidth=stroke_width)
        ax.plot([polygon.base.x], [polygon.base.y], "k.", markersize=3 * stroke_width)
        ax.set_xlim(*x_range)
        ax.set_ylim(*y_range)
        ax.set_aspect("equal")
        if title:
            ax.set_title(title)
        buffer = io.StringIO()
        with plt.rc_context({"svg.hashsalt": "irs-lab"}):
            fig.savefig(buffer, format="svg", bbox_inches="tight", metadata={"Date": None})
    finally:
        plt.close(fig)
    return buffer.getvalue()


def format_polygon(polygon: HyperbolicPolygon) -> str:
    """One line per side and per vertex, numbers with 18 significant digits."""
    area = polygon_area(polygon)
    lines = [
        f"base: {polygon.base.x:.18g} {polygon.base.y:.18g}",
        f"sides: {len(polygon)}",
        f"area: {area:.18g}" if math.isfinite(area) else "area: inf",
    ]
    certificate = polygon.certificate
    if certificate is not None:
        lines.append(f"stabilized: {certificate.stabilized}")
        lines.append(f"area_ok: {certificate.area_ok}")
    for side in polygon.sides:
        lines.append(f"side {describe_side(side)}")
    for point, ideal in zip(polygon.vertex_points(), polygon.ideal):
        if point is None:
            lines.append("vertex outside")
        elif ideal:
            lines.append("vertex ideal inf" if math.isinf(point) else f"vertex ideal {point:.18g}")
        else:
            lines.append(f"vertex {point.x:.18g} {point.y:.18g}")
    return "\n".join(lines) + "\n"


def write_polygon(
    polygon: HyperbolicPolygon,
    svg_path: Union[str, Path],
    text_path: Union[str, Path],
    **svg_options,
) -> None:
    svg_path, text_path = Path(svg_path), Path(text_path)
    for path in (svg_path, text_path):
        path.parent.mkdir(parents=True, exist_ok=True)
    svg_path.write_text(render_svg(polygon, **svg_options), encoding="utf-8")
    text_path.write_text(format_polygon(polygon), encoding="utf-8")
    logger.info(f"Wrote {svg_path} and {text_path}")
