"""Deterministic standalone SVG line plots."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from math import floor, log10
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np
from numpy.typing import ArrayLike

from .exceptions import PlotError
from .grid import FloatArray

_LOGGER = logging.getLogger(__name__)

WIDTH = 640
HEIGHT = 400
MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 30
MARGIN_BOTTOM = 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")
SHADE = "#bbbbbb"

type Series = tuple[ArrayLike, ArrayLike]


def _nice_ticks(lo: float, hi: float, target: int = 5) -> FloatArray:
    raw = (hi - lo) / target
    magnitude = 10.0 ** floor(log10(raw))
    step = next(
        factor * magnitude for factor in (1, 2, 5, 10) if factor * magnitude >= raw
    )
    first = np.ceil(lo / step - 1e-9) * step
    ticks = np.arange(first, hi + 1e-9 * step, step)
    # avoid "-0"
    return np.where(np.abs(ticks) < 1e-12 * step, 0.0, ticks)


def _limits(values: FloatArray, pad: float) -> tuple[float, float]:
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        return lo - 0.5, hi + 0.5
    margin = pad * (hi - lo)
    return lo - margin, hi + margin


def flag_spans(x: ArrayLike, flags: Sequence[bool]) -> list[tuple[float, float]]:
    """Contiguous x intervals where `flags` hold, widened by half a sample step."""
    xs = np.asarray(x, dtype=float)
    if xs.size != len(flags):
        raise PlotError("x and flags differ in length")
    spans: list[tuple[float, float]] = []
    half = 0.5 * float(np.min(np.diff(xs))) if xs.size > 1 else 0.5
    start: float | None = None
    for index, flagged in enumerate(flags):
        if flagged and start is None:
            start = float(xs[index]) - half
        if not flagged and start is not None:
            spans.append((start, float(xs[index - 1]) + half))
            start = None
    if start is not None:
        spans.append((start, float(xs[-1]) + half))
    return spans


def emit_svg(
    series: Sequence[Series],
    labels: Sequence[str],
    path: Path,
    *,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    shaded: Sequence[tuple[float, float]] = (),
) -> None:
    """Write one polyline per (x, y) series with axes, ticks and a legend.

    `shaded` x intervals are drawn as grey bands behind the curves.
    """
    if not series:
        raise PlotError("Nothing to plot")
    if len(series) != len(labels):
        raise PlotError(f"{len(series)} series but {len(labels)} labels")
    arrays: list[tuple[FloatArray, FloatArray]] = []
    for label, (x, y) in zip(labels, series, strict=True):
        xs, ys = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        if xs.shape != ys.shape or xs.ndim != 1 or xs.size == 0:
            raise PlotError(f"Series '{label}' needs equal-length non-empty 1-d arrays")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise PlotError(f"Series '{label}' contains NaN or Inf")
        arrays.append((xs, ys))

    x_lo, x_hi = _limits(np.concatenate([xs for xs, _ in arrays]), 0.0)
    y_lo, y_hi = _limits(np.concatenate([ys for _, ys in arrays]), 0.05)
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(value: float) -> float:
        return MARGIN_LEFT + (value - x_lo) / (x_hi - x_lo) * plot_w

    def py(value: float) -> float:
        return MARGIN_TOP + (y_hi - value) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    for lo, hi in shaded:
        left, right = px(max(lo, x_lo)), px(min(hi, x_hi))
        if right > left:
            parts.append(
                f'<rect x="{left:.2f}" y="{MARGIN_TOP}" width="{right - left:.2f}" '
                f'height="{plot_h}" fill="{SHADE}" fill-opacity="0.5"/>'
            )

    bottom, right_edge = MARGIN_TOP + plot_h, MARGIN_LEFT + plot_w
    parts.append(
        f'<path d="M{MARGIN_LEFT},{MARGIN_TOP} V{bottom} H{right_edge}" '
        'fill="none" stroke="black"/>'
    )
    for tick in _nice_ticks(x_lo, x_hi):
        x = px(float(tick))
        parts.append(f'<line x1="{x:.2f}" y1="{bottom}" x2="{x:.2f}" y2="{bottom + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{x:.2f}" y="{bottom + 18}" font-size="11" '
            f'text-anchor="middle">{tick:.4g}</text>'
        )
    for tick in _nice_ticks(y_lo, y_hi):
        y = py(float(tick))
        parts.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{y:.2f}" x2="{MARGIN_LEFT}" y2="{y:.2f}" stroke="black"/>')
        parts.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{y + 4:.2f}" font-size="11" '
            f'text-anchor="end">{tick:.4g}</text>'
        )

    for index, (xs, ys) in enumerate(arrays):
        points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys, strict=True))
        color = COLORS[index % len(COLORS)]
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{right_edge - 5}" y="{MARGIN_TOP + 14 * (index + 1)}" font-size="11" '
            f'text-anchor="end" fill="{color}">{escape(labels[index])}</text>'
        )

    if title:
        parts.append(
            f'<text x="{WIDTH / 2:.1f}" y="18" font-size="13" '
            f'text-anchor="middle">{escape(title)}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="{HEIGHT - 10}" font-size="12" '
            f'text-anchor="middle">{escape(x_label)}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="16" y="{MARGIN_TOP + plot_h / 2:.1f}" font-size="12" '
            f'text-anchor="middle" transform="rotate(-90 16 {MARGIN_TOP + plot_h / 2:.1f})">'
            f"{escape(y_label)}</text>"
        )
    parts.append("</svg>")

    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    _LOGGER.info("Wrote plot %s with %d series", path, len(arrays))
