"""Minimal SVG bar charts for harmonic spectra.

Rendering is string assembly over ``rect``/``line``/``text`` primitives so
outputs stay deterministic and dependency-free.  Magnitudes are drawn as a
percentage of the fundamental on linear axes.
"""

from __future__ import annotations

import numpy as np

from .analyzer import HarmonicSpectrum

_MARGIN_LEFT = 64.0
_MARGIN_RIGHT = 16.0
_MARGIN_TOP = 40.0
_MARGIN_BOTTOM = 52.0

_BAR_FILL = "#3a6ea5"
_OVERLAY_FILLS = ("#3a6ea5", "#c05b2d")


def _header(width: float, height: float, title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" '
        f'height="{height:g}" viewBox="0 0 {width:g} {height:g}">',
        f'<rect x="0" y="0" width="{width:g}" height="{height:g}" fill="white"/>',
        f'<text x="{width / 2:.2f}" y="22" font-family="sans-serif" font-size="15" '
        f'text-anchor="middle">{title}</text>',
    ]


def _axes(
    width: float, height: float, orders: np.ndarray, y_max: float
) -> tuple[list[str], float, float, float]:
    plot_w = width - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = height - _MARGIN_TOP - _MARGIN_BOTTOM
    x0, y0 = _MARGIN_LEFT, _MARGIN_TOP + plot_h
    parts = []
    for frac in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
        y = y0 - frac * plot_h
        value = frac * y_max
        parts.append(
            f'<line x1="{x0:.2f}" y1="{y:.2f}" x2="{x0 + plot_w:.2f}" y2="{y:.2f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x0 - 8:.2f}" y="{y + 4:.2f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{value:g}%</text>'
        )
    slot = plot_w / len(orders)
    for h in orders:
        if h == 1 or h % 5 == 0:
            x = x0 + (h - orders[0] + 0.5) * slot
            parts.append(
                f'<text x="{x:.2f}" y="{y0 + 16:.2f}" font-family="sans-serif" '
                f'font-size="11" text-anchor="middle">{int(h)}</text>'
            )
    parts.append(
        f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x0 + plot_w:.2f}" y2="{y0:.2f}" '
        f'stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{x0:.2f}" y1="{_MARGIN_TOP:.2f}" x2="{x0:.2f}" y2="{y0:.2f}" '
        f'stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{x0 + plot_w / 2:.2f}" y="{y0 + 36:.2f}" font-family="sans-serif" '
        f'font-size="12" text-anchor="middle">harmonic order</text>'
    )
    parts.append(
        f'<text x="16" y="{_MARGIN_TOP + plot_h / 2:.2f}" font-family="sans-serif" '
        f'font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MARGIN_TOP + plot_h / 2:.2f})">'
        "% of fundamental</text>"
    )
    return parts, x0, y0, slot


def _percentages(spec: HarmonicSpectrum) -> np.ndarray:
    base = spec.magnitudes[0]
    if base <= 0.0:
        return np.zeros_like(np.asarray(spec.magnitudes, dtype=float))
    return 100.0 * np.asarray(spec.magnitudes, dtype=float) / base


def spectrum_bar_svg(
    spec: HarmonicSpectrum,
    title: str = "Harmonic spectrum",
    width: float = 720.0,
    height: float = 420.0,
) -> str:
    """Bar chart of magnitude versus order, fundamental normalized to 100%."""
    pct = _percentages(spec)
    y_max = max(100.0, float(pct.max()) if len(pct) else 100.0)
    parts = _header(width, height, title)
    axis_parts, x0, y0, slot = _axes(width, height, spec.orders, y_max)
    parts += axis_parts
    plot_h = y0 - _MARGIN_TOP
    bar_w = slot * 0.7
    for h, p in zip(spec.orders, pct):
        x = x0 + (h - spec.orders[0]) * slot + (slot - bar_w) / 2.0
        bh = p / y_max * plot_h
        parts.append(
            f'<rect x="{x:.2f}" y="{y0 - bh:.2f}" width="{bar_w:.2f}" '
            f'height="{bh:.2f}" fill="{_BAR_FILL}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def spectrum_overlay_svg(
    spec_a: HarmonicSpectrum,
    spec_b: HarmonicSpectrum,
    label_a: str = "baseline",
    label_b: str = "filtered",
    title: str = "Harmonic spectra",
    width: float = 720.0,
    height: float = 420.0,
) -> str:
    """Side-by-side bars for two spectra on a shared percent axis."""
    orders = spec_a.orders if len(spec_a.orders) >= len(spec_b.orders) else spec_b.orders
    pct_a = _percentages(spec_a)
    pct_b = _percentages(spec_b)
    y_max = max(100.0, float(pct_a.max()), float(pct_b.max()))
    parts = _header(width, height, title)
    axis_parts, x0, y0, slot = _axes(width, height, orders, y_max)
    parts += axis_parts
    plot_h = y0 - _MARGIN_TOP
    bar_w = slot * 0.38
    for pct, fill, shift in ((pct_a, _OVERLAY_FILLS[0], 0.10), (pct_b, _OVERLAY_FILLS[1], 0.52)):
        for h, p in zip(orders[: len(pct)], pct):
            x = x0 + (h - orders[0] + shift) * slot
            bh = p / y_max * plot_h
            parts.append(
                f'<rect x="{x:.2f}" y="{y0 - bh:.2f}" width="{bar_w:.2f}" '
                f'height="{bh:.2f}" fill="{fill}"/>'
            )
    legend_y = _MARGIN_TOP - 10.0
    for label, fill, x in ((label_a, _OVERLAY_FILLS[0], x0), (label_b, _OVERLAY_FILLS[1], x0 + 140.0)):
        parts.append(
            f'<rect x="{x:.2f}" y="{legend_y - 10:.2f}" width="12" height="12" fill="{fill}"/>'
        )
        parts.append(
            f'<text x="{x + 18:.2f}" y="{legend_y:.2f}" font-family="sans-serif" '
            f'font-size="12">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
