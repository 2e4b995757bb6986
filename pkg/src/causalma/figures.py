"""Static SVG figures emitted directly as XML elements (no plotting backend).

Each builder returns a complete standalone SVG document string. Layout is
fixed-size (720x480) with a simple linear axis mapper; callers only supply
data. Output is deterministic for identical inputs.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

_WIDTH, _HEIGHT = 720.0, 480.0
_MARGIN = {"left": 70.0, "right": 25.0, "top": 40.0, "bottom": 55.0}
_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


class _Canvas:
    def __init__(self, title: str, xlabel: str, ylabel: str):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH:g}" '
            f'height="{_HEIGHT:g}" viewBox="0 0 {_WIDTH:g} {_HEIGHT:g}">',
            f'<rect x="0" y="0" width="{_WIDTH:g}" height="{_HEIGHT:g}" fill="white"/>',
            f'<text x="{_WIDTH / 2:g}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{escape(title)}</text>',
            f'<text x="{_WIDTH / 2:g}" y="{_HEIGHT - 12:g}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{escape(xlabel)}</text>',
            f'<text x="18" y="{_HEIGHT / 2:g}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13" '
            f'transform="rotate(-90 18 {_HEIGHT / 2:g})">{escape(ylabel)}</text>',
        ]

    @property
    def plot_box(self):
        x0 = _MARGIN["left"]
        y0 = _MARGIN["top"]
        return x0, y0, _WIDTH - _MARGIN["right"] - x0, _HEIGHT - _MARGIN["bottom"] - y0

    def add(self, element: str) -> None:
        self.parts.append(element)

    def finish(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _scale(lo: float, hi: float):
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    return lo - 0.05 * span, hi + 0.05 * span


def _axes(canvas: _Canvas, xlim, ylim):
    x0, y0, w, h = canvas.plot_box
    canvas.add(f'<rect x="{x0:g}" y="{y0:g}" width="{w:g}" height="{h:g}" '
               'fill="none" stroke="#333" stroke-width="1"/>')

    def to_px(x, y):
        px = x0 + (x - xlim[0]) / (xlim[1] - xlim[0]) * w
        py = y0 + h - (y - ylim[0]) / (ylim[1] - ylim[0]) * h
        return px, py

    for xt in np.linspace(xlim[0], xlim[1], 5):
        px, _ = to_px(xt, ylim[0])
        canvas.add(f'<line x1="{px:g}" y1="{y0 + h:g}" x2="{px:g}" y2="{y0 + h + 5:g}" '
                   'stroke="#333" stroke-width="1"/>')
        canvas.add(f'<text x="{px:g}" y="{y0 + h + 20:g}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{xt:.3g}</text>')
    for yt in np.linspace(ylim[0], ylim[1], 5):
        _, py = to_px(xlim[0], yt)
        canvas.add(f'<line x1="{x0 - 5:g}" y1="{py:g}" x2="{x0:g}" y2="{py:g}" '
                   'stroke="#333" stroke-width="1"/>')
        canvas.add(f'<text x="{x0 - 8:g}" y="{py + 4:g}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{yt:.3g}</text>')
    return to_px


def _legend(canvas: _Canvas, labels: list[str]) -> None:
    x0, y0, w, _ = canvas.plot_box
    for i, label in enumerate(labels):
        lx = x0 + w - 150.0
        ly = y0 + 14.0 + 18.0 * i
        color = _COLORS[i % len(_COLORS)]
        canvas.add(f'<rect x="{lx:g}" y="{ly - 9:g}" width="12" height="12" '
                   f'fill="{color}" fill-opacity="0.6"/>')
        canvas.add(f'<text x="{lx + 18:g}" y="{ly + 1:g}" font-family="sans-serif" '
                   f'font-size="12">{escape(label)}</text>')


def histogram_by_group(values_by_label: dict[str, np.ndarray], title: str,
                       xlabel: str, bins: int = 40) -> str:
    """Overlaid translucent histograms, one per label."""
    canvas = _Canvas(title, xlabel, "count")
    all_values = np.concatenate([np.asarray(v, float) for v in values_by_label.values()])
    lo, hi = _scale(float(all_values.min()), float(all_values.max()))
    edges = np.linspace(lo, hi, bins + 1)
    counts = {label: np.histogram(np.asarray(v, float), bins=edges)[0]
              for label, v in values_by_label.items()}
    ymax = max(int(c.max()) for c in counts.values())
    to_px = _axes(canvas, (lo, hi), (0.0, max(ymax, 1) * 1.05))
    for i, (label, c) in enumerate(counts.items()):
        color = _COLORS[i % len(_COLORS)]
        for j, count in enumerate(c):
            if count == 0:
                continue
            px0, py1 = to_px(edges[j], float(count))
            px1, py0 = to_px(edges[j + 1], 0.0)
            canvas.add(f'<rect x="{px0:g}" y="{py1:g}" width="{px1 - px0:g}" '
                       f'height="{py0 - py1:g}" fill="{color}" fill-opacity="0.45"/>')
    _legend(canvas, list(counts))
    return canvas.finish()


def scatter_with_line(x: np.ndarray, y: np.ndarray, slope: float, intercept: float,
                      title: str, xlabel: str, ylabel: str) -> str:
    """Scatter plot with a superimposed fitted line."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    canvas = _Canvas(title, xlabel, ylabel)
    xlim = _scale(float(x.min()), float(x.max()))
    ylim = _scale(float(y.min()), float(y.max()))
    to_px = _axes(canvas, xlim, ylim)
    for xi, yi in zip(x, y):
        px, py = to_px(float(xi), float(yi))
        canvas.add(f'<circle cx="{px:g}" cy="{py:g}" r="2.2" fill="#1f77b4" '
                   'fill-opacity="0.35"/>')
    y_left = intercept + slope * xlim[0]
    y_right = intercept + slope * xlim[1]
    y_left = min(max(y_left, ylim[0]), ylim[1])
    y_right = min(max(y_right, ylim[0]), ylim[1])
    p0 = to_px(xlim[0], y_left)
    p1 = to_px(xlim[1], y_right)
    canvas.add(f'<line x1="{p0[0]:g}" y1="{p0[1]:g}" x2="{p1[0]:g}" y2="{p1[1]:g}" '
               'stroke="#d62728" stroke-width="2"/>')
    return canvas.finish()


def grouped_bar(groups: list[str], series: dict[str, list[float]], title: str,
                xlabel: str, ylabel: str) -> str:
    """Clustered bar chart: one cluster per group, one bar per series label."""
    canvas = _Canvas(title, xlabel, ylabel)
    flat = [v for vals in series.values() for v in vals]
    lo = min(0.0, min(flat))
    hi = max(0.0, max(flat))
    ylim = _scale(lo, hi)
    x0, y0, w, h = canvas.plot_box
    to_px = _axes(canvas, (0.0, float(len(groups))), ylim)
    n_series = len(series)
    cluster_w = w / len(groups)
    bar_w = 0.7 * cluster_w / n_series
    for gi, group in enumerate(groups):
        for si, (label, vals) in enumerate(series.items()):
            val = vals[gi]
            color = _COLORS[si % len(_COLORS)]
            cx = x0 + gi * cluster_w + 0.15 * cluster_w + si * bar_w
            _, py_val = to_px(0.0, float(val))
            _, py_zero = to_px(0.0, 0.0)
            top = min(py_val, py_zero)
            height = abs(py_zero - py_val)
            canvas.add(f'<rect x="{cx:g}" y="{top:g}" width="{bar_w:g}" '
                       f'height="{height:g}" fill="{color}" fill-opacity="0.8"/>')
        label_x = x0 + (gi + 0.5) * cluster_w
        canvas.add(f'<text x="{label_x:g}" y="{y0 + h + 34:g}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12">{escape(group)}</text>')
    _legend(canvas, list(series))
    return canvas.finish()
