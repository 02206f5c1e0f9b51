"""CSV and minimal SVG line-plot emission."""

from __future__ import annotations

import math
import os
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.16e}"


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    return [start + k * step for k in range(int((hi - start) / step + 1e-9) + 1)]


def svg_lineplot(series, title="", xlabel="", ylabel="", width=640, height=400) -> str:
    """``series`` is a list of ``(x, y, label)``; non-finite points break the line."""
    left, right, top, bottom = 70, 20, 30, 50
    xs = np.concatenate([np.asarray(s[0], float) for s in series]) if series else np.zeros(1)
    ys = np.concatenate([np.asarray(s[1], float) for s in series]) if series else np.zeros(1)
    ok = np.isfinite(xs) & np.isfinite(ys)
    xs, ys = (xs[ok], ys[ok]) if ok.any() else (np.zeros(1), np.zeros(1))
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    pw, ph = width - left - right, height - top - bottom

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
           f'width="{width}" height="{height}" font-family="sans-serif" font-size="11">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{px(t):.2f}" y1="{top + ph}" x2="{px(t):.2f}" y2="{top + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{px(t):.2f}" y="{top + ph + 16}" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{left - 4}" y1="{py(t):.2f}" x2="{left}" y2="{py(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{py(t) + 4:.2f}" text-anchor="end">{t:.4g}</text>')
    if y0 < 0 < y1:
        out.append(f'<line x1="{left}" y1="{py(0):.2f}" x2="{left + pw}" y2="{py(0):.2f}" '
                   'stroke="#bbbbbb" stroke-dasharray="3,3"/>')
    for k, (sx, sy, label) in enumerate(series):
        color = COLORS[k % len(COLORS)]
        sx, sy = np.asarray(sx, float), np.asarray(sy, float)
        good = np.isfinite(sx) & np.isfinite(sy)
        runs, cur = [], []
        for g, a, b in zip(good, sx, sy):
            if g:
                cur.append(f"{px(a):.2f},{py(b):.2f}")
            elif cur:
                runs.append(cur)
                cur = []
        if cur:
            runs.append(cur)
        for pts in runs:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(pts)}"/>')
        if label:
            out.append(f'<text x="{left + pw - 8}" y="{top + 16 + 14 * k}" text-anchor="end" '
                       f'fill="{color}">{escape(label)}</text>')
    out.append(f'<text x="{width / 2}" y="{top - 10}" text-anchor="middle" font-size="13">{escape(title)}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{top + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {top + ph / 2})">{escape(ylabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_all(outdir: str | Path, files: dict) -> list:
    """Write ``{name: text}`` under ``outdir``; on any failure remove what was written."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if not os.access(outdir, os.W_OK):
        raise PermissionError(f"{outdir} is not writable")
    written = []
    try:
        for name, text in files.items():
            path = outdir / name
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
            written.append(path)
    except OSError:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return written
