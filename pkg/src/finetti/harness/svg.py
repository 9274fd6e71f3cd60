"""Minimal static SVG 1.1 log-log chart of abs_err against N.

One ``<polyline>`` per ``(p, alpha, method)`` series.  The ``limit`` method
has no error to plot and is left out.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from typing import Iterable, List, Tuple
from xml.sax.saxutils import escape, quoteattr

from .study import StudyRecord, fmt_float

WIDTH, HEIGHT = 720, 460
LEFT, RIGHT, TOP, BOTTOM = 70, 200, 30, 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def series_of(records: Iterable[StudyRecord]) -> "OrderedDict[Tuple, List[Tuple[int, float]]]":
    out: "OrderedDict[Tuple, List[Tuple[int, float]]]" = OrderedDict()
    for r in sorted(records, key=StudyRecord.sort_key):
        if r.method == "limit" or r.N is None:
            continue
        out.setdefault((r.p, r.alpha, r.method), []).append((r.N, r.abs_err))
    return out


def _decades(lo: float, hi: float) -> Tuple[int, int]:
    a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
    return (a, b) if b > a else (a, a + 1)


def render_svg(records: Iterable[StudyRecord], title: str = "abs_err vs N") -> str:
    series = series_of(records)
    pts = [(n, e) for s in series.values() for n, e in s if n > 0 and e > 0 and math.isfinite(e)]
    if pts:
        xd = _decades(min(n for n, _ in pts), max(n for n, _ in pts))
        yd = _decades(min(e for _, e in pts), max(e for _, e in pts))
    else:
        xd, yd = (0, 1), (-1, 0)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(n: float) -> float:
        return LEFT + (math.log10(n) - xd[0]) / (xd[1] - xd[0]) * pw

    def sy(e: float) -> float:
        return TOP + ph - (math.log10(e) - yd[0]) / (yd[1] - yd[0]) * ph

    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
             f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
             f'<title>{escape(title)}</title>',
             '<rect x="0" y="0" width="100%" height="100%" fill="white"/>',
             f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for d in range(xd[0], xd[1] + 1):
        x = sx(10.0 ** d)
        lines.append(f'<line x1="{x:.2f}" y1="{TOP + ph}" x2="{x:.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        lines.append(f'<text x="{x:.2f}" y="{TOP + ph + 20}" font-size="12" text-anchor="middle">1e{d}</text>')
    for d in range(yd[0], yd[1] + 1):
        y = sy(10.0 ** d)
        lines.append(f'<line x1="{LEFT - 5}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" stroke="black"/>')
        lines.append(f'<text x="{LEFT - 8}" y="{y + 4:.2f}" font-size="12" text-anchor="end">1e{d}</text>')
    lines.append(f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 10}" font-size="13" text-anchor="middle">N</text>')
    lines.append(f'<text x="16" y="{TOP + ph / 2:.1f}" font-size="13" text-anchor="middle" '
                 f'transform="rotate(-90 16 {TOP + ph / 2:.1f})">|m_N - mu|</text>')
    for i, ((p, alpha, method), data) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        coords = " ".join(f"{sx(n):.2f},{sy(e):.2f}" for n, e in data
                          if n > 0 and e > 0 and math.isfinite(e))
        label = f"p={fmt_float(p)} alpha={fmt_float(alpha)} {method}"
        lines.append(f'<polyline points={quoteattr(coords)} fill="none" stroke="{color}" '
                     f'stroke-width="1.5"><title>{escape(label)}</title></polyline>')
        ly = TOP + 14 + 18 * i
        lines.append(f'<line x1="{WIDTH - RIGHT + 12}" y1="{ly - 4}" x2="{WIDTH - RIGHT + 32}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="1.5"/>')
        lines.append(f'<text x="{WIDTH - RIGHT + 36}" y="{ly}" font-size="11">{escape(label)}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def series_count(records: Iterable[StudyRecord]) -> int:
    return len(series_of(records))
