"""Minimal static SVG charts: scatter + polyline on linear or log axes, and bars.

Output is deterministic text (fixed float formatting, stable element order).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 40, 55
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass
class Series:
    label: str
    points: Sequence[tuple]
    kind: str = "scatter"  # or "line"
    color: str = ""


@dataclass
class Axis:
    lo: float
    hi: float
    log: bool = False
    label: str = ""
    ticks: list = field(default_factory=list)

    def __post_init__(self):
        if self.log:
            self.lo, self.hi = math.log10(self.lo), math.log10(self.hi)
        if self.hi <= self.lo:
            self.lo, self.hi = self.lo - 0.5, self.hi + 0.5
        self.ticks = self._ticks()

    def frac(self, v: float) -> float:
        v = math.log10(v) if self.log else v
        return (v - self.lo) / (self.hi - self.lo)

    def _ticks(self):
        if self.log:
            # 1-2-5 ticks when the range spans less than two decades
            mults = (1, 2, 5) if self.hi - self.lo < 2 else (1,)
            out = []
            for k in range(math.floor(self.lo), math.ceil(self.hi) + 1):
                for mlt in mults:
                    v = mlt * 10.0 ** k
                    if self.lo - 1e-9 <= math.log10(v) <= self.hi + 1e-9:
                        out.append((v, _fmt_tick(v)))
            return out
        span = self.hi - self.lo
        step = 10 ** math.floor(math.log10(span / 5))
        for mult in (1, 2, 5, 10):
            if span / (step * mult) <= 6:
                step *= mult
                break
        first = math.ceil(self.lo / step) * step
        out, v = [], first
        while v <= self.hi + 1e-9 * span:
            out.append((v, _fmt_tick(v)))
            v += step
        return out


def _fmt_tick(v: float) -> str:
    return "%g" % v


def _f(v: float) -> str:
    return "%.2f" % v


def _frame(title: str, x: Axis, y: Axis) -> list[str]:
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d" font-family="sans-serif" font-size="12">' % (WIDTH, HEIGHT, WIDTH, HEIGHT),
        '<rect width="100%" height="100%" fill="white"/>',
        '<text x="%s" y="22" text-anchor="middle" font-size="14">%s</text>'
        % (_f(LEFT + pw / 2), escape(title)),
        '<rect x="%d" y="%d" width="%d" height="%d" fill="none" stroke="black"/>' % (LEFT, TOP, pw, ph),
    ]
    for v, text in x.ticks:
        px = LEFT + x.frac(v) * pw
        out.append('<line x1="%s" y1="%d" x2="%s" y2="%d" stroke="black"/>'
                   % (_f(px), TOP + ph, _f(px), TOP + ph + 5))
        out.append('<text x="%s" y="%d" text-anchor="middle">%s</text>' % (_f(px), TOP + ph + 18, text))
    for v, text in y.ticks:
        py = TOP + (1 - y.frac(v)) * ph
        out.append('<line x1="%d" y1="%s" x2="%d" y2="%s" stroke="black"/>'
                   % (LEFT - 5, _f(py), LEFT, _f(py)))
        out.append('<text x="%d" y="%s" text-anchor="end">%s</text>' % (LEFT - 8, _f(py + 4), text))
    out.append('<text x="%s" y="%d" text-anchor="middle">%s</text>'
               % (_f(LEFT + pw / 2), HEIGHT - 12, escape(x.label)))
    out.append('<text x="18" y="%s" text-anchor="middle" transform="rotate(-90 18 %s)">%s</text>'
               % (_f(TOP + ph / 2), _f(TOP + ph / 2), escape(y.label)))
    return out


def _legend(labels: list[tuple[str, str]]) -> list[str]:
    out = []
    for i, (label, color) in enumerate(labels):
        y = TOP + 10 + 18 * i
        out.append('<rect x="%d" y="%d" width="10" height="10" fill="%s"/>' % (WIDTH - RIGHT + 12, y, color))
        out.append('<text x="%d" y="%d">%s</text>' % (WIDTH - RIGHT + 28, y + 9, escape(label)))
    return out


def _extent(values, log):
    vals = [v for v in values if not log or v > 0]
    if not vals:
        return (1.0, 10.0) if log else (0.0, 1.0)
    return min(vals), max(vals)


def xy_chart(series: Sequence[Series], title: str = "", xlabel: str = "", ylabel: str = "",
             xlog: bool = False, ylog: bool = False, ylim: Optional[tuple] = None) -> str:
    """Scatter/line chart; points outside `ylim` are clipped to the frame."""
    xs = [p[0] for s in series for p in s.points]
    ys = [p[1] for s in series for p in s.points]
    x = Axis(*_extent(xs, xlog), log=xlog, label=xlabel)
    y = Axis(*(ylim or _extent(ys, ylog)), log=ylog, label=ylabel)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(p):
        return LEFT + x.frac(p[0]) * pw, TOP + (1 - y.frac(p[1])) * ph

    body = _frame(title, x, y)
    body.append('<clipPath id="plot"><rect x="%d" y="%d" width="%d" height="%d"/></clipPath>'
                % (LEFT, TOP, pw, ph))
    body.append('<g clip-path="url(#plot)">')
    legend = []
    for i, s in enumerate(series):
        color = s.color or PALETTE[i % len(PALETTE)]
        pts = [p for p in s.points if (not xlog or p[0] > 0) and (not ylog or p[1] > 0)]
        if not pts:
            continue
        legend.append((s.label, color))
        if s.kind == "line":
            coords = " ".join("%s,%s" % (_f(a), _f(b)) for a, b in map(px, pts))
            body.append('<polyline fill="none" stroke="%s" stroke-width="2" points="%s"/>' % (color, coords))
        else:
            body.extend('<circle cx="%s" cy="%s" r="2.2" fill="%s" fill-opacity="0.6"/>'
                        % (_f(a), _f(b), color) for a, b in map(px, pts))
    body.append("</g>")
    body.extend(_legend(legend))
    body.append("</svg>")
    return "\n".join(body) + "\n"


def bar_chart(groups: Sequence[str], series: Sequence[Series], title: str = "",
              xlabel: str = "", ylabel: str = "") -> str:
    """Grouped bars. Each series' points are (group_label, value)."""
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    top = max([p[1] for s in series for p in s.points] + [1.0])
    y = Axis(0.0, top * 1.05, label=ylabel)
    x = Axis(0.0, 1.0, label=xlabel)
    x.ticks = []
    body = _frame(title, x, y)
    slot = pw / max(len(groups), 1)
    bar = slot * 0.8 / max(len(series), 1)
    legend = []
    for gi, g in enumerate(groups):
        gx = LEFT + gi * slot + slot * 0.1
        body.append('<text x="%s" y="%d" text-anchor="middle">%s</text>'
                    % (_f(LEFT + (gi + 0.5) * slot), TOP + ph + 18, escape(str(g))))
        for si, s in enumerate(series):
            val = dict(s.points).get(g, 0.0)
            h = y.frac(val) * ph
            body.append('<rect x="%s" y="%s" width="%s" height="%s" fill="%s"/>'
                        % (_f(gx + si * bar), _f(TOP + ph - h), _f(bar), _f(h),
                           s.color or PALETTE[si % len(PALETTE)]))
    for si, s in enumerate(series):
        legend.append((s.label, s.color or PALETTE[si % len(PALETTE)]))
    body.extend(_legend(legend))
    body.append("</svg>")
    return "\n".join(body) + "\n"
