"""Small hand-rolled SVG scatter and error-bar plots.

Plots are pure views: they are regenerated from result tables alone and the
output bytes are deterministic. Only the handful of layouts the command-line
front end needs are implemented.
"""

from __future__ import annotations

import math

_COLORS = {
    "mp-t": "#1f77b4",
    "mp-s": "#2ca02c",
    "sp-t": "#d62728",
    "sp-s": "#9467bd",
}
_FALLBACK = ("#8c564b", "#e377c2", "#7f7f7f", "#bcbd22")

WIDTH, HEIGHT = 640, 460
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 36, 52


def _color(name: str, i: int) -> str:
    return _COLORS.get(name, _FALLBACK[i % len(_FALLBACK)])


def _log_ticks(lo: float, hi: float) -> list[float]:
    ticks = []
    d = math.floor(math.log10(lo))
    while 10.0 ** d <= hi * 1.0001:
        t = 10.0 ** d
        if t >= lo * 0.9999:
            ticks.append(t)
        d += 1
    return ticks or [lo, hi]


def _lin_ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min(s * mag for s in (1, 2, 5, 10) if s * mag >= raw)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi * 1.0001:
        ticks.append(round(t, 12))
        t += step
    return ticks


class _Canvas:
    def __init__(self, x_lo, x_hi, y_lo, y_hi, log_x=False, log_y=False):
        self.x_lo, self.x_hi = x_lo, x_hi
        self.y_lo, self.y_hi = y_lo, y_hi
        self.log_x, self.log_y = log_x, log_y
        self.parts: list[str] = []

    def x(self, v: float) -> float:
        lo, hi = self.x_lo, self.x_hi
        if self.log_x:
            v, lo, hi = math.log10(v), math.log10(lo), math.log10(hi)
        frac = (v - lo) / (hi - lo) if hi > lo else 0.5
        return MARGIN_L + frac * (WIDTH - MARGIN_L - MARGIN_R)

    def y(self, v: float) -> float:
        lo, hi = self.y_lo, self.y_hi
        if self.log_y:
            v, lo, hi = math.log10(v), math.log10(lo), math.log10(hi)
        frac = (v - lo) / (hi - lo) if hi > lo else 0.5
        return HEIGHT - MARGIN_B - frac * (HEIGHT - MARGIN_T - MARGIN_B)

    def add(self, element: str) -> None:
        self.parts.append(element)

    def axes(self, xlabel: str, ylabel: str, title: str) -> None:
        x0, y0 = MARGIN_L, HEIGHT - MARGIN_B
        x1, y1 = WIDTH - MARGIN_R, MARGIN_T
        self.add(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
                 'fill="none" stroke="#333" stroke-width="1"/>')
        xticks = _log_ticks(self.x_lo, self.x_hi) if self.log_x \
            else _lin_ticks(self.x_lo, self.x_hi)
        for t in xticks:
            px = self.x(t)
            self.add(f'<line x1="{px:.1f}" y1="{y0}" x2="{px:.1f}" y2="{y0 + 5}" stroke="#333"/>')
            label = f"{t:g}"
            self.add(f'<text x="{px:.1f}" y="{y0 + 18}" font-size="11" '
                     f'text-anchor="middle">{label}</text>')
        yticks = _log_ticks(self.y_lo, self.y_hi) if self.log_y \
            else _lin_ticks(self.y_lo, self.y_hi)
        for t in yticks:
            py = self.y(t)
            self.add(f'<line x1="{x0 - 5}" y1="{py:.1f}" x2="{x0}" y2="{py:.1f}" stroke="#333"/>')
            self.add(f'<text x="{x0 - 8}" y="{py + 4:.1f}" font-size="11" '
                     f'text-anchor="end">{t:g}</text>')
        self.add(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 14}" font-size="13" '
                 f'text-anchor="middle">{xlabel}</text>')
        self.add(f'<text x="18" y="{(y0 + y1) / 2:.1f}" font-size="13" text-anchor="middle" '
                 f'transform="rotate(-90 18 {(y0 + y1) / 2:.1f})">{ylabel}</text>')
        self.add(f'<text x="{(x0 + x1) / 2:.1f}" y="22" font-size="14" '
                 f'text-anchor="middle">{title}</text>')

    def legend(self, names: list[str]) -> None:
        x = WIDTH - MARGIN_R - 90
        y = MARGIN_T + 14
        for i, name in enumerate(names):
            c = _color(name, i)
            self.add(f'<circle cx="{x}" cy="{y + 16 * i}" r="4" fill="{c}"/>')
            self.add(f'<text x="{x + 10}" y="{y + 16 * i + 4}" font-size="12">{name}</text>')

    def render(self) -> str:
        body = "\n".join(self.parts)
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
                f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">\n'
                f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>\n'
                f"{body}\n</svg>\n")


def pareto_scatter(series: dict[str, list[tuple[float, float, str]]],
                   path, title: str = "distribution rate vs fidelity") -> None:
    """Rate on a log x-axis, fidelity on y; one series per protocol with the
    cutoff annotated next to each point."""
    xs = [x for pts in series.values() for x, _, _ in pts if x > 0]
    ys = [y for pts in series.values() for _, y, _ in pts]
    if not xs:
        raise ValueError("no points to plot")
    c = _Canvas(min(xs) / 1.5, max(xs) * 1.5, max(0.0, min(ys) - 0.05),
                min(1.0, max(ys) + 0.05), log_x=True)
    c.axes("distribution rate (per timeslot)", "mean GHZ fidelity", title)
    for i, (name, pts) in enumerate(sorted(series.items())):
        color = _color(name, i)
        for x, y, label in pts:
            if x <= 0:
                continue
            px, py = c.x(x), c.y(y)
            c.add(f'<circle cx="{px:.1f}" cy="{py:.1f}" r="3.5" fill="{color}"/>')
            c.add(f'<text x="{px + 5:.1f}" y="{py - 5:.1f}" font-size="9" '
                  f'fill="{color}">{label}</text>')
    c.legend(sorted(series))
    with open(path, "w") as fh:
        fh.write(c.render())


def distance_plot(series: dict[str, list[tuple[int, float, float, float]]],
                  path, title: str = "distribution rate vs grid size") -> None:
    """Grid size on x, rate on a log y-axis with confidence-interval bars."""
    pts = [p for s in series.values() for p in s if p[1] > 0]
    if not pts:
        raise ValueError("no points to plot")
    positive_lows = [p[2] for p in pts if p[2] > 0]
    y_lo = min(positive_lows + [p[1] for p in pts])
    y_hi = max([p[3] for p in pts] + [p[1] for p in pts])
    xs = [p[0] for s in series.values() for p in s]
    c = _Canvas(min(xs) - 0.5, max(xs) + 0.5, y_lo / 1.5, y_hi * 1.5, log_y=True)
    c.axes("grid size M", "distribution rate (per timeslot)", title)
    for i, (name, spts) in enumerate(sorted(series.items())):
        color = _color(name, i)
        line = []
        for m, dr, lo, hi in spts:
            if dr <= 0:
                continue
            px, py = c.x(m), c.y(dr)
            line.append((px, py))
            if lo > 0:
                c.add(f'<line x1="{px:.1f}" y1="{c.y(lo):.1f}" x2="{px:.1f}" '
                      f'y2="{c.y(hi):.1f}" stroke="{color}" stroke-width="1"/>')
            c.add(f'<circle cx="{px:.1f}" cy="{py:.1f}" r="3.5" fill="{color}"/>')
        if len(line) > 1:
            d = " ".join(f"{x:.1f},{y:.1f}" for x, y in line)
            c.add(f'<polyline points="{d}" fill="none" stroke="{color}" stroke-width="1.2"/>')
    c.legend(sorted(series))
    with open(path, "w") as fh:
        fh.write(c.render())
