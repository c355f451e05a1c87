"""Small self-contained SVG charts.

Written by hand rather than through a plotting library so output is
byte-stable across runs and carries no external assets or timestamps.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .core import DomainError, MonthlySeries, format_month

W, H = 720, 400
MARGIN = dict(left=80, right=70, top=40, bottom=60)
PALETTE = ("#e07b00", "#00897b", "#5e35b1", "#1e88e5", "#43a047", "#8e24aa")

KINDS = ("overlay", "conversion", "pvalue-sweep", "cost-evolution")


def _fmt(x: float) -> str:
    if x == 0:
        return "0"
    mag = abs(x)
    if mag >= 1e9:
        return f"{x / 1e9:.3g}B"
    if mag >= 1e6:
        return f"{x / 1e6:.3g}M"
    if mag >= 1e3:
        return f"{x / 1e3:.3g}k"
    return f"{x:.3g}"


class _Canvas:
    def __init__(self, title: str, xlabel: str, ylabel: str, y2label: Optional[str] = None):
        self.parts: list[str] = []
        self.title, self.xlabel, self.ylabel, self.y2label = title, xlabel, ylabel, y2label
        self.x0, self.x1 = MARGIN["left"], W - MARGIN["right"]
        self.y0, self.y1 = H - MARGIN["bottom"], MARGIN["top"]

    def sx(self, x: float, lo: float, hi: float) -> float:
        return self.x0 + (x - lo) / (hi - lo or 1) * (self.x1 - self.x0)

    def sy(self, y: float, lo: float, hi: float) -> float:
        return self.y0 - (y - lo) / (hi - lo or 1) * (self.y0 - self.y1)

    def add(self, el: str) -> None:
        self.parts.append(el)

    def text(self, x: float, y: float, s: str, anchor: str = "middle", size: int = 11, rotate: Optional[float] = None) -> None:
        rot = f' transform="rotate({rotate:.0f} {x:.1f} {y:.1f})"' if rotate is not None else ""
        self.add(f'<text x="{x:.1f}" y="{y:.1f}" font-size="{size}" text-anchor="{anchor}"{rot}>{escape(s)}</text>')

    def axes(self, xticks: Sequence[tuple[float, str]], yticks: Sequence[tuple[float, str]],
             y2ticks: Sequence[tuple[float, str]] = ()) -> None:
        self.add(f'<line x1="{self.x0}" y1="{self.y0}" x2="{self.x1}" y2="{self.y0}" stroke="#000"/>')
        self.add(f'<line x1="{self.x0}" y1="{self.y0}" x2="{self.x0}" y2="{self.y1}" stroke="#000"/>')
        for px, label in xticks:
            self.add(f'<line x1="{px:.1f}" y1="{self.y0}" x2="{px:.1f}" y2="{self.y0 + 4}" stroke="#000"/>')
            self.text(px, self.y0 + 18, label, size=10)
        for py, label in yticks:
            self.add(f'<line x1="{self.x0 - 4}" y1="{py:.1f}" x2="{self.x0}" y2="{py:.1f}" stroke="#000"/>')
            self.text(self.x0 - 7, py + 3, label, anchor="end", size=10)
        if y2ticks:
            self.add(f'<line x1="{self.x1}" y1="{self.y0}" x2="{self.x1}" y2="{self.y1}" stroke="#000"/>')
            for py, label in y2ticks:
                self.text(self.x1 + 7, py + 3, label, anchor="start", size=10)
        self.text(W / 2, 22, self.title, size=14)
        self.text((self.x0 + self.x1) / 2, H - 18, self.xlabel)
        self.text(18, (self.y0 + self.y1) / 2, self.ylabel, rotate=-90)
        if self.y2label:
            self.text(W - 14, (self.y0 + self.y1) / 2, self.y2label, rotate=90)

    def legend(self, entries: Sequence[tuple[str, str]]) -> None:
        for i, (label, color) in enumerate(entries):
            y = self.y1 + 8 + 16 * i
            self.add(f'<rect x="{self.x0 + 10}" y="{y}" width="12" height="4" fill="{color}"/>')
            self.text(self.x0 + 28, y + 6, label, anchor="start", size=10)

    def render(self) -> str:
        body = "\n".join(self.parts)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
            f'font-family="sans-serif">\n<rect width="{W}" height="{H}" fill="#fff"/>\n{body}\n</svg>\n'
        )


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _month_ticks(c: _Canvas, lo: int, hi: int) -> list[tuple[float, str]]:
    step = max(12, ((hi - lo) // 6 // 12) * 12 or 12)
    first = lo + (-lo) % 12
    return [(c.sx(t, lo, hi), format_month(t)[:4]) for t in range(first, hi + 1, step)]


def _polyline(points: Sequence[tuple[float, float]], color: str) -> str:
    pts = " ".join(f"{x:.1f},{y:.1f}" for x, y in points)
    return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'


def _series_lines(c: _Canvas, series: Sequence[MonthlySeries], log_scale: bool, lo: int, hi: int,
                  ylo: float, yhi: float, colors: Sequence[str]) -> None:
    for s, color in zip(series, colors):
        run: list[tuple[float, float]] = []
        for t in s.months:
            v = s.at(t)
            if v is None or (log_scale and v <= 0):
                if len(run) > 1:
                    c.add(_polyline(run, color))
                run = []
                continue
            y = math.log10(v) if log_scale else v
            run.append((c.sx(t, lo, hi), c.sy(y, ylo, yhi)))
        if len(run) > 1:
            c.add(_polyline(run, color))


def line_chart(series: Sequence[MonthlySeries], labels: Sequence[str], title: str, ylabel: str,
               log_scale: bool = False) -> str:
    if not series or any(len([v for v in s.values if v is not None]) < 2 for s in series):
        raise DomainError("chart needs at least two defined points per series")
    lo = min(s.start for s in series)
    hi = max(s.end for s in series)
    vals = [v for s in series for v in s.values if v is not None and (v > 0 or not log_scale)]
    tr = (lambda v: math.log10(v)) if log_scale else (lambda v: v)
    ylo, yhi = min(tr(v) for v in vals), max(tr(v) for v in vals)
    if not log_scale:
        ylo = min(ylo, 0.0)
    c = _Canvas(title, "Month", ylabel)
    yt = [(c.sy(y, ylo, yhi), _fmt(10**y if log_scale else y)) for y in _ticks(ylo, yhi)]
    c.axes(_month_ticks(c, lo, hi), yt)
    colors = PALETTE[: len(series)]
    _series_lines(c, series, log_scale, lo, hi, ylo, yhi, colors)
    c.legend(list(zip(labels, colors)))
    return c.render()


def overlay_chart(records: MonthlySeries, victims: MonthlySeries,
                  labels: Sequence[str] = ("Records exposed", "IDT victims")) -> str:
    return line_chart([records, victims], labels, "Monthly records exposed and victims", "Count (log10 scale)", log_scale=True)


def conversion_chart(raw: MonthlySeries, smoothed: MonthlySeries, fitted: Optional[MonthlySeries] = None) -> str:
    series = [raw, smoothed] + ([fitted] if fitted is not None else [])
    labels = ["Monthly conversion rate", "Moving average"] + (["Log-quadratic fit"] if fitted is not None else [])
    return line_chart(series, labels, "Breach-to-victim conversion", "Victims per 100,000 discounted records (log10)", log_scale=True)


def cost_evolution_chart(S: MonthlySeries) -> str:
    return line_chart([S], ["Social cost per victim"], "Social cost per victim (2021 $)", "2021 dollars")


def pvalue_sweep_chart(results: Sequence, threshold: float = 0.05) -> str:
    """p-value per lag (line, left axis) over mean victim change (bars, right axis)."""
    if not results:
        raise DomainError("no lag results to chart")
    lags = [r.lag for r in results]
    lo, hi = min(lags) - 0.5, max(lags) + 0.5
    deltas = [r.mean_delta or 0.0 for r in results]
    dlo, dhi = min(0.0, min(deltas)), max(0.0, max(deltas))
    if dlo == dhi:
        dhi = 1.0
    c = _Canvas("Wilcoxon signed-rank test across discovery lags", "Discovery lag (months)", "p-value",
                "Mean change in monthly victims")
    xt = [(c.sx(lag, lo, hi), str(lag)) for lag in lags]
    yt = [(c.sy(p, 0, 1), f"{p:.2f}") for p in _ticks(0, 1)]
    y2t = [(c.sy(v, dlo, dhi), _fmt(v)) for v in _ticks(dlo, dhi)]
    c.axes(xt, yt, y2t)
    bw = (c.x1 - c.x0) / len(lags) * 0.5
    zero = c.sy(0, dlo, dhi)
    for r, d in zip(results, deltas):
        x = c.sx(r.lag, lo, hi)
        top = c.sy(d, dlo, dhi)
        c.add(f'<rect class="delta" x="{x - bw / 2:.1f}" y="{min(top, zero):.1f}" width="{bw:.1f}" '
              f'height="{abs(zero - top):.1f}" fill="#43a047" fill-opacity="0.6"/>')
    ref = c.sy(threshold, 0, 1)
    c.add(f'<line class="threshold" x1="{c.x0}" y1="{ref:.1f}" x2="{c.x1}" y2="{ref:.1f}" stroke="#d32f2f" stroke-dasharray="6 4"/>')
    pts = [(c.sx(r.lag, lo, hi), c.sy(r.p_value, 0, 1)) for r in results if r.p_value is not None]
    if len(pts) > 1:
        c.add(_polyline(pts, "#1e88e5"))
    for x, y in pts:
        c.add(f'<circle class="pvalue" cx="{x:.1f}" cy="{y:.1f}" r="3" fill="#1e88e5"/>')
    c.legend([("p-value", "#1e88e5"), ("Mean change in victims", "#43a047"), (f"p = {threshold}", "#d32f2f")])
    return c.render()


def emit_chart(kind: str, data) -> str:
    """Dispatch to a chart by name.

    ``data`` is a list of series for ``overlay``/``conversion``, a single
    series for ``cost-evolution`` and a list of lag results for
    ``pvalue-sweep``.
    """
    if kind not in KINDS:
        raise DomainError(f"unknown chart kind {kind!r}; valid: {', '.join(KINDS)}")
    if not data:
        raise DomainError("chart data is empty")
    if kind == "pvalue-sweep":
        return pvalue_sweep_chart(data)
    if kind == "cost-evolution":
        return cost_evolution_chart(data[0] if isinstance(data, (list, tuple)) else data)
    if kind == "overlay":
        if len(data) != 2:
            raise DomainError("overlay needs exactly two series")
        return overlay_chart(data[0], data[1])
    return conversion_chart(*data)
