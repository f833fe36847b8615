"""Tiny dependency-free SVG charts (line and box plots) with deterministic output."""

from __future__ import annotations

import math
from html import escape
from typing import Sequence

WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 30, 50
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


class _Axes:
    def __init__(self, lo: float, hi: float, log: bool):
        self.log = log
        if log:
            lo, hi = math.log10(max(lo, 1e-300)), math.log10(max(hi, 1e-300))
        if hi <= lo:
            lo, hi = lo - 0.5, hi + 0.5
        self.lo, self.hi = lo, hi

    def y(self, v: float) -> float:
        if self.log:
            v = math.log10(max(v, 1e-300))
        frac = (v - self.lo) / (self.hi - self.lo)
        return HEIGHT - BOTTOM - frac * (HEIGHT - TOP - BOTTOM)

    def ticks(self, k: int = 5) -> list[tuple[float, str]]:
        out = []
        for i in range(k + 1):
            t = self.lo + (self.hi - self.lo) * i / k
            value = 10**t if self.log else t
            out.append((HEIGHT - BOTTOM - i / k * (HEIGHT - TOP - BOTTOM), f"{value:.3g}"))
        return out


def _x(i: int, count: int) -> float:
    span = WIDTH - LEFT - RIGHT
    return LEFT + (span * (i + 0.5) / count if count else span / 2)


def _frame(parts: list[str], axes: _Axes, title: str, xlabel: str, ylabel: str) -> None:
    parts.append(f'<text x="{WIDTH / 2:.0f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>')
    parts.append(
        f'<line x1="{LEFT}" y1="{HEIGHT - BOTTOM}" x2="{WIDTH - RIGHT}" y2="{HEIGHT - BOTTOM}" stroke="black"/>'
    )
    parts.append(f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{HEIGHT - BOTTOM}" stroke="black"/>')
    for y, label in axes.ticks():
        parts.append(f'<text x="{LEFT - 6}" y="{_fmt(y + 4)}" text-anchor="end" font-size="10">{label}</text>')
    scale = " (log scale)" if axes.log else ""
    parts.append(
        f'<text x="16" y="{HEIGHT / 2:.0f}" transform="rotate(-90 16 {HEIGHT / 2:.0f})" '
        f'text-anchor="middle" font-size="12" class="y-label" data-scale="{"log" if axes.log else "linear"}">'
        f"{escape(ylabel + scale)}</text>"
    )
    parts.append(
        f'<text x="{(LEFT + WIDTH - RIGHT) / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle" font-size="12">'
        f"{escape(xlabel)}</text>"
    )


def _wrap(parts: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">'
    )
    return "\n".join([head, f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>', *parts, "</svg>"]) + "\n"


def line_plot(
    x_labels: Sequence[str],
    series: dict[str, Sequence[float]],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "loss",
    log: bool = False,
) -> str:
    """One polyline per series over categorical x positions."""
    values = [v for ys in series.values() for v in ys if math.isfinite(v)]
    axes = _Axes(min(values, default=0.0), max(values, default=1.0), log)
    parts: list[str] = []
    _frame(parts, axes, title, xlabel, ylabel)
    for i, label in enumerate(x_labels):
        parts.append(
            f'<text x="{_fmt(_x(i, len(x_labels)))}" y="{HEIGHT - BOTTOM + 16}" text-anchor="middle" '
            f'font-size="10">{escape(str(label))}</text>'
        )
    for k, (name, ys) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{_fmt(_x(i, len(ys)))},{_fmt(axes.y(v))}" for i, v in enumerate(ys))
        parts.append(f'<g class="series" data-method="{escape(name)}">')
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
        for i, v in enumerate(ys):
            parts.append(f'<circle cx="{_fmt(_x(i, len(ys)))}" cy="{_fmt(axes.y(v))}" r="3" fill="{color}"/>')
        parts.append("</g>")
        ly = TOP + 16 * k
        parts.append(
            f'<text x="{WIDTH - RIGHT + 10}" y="{ly + 4}" font-size="11" fill="{color}">{escape(name)}</text>'
        )
    return _wrap(parts)


def _quantile(sorted_vals: list[float], q: float) -> float:
    pos = q * (len(sorted_vals) - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, len(sorted_vals) - 1)
    return sorted_vals[lo] + (pos - lo) * (sorted_vals[hi] - sorted_vals[lo])


def box_plot(
    groups: dict[str, Sequence[float]],
    title: str = "",
    ylabel: str = "loss",
    log: bool = False,
) -> str:
    """One box (quartiles, whiskers at min/max) per group."""
    values = [v for ys in groups.values() for v in ys if math.isfinite(v)]
    axes = _Axes(min(values, default=0.0), max(values, default=1.0), log)
    parts: list[str] = []
    _frame(parts, axes, title, "method", ylabel)
    count = len(groups)
    half = 0.3 * (WIDTH - LEFT - RIGHT) / max(count, 1)
    for k, (name, ys) in enumerate(groups.items()):
        color = PALETTE[k % len(PALETTE)]
        s = sorted(v for v in ys if math.isfinite(v))
        x = _x(k, count)
        parts.append(f'<g class="series" data-method="{escape(name)}">')
        if s:
            q1, med, q3 = (axes.y(_quantile(s, q)) for q in (0.25, 0.5, 0.75))
            lo, hi = axes.y(s[0]), axes.y(s[-1])
            parts.append(f'<line x1="{_fmt(x)}" y1="{_fmt(lo)}" x2="{_fmt(x)}" y2="{_fmt(hi)}" stroke="{color}"/>')
            parts.append(
                f'<rect x="{_fmt(x - half)}" y="{_fmt(q3)}" width="{_fmt(2 * half)}" '
                f'height="{_fmt(max(q1 - q3, 0.5))}" fill="white" stroke="{color}" stroke-width="2"/>'
            )
            parts.append(
                f'<line x1="{_fmt(x - half)}" y1="{_fmt(med)}" x2="{_fmt(x + half)}" y2="{_fmt(med)}" '
                f'stroke="{color}" stroke-width="2"/>'
            )
        parts.append("</g>")
        parts.append(
            f'<text x="{_fmt(x)}" y="{HEIGHT - BOTTOM + 16}" text-anchor="middle" font-size="10">{escape(name)}</text>'
        )
    return _wrap(parts)
