"""Minimal static SVG chart emitter.

Deliberately tiny: line/step charts, scatter, heatmap with marginal bars,
and box summaries, each returned as one self-contained SVG string with no
external assets.  Numbers are formatted with fixed precision so output is
byte-stable across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

_PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"]


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


@dataclass
class _Frame:
    width: int
    height: int
    left: int = 62
    right: int = 18
    top: int = 34
    bottom: int = 46

    @property
    def plot_w(self) -> float:
        return self.width - self.left - self.right

    @property
    def plot_h(self) -> float:
        return self.height - self.top - self.bottom


class _Scale:
    def __init__(self, lo: float, hi: float, out_lo: float, out_hi: float):
        if hi <= lo:
            hi = lo + 1.0
        self.lo, self.hi = lo, hi
        self.out_lo, self.out_hi = out_lo, out_hi

    def __call__(self, v: float) -> float:
        frac = (v - self.lo) / (self.hi - self.lo)
        return self.out_lo + frac * (self.out_hi - self.out_lo)

    def ticks(self, n: int = 5) -> list[float]:
        span = self.hi - self.lo
        if span <= 0:
            return [self.lo]
        step = 10 ** math.floor(math.log10(span / n))
        for mult in (1, 2, 5, 10):
            if span / (step * mult) <= n:
                step *= mult
                break
        first = math.ceil(self.lo / step) * step
        out = []
        v = first
        while v <= self.hi + 1e-9:
            out.append(round(v, 10))
            v += step
        return out


def _header(width: int, height: int, title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13">{title}</text>',
    ]


def _axes(
    frame: _Frame,
    sx: _Scale,
    sy: _Scale,
    x_label: str,
    y_label: str,
) -> list[str]:
    parts = []
    x0, y0 = frame.left, frame.height - frame.bottom
    x1, y1 = frame.width - frame.right, frame.top
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black" stroke-width="1"/>'
    )
    for t in sx.ticks():
        px = sx(t)
        parts.append(
            f'<line x1="{px:.1f}" y1="{y0}" x2="{px:.1f}" y2="{y0 + 4}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{px:.1f}" y="{y0 + 16}" text-anchor="middle">{_fmt(t)}</text>'
        )
    for t in sy.ticks():
        py = sy(t)
        parts.append(
            f'<line x1="{x0 - 4}" y1="{py:.1f}" x2="{x0}" y2="{py:.1f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x0 - 7}" y="{py + 3:.1f}" text-anchor="end">{_fmt(t)}</text>'
        )
    parts.append(
        f'<text x="{(x0 + x1) / 2:.1f}" y="{frame.height - 8}" text-anchor="middle">{x_label}</text>'
    )
    parts.append(
        f'<text x="14" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {(y0 + y1) / 2:.1f})">{y_label}</text>'
    )
    return parts


def _legend(frame: _Frame, names: Sequence[str]) -> list[str]:
    parts = []
    x = frame.left + 8
    y = frame.top + 6
    for i, name in enumerate(names):
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(
            f'<rect x="{x}" y="{y + 14 * i}" width="10" height="10" fill="{color}"/>'
        )
        parts.append(f'<text x="{x + 14}" y="{y + 14 * i + 9}">{name}</text>')
    return parts


def line_chart(
    series: dict[str, list[tuple[float, float]]],
    title: str,
    x_label: str,
    y_label: str,
    width: int = 520,
    height: int = 360,
    step: bool = False,
    log_y: bool = False,
) -> str:
    """Multi-series line (or step) chart; optional log10 y axis."""
    frame = _Frame(width, height)
    xs = [p[0] for pts in series.values() for p in pts]
    ys = [p[1] for pts in series.values() for p in pts]
    if not xs:
        xs, ys = [0.0, 1.0], [0.0, 1.0]

    def ty(v: float) -> float:
        return math.log10(v) if log_y else v

    y_vals = [ty(v) for v in ys if not log_y or v > 0]
    if not y_vals:
        y_vals = [0.0, 1.0]
    sx = _Scale(min(xs), max(xs), frame.left, frame.width - frame.right)
    sy = _Scale(min(y_vals), max(y_vals), frame.height - frame.bottom, frame.top)
    parts = _header(width, height, title)
    parts += _axes(frame, sx, sy, x_label, ("log10 " if log_y else "") + y_label)
    for i, (name, pts) in enumerate(series.items()):
        color = _PALETTE[i % len(_PALETTE)]
        coords = []
        prev_y = None
        for x, y in pts:
            if log_y and y <= 0:
                continue
            px, py = sx(x), sy(ty(y))
            if step and prev_y is not None:
                coords.append(f"{px:.1f},{prev_y:.1f}")
            coords.append(f"{px:.1f},{py:.1f}")
            prev_y = py
        if coords:
            parts.append(
                f'<polyline points="{" ".join(coords)}" fill="none" '
                f'stroke="{color}" stroke-width="1.5"/>'
            )
    parts += _legend(frame, list(series))
    parts.append("</svg>")
    return "\n".join(parts)


def cdf_chart(
    series: dict[str, list[tuple[float, float]]],
    title: str,
    x_label: str,
    width: int = 520,
    height: int = 360,
) -> str:
    return line_chart(
        series, title, x_label, "cumulative fraction", width, height, step=True
    )


def scatter_chart(
    points: list[tuple[float, float]],
    title: str,
    x_label: str,
    y_label: str,
    width: int = 520,
    height: int = 360,
    log_y: bool = False,
) -> str:
    frame = _Frame(width, height)
    if not points:
        points = []
    xs = [p[0] for p in points] or [0.0, 1.0]
    ys_raw = [p[1] for p in points]
    ys = [math.log10(v) for v in ys_raw if v > 0] if log_y else ys_raw
    if not ys:
        ys = [0.0, 1.0]
    sx = _Scale(min(xs), max(xs), frame.left, frame.width - frame.right)
    sy = _Scale(min(ys), max(ys), frame.height - frame.bottom, frame.top)
    parts = _header(width, height, title)
    parts += _axes(frame, sx, sy, x_label, ("log10 " if log_y else "") + y_label)
    for x, y in points:
        if log_y:
            if y <= 0:
                continue
            y = math.log10(y)
        parts.append(
            f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" '
            f'fill="#1f77b4" fill-opacity="0.7"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def heatmap_with_marginals(
    x_edges: Sequence[float],
    y_edges: Sequence[float],
    counts: Sequence[Sequence[int]],
    title: str,
    x_label: str,
    y_label: str,
    width: int = 620,
    height: int = 620,
) -> str:
    """Density heatmap with bar panels for both marginals."""
    margin = 150
    frame = _Frame(width, height, left=62, right=margin, top=margin, bottom=46)
    nx = len(x_edges) - 1
    ny = len(y_edges) - 1
    sx = _Scale(x_edges[0], x_edges[-1], frame.left, frame.width - frame.right)
    sy = _Scale(y_edges[0], y_edges[-1], frame.height - frame.bottom, frame.top)
    flat = [c for row in counts for c in row]
    vmax = max(flat) if flat else 1
    parts = _header(width, height, title)
    parts += _axes(frame, sx, sy, x_label, y_label)
    for i in range(nx):
        for j in range(ny):
            c = counts[i][j]
            if c == 0:
                continue
            # Log shading from near-white to dark blue.
            strength = math.log1p(c) / math.log1p(vmax) if vmax else 0.0
            shade = int(235 - 205 * strength)
            x0, x1 = sx(x_edges[i]), sx(x_edges[i + 1])
            y0, y1 = sy(y_edges[j]), sy(y_edges[j + 1])
            parts.append(
                f'<rect x="{x0:.1f}" y="{y1:.1f}" width="{x1 - x0:.2f}" '
                f'height="{y0 - y1:.2f}" fill="rgb({shade},{shade},245)"/>'
            )
    x_marg = [sum(row) for row in counts]
    y_marg = [sum(counts[i][j] for i in range(nx)) for j in range(ny)]
    mx = max(x_marg) if any(x_marg) else 1
    my = max(y_marg) if any(y_marg) else 1
    top_base = frame.top - 6
    for i, c in enumerate(x_marg):
        if c == 0:
            continue
        h = (margin - 40) * c / mx
        x0, x1 = sx(x_edges[i]), sx(x_edges[i + 1])
        parts.append(
            f'<rect x="{x0:.1f}" y="{top_base - h:.1f}" width="{x1 - x0:.2f}" '
            f'height="{h:.1f}" fill="#888888"/>'
        )
    right_base = frame.width - frame.right + 6
    for j, c in enumerate(y_marg):
        if c == 0:
            continue
        w = (margin - 40) * c / my
        y0, y1 = sy(y_edges[j]), sy(y_edges[j + 1])
        parts.append(
            f'<rect x="{right_base}" y="{y1:.1f}" width="{w:.1f}" '
            f'height="{y0 - y1:.2f}" fill="#888888"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def _quartiles(values: Sequence[float]) -> tuple[float, float, float, float, float]:
    vs = sorted(values)
    n = len(vs)

    def q(frac: float) -> float:
        if n == 1:
            return vs[0]
        pos = frac * (n - 1)
        lo = int(math.floor(pos))
        hi = min(lo + 1, n - 1)
        return vs[lo] + (pos - lo) * (vs[hi] - vs[lo])

    return vs[0], q(0.25), q(0.5), q(0.75), vs[-1]


def box_chart(
    groups: dict[str, list[float]],
    title: str,
    y_label: str,
    width: int = 620,
    height: int = 360,
) -> str:
    """One box (min, quartiles, max whiskers) per labelled group."""
    frame = _Frame(width, height, bottom=70)
    names = list(groups)
    all_vals = [v for vals in groups.values() for v in vals]
    if not all_vals:
        all_vals = [0.0, 1.0]
    sy = _Scale(min(all_vals), max(all_vals), frame.height - frame.bottom, frame.top)
    parts = _header(width, height, title)
    x0, y0 = frame.left, frame.height - frame.bottom
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{frame.top}" stroke="black"/>'
    )
    for t in sy.ticks():
        py = sy(t)
        parts.append(
            f'<line x1="{x0 - 4}" y1="{py:.1f}" x2="{x0}" y2="{py:.1f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x0 - 7}" y="{py + 3:.1f}" text-anchor="end">{_fmt(t)}</text>'
        )
    parts.append(
        f'<text x="14" y="{(y0 + frame.top) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {(y0 + frame.top) / 2:.1f})">{y_label}</text>'
    )
    slot = frame.plot_w / max(1, len(names))
    for i, name in enumerate(names):
        vals = groups[name]
        cx = frame.left + slot * (i + 0.5)
        label_y = frame.height - frame.bottom + 16
        parts.append(
            f'<text x="{cx:.1f}" y="{label_y}" text-anchor="middle" '
            f'transform="rotate(30 {cx:.1f} {label_y})">{name}</text>'
        )
        if not vals:
            continue
        lo, q1, med, q3, hi = _quartiles(vals)
        w = min(40.0, slot * 0.5)
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(
            f'<line x1="{cx:.1f}" y1="{sy(lo):.1f}" x2="{cx:.1f}" y2="{sy(hi):.1f}" '
            f'stroke="black"/>'
        )
        parts.append(
            f'<rect x="{cx - w / 2:.1f}" y="{sy(q3):.1f}" width="{w:.1f}" '
            f'height="{abs(sy(q1) - sy(q3)):.2f}" fill="{color}" fill-opacity="0.5" '
            f'stroke="black"/>'
        )
        parts.append(
            f'<line x1="{cx - w / 2:.1f}" y1="{sy(med):.1f}" x2="{cx + w / 2:.1f}" '
            f'y2="{sy(med):.1f}" stroke="black" stroke-width="1.5"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
