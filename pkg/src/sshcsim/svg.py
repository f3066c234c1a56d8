"""Minimal deterministic SVG line charts. CSV is the data contract; these
plots exist for quick visual inspection only."""

from __future__ import annotations

from typing import Mapping, Sequence

_WIDTH = 800
_HEIGHT = 480
_MARGIN = 60
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _fmt(x: float) -> str:
    return format(x, ".6g")


def line_chart(
    path: str,
    x: Sequence[float],
    series: Mapping[str, Sequence[float]],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
) -> None:
    if not x:
        raise ValueError("x must be non-empty")
    x_min, x_max = min(x), max(x)
    all_y = [v for ys in series.values() for v in ys]
    if not all_y:
        raise ValueError("series must be non-empty")
    y_min, y_max = min(all_y), max(all_y)
    if x_max == x_min:
        x_max = x_min + 1.0
    if y_max == y_min:
        y_max = y_min + 1.0

    def sx(v: float) -> float:
        return _MARGIN + (v - x_min) / (x_max - x_min) * (_WIDTH - 2 * _MARGIN)

    def sy(v: float) -> float:
        return _HEIGHT - _MARGIN - (v - y_min) / (y_max - y_min) * (_HEIGHT - 2 * _MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<line x1="{_MARGIN}" y1="{_HEIGHT - _MARGIN}" x2="{_WIDTH - _MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_WIDTH // 2}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{title}</text>'
        )
    if xlabel:
        parts.append(
            f'<text x="{_WIDTH // 2}" y="{_HEIGHT - 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{xlabel}</text>'
        )
    if ylabel:
        parts.append(
            f'<text x="16" y="{_HEIGHT // 2}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 16 {_HEIGHT // 2})">{ylabel}</text>'
        )
    # Axis range labels
    parts.append(
        f'<text x="{_MARGIN}" y="{_HEIGHT - _MARGIN + 16}" font-family="sans-serif" '
        f'font-size="10">{_fmt(x_min)}</text>'
    )
    parts.append(
        f'<text x="{_WIDTH - _MARGIN}" y="{_HEIGHT - _MARGIN + 16}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{_fmt(x_max)}</text>'
    )
    parts.append(
        f'<text x="{_MARGIN - 4}" y="{_HEIGHT - _MARGIN}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{_fmt(y_min)}</text>'
    )
    parts.append(
        f'<text x="{_MARGIN - 4}" y="{_MARGIN + 4}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{_fmt(y_max)}</text>'
    )
    for idx, (name, ys) in enumerate(series.items()):
        color = _COLORS[idx % len(_COLORS)]
        points = " ".join(f"{sx(xi):.2f},{sy(yi):.2f}" for xi, yi in zip(x, ys))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{points}"/>'
        )
        parts.append(
            f'<text x="{_WIDTH - _MARGIN + 4}" y="{_MARGIN + 14 * idx}" '
            f'font-family="sans-serif" font-size="11" fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
