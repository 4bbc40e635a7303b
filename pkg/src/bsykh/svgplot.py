"""Tiny standalone SVG line-plot writer.

No plotting dependency: output is deterministic bytes for identical input,
which makes plots diffable in tests.  One plot per 800x500 file, SVG 1.1.
"""

import math

WIDTH, HEIGHT = 800, 500
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 75, 25, 35, 55

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
           "#17becf", "#7f7f7f"]


def _nice_ticks(lo, hi, target=6):
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _fmt(x):
    return f"{x:.6g}"


def line_plot(path, curves, xlabel, ylabel, title="", hlines=()):
    """Write an SVG line plot.

    curves: list of (label, xs, ys); nonfinite points split the polyline.
    hlines: y-values drawn as dashed reference lines.
    """
    finite_x, finite_y = [], []
    for _, xs, ys in curves:
        for x, y in zip(xs, ys):
            if math.isfinite(x) and math.isfinite(y):
                finite_x.append(float(x))
                finite_y.append(float(y))
    finite_y.extend(float(h) for h in hlines)
    if not finite_x:
        raise ValueError("no finite data to plot")
    x0, x1 = min(finite_x), max(finite_x)
    y0, y1 = min(finite_y), max(finite_y)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.04 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    px = lambda x: MARGIN_L + (x - x0) / (x1 - x0) * (WIDTH - MARGIN_L - MARGIN_R)
    py = lambda y: HEIGHT - MARGIN_B - (y - y0) / (y1 - y0) * (HEIGHT - MARGIN_T - MARGIN_B)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    # axes
    ax_y = HEIGHT - MARGIN_B
    parts.append(f'<line x1="{MARGIN_L}" y1="{ax_y}" x2="{WIDTH - MARGIN_R}" '
                 f'y2="{ax_y}" stroke="black" stroke-width="1"/>')
    parts.append(f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
                 f'y2="{ax_y}" stroke="black" stroke-width="1"/>')
    for t in _nice_ticks(x0, x1):
        x = px(t)
        parts.append(f'<line x1="{x:.2f}" y1="{ax_y}" x2="{x:.2f}" y2="{ax_y + 5}" '
                     f'stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{x:.2f}" y="{ax_y + 20}" font-size="13" '
                     f'text-anchor="middle" font-family="sans-serif">{_fmt(t)}</text>')
    for t in _nice_ticks(y0, y1):
        y = py(t)
        parts.append(f'<line x1="{MARGIN_L - 5}" y1="{y:.2f}" x2="{MARGIN_L}" '
                     f'y2="{y:.2f}" stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{MARGIN_L - 8}" y="{y + 4:.2f}" font-size="13" '
                     f'text-anchor="end" font-family="sans-serif">{_fmt(t)}</text>')
    parts.append(f'<text x="{(MARGIN_L + WIDTH - MARGIN_R) / 2:.1f}" y="{HEIGHT - 12}" '
                 f'font-size="15" text-anchor="middle" font-family="sans-serif">'
                 f'{xlabel}</text>')
    parts.append(f'<text x="18" y="{(MARGIN_T + ax_y) / 2:.1f}" font-size="15" '
                 f'text-anchor="middle" font-family="sans-serif" '
                 f'transform="rotate(-90 18 {(MARGIN_T + ax_y) / 2:.1f})">{ylabel}</text>')
    if title:
        parts.append(f'<text x="{WIDTH / 2:.1f}" y="22" font-size="16" '
                     f'text-anchor="middle" font-family="sans-serif">{title}</text>')
    for h in hlines:
        y = py(float(h))
        parts.append(f'<line x1="{MARGIN_L}" y1="{y:.2f}" x2="{WIDTH - MARGIN_R}" '
                     f'y2="{y:.2f}" stroke="black" stroke-width="1" '
                     f'stroke-dasharray="6,4"/>')
    # curves
    for i, (label, xs, ys) in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        segment = []
        segments = []
        for x, y in zip(xs, ys):
            if math.isfinite(float(x)) and math.isfinite(float(y)):
                segment.append(f"{px(float(x)):.3f},{py(float(y)):.3f}")
            elif segment:
                segments.append(segment)
                segment = []
        if segment:
            segments.append(segment)
        for seg in segments:
            if len(seg) == 1:
                cx, cy = seg[0].split(",")
                parts.append(f'<circle cx="{cx}" cy="{cy}" r="2" fill="{color}"/>')
            else:
                parts.append(f'<polyline points="{" ".join(seg)}" fill="none" '
                             f'stroke="{color}" stroke-width="1.6"/>')
    # legend
    lx, ly = WIDTH - MARGIN_R - 170, MARGIN_T + 10
    for i, (label, _, _) in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        y = ly + 18 * i
        parts.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 26}" y2="{y}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 32}" y="{y + 4}" font-size="13" '
                     f'font-family="sans-serif">{label}</text>')
    parts.append("</svg>")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(parts) + "\n")
