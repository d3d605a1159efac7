"""Bit-stable result emission: CSV tables and minimal SVG plots.

Floating-point values are printed with 12 significant digits and files use
LF line endings, so identical inputs always produce byte-identical files.
The SVG writers are deliberately tiny (axes, polyline, labels) to keep the
output diffable.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .analysis import FringeFit
from .experiment import ScanSeries


def fmt(value: float) -> str:
    return f"{value:.12g}"


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# CSV


def scan_csv(series: ScanSeries) -> str:
    lines = ["setting_rad,p_joint,p_conditional,counts"]
    joint = series.joint_probabilities or (None,) * len(series.settings)
    counts = series.counts or (None,) * len(series.settings)
    for setting, j, p, c in zip(series.settings, joint,
                                series.probabilities, counts):
        row = [fmt(setting),
               fmt(j) if j is not None else "",
               fmt(p),
               str(c) if c is not None else ""]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def summary_csv(rows) -> str:
    lines = ["quantity,value"]
    for key, value in rows:
        text = fmt(value) if isinstance(value, float) else str(value)
        lines.append(f"{key},{text}")
    return "\n".join(lines) + "\n"


def fit_summary_rows(vis: float, fit: FringeFit) -> list:
    return [
        ("visibility", float(vis)),
        ("fit_offset", float(fit.offset)),
        ("fit_amplitude", float(fit.amplitude)),
        ("fit_phase_rad", float(fit.phase)),
        ("fit_residual_rms", float(fit.residual_rms)),
    ]


def alpha_csv(points) -> str:
    lines = ["alpha_rad,visibility,fit_offset,fit_amplitude,"
             "fit_phase_rad,fit_residual_rms"]
    for pt in points:
        lines.append(",".join([
            fmt(pt.alpha), fmt(pt.visibility), fmt(pt.fit.offset),
            fmt(pt.fit.amplitude), fmt(pt.fit.phase), fmt(pt.fit.residual_rms),
        ]))
    return "\n".join(lines) + "\n"


def grid_csv(alphas, thetas, joint, conditional) -> str:
    lines = ["alpha_rad,theta_rad,p_joint,p_conditional"]
    for i, alpha in enumerate(alphas):
        for j, theta in enumerate(thetas):
            lines.append(",".join([
                fmt(float(alpha)), fmt(float(theta)),
                fmt(float(joint[i][j])), fmt(float(conditional[i][j])),
            ]))
    return "\n".join(lines) + "\n"


def events_csv(events) -> str:
    lines = ["arm,timestamp_s,tag"]
    for ev in events:
        lines.append(f"{ev.arm},{fmt(ev.timestamp)},{ev.tag}")
    return "\n".join(lines) + "\n"


def pattern_csv(phis, intensity) -> str:
    lines = ["phi_rad,intensity"]
    for phi, val in zip(phis, intensity):
        lines.append(f"{fmt(float(phi))},{fmt(float(val))}")
    return "\n".join(lines) + "\n"


def read_scan_csv(path) -> ScanSeries:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    header = lines[0].split(",")
    if header[:3] != ["setting_rad", "p_joint", "p_conditional"]:
        raise ValueError(f"not a scan CSV: {path}")
    settings, joint, cond, counts = [], [], [], []
    for line in lines[1:]:
        cells = line.split(",")
        settings.append(float(cells[0]))
        joint.append(float(cells[1]) if cells[1] else None)
        cond.append(float(cells[2]))
        counts.append(int(cells[3]) if len(cells) > 3 and cells[3] else None)
    have_joint = all(j is not None for j in joint)
    have_counts = all(c is not None for c in counts)
    return ScanSeries(
        "theta", tuple(settings), tuple(cond),
        joint_probabilities=tuple(joint) if have_joint else None,
        counts=tuple(counts) if have_counts else None,
    )


# ---------------------------------------------------------------------------
# SVG


def _pt(x: float, y: float) -> str:
    return f"{x:.3f},{y:.3f}"


def line_plot_svg(xs, ys, title: str, width: int = 640, height: int = 400,
                  margin: int = 56) -> str:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(min(ys.min(), 0.0)), float(ys.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def sx(x):
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin)

    points = " ".join(_pt(sx(x), sy(y)) for x, y in zip(xs, ys))
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="24" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{title}</text>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<text x="{margin}" y="{height - margin + 18}" font-family="monospace" '
        f'font-size="11">{fmt(x_lo)}</text>',
        f'<text x="{width - margin}" y="{height - margin + 18}" '
        f'text-anchor="end" font-family="monospace" font-size="11">{fmt(x_hi)}</text>',
        f'<text x="{margin - 6}" y="{height - margin}" text-anchor="end" '
        f'font-family="monospace" font-size="11">{fmt(y_lo)}</text>',
        f'<text x="{margin - 6}" y="{margin + 4}" text-anchor="end" '
        f'font-family="monospace" font-size="11">{fmt(y_hi)}</text>',
        f'<polyline points="{points}" fill="none" stroke="#1f599c" '
        f'stroke-width="1.5"/>',
        "</svg>",
    ]) + "\n"


def polar_plot_svg(intensity, title: str, size: int = 480) -> str:
    values = np.asarray(intensity, dtype=float)
    peak = values.max() if values.max() > 0 else 1.0
    center = size / 2.0
    base = size * 0.12
    span = size * 0.34
    n = len(values)
    pts = []
    for k, val in enumerate(values):
        phi = 2.0 * math.pi * k / n
        r = base + span * val / peak
        pts.append(_pt(center + r * math.cos(phi), center - r * math.sin(phi)))
    ring = base + span / (2.0 if peak > 1.0 else 1.0)
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
        f'height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<text x="{size // 2}" y="24" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{title}</text>',
        f'<circle cx="{center:.3f}" cy="{center:.3f}" r="{ring:.3f}" '
        f'fill="none" stroke="#cccccc" stroke-dasharray="4 4"/>',
        f'<polygon points="{" ".join(pts)}" fill="none" stroke="#9c2f1f" '
        f'stroke-width="1.5"/>',
        "</svg>",
    ]) + "\n"


def write_outputs(out_dir, named_texts) -> list:
    """Write ``{filename: text}`` under ``out_dir``; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for name, text in named_texts.items():
        path = os.path.join(out_dir, name)
        _write_text(path, text)
        paths.append(path)
    return paths
