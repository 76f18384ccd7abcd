"""Minimal SVG line plots, enough to eyeball figure CSVs."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

WIDTH, PANEL_H, MARGIN = 640, 220, 40
COLORS = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98")
DASHES = ("", "6,4", "2,3", "8,3,2,3")


def _polyline(x, y, box, color, dash):
    x0, y0, w, h, (xlo, xhi, ylo, yhi) = box
    px = x0 + (np.asarray(x, float) - xlo) / (xhi - xlo or 1.0) * w
    py = y0 + h - (np.asarray(y, float) - ylo) / (yhi - ylo or 1.0) * h
    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline fill="none" stroke="{color}" stroke-width="1.2"{extra} points="{pts}"/>'


def line_panels(path, panels, title: str = "") -> Path:
    """Write stacked panels.

    ``panels`` is a list of ``(panel_title, x, [(label, y), ...])``.
    """
    height = MARGIN + len(panels) * (PANEL_H + MARGIN)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
           f'font-family="sans-serif" font-size="11">']
    if title:
        out.append(f'<text x="{MARGIN}" y="{MARGIN // 2 + 5}" font-size="13">{escape(title)}</text>')
    for k, (ptitle, x, series) in enumerate(panels):
        y0 = MARGIN + k * (PANEL_H + MARGIN)
        w = WIDTH - 2 * MARGIN
        ys = np.concatenate([np.asarray(y, float) for _, y in series])
        lims = (float(np.min(x)), float(np.max(x)), float(ys.min()), float(ys.max()))
        box = (MARGIN, y0, w, PANEL_H, lims)
        out.append(f'<rect x="{MARGIN}" y="{y0}" width="{w}" height="{PANEL_H}" '
                   'fill="none" stroke="#999"/>')
        out.append(f'<text x="{MARGIN + 4}" y="{y0 - 4}">{escape(ptitle)}</text>')
        out.append(f'<text x="{MARGIN}" y="{y0 + PANEL_H + 14}">{lims[0]:.4g}</text>')
        out.append(f'<text x="{MARGIN + w}" y="{y0 + PANEL_H + 14}" text-anchor="end">'
                   f'{lims[1]:.4g}</text>')
        for j, (label, y) in enumerate(series):
            color, dash = COLORS[j % len(COLORS)], DASHES[j % len(DASHES)]
            out.append(_polyline(x, y, box, color, dash))
            out.append(f'<text x="{MARGIN + w - 4}" y="{y0 + 14 + 13 * j}" text-anchor="end" '
                       f'fill="{color}">{escape(label)}</text>')
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path
