"""Minimal deterministic SVG rendering of domains and overlays."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .domain import Disc, DomainSpec, HalfPlane, Point, Polyline, Segment


def _n(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".") or "0"


class _Frame:
    def __init__(self, window, size):
        x0, y0, x1, y1 = window
        self.x0, self.y1 = x0, y1
        self.s = size / max(x1 - x0, y1 - y0)
        self.w = (x1 - x0) * self.s
        self.h = (y1 - y0) * self.s

    def xy(self, z: complex) -> str:
        return f"{_n((z.real - self.x0) * self.s)},{_n((self.y1 - z.imag) * self.s)}"

    def path(self, pts, closed: bool) -> str:
        pts = list(pts)
        d = "M" + " L".join(self.xy(complex(p)) for p in pts)
        return d + (" Z" if closed else "")


def _component_path(c, fr: _Frame, window) -> str:
    if isinstance(c, Disc):
        ring = c.boundary_param(np.arange(128) / 128)
        if not c.outer:
            return f'<path d="{fr.path(ring, True)}" fill="#888" stroke="#222"/>'
        x0, y0, x1, y1 = window
        box = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
        return f'<path d="{fr.path(box, True)} {fr.path(ring[::-1], True)}" fill="#888" fill-rule="evenodd" stroke="#222"/>'
    if isinstance(c, Segment):
        return f'<path d="{fr.path([c.p, c.q], False)}" fill="none" stroke="#222" stroke-width="2"/>'
    if isinstance(c, Point):
        return f'<path d="{fr.path(c.p + 3 / fr.s * np.exp(2j * np.pi * np.arange(12) / 12), True)}" fill="#222"/>'
    if isinstance(c, Polyline):
        return f'<path d="{fr.path(c.points, True)}" fill="#888" stroke="#222"/>'
    if isinstance(c, HalfPlane):
        x0, y0, x1, y1 = window
        big = 4 * max(x1 - x0, y1 - y0)
        t = 1j * c.normal
        quad = [c.point - big * t, c.point + big * t, c.point + big * t - big * c.normal,
                c.point - big * t - big * c.normal]
        return f'<path d="{fr.path(quad, True)}" fill="#888" stroke="#222"/>'
    raise ValueError(f"cannot draw {c.kind}")


def render_svg(dom: DomainSpec | None, overlays: Sequence[dict] = (), path=None,
               window: Sequence[float] | None = None, size: int = 600) -> str:
    """Render components (filled) plus overlays.

    Overlay dicts: ``{"curve": points}``, ``{"cigar": (points, radii)}``
    (translucent discs) or ``{"circle": (center, radius)}`` (dashed).
    """
    if window is None:
        window = dom.bbox(pad=0.5) if dom is not None else (-1.0, -1.0, 1.0, 1.0)
    fr = _Frame(window, size)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_n(fr.w)}" height="{_n(fr.h)}" '
           f'viewBox="0 0 {_n(fr.w)} {_n(fr.h)}">',
           f'<rect width="{_n(fr.w)}" height="{_n(fr.h)}" fill="#fff"/>']
    if dom is not None:
        out += [_component_path(c, fr, window) for c in dom.components]
    for ov in overlays:
        if "curve" in ov:
            pts = " ".join(fr.xy(complex(p)) for p in ov["curve"])
            out.append(f'<polyline points="{pts}" fill="none" stroke="{ov.get("color", "#c00")}"/>')
        elif "cigar" in ov:
            pts, radii = ov["cigar"]
            out.append('<g fill="#06c" fill-opacity="0.15">')
            for p, r in zip(pts, radii):
                q = complex(p)
                out.append(f'<circle cx="{fr.xy(q).split(",")[0]}" cy="{fr.xy(q).split(",")[1]}" r="{_n(r * fr.s)}"/>')
            out.append("</g>")
        elif "circle" in ov:
            c, r = ov["circle"]
            q = complex(c)
            x, y = fr.xy(q).split(",")
            out.append(f'<circle cx="{x}" cy="{y}" r="{_n(r * fr.s)}" fill="none" stroke="#080" stroke-dasharray="6 4"/>')
        else:
            raise ValueError(f"unknown overlay {sorted(ov)}")
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
