"""Small deterministic SVG writer for curves, junctions, rays, laminations and trees."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np
import shapely
from shapely.geometry import LineString

RAY_STYLES = {
    "R+": 'stroke="#c0392b" stroke-width="{w}"',
    "Ri": 'stroke="#2c3e50" stroke-width="{w}" stroke-dasharray="{d1},{d2}"',
    "R-": 'stroke="#2471a3" stroke-width="{w}" stroke-dasharray="{d2},{d1},{d3},{d1}"',
}


def _n(x):
    x = float(x)
    s = f"{x:.5f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class Svg:
    """World coordinates with y up, mapped into a fixed pixel frame."""

    def __init__(self, bounds, size=640, pad=0.06):
        xmin, xmax, ymin, ymax = bounds
        w, h = max(xmax - xmin, 1e-9), max(ymax - ymin, 1e-9)
        m = pad * max(w, h)
        self.span = max(w, h) + 2 * m
        # centre the content in the square frame
        self.xmin = (xmin + xmax) / 2 - self.span / 2
        self.ymax = (ymin + ymax) / 2 + self.span / 2
        self.size = size
        self.k = size / self.span
        self.items = []
        self.stroke = 1.2

    def xy(self, z):
        return (z.real - self.xmin) * self.k, (self.ymax - z.imag) * self.k

    def polyline(self, pts, style='stroke="#000"', closed=False, width=None):
        pts = np.asarray(pts, dtype=complex)
        if pts.size == 0:
            return
        coords = " ".join(f"{_n(x)},{_n(y)}" for x, y in (self.xy(z) for z in pts))
        tag = "polygon" if closed else "polyline"
        w = self.stroke if width is None else width
        self.items.append(f'<{tag} points="{coords}" fill="none" stroke-width="{_n(w)}" {style}/>')

    def ray(self, pts, label):
        style = RAY_STYLES[label].format(w=_n(1.6), d1=6, d2=3, d3=1)
        pts = np.asarray(pts, dtype=complex)
        coords = " ".join(f"{_n(x)},{_n(y)}" for x, y in (self.xy(z) for z in pts))
        self.items.append(f'<polyline points="{coords}" fill="none" {style}/>')

    def dot(self, z, r=3.0, fill="#000"):
        x, y = self.xy(complex(z))
        self.items.append(f'<circle cx="{_n(x)}" cy="{_n(y)}" r="{_n(r)}" fill="{fill}"/>')

    def circle(self, center, radius, style='stroke="#000" fill="none"'):
        x, y = self.xy(complex(center))
        self.items.append(f'<circle cx="{_n(x)}" cy="{_n(y)}" r="{_n(radius * self.k)}" {style}/>')

    def segment(self, a, b, style='stroke="#000"'):
        x1, y1 = self.xy(complex(a))
        x2, y2 = self.xy(complex(b))
        self.items.append(f'<line x1="{_n(x1)}" y1="{_n(y1)}" x2="{_n(x2)}" y2="{_n(y2)}" {style}/>')

    def text(self, z, s, size=12, fill="#000"):
        x, y = self.xy(complex(z))
        self.items.append(f'<text x="{_n(x + 4)}" y="{_n(y - 4)}" font-family="monospace" font-size="{size}" '
                          f'fill="{fill}">{escape(str(s))}</text>')

    def render(self, title=""):
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.size}" height="{self.size}" '
                f'viewBox="0 0 {self.size} {self.size}">')
        t = f"<title>{escape(title)}</title>" if title else ""
        bg = f'<rect width="{self.size}" height="{self.size}" fill="#fff"/>'
        return "\n".join([head, t, bg, *self.items, "</svg>"]) + "\n"


def _bounds(*arrays):
    pts = np.concatenate([np.atleast_1d(np.asarray(a, dtype=complex)).ravel() for a in arrays if len(a)])
    pts = pts[np.isfinite(pts)]
    return float(pts.real.min()), float(pts.real.max()), float(pts.imag.min()), float(pts.imag.max())


def clip_polyline(pts, box):
    """Pieces of a polyline inside the rectangle (xmin, xmax, ymin, ymax)."""
    pts = np.asarray(pts, dtype=complex)
    if pts.size < 2:
        return [pts]
    xmin, xmax, ymin, ymax = box
    rect = shapely.box(xmin, ymin, xmax, ymax)
    g = LineString(np.c_[pts.real, pts.imag]).intersection(rect)
    out = []
    for part in getattr(g, "geoms", [g]):
        if part.geom_type == "LineString" and not part.is_empty:
            c = np.asarray(part.coords)
            out.append(c[:, 0] + 1j * c[:, 1])
    return out


def _grow(box, k):
    xmin, xmax, ymin, ymax = box
    m = k * max(xmax - xmin, ymax - ymin, 1e-9)
    return xmin - m, xmax + m, ymin - m, ymax + m


def variation_figure(curve, image, junction_rays, crossings, X=None, title="variation"):
    """curve: link C; image: samples of f(C); junction_rays: {label: pts}; crossings: [(z, sign)]."""
    base = [curve, image] + ([X] if X is not None and len(X) else [])
    box = _bounds(*base)
    svg = Svg(box)
    if X is not None and len(X):
        svg.polyline(X, 'stroke="#7f8c8d"', width=3.0)
    frame = _grow(box, 0.1)
    for lab in ("R+", "Ri", "R-"):
        for piece in clip_polyline(junction_rays[lab], frame):
            svg.ray(piece, lab)
    svg.polyline(curve, 'stroke="#000"', width=2.0)
    svg.polyline(image, 'stroke="#8e44ad"')
    for z, sign in crossings:
        svg.dot(z, 4.0, "#27ae60" if sign > 0 else "#e67e22")
        svg.text(z, "+1" if sign > 0 else "-1")
    return svg.render(title)


def curve_figure(curve, image, closed=True, title="index"):
    box = _bounds(curve, image)
    svg = Svg(box)
    svg.polyline(curve, 'stroke="#000"', closed=closed, width=2.0)
    svg.polyline(image, 'stroke="#8e44ad"', closed=closed)
    return svg.render(title)


def lamination_figure(chords, title="lamination"):
    """chords: list of (angle, angle) floats in turns."""
    svg = Svg((-1, 1, -1, 1))
    svg.circle(0, 1.0, 'stroke="#000" stroke-width="1.5" fill="none"')
    for a, b in chords:
        za = complex(math.cos(2 * math.pi * a), math.sin(2 * math.pi * a))
        zb = complex(math.cos(2 * math.pi * b), math.sin(2 * math.pi * b))
        svg.segment(za, zb, 'stroke="#c0392b" stroke-width="1.2"')
    return svg.render(title)


def tree_figure(vertices, edges, coords, marks=(), title="tree"):
    pts = [complex(*coords[v]) for v in vertices]
    svg = Svg(_bounds(pts))
    for a, b in edges:
        svg.segment(complex(*coords[a]), complex(*coords[b]), 'stroke="#000" stroke-width="1.5"')
    for v in vertices:
        svg.dot(complex(*coords[v]), 3.5)
        svg.text(complex(*coords[v]), v)
    for z, lab in marks:
        svg.dot(z, 3.0, "#c0392b")
        svg.text(z, lab, 10, "#c0392b")
    return svg.render(title)


def rays_figure(rays, landings, frame, title="rays"):
    """rays: list of (label, pts); frame: (xmin, xmax, ymin, ymax) of the picture."""
    svg = Svg(frame)
    for lab, pts in rays:
        for piece in clip_polyline(pts, frame):
            svg.polyline(piece, 'stroke="#2471a3"')
    for z in landings:
        svg.dot(z, 3.5, "#c0392b")
    for (lab, pts) in rays:
        if len(pts):
            svg.text(pts[-1], lab, 10)
    return svg.render(title)
