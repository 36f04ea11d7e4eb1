"""Discrete plane geometry: curves, winding numbers, hulls, regions, junctions, shadows.

Points are complex numbers. Curves are polygonal; regions wrap shapely
geometries (polygons for fat continua, line strings and points for thin
ones) or rasters for shadows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import shapely
from scipy import ndimage
from shapely.geometry import LineString, Point as _SPoint, Polygon
from shapely.ops import unary_union

from .errors import ArcEntersInterior, InputError, NoEscape, NotSimple, PointOnCurve

EPS_GEOM = 1e-9  # relative to curve diameter
RASTER_CELLS = 512


def cross(a, b):
    return (np.conj(a) * b).imag


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True, eq=False)
class PlaneCurve:
    """Polygonal arc (``closed=False``) or closed curve (``closed=True``).

    Closed curves do not repeat the first vertex at the end.
    """

    vertices: np.ndarray = field(repr=False)
    closed: bool = False

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=complex).ravel()
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise InputError("curve vertices must be finite")
        if self.closed and v.size > 1 and v[0] == v[-1]:
            v = v[:-1]
        if v.size < (3 if self.closed else 2):
            raise InputError("closed curves need >= 3 vertices, arcs >= 2")
        keep = np.ones(v.size, dtype=bool)
        keep[1:] = v[1:] != v[:-1]
        v = v[keep]
        if self.closed and v.size > 1 and v[0] == v[-1]:
            v = v[:-1]
        object.__setattr__(self, "vertices", v)

    @classmethod
    def circle(cls, radius=1.0, center=0j, n=256, start=0.0):
        t = start + 2 * np.pi * np.arange(n) / n
        return cls(center + radius * np.exp(1j * t), closed=True)

    @classmethod
    def arc_of_circle(cls, radius, center, t0, t1, n=128):
        t = np.linspace(t0, t1, n)
        return cls(center + radius * np.exp(1j * t), closed=False)

    @classmethod
    def polyline(cls, points, closed=False):
        pts = [complex(*p) if not isinstance(p, (complex, float, int)) else complex(p) for p in points]
        return cls(np.array(pts), closed=closed)

    @property
    def kind(self):
        return "closed" if self.closed else "open"

    def closed_vertices(self):
        """Vertex list with the first vertex repeated at the end if closed."""
        v = self.vertices
        return np.append(v, v[0]) if self.closed else v

    def segments(self):
        v = self.closed_vertices()
        return v[:-1], v[1:]

    @property
    def diameter(self):
        v = self.vertices
        return float(max(np.ptp(v.real), np.ptp(v.imag), 1e-300) * math.sqrt(2))

    @property
    def length(self):
        a, b = self.segments()
        return float(np.abs(b - a).sum())

    def eps(self, rel=EPS_GEOM):
        return rel * max(self.diameter, 1e-12)

    def reversed(self) -> "PlaneCurve":
        return PlaneCurve(self.vertices[::-1].copy(), self.closed)

    def rotated(self, k) -> "PlaneCurve":
        return PlaneCurve(np.roll(self.vertices, -k), self.closed)

    def refined(self, times=1) -> "PlaneCurve":
        v = self.vertices
        for _ in range(times):
            a, b = PlaneCurve(v, self.closed).segments()
            mid = (a + b) / 2
            out = np.empty(a.size * 2 + (0 if self.closed else 1), dtype=complex)
            out[0: 2 * a.size: 2] = a
            out[1: 2 * a.size: 2] = mid
            if not self.closed:
                out[-1] = v[-1]
            v = out
        return PlaneCurve(v, self.closed)

    def translated(self, w) -> "PlaneCurve":
        return PlaneCurve(self.vertices + w, self.closed)

    def signed_area(self):
        v = self.vertices
        w = np.roll(v, -1)
        return float(0.5 * cross(v, w).sum())

    def arclength_params(self):
        a, b = self.segments()
        return np.concatenate([[0.0], np.cumsum(np.abs(b - a))])

    def point_at(self, s):
        """Point at arc-length parameter ``s`` (wraps for closed curves)."""
        cum = self.arclength_params()
        v = self.closed_vertices()
        s = np.asarray(s, dtype=float)
        if self.closed:
            s = np.mod(s, cum[-1])
        s = np.clip(s, 0, cum[-1])
        k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, v.size - 2)
        seg = cum[k + 1] - cum[k]
        t = np.where(seg > 0, (s - cum[k]) / np.where(seg > 0, seg, 1), 0)
        return v[k] + t * (v[k + 1] - v[k])

    def resampled(self, n):
        """Curve with at least ``n`` vertices spaced by arc length, keeping corners."""
        cum = self.arclength_params()
        total = cum[-1]
        s = np.linspace(0, total, n, endpoint=self.closed is False)
        s = np.union1d(s, cum[:-1] if self.closed else cum)
        pts = self.point_at(s)
        return PlaneCurve(pts, self.closed)

    def subarc(self, s0, s1, n_min=2) -> "PlaneCurve":
        """Open sub-arc from arc-length s0 to s1 (s1 < s0 wraps on closed curves)."""
        cum = self.arclength_params()
        total = cum[-1]
        if self.closed and s1 <= s0:
            s1 += total
        inner = []
        for shift in ((0.0, total) if self.closed else (0.0,)):
            c = cum[:-1] + shift if self.closed else cum
            inner.extend(x for x in c if s0 < x < s1)
        s = np.array([s0] + sorted(inner) + [s1])
        if s.size < n_min:
            s = np.linspace(s0, s1, n_min)
        return PlaneCurve(self.point_at(s), closed=False)

    def to_shapely(self):
        xy = np.c_[self.vertices.real, self.vertices.imag]
        return Polygon(xy) if self.closed else LineString(xy)

    def to_json(self):
        return {"kind": self.kind, "vertices": [[float(z.real), float(z.imag)] for z in self.vertices]}

    @classmethod
    def from_json(cls, obj):
        try:
            kind = obj["kind"]
            verts = obj["vertices"]
            if kind not in ("open", "closed"):
                raise InputError(f"unknown curve kind {kind!r}")
            pts = np.array([complex(float(x), float(y)) for x, y in verts])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed curve: {exc}") from exc
        return cls(pts, closed=(kind == "closed"))


def _as_curve(c):
    if isinstance(c, PlaneCurve):
        return c
    return PlaneCurve(np.asarray(c, dtype=complex), closed=True)


def segment_distance(p, a, b):
    """Distance from points ``p`` (shape (m,)) to segments a->b (shape (n,)); returns (m, n)."""
    p = np.asarray(p, dtype=complex)[:, None]
    a = np.asarray(a, dtype=complex)[None, :]
    d = np.asarray(b, dtype=complex)[None, :] - a
    dd = np.abs(d) ** 2
    t = np.where(dd > 0, ((np.conj(d) * (p - a)).real) / np.where(dd > 0, dd, 1), 0)
    t = np.clip(t, 0, 1)
    return np.abs(p - (a + t * d))


def distance_to_curve(curve: PlaneCurve, p):
    a, b = curve.segments()
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    out = np.empty(p.size)
    for i0 in range(0, p.size, 2048):
        out[i0:i0 + 2048] = segment_distance(p[i0:i0 + 2048], a, b).min(axis=1)
    return out


def angle_increments(values):
    """Signed angle from each value to the next (closed sequence)."""
    w = np.roll(values, -1)
    return np.angle(w * np.conj(values))


def winding_number(curve, w, eps=None, max_angle=math.pi / 2, max_vertices=1 << 20) -> int:
    """Winding number of a closed polygonal curve about ``w``.

    Angle increments are accumulated along the curve; any segment whose
    increment is not below ``max_angle`` is bisected until all are, so the
    rounded total is exact.
    """
    curve = _as_curve(curve)
    w = complex(w)
    if eps is None:
        eps = curve.eps()
    if distance_to_curve(curve, w).min() <= eps:
        raise PointOnCurve(f"point {w} within {eps:g} of the curve")
    v = curve.vertices
    while True:
        rel = v - w
        inc = angle_increments(rel)
        bad = np.abs(inc) >= max_angle
        if not bad.any():
            break
        if v.size > max_vertices:
            raise PointOnCurve("angle refinement did not converge")
        nxt = np.roll(v, -1)
        mids = (v[bad] + nxt[bad]) / 2
        idx = np.nonzero(bad)[0] + 1
        v = np.insert(v, idx, mids)
    return int(round(inc.sum() / (2 * math.pi)))


def _orient(a, b, c):
    return cross(b - a, c - a)


def segments_intersect(a1, b1, a2, b2, tol=0.0):
    """Vectorised closed-segment intersection test (collinear overlaps count)."""
    o1 = _orient(a1, b1, a2)
    o2 = _orient(a1, b1, b2)
    o3 = _orient(a2, b2, a1)
    o4 = _orient(a2, b2, b1)
    proper = (np.sign(o1) * np.sign(o2) < 0) & (np.sign(o3) * np.sign(o4) < 0)

    def on_seg(a, b, p, o):
        return (np.abs(o) <= tol) & (np.minimum(a.real, b.real) - tol <= p.real) & (
            p.real <= np.maximum(a.real, b.real) + tol) & (np.minimum(a.imag, b.imag) - tol <= p.imag) & (
            p.imag <= np.maximum(a.imag, b.imag) + tol)

    touch = on_seg(a1, b1, a2, o1) | on_seg(a1, b1, b2, o2) | on_seg(a2, b2, a1, o3) | on_seg(a2, b2, b1, o4)
    return proper | touch


def is_simple(curve: PlaneCurve) -> bool:
    """Segment-pair scan; adjacent segments may only share their common vertex."""
    a, b = curve.segments()
    n = a.size
    tol = 1e-14 * curve.diameter ** 2
    for i0 in range(0, n, 512):
        ai, bi = a[i0:i0 + 512, None], b[i0:i0 + 512, None]
        hit = segments_intersect(ai, bi, a[None, :], b[None, :], tol)
        I = np.arange(i0, min(i0 + 512, n))[:, None]
        J = np.arange(n)[None, :]
        adjacent = (np.abs(I - J) <= 1)
        if curve.closed:
            adjacent |= (np.abs(I - J) == n - 1)
        hit &= ~adjacent & (J > I)
        if hit.any():
            return False
    return True


def in_hull(curve: PlaneCurve, p, eps=None) -> bool:
    """True when ``p`` lies in the topological hull of the simple closed ``curve``."""
    curve = _as_curve(curve)
    if not is_simple(curve):
        raise NotSimple("curve has a self-intersection")
    if eps is None:
        eps = curve.eps()
    if distance_to_curve(curve, p).min() <= eps:
        return True
    return winding_number(curve, p, eps) != 0


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True, eq=False)
class Raster:
    """Occupancy grid; cell (j, i) is centred at ``origin + h*(i + 1j*j)``."""

    origin: complex
    h: float
    mask: np.ndarray = field(repr=False)

    @property
    def shape(self):
        return self.mask.shape

    def centers(self):
        ny, nx = self.mask.shape
        xs = self.origin.real + self.h * np.arange(nx)
        ys = self.origin.imag + self.h * np.arange(ny)
        return xs[None, :] + 1j * ys[:, None]

    def index(self, p):
        p = np.asarray(p, dtype=complex)
        i = np.rint((p.real - self.origin.real) / self.h).astype(int)
        j = np.rint((p.imag - self.origin.imag) / self.h).astype(int)
        return j, i

    def contains(self, p):
        j, i = self.index(p)
        ny, nx = self.mask.shape
        ok = (i >= 0) & (i < nx) & (j >= 0) & (j < ny)
        out = np.zeros(np.shape(p), dtype=bool)
        out[ok] = self.mask[j[ok], i[ok]]
        return out

    @property
    def empty(self):
        return not self.mask.any()

    def diameter(self):
        if self.empty:
            return 0.0
        pts = self.centers()[self.mask]
        return float(math.hypot(np.ptp(pts.real), np.ptp(pts.imag)))


class Region:
    """A plane continuum modelled by a shapely geometry.

    Polygons stand for fat continua (their hulls), line strings for arcs,
    points for degenerate continua. ``tol`` is the membership tolerance.
    """

    def __init__(self, geom, tol=None, name=""):
        if geom.is_empty:
            raise InputError("empty region")
        self.geom = geom
        self.name = name
        minx, miny, maxx, maxy = geom.bounds
        self.diam = float(math.hypot(maxx - minx, maxy - miny))
        self.tol = tol if tol is not None else 1e-9 * max(self.diam, 1.0)
        shapely.prepare(self.geom)

    # constructors
    @classmethod
    def disk(cls, radius=1.0, center=0j, n=256, **kw):
        return cls.from_curve(PlaneCurve.circle(radius, center, n), **kw)

    @classmethod
    def segment(cls, a, b, **kw):
        a, b = complex(a), complex(b)
        return cls(LineString([(a.real, a.imag), (b.real, b.imag)]), **kw)

    @classmethod
    def box(cls, xmin, xmax, ymin, ymax, **kw):
        return cls(Polygon([(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)]), **kw)

    @classmethod
    def point(cls, p, **kw):
        p = complex(p)
        return cls(_SPoint(p.real, p.imag), **kw)

    @classmethod
    def from_curve(cls, curve: PlaneCurve, filled=True, **kw):
        if curve.closed and filled:
            return cls(Polygon(np.c_[curve.vertices.real, curve.vertices.imag]), **kw)
        v = curve.closed_vertices()
        return cls(LineString(np.c_[v.real, v.imag]), **kw)

    @classmethod
    def union(cls, regions, **kw):
        return cls(unary_union([r.geom for r in regions]), **kw)

    # queries
    @property
    def bounds(self):
        return self.geom.bounds

    @property
    def is_point(self):
        return self.diam <= self.tol

    def distance(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=complex))
        return shapely.distance(self.geom, shapely.points(p.real, p.imag))

    def contains(self, p, tol=None):
        tol = self.tol if tol is None else tol
        p = np.asarray(p, dtype=complex)
        flat = np.atleast_1d(p).ravel()
        inside = shapely.contains_xy(self.geom, flat.real, flat.imag)
        rest = ~inside
        if rest.any():
            inside[rest] = self.distance(flat[rest]) <= tol
        return inside.reshape(np.shape(p)) if np.ndim(p) else bool(inside[0])

    def interior_contains(self, p, margin):
        """Points inside the fat part at distance > margin from the boundary."""
        p = np.atleast_1d(np.asarray(p, dtype=complex))
        inside = shapely.contains_xy(self.geom, p.real, p.imag)
        if not inside.any():
            return inside
        d = shapely.distance(self.geom.boundary, shapely.points(p.real, p.imag))
        return inside & (d > margin)

    def boundary_samples(self, n=1024):
        b = self.geom if self.geom.geom_type in ("LineString", "Point", "MultiPoint") else self.geom.boundary
        if b.geom_type == "Point":
            return np.array([complex(b.x, b.y)])
        if b.geom_type == "MultiPoint":
            return np.array([complex(q.x, q.y) for q in b.geoms])
        L = b.length
        if L == 0:
            c = b.centroid
            return np.array([complex(c.x, c.y)])
        d = np.linspace(0, L, n)
        pts = shapely.line_interpolate_point(b, d) if b.geom_type == "LineString" else [
            b.interpolate(x) for x in d]
        return np.array([complex(q.x, q.y) for q in pts])

    def samples(self, n_boundary=1024, n_grid=64):
        """Boundary points plus interior grid points of the fat part."""
        pts = [self.boundary_samples(n_boundary)]
        if self.geom.area > 0:
            minx, miny, maxx, maxy = self.geom.bounds
            xs = np.linspace(minx, maxx, n_grid)
            ys = np.linspace(miny, maxy, n_grid)
            Z = (xs[None, :] + 1j * ys[:, None]).ravel()
            pts.append(Z[shapely.contains_xy(self.geom, Z.real, Z.imag)])
        return np.concatenate(pts)

    def is_connected(self):
        return self.geom.geom_type in ("Point", "LineString", "Polygon", "LinearRing")

    def is_separating(self, cells=256):
        """Whether the complement has a bounded component (raster check)."""
        if self.is_point:
            return False
        if self.geom.geom_type == "Polygon":
            return len(self.geom.interiors) > 0
        grid = RasterGrid.around([self], cells=cells)
        free = ~grid.rasterize(self.geom)
        lab, n = ndimage.label(free)
        border = set(np.unique(np.concatenate([lab[0], lab[-1], lab[:, 0], lab[:, -1]]))) - {0}
        return n > len(border)

    def intersection(self, other: "Region"):
        g = self.geom.intersection(other.geom)
        if g.is_empty:
            return None
        return Region(g, tol=max(self.tol, other.tol))

    def to_json(self):
        return region_to_json(self)


def region_to_json(r: Region):
    g = r.geom
    if g.geom_type == "Point":
        return {"type": "point", "at": [g.x, g.y]}
    if g.geom_type == "LineString":
        return {"type": "polyline", "vertices": [list(c) for c in g.coords]}
    if g.geom_type == "Polygon":
        return {"type": "polygon", "vertices": [list(c) for c in g.exterior.coords[:-1]]}
    return {"type": "wkt", "wkt": g.wkt}


def region_from_json(obj) -> Region:
    try:
        t = obj["type"]
        if t == "point":
            return Region.point(complex(*obj["at"]))
        if t == "segment":
            return Region.segment(complex(*obj["from"]), complex(*obj["to"]))
        if t == "polyline":
            return Region(LineString([tuple(map(float, p)) for p in obj["vertices"]]))
        if t == "polygon":
            return Region(Polygon([tuple(map(float, p)) for p in obj["vertices"]]))
        if t == "disk":
            return Region.disk(float(obj["radius"]), complex(*obj.get("center", [0, 0])), int(obj.get("n", 256)))
        if t == "circle":
            c = PlaneCurve.circle(float(obj["radius"]), complex(*obj.get("center", [0, 0])), int(obj.get("n", 256)))
            return Region.from_curve(c, filled=False)
        if t == "box":
            return Region.box(*map(float, obj["bounds"]))
        if t == "wkt":
            return Region(shapely.from_wkt(obj["wkt"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed region: {exc}") from exc
    raise InputError(f"unknown region type {obj.get('type')!r}")


class RasterGrid:
    """Regular grid used to rasterize regions and curves consistently."""

    def __init__(self, origin, h, nx, ny):
        self.origin, self.h, self.nx, self.ny = complex(origin), float(h), int(nx), int(ny)

    @classmethod
    def around(cls, things, cells=RASTER_CELLS, margin_cells=4, h=None):
        boxes = []
        for t in things:
            if isinstance(t, Region):
                boxes.append(t.bounds)
            else:
                v = t.vertices if isinstance(t, PlaneCurve) else np.asarray(t, dtype=complex)
                boxes.append((v.real.min(), v.imag.min(), v.real.max(), v.imag.max()))
        b = np.array(boxes)
        minx, miny = b[:, 0].min(), b[:, 1].min()
        maxx, maxy = b[:, 2].max(), b[:, 3].max()
        diam = max(maxx - minx, maxy - miny, 1e-9)
        if h is None:
            h = diam / cells
        nx = int(math.ceil((maxx - minx) / h)) + 2 * margin_cells + 1
        ny = int(math.ceil((maxy - miny) / h)) + 2 * margin_cells + 1
        origin = complex(minx - margin_cells * h, miny - margin_cells * h)
        return cls(origin, h, nx, ny)

    def centers(self):
        xs = self.origin.real + self.h * np.arange(self.nx)
        ys = self.origin.imag + self.h * np.arange(self.ny)
        return xs[None, :] + 1j * ys[:, None]

    def raster(self, mask):
        return Raster(self.origin, self.h, mask)

    def mark_polyline(self, mask, pts):
        """Mark the cells met by a polyline (sampled densely so cells are 8-connected)."""
        pts = np.asarray(pts, dtype=complex)
        if pts.size == 1:
            seq = pts
        else:
            a, b = pts[:-1], pts[1:]
            n = np.maximum(2, np.ceil(np.abs(b - a) / (self.h / 3)).astype(int) + 1)
            seq = np.concatenate([a[k] + (b[k] - a[k]) * np.linspace(0, 1, n[k]) for k in range(a.size)])
        i = np.rint((seq.real - self.origin.real) / self.h).astype(int)
        j = np.rint((seq.imag - self.origin.imag) / self.h).astype(int)
        ok = (i >= 0) & (i < self.nx) & (j >= 0) & (j < self.ny)
        mask[j[ok], i[ok]] = True
        return mask

    def rasterize(self, geom):
        mask = np.zeros((self.ny, self.nx), dtype=bool)
        if isinstance(geom, PlaneCurve):
            return self.mark_polyline(mask, geom.closed_vertices())
        for g in getattr(geom, "geoms", [geom]):
            if g.geom_type == "Polygon":
                Z = self.centers()
                mask |= shapely.contains_xy(g, Z.real, Z.imag)
                for ring in [g.exterior, *g.interiors]:
                    c = np.asarray(ring.coords)
                    self.mark_polyline(mask, c[:, 0] + 1j * c[:, 1])
            elif g.geom_type in ("LineString", "LinearRing"):
                c = np.asarray(g.coords)
                self.mark_polyline(mask, c[:, 0] + 1j * c[:, 1])
            elif g.geom_type == "Point":
                self.mark_polyline(mask, np.array([complex(g.x, g.y)]))
            else:
                mask |= self.rasterize(g)
        return mask


def unbounded_component(obstacle_mask):
    """Boolean mask of the free cells connected to the grid border (4-connectivity)."""
    lab, _ = ndimage.label(~obstacle_mask)
    border = np.unique(np.concatenate([lab[0], lab[-1], lab[:, 0], lab[:, -1]]))
    border = border[border > 0]
    return np.isin(lab, border)


def _geom_of(obj):
    if isinstance(obj, Region):
        return obj.geom
    if isinstance(obj, PlaneCurve):
        v = obj.closed_vertices()
        if obj.closed:
            return Polygon(np.c_[obj.vertices.real, obj.vertices.imag])
        return LineString(np.c_[v.real, v.imag])
    return obj


def shadow(X: Region, A: PlaneCurve, h=None, cells=RASTER_CELLS) -> Raster:
    """Union of the bounded components of the complement of X ∪ A, rasterized."""
    margin = 1e-6 * max(X.diam, A.diameter)
    inner = A.vertices[1:-1] if A.vertices.size > 2 else (A.vertices[:1] + A.vertices[1:]) / 2
    ends = A.vertices[[0, -1]]
    far_from_ends = np.abs(inner[:, None] - ends[None, :]).min(axis=1) > 10 * margin
    if far_from_ends.any() and X.interior_contains(inner[far_from_ends], margin).any():
        raise ArcEntersInterior("arc crosses into the interior of X")
    grid = RasterGrid.around([X, A], cells=cells, h=h)
    obst = grid.rasterize(X.geom) | grid.rasterize(A)
    free = ~obst
    outside = unbounded_component(obst)
    return grid.raster(free & ~outside)


def crosses_essentially(X: Region, A: PlaneCurve, R: PlaneCurve, h=None, cells=RASTER_CELLS) -> bool:
    """Whether a ray R landing on X has a terminal sub-arc inside Sh(A).

    R is an open polyline ordered from far away to its landing point.
    """
    sh = shadow(X, A, h=h, cells=cells)
    if sh.empty:
        return False
    land = R.vertices[-1]
    rev = PlaneCurve(R.vertices[::-1], closed=False)
    s = np.arange(2.5, 12.5, 0.5) * sh.h
    s = s[s < rev.length]
    pts = rev.point_at(s)
    return bool(sh.contains(pts).all()) and np.abs(pts - land).min() > 0


# ---------------------------------------------------------------------------
# junctions


@dataclass(frozen=True, eq=False)
class Junction:
    """Three polygonal rays from ``vertex``; the last segment of each ray is a half-line.

    Counter-clockwise order around the vertex is (R+, Ri, R-); obstacles lie in
    the sector running counter-clockwise from R- back to R+.
    """

    vertex: complex
    ray_plus: PlaneCurve
    ray_i: PlaneCurve
    ray_minus: PlaneCurve
    heading: float = 0.0
    spread: float = math.pi / 6

    def rays(self):
        return {"+": self.ray_plus, "i": self.ray_i, "-": self.ray_minus}

    def translated(self, w):
        return Junction(self.vertex + w, self.ray_plus.translated(w), self.ray_i.translated(w),
                        self.ray_minus.translated(w), self.heading, self.spread)

    def to_json(self):
        return {"vertex": [self.vertex.real, self.vertex.imag],
                "ray_plus": self.ray_plus.to_json(), "ray_i": self.ray_i.to_json(),
                "ray_minus": self.ray_minus.to_json()}


def ray_hits(points, ray: PlaneCurve):
    """Crossings of the polyline through ``points`` with a ray (last segment unbounded).

    Returns (segment_index, t) pairs with t in [0, 1) the position along the
    polyline segment, sorted along the polyline.
    """
    p = np.asarray(points, dtype=complex)
    a, r = p[:-1], p[1:] - p[:-1]
    rv = ray.vertices
    hits_k, hits_t = [], []
    nseg = rv.size - 1
    for m in range(nseg):
        q, s = rv[m], rv[m + 1] - rv[m]
        den = cross(r, s)
        ok = den != 0
        safe = np.where(ok, den, 1)
        t = cross(q - a, s) / safe
        u = cross(q - a, r) / safe
        last = m == nseg - 1
        good = ok & (t >= 0) & (t < 1) & (u >= 0) & ((u <= 1) if not last else True)
        if m > 0:
            good &= u > 0
        k = np.nonzero(good)[0]
        hits_k.append(k)
        hits_t.append(t[k])
    k = np.concatenate(hits_k) if hits_k else np.array([], int)
    t = np.concatenate(hits_t) if hits_t else np.array([])
    order = np.lexsort((t, k))
    return k[order], t[order]


def _ray_geoms(rays, reach):
    out = []
    for ray in rays:
        v = ray.vertices.copy()
        d = v[-1] - v[-2]
        v = np.append(v[:-1], v[-2] + d / abs(d) * reach)
        out.append(LineString(np.c_[v.real, v.imag]))
    return out


def _touches_only_at(geom_a, geom_b, v, tol):
    inter = geom_a.intersection(geom_b)
    if inter.is_empty:
        return True
    return shapely.hausdorff_distance(inter, _SPoint(v.real, v.imag)) <= tol


def _sector_polygon(r1, r2, reach):
    a = r1.vertices.copy()
    b = r2.vertices.copy()
    fa = a[-2] + (a[-1] - a[-2]) / abs(a[-1] - a[-2]) * reach
    fb = b[-2] + (b[-1] - b[-2]) / abs(b[-1] - b[-2]) * reach
    ring = np.concatenate([a[:-1], [fa, fb], b[-2:0:-1]])
    return Polygon(np.c_[ring.real, ring.imag]).buffer(0)


def _candidate_junctions(v, heading, spreads, reach, stubs):
    # straight rays first, then two-leg rays with axis-aligned escape legs
    for dh in np.deg2rad(np.r_[0, np.ravel(np.c_[np.arange(5, 91, 5), -np.arange(5, 91, 5)])]):
        th = heading + dh
        for sp in spreads:
            dirs = [th - sp, th, th + sp]
            rays = [PlaneCurve(np.array([v, v + reach * np.exp(1j * d)])) for d in dirs]
            yield th, sp, rays
    escapes = np.deg2rad(np.arange(0, 360, 45))
    for stub in stubs:
        for dh in np.deg2rad(np.r_[0, 30, -30, 60, -60, 90, -90]):
            th = heading + dh
            for sp in spreads:
                ends = [v + stub * np.exp(1j * (th + s)) for s in (-sp, 0, sp)]
                for esc in sorted(escapes, key=lambda e: abs(np.angle(np.exp(1j * (e - th))))):
                    w = np.exp(1j * esc)
                    rays = [PlaneCurve(np.array([v, e, e + reach * w])) for e in ends]
                    yield th, sp, rays


def connected_to_infinity(v, obstacles, cells=256) -> bool:
    """Flood-fill oracle: is ``v`` adjacent to the unbounded complementary component?"""
    regs = [o if isinstance(o, Region) else Region(_geom_of(o)) for o in obstacles]
    grid = RasterGrid.around(regs + [Region.point(v)], cells=cells)
    obst = np.zeros((grid.ny, grid.nx), dtype=bool)
    for r in regs:
        obst |= grid.rasterize(r.geom)
    out = unbounded_component(obst)
    j, i = np.rint(((v - grid.origin).imag) / grid.h).astype(int), np.rint(((v - grid.origin).real) / grid.h).astype(int)
    return bool(out[max(j - 2, 0): j + 3, max(i - 2, 0): i + 3].any())


def build_junction(v, heading, obstacles: Sequence, spreads=(math.pi / 6, math.pi / 12, math.pi / 24),
                   tol=None) -> Junction:
    """Three rays from ``v`` meeting the obstacle union only at ``v``.

    The middle ray Ri leaves along ``heading`` when possible; otherwise nearby
    headings are tried, then two-leg rays with axis-aligned escape legs.
    """
    v = complex(v)
    geoms = [_geom_of(o) for o in obstacles]
    union = unary_union(geoms)
    minx, miny, maxx, maxy = union.bounds
    extent = max(abs(complex(x, y) - v) for x in (minx, maxx) for y in (miny, maxy))
    reach = 4 * extent + 10.0
    if tol is None:
        tol = 1e-9 * max(extent, 1.0)
    pv = _SPoint(v.real, v.imag)
    for g in getattr(union, "geoms", [union]):
        if g.geom_type == "Polygon" and g.contains(pv) and g.exterior.distance(pv) > tol and all(
                h.distance(pv) > tol for h in g.interiors):
            raise NoEscape("vertex is interior to an obstacle")
    if not connected_to_infinity(v, obstacles):
        raise NoEscape("vertex is not on the boundary of the unbounded complementary component")
    d_obst = max(union.distance(pv), 0.0)
    others = union.difference(pv.buffer(tol * 10)) if d_obst <= tol else union
    clearance = others.distance(pv) if not others.is_empty else extent
    stubs = [s for s in (0.5 * clearance, 0.25 * clearance, 0.1 * clearance) if s > 10 * tol] or [extent * 1e-3]
    rep = shapely.get_coordinates(others if not others.is_empty else union)
    rep = rep[:: max(1, len(rep) // 64)]
    rep = rep[:, 0] + 1j * rep[:, 1]
    rep = rep[np.abs(rep - v) > 100 * tol]
    for th, sp, rays in _candidate_junctions(v, heading, spreads, reach, stubs):
        lines = _ray_geoms(rays, reach)
        if not all(_touches_only_at(ln, union, v, tol * 10) for ln in lines):
            continue
        if not all(_touches_only_at(lines[i], lines[j], v, tol * 10) for i, j in ((0, 1), (1, 2), (0, 2))):
            continue
        # obstacles must lie in the sector from R- around to R+
        s1 = _sector_polygon(rays[0], rays[1], reach * 0.9)
        s2 = _sector_polygon(rays[1], rays[2], reach * 0.9)
        if rep.size and (shapely.contains_xy(s1, rep.real, rep.imag).any()
                         or shapely.contains_xy(s2, rep.real, rep.imag).any()):
            continue
        return Junction(v, rays[0], rays[1], rays[2], float(th), float(sp))
    raise NoEscape("no admissible junction found by the greedy router")
