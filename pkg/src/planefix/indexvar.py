"""Degree of a map on a curve, fixed-point index, variation on arcs, and the
index/variation identity on allowable partitions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.geometry import LineString, MultiLineString
from shapely.geometry import Point as _SPoint
from shapely.ops import unary_union

from .errors import (CannotCloseArc, FixedPointOnCurve, ImageHitsBasepoint, JunctionTouchesImageOfEndpoints,
                     NoEscape, NoPartition, PreconditionViolated)
from .geometry import (EPS_GEOM, Junction, PlaneCurve, Region, angle_increments, build_junction,
                       distance_to_curve, ray_hits)
from .maps import as_map

MAX_POINTS = 1 << 20
MIN_SAMPLES = 256


def _orient_ccw(S: PlaneCurve) -> PlaneCurve:
    return S if S.signed_area() > 0 else S.reversed()


def _degree(func, S: PlaneCurve, tol, err, max_points=MAX_POINTS):
    """Degree of z -> func(z)/|func(z)| along the closed curve S."""
    z = S.resampled(MIN_SAMPLES).vertices if S.vertices.size < MIN_SAMPLES else S.vertices
    val = func(z)
    while True:
        if np.abs(val).min() <= tol:
            raise err(f"image comes within {np.abs(val).min():.3g} of the base point (tolerance {tol:.3g})")
        inc = angle_increments(val)
        bad = np.abs(inc) >= math.pi / 2
        if not bad.any():
            return int(round(inc.sum() / (2 * math.pi)))
        if z.size > max_points:
            raise err("angle refinement exceeded the point budget")
        nxt = np.roll(z, -1)
        mid = (z[bad] + nxt[bad]) / 2
        idx = np.nonzero(bad)[0] + 1
        z = np.insert(z, idx, mid)
        val = np.insert(val, idx, func(mid))


def map_degree(f, S: PlaneCurve, w=0j, eps=None) -> int:
    """Winding number of f(S) about w, S traversed in its stored order."""
    f = as_map(f)
    w = complex(w)
    tol = S.eps() if eps is None else eps
    return _degree(lambda z: f(z) - w, S, tol, ImageHitsBasepoint)


def fixed_point_index(f, S: PlaneCurve, eps=None) -> int:
    """Degree of the displacement direction (f(z) - z)/|f(z) - z| along S."""
    f = as_map(f)
    tol = S.eps() if eps is None else eps
    return _degree(f.displacement, S, tol, FixedPointOnCurve)


# ---------------------------------------------------------------------------
# variation


@dataclass
class VariationReport:
    link: PlaneCurve
    junction: Junction
    crossings: list  # [(position along A, ray label, sign)]
    total: int
    tolerances: dict = field(default_factory=dict)
    samples: int = 0

    def to_json(self):
        return {
            "link": self.link.to_json(),
            "junction": self.junction.to_json(),
            "crossings": [{"s": round(float(s), 12), "ray": lab, "sign": int(sg)} for s, lab, sg in self.crossings],
            "total": int(self.total),
            "tolerances": self.tolerances,
            "samples": int(self.samples),
        }


def outward_junction(A: PlaneCurve, X: Region, s=None, spreads=None):
    """Junction at arc-length ``s`` of A (default midpoint) heading to the right of A.

    A bumping arc traversed in the positive direction of its bumping curve has
    X on its left, so the right normal points away from X.
    """
    L = A.length
    s = L / 2 if s is None else s
    v = complex(A.point_at(s))
    h = max(L * 1e-4, A.eps() * 1e3)
    t = complex(A.point_at(min(s + h, L))) - complex(A.point_at(max(s - h, 0)))
    heading = float(np.angle(t * -1j))
    kw = {} if spreads is None else {"spreads": spreads}
    return build_junction(v, heading, [X, A], **kw)


def _junction_geom(J: Junction, reach):
    lines = []
    for ray in J.rays().values():
        v = ray.vertices.copy()
        d = v[-1] - v[-2]
        v[-1] = v[-2] + d / abs(d) * reach
        lines.append(np.c_[v.real, v.imag])
    return MultiLineString(lines)


def _check_junction(J: Junction, X: Region, A: PlaneCurve, tol):
    reach = 10 * (X.diam + A.diameter) + 10
    g = _junction_geom(J, reach)
    for obst in (X.geom, A.to_shapely()):
        inter = g.intersection(obst)
        if not inter.is_empty and shapely.hausdorff_distance(inter, _SPoint(J.vertex.real, J.vertex.imag)) > tol:
            raise PreconditionViolated("junction", "junction meets X or A away from its vertex")
    if A.to_shapely().distance(_SPoint(J.vertex.real, J.vertex.imag)) > tol:
        raise PreconditionViolated("junction", "junction vertex is not on A")


def _sample_image(f, A: PlaneCurve, Jgeom, floor, max_points=MAX_POINTS // 4):
    """Adaptive samples of A whose image segments cannot skip over the junction.

    A segment is split while its image is longer than half its distance to J
    (and longer than ``floor``).
    """
    z = A.resampled(1024).vertices
    w = f(z)
    while True:
        d = shapely.distance(Jgeom, shapely.points(w.real, w.imag))
        seg = np.abs(np.diff(w))
        need = np.minimum(d[:-1], d[1:])
        bad = (seg > np.maximum(0.5 * need, floor))
        if not bad.any() or z.size > max_points:
            return z, w, bool(bad.any())
        mid = (z[:-1][bad] + z[1:][bad]) / 2
        idx = np.nonzero(bad)[0] + 1
        z = np.insert(z, idx, mid)
        w = np.insert(w, idx, f(mid))


def _check_preconditions(f, A, X, eps):
    a, b = A.vertices[0], A.vertices[-1]
    if not X.contains(np.array([a, b]), eps).all():
        raise PreconditionViolated("endpoints-in-X", "endpoints of A must lie in X")
    fa, fb = f(np.array([a, b]))
    if not X.contains(np.array([fa, fb]), eps).all():
        raise PreconditionViolated("image-endpoints-in-X", "f(a) and f(b) must lie in X")
    z = A.resampled(2048).vertices
    w = f(z)
    if distance_to_curve(A, w).min() <= eps or LineString(np.c_[w.real, w.imag]).intersects(A.to_shapely()):
        raise PreconditionViolated("image-disjoint", "f(A) meets A")
    return fa, fb


def _crossing_sequence(z, w, J: Junction, tol):
    """Ordered junction hits of the image polyline; hits at the vertex count as Ri."""
    s = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(z)))])
    events = []
    for lab, ray in J.rays().items():
        k, t = ray_hits(w, ray)
        for kk, tt in zip(k, t):
            pos = s[kk] + tt * (s[kk + 1] - s[kk])
            p = w[kk] + tt * (w[kk + 1] - w[kk])
            events.append((pos, "i" if abs(p - J.vertex) <= tol else lab))
    events.sort(key=lambda e: (e[0], e[1]))
    merged = []
    for pos, lab in events:
        if merged and abs(pos - merged[-1][0]) <= tol and (lab == "i" or merged[-1][1] == "i"):
            merged[-1] = (merged[-1][0], "i")
            continue
        merged.append((pos, lab))
    return merged


def _count(seq):
    out = []
    for (p0, l0), (p1, l1) in zip(seq, seq[1:]):
        if l0 == "+" and l1 == "i":
            out.append((p1, "+i", 1))
        elif l0 == "i" and l1 == "+":
            out.append((p1, "i+", -1))
    return out


def variation(f, A: PlaneCurve, X: Region, J: Junction | None = None, eps=None) -> VariationReport:
    """Signed count of R+ -> Ri (+1) and Ri -> R+ (-1) transitions of f(A) across J."""
    f = as_map(f)
    eps = EPS_GEOM * max(A.diameter, X.diam) if eps is None else eps
    fa, fb = _check_preconditions(f, A, X, eps)
    if J is None:
        try:
            J = outward_junction(A, X)
        except NoEscape as exc:
            raise PreconditionViolated("junction", str(exc)) from exc
    else:
        _check_junction(J, X, A, 10 * eps)
    reach = 10 * (X.diam + A.diameter + float(np.abs(f(A.vertices)).max())) + 10
    Jg = _junction_geom(J, reach)
    d_end = shapely.distance(Jg, shapely.points([fa.real, fb.real], [fa.imag, fb.imag]))
    if d_end.min() <= eps:
        # move the vertex slightly along A
        delta = 10 * eps
        L = A.length
        for s in (L / 2 + delta, L / 2 - delta, L / 2 + 100 * delta, L / 2 - 100 * delta):
            try:
                J2 = outward_junction(A, X, s)
            except NoEscape:
                continue
            Jg2 = _junction_geom(J2, reach)
            if shapely.distance(Jg2, shapely.points([fa.real, fb.real], [fa.imag, fb.imag])).min() > eps:
                J, Jg = J2, Jg2
                break
        else:
            raise JunctionTouchesImageOfEndpoints("f(a) or f(b) lies on the junction")
    floor = max(eps, 1e-7 * (A.diameter + X.diam))
    z, w, capped = _sample_image(f, A, Jg, floor)
    seq = _crossing_sequence(z, w, J, tol=max(eps, 1e-12))
    cr = _count(seq)
    return VariationReport(
        link=A, junction=J, crossings=cr, total=int(sum(c[2] for c in cr)),
        tolerances={"eps_geom": eps, "segment_floor": floor, "sampling_capped": capped},
        samples=int(z.size))


def variation_oracle(f, A: PlaneCurve, X: Region, J: Junction | None = None, eps=None) -> int:
    """Winding number of f along a bumping closed curve A ∪ I about the junction vertex.

    I hugs X, so whenever f(X) misses the junction, the winding number equals
    the variation of f on A.
    """
    f = as_map(f)
    eps = EPS_GEOM * max(A.diameter, X.diam) if eps is None else eps
    _check_preconditions(f, A, X, eps)
    if J is None:
        try:
            J = outward_junction(A, X)
        except NoEscape as exc:
            raise CannotCloseArc(str(exc)) from exc
    v = J.vertex
    scale = max(A.diameter, X.diam)
    reach = 10 * (scale + float(np.abs(f(A.vertices)).max())) + 10
    Jg = _junction_geom(J, reach)
    fx = f(X.samples(2048, 96))
    if shapely.distance(Jg, shapely.points(fx.real, fx.imag)).min() <= 1e-6 * scale:
        raise CannotCloseArc("f(X) meets the junction")
    Ag = A.to_shapely()
    answers = []
    for delta in scale * np.array([1e-3, 3e-4, 1e-4, 3e-5, 1e-5]):
        g = unary_union([X.geom.buffer(delta, quad_segs=32), Ag.buffer(delta, quad_segs=32)])
        if g.geom_type != "Polygon":
            continue
        ring = shapely.geometry.polygon.orient(g, 1.0).exterior
        c = np.asarray(ring.coords)[:-1]
        S = PlaneCurve(c[:, 0] + 1j * c[:, 1], closed=True).resampled(4096)
        zs = S.vertices
        far = shapely.distance(Ag, shapely.points(zs.real, zs.imag)) > 4 * delta
        wi = f(zs[far])
        if wi.size and shapely.distance(Jg, shapely.points(wi.real, wi.imag)).min() <= delta:
            continue
        try:
            answers.append(map_degree(f, S, v, eps=eps))
        except ImageHitsBasepoint:
            continue
        if len(answers) >= 2 and answers[-1] == answers[-2]:
            return answers[-1]
    raise CannotCloseArc("no tight return arc gave a stable winding number")


# ---------------------------------------------------------------------------
# allowable partitions and the identity


@dataclass
class AllowablePartition:
    curve: PlaneCurve
    params: list  # arc-length positions on the curve, increasing
    X: Region

    @property
    def points(self):
        return [complex(p) for p in self.curve.point_at(np.array(self.params))]

    def links(self):
        n = len(self.params)
        total = self.curve.length
        out = []
        for i in range(n):
            s0 = self.params[i]
            s1 = self.params[(i + 1) % n]
            if n == 1:
                s1 = s0 + total
            out.append(self.curve.subarc(s0, s1))
        return out

    def to_json(self):
        return {"points": [[p.real, p.imag] for p in self.points], "params": [float(s) for s in self.params]}


def _link_ok(f, Q: PlaneCurve, eps):
    z = Q.resampled(256).vertices
    w = f(z)
    if distance_to_curve(Q, w).min() <= eps:
        return False
    return not LineString(np.c_[w.real, w.imag]).intersects(Q.to_shapely())


def hull_region(S: PlaneCurve) -> Region:
    return Region.from_curve(_orient_ccw(S), name="hull")


def find_allowable_partition(f, S: PlaneCurve, X: Region | None = None, n0=8, max_depth=20,
                             eps=None) -> AllowablePartition:
    """Greedy refinement of a net of anchors on S ∩ X until every link moves off itself."""
    f = as_map(f)
    S = _orient_ccw(S)
    hull = X is None
    if hull:
        X = hull_region(S)
    eps = S.eps() if eps is None else eps
    total = S.length
    cum = S.arclength_params()
    if hull:
        pool = None
        cand = list(np.arange(n0) * total / n0)
    else:
        on = X.contains(S.vertices, eps)
        pool = np.array(sorted(cum[:-1][on]))
        cand = list(pool)

    def good_anchor(s):
        p = S.point_at(s)
        fp = complex(f(np.array([p]))[0])
        return abs(fp - p) > eps and bool(X.contains(np.array([fp]), eps)[0])

    anchors = [s for s in cand if good_anchor(s)]
    if not anchors:
        raise NoPartition("no anchor point on S ∩ X maps into X")

    def split(s0, s1, depth):
        Q = S.subarc(s0, s1)
        if _link_ok(f, Q, eps):
            return [s0]
        if depth >= max_depth:
            raise NoPartition(f"link [{s0:.6g}, {s1:.6g}] still meets its image after {max_depth} splits")
        if hull:
            tries = [s0 + (s1 - s0) * q for q in (0.5, 0.25, 0.75, 0.125, 0.875)]
        else:
            inside = pool[(pool > s0) & (pool < s1)] if s1 <= total else np.concatenate(
                [pool[pool > s0], pool[pool < s1 - total] + total])
            tries = sorted(inside, key=lambda s: abs(s - (s0 + s1) / 2))
        for m in tries:
            if good_anchor(m % total):
                return split(s0, m, depth + 1) + split(m, s1, depth + 1)
        raise NoPartition(f"no admissible anchor inside link [{s0:.6g}, {s1:.6g}]")

    out = []
    n = len(anchors)
    for i in range(n):
        s0 = anchors[i]
        s1 = anchors[(i + 1) % n] + (total if i == n - 1 else 0)
        out.extend(split(s0, s1, 0))
    params = sorted(float(s % total) for s in out)
    return AllowablePartition(S, params, X)


@dataclass
class FmotReport:
    index: int
    variation_sum: int
    holds: bool
    partition: AllowablePartition
    variations: list

    def to_json(self):
        return {
            "index": self.index,
            "variation_sum": self.variation_sum,
            "holds": self.holds,
            "partition": self.partition.to_json(),
            "variations": [r.total for r in self.variations],
            "status": "ok" if self.holds else "numerical-fault",
        }


def fmot_verify(f, S: PlaneCurve, X: Region | None = None, partition: AllowablePartition | None = None,
                eps=None) -> FmotReport:
    """Compute ind(f, S) and the variation sum over an allowable partition independently."""
    f = as_map(f)
    S = _orient_ccw(S)
    part = partition or find_allowable_partition(f, S, X, eps=eps)
    idx = fixed_point_index(f, S, eps)
    reps = [variation(f, Q, part.X, eps=eps) for Q in part.links()]
    vs = int(sum(r.total for r in reps))
    return FmotReport(idx, vs, idx == vs + 1, part, reps)
