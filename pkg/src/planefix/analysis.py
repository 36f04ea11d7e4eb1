"""Map analysis: orientation sampling, fixed-point localisation and typing,
boundary scrambling, and the sufficient condition for repelling outside a
continuum."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.geometry import LineString
import shapely.ops
from shapely.ops import unary_union

from .errors import (BoundaryFixedPoint, ConfigInvalid, FixedPointOnCurve, HypothesisFailed, ImageHitsBasepoint,
                     InputError, NotIsolated, PlaneFixError, PreconditionViolated)
from .geometry import PlaneCurve, Region, build_junction, region_from_json
from .indexvar import fixed_point_index, map_degree, variation, variation_oracle
from .maps import PolyMap, as_map

ORIENTATION_NOTE = "sampling is a necessary-condition check only; confluence is not tested"


@dataclass
class OrientationReport:
    verdict: str
    degrees: list
    skipped: int
    note: str = ORIENTATION_NOTE

    def to_json(self):
        return {"verdict": self.verdict, "degrees": self.degrees, "skipped": self.skipped, "note": self.note}


def orientation_class(f, trials=16, seed=0, scale=1.0) -> OrientationReport:
    """Sample circles S and image points w = f(p), p inside S, and collect deg(f_w) on S."""
    if trials < 1:
        raise InputError("trials must be >= 1")
    f = as_map(f)
    rng = np.random.default_rng(seed)
    degrees, skipped = [], 0
    for _ in range(trials):
        c = complex(*rng.normal(size=2)) * scale * 0.5
        r = rng.uniform(0.2, 1.0) * scale
        S = PlaneCurve.circle(r, c, n=256)
        p = c + r * rng.uniform(0, 0.8) * np.exp(2j * np.pi * rng.uniform())
        w = complex(f(np.array([p]))[0])
        img = f(S.refined(2).vertices)
        span = max(float(np.ptp(img.real) + np.ptp(img.imag)), 1e-300)
        if np.abs(img - w).min() <= 1e-9 * span:
            skipped += 1
            continue
        try:
            degrees.append(map_degree(f, S, w, eps=1e-12 * span))
        except ImageHitsBasepoint:
            skipped += 1
    if degrees and all(d > 0 for d in degrees):
        verdict = "positive"
    elif degrees and all(d < 0 for d in degrees):
        verdict = "negative"
    else:
        verdict = "undetermined"
    return OrientationReport(verdict, degrees, skipped)


# ---------------------------------------------------------------------------
# local index and fixed points


def _poly_fixed_roots(f: PolyMap):
    c = f.fixed_point_polynomial()
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return None
    c = c[: nz[-1] + 1]
    if c.size < 2:
        return np.array([], dtype=complex)
    return np.roots(c[::-1])


def local_index(f, p, r0=None, max_halvings=30) -> int:
    """Index on circles of radius r, r/2, ... around p until two consecutive radii agree."""
    f = as_map(f)
    p = complex(p)
    if r0 is None:
        r0 = 0.1
        if isinstance(f, PolyMap) and f.degree >= 2:
            roots = _poly_fixed_roots(f)
            others = roots[np.abs(roots - p) > 1e-6] if roots is not None else []
            if len(others):
                r0 = min(r0, 0.4 * float(np.abs(others - p).min()))
    r = r0
    prev = None
    for _ in range(max_halvings):
        try:
            cur = fixed_point_index(f, PlaneCurve.circle(r, p, n=256))
        except FixedPointOnCurve:
            cur = None
        if cur is not None and cur == prev:
            return cur
        prev = cur
        r /= 2
    raise NotIsolated(f"local index at {p} did not stabilise")


@dataclass(frozen=True)
class FixedPointRecord:
    location: complex
    local_index: int
    multiplier: complex | None
    kind: str
    cell: float = 0.0

    def to_json(self):
        m = None if self.multiplier is None else [_r(self.multiplier.real), _r(self.multiplier.imag)]
        return {"location": [_r(self.location.real), _r(self.location.imag)], "local_index": self.local_index,
                "multiplier": m, "kind": self.kind}


def _r(x, nd=10):
    x = round(float(x), nd)
    return 0.0 if x == 0 else x


def classify_multiplier(lam, tol_abs=1e-8, tol_root=1e-6, qmax=64):
    a = abs(lam)
    if a > 1 + tol_abs:
        return "repelling"
    if a < 1 - tol_abs:
        return "attracting"
    for q in range(1, qmax + 1):
        if abs(lam ** q - 1) < tol_root:
            return "parabolic"
    return "neutral-other"


JITTER = (0.0, 0.0371, -0.0529, 0.0713, -0.0917, 0.113, -0.131, 0.15)


def _box_curve(x0, x1, y0, y1, n=64):
    t = np.linspace(0, 1, n, endpoint=False)
    pts = np.concatenate([x0 + (x1 - x0) * t + 1j * y0, x1 + 1j * (y0 + (y1 - y0) * t),
                          x1 - (x1 - x0) * t + 1j * y1, x0 + 1j * (y1 - (y1 - y0) * t)])
    return PlaneCurve(pts, closed=True)


def _newton(f: PolyMap, z, m, iters=60):
    g = PolyMap(tuple(f.fixed_point_polynomial()))
    dg = g.derivative()
    for _ in range(iters):
        gv = complex(g(z))
        dv = complex(dg(z))
        if dv == 0:
            break
        step = m * gv / dv
        z = z - step
        if abs(step) < 1e-15 * max(1, abs(z)):
            break
    return z


def locate_fixed_points(f, box, min_cell_rel=1e-3, eps=None) -> list:
    """Quadtree search for fixed points driven by boundary indices.

    ``box`` is (xmin, xmax, ymin, ymax). Cells with nonzero boundary index are
    split (at a jittered midpoint when a split line would hit a fixed point)
    until they are smaller than ``min_cell_rel`` times the box size.
    """
    f = as_map(f)
    x0, x1, y0, y1 = map(float, box)
    size = max(x1 - x0, y1 - y0)
    min_cell = min_cell_rel * size
    tol = 1e-9 * size if eps is None else eps

    def idx(a, b, c, d):
        return fixed_point_index(f, _box_curve(a, b, c, d), eps=tol)

    try:
        total = idx(x0, x1, y0, y1)
    except FixedPointOnCurve as exc:
        raise BoundaryFixedPoint("fixed point on the search box boundary") from exc
    leaves = []

    def rec(a, b, c, d, k):
        if k == 0:
            return
        if max(b - a, d - c) <= min_cell:
            leaves.append(((a, b, c, d), k))
            return
        for j in JITTER:
            xm = (a + b) / 2 + j * (b - a)
            ym = (c + d) / 2 - j * (d - c) * 0.77
            kids = [(a, xm, c, ym), (xm, b, c, ym), (a, xm, ym, d), (xm, b, ym, d)]
            try:
                ks = [idx(*q) for q in kids]
            except FixedPointOnCurve:
                continue
            break
        else:
            raise BoundaryFixedPoint(f"jitter failed 8 times in cell {(a, b, c, d)}")
        for q, kq in zip(kids, ks):
            rec(*q, kq)

    rec(x0, x1, y0, y1, total)
    out = []
    for (a, b, c, d), k in leaves:
        z = complex((a + b) / 2, (c + d) / 2)
        if isinstance(f, PolyMap):
            z = _newton(f, z, max(k, 1))
            lam = complex(f.derivative()(z)) if f.degree >= 1 else 0j
            out.append(FixedPointRecord(z, k, lam, classify_multiplier(lam), max(b - a, d - c)))
        else:
            out.append(FixedPointRecord(z, k, None, "unknown", max(b - a, d - c)))
    out.sort(key=lambda r: (round(r.location.real, 9), round(r.location.imag, 9)))
    return out


def topological_type(f, p, scales=(1e-1, 1e-2, 1e-3)) -> str:
    """'repelling', 'attracting' or 'unknown'.

    Polynomials are decided by the multiplier. Other maps need a nesting
    certificate on circles at every probe scale.
    """
    f = as_map(f)
    p = complex(p)
    if isinstance(f, PolyMap):
        lam = complex(f.derivative()(p)) if f.degree >= 1 else 0j
        kind = classify_multiplier(lam)
        return kind if kind in ("repelling", "attracting") else "unknown"
    verdicts = set()
    for r in scales:
        S = PlaneCurve.circle(r, p, n=256)
        img = f(S.refined(1).vertices)
        try:
            w = map_degree(f, S, p)
        except ImageHitsBasepoint:
            return "unknown"
        if w == 0:
            return "unknown"
        d = np.abs(img - p)
        if d.min() > r * (1 + 1e-6):
            verdicts.add("repelling")
        elif d.max() < r * (1 - 1e-6):
            verdicts.add("attracting")
        else:
            return "unknown"
    return verdicts.pop() if len(verdicts) == 1 else "unknown"


# ---------------------------------------------------------------------------
# scrambling


@dataclass
class Exit:
    Z: Region
    K: Region


@dataclass
class ScrambleConfig:
    X: Region
    exits: list = field(default_factory=list)

    @classmethod
    def build(cls, X: Region, Zs=()):
        exits = []
        for Z in Zs:
            K = Z.intersection(X)
            if K is None:
                raise ConfigInvalid("2: exit region Z does not meet X")
            exits.append(Exit(Z, K))
        cfg = cls(X, exits)
        cfg.validate()
        return cfg

    def validate(self):
        for i, e in enumerate(self.exits):
            for e2 in self.exits[i + 1:]:
                if e.Z.geom.intersects(e2.Z.geom):
                    raise ConfigInvalid("exit regions Z_i must be pairwise disjoint")
            if not e.K.is_connected():
                raise ConfigInvalid("2: K_i = Z_i ∩ X must be connected")
            if e.K.is_separating():
                raise ConfigInvalid("2: K_i must be non-separating")
        if Region(unary_union([self.X.geom] + [e.Z.geom for e in self.exits])).is_separating():
            raise ConfigInvalid("X ∪ Z_i must be non-separating")
        if self.X.is_separating():
            raise ConfigInvalid("X must be non-separating")

    @classmethod
    def from_json(cls, obj):
        try:
            regions = obj.get("regions", {})

            def get(ref):
                return region_from_json(regions[ref]) if isinstance(ref, str) else region_from_json(ref)

            X = get(obj["X"])
            Zs = [get(e["Z"] if isinstance(e, dict) else e) for e in obj.get("exits", [])]
        except (KeyError, TypeError) as exc:
            raise ConfigInvalid(f"malformed scramble config: {exc}") from exc
        return cls.build(X, Zs)


@dataclass
class ScrambleReport:
    verdict: str
    violated: list
    details: dict

    @property
    def first_violated(self):
        return self.violated[0] if self.violated else None

    def to_json(self):
        return {"verdict": self.verdict, "violated": self.violated, "details": self.details}


def scramble_check(f, cfg: ScrambleConfig, n_boundary=1024, n_grid=64, tol=None) -> ScrambleReport:
    """Sample-based verification of the scrambling clauses (1), (3) and (3a)."""
    f = as_map(f)
    X = cfg.X
    tol = max(X.tol, 1e-9 * max(X.diam, 1.0)) if tol is None else tol
    violated, details = [], {}
    xs = X.samples(n_boundary, n_grid)
    fx = f(xs)
    out = ~X.contains(fx, tol)
    if cfg.exits:
        inZ = np.zeros(out.shape, dtype=bool)
        for e in cfg.exits:
            inZ |= e.Z.contains(fx, tol)
        bad1 = out & ~inZ
    else:
        bad1 = out
    if bad1.any():
        violated.append("1")
        details["1"] = f"{int(bad1.sum())} sample images leave X outside every Z_i"
    strong = True
    for i, e in enumerate(cfg.exits):
        ks = e.K.samples(n_boundary // 4, n_grid // 2)
        fk = f(ks)
        in_Z = e.Z.contains(fk, tol)
        in_K = e.K.contains(fk, tol)
        if (in_Z & ~in_K).any():
            if "3" not in violated:
                violated.append("3")
            details[f"3:{i}"] = "f(K_i) meets Z_i \\ K_i"
        if not (in_K.all() or not in_Z.any()):
            strong = False
            details[f"3a:{i}"] = "f(K_i) neither inside K_i nor disjoint from Z_i"
    if not strong:
        violated.append("3a")
    if "1" in violated or "3" in violated:
        verdict = "none"
    elif strong:
        verdict = "strongly"
    else:
        verdict = "scrambles"
    return ScrambleReport(verdict, violated, details)


@dataclass
class FixptReport:
    applicable: bool
    fixed_point: complex | None
    fault: bool
    scramble: ScrambleReport

    def to_json(self):
        fp = None if self.fixed_point is None else [_r(self.fixed_point.real), _r(self.fixed_point.imag)]
        return {"applicable": self.applicable, "fixed_point": fp, "fault": self.fault,
                "scramble": self.scramble.to_json()}


def fixpt_theorem_check(f, cfg: ScrambleConfig) -> FixptReport:
    """If f strongly scrambles the boundary of X, find the fixed point in X the theorem promises."""
    f = as_map(f)
    rep = scramble_check(f, cfg)
    if rep.verdict != "strongly":
        return FixptReport(False, None, False, rep)
    minx, miny, maxx, maxy = cfg.X.bounds
    pad = 0.0313 * max(maxx - minx, maxy - miny, 1e-3) + 1e-3
    box = (minx - pad, maxx + pad, miny - pad, maxy + pad)
    recs = locate_fixed_points(f, box)
    for r in recs:
        if cfg.X.contains(np.array([r.location]), max(cfg.X.tol, 2 * r.cell))[0]:
            return FixptReport(True, r.location, False, rep)
    return FixptReport(True, None, True, rep)


# ---------------------------------------------------------------------------
# repelling outside X


@dataclass
class RepelWitness:
    crosscut: PlaneCurve
    variation: int
    oracle: int | None
    radius: float
    report: object = None

    def to_json(self):
        return {"crosscut": self.crosscut.to_json(), "variation": self.variation, "oracle": self.oracle,
                "radius": self.radius}


def _ray_with_infinite_end(R: PlaneCurve, reach):
    v = R.vertices.copy()
    d = v[0] - v[1]
    v[0] = v[1] + d / abs(d) * reach
    return LineString(np.c_[v[::-1].real, v[::-1].imag])  # from the landing point outwards


def _circle_components_outside(X: Region, p, r, n=4096):
    t = 2 * np.pi * np.arange(n) / n
    z = p + r * np.exp(1j * t)
    inside = X.contains(z, X.tol)
    if inside.all():
        return [], z, inside
    k0 = int(np.nonzero(inside)[0][0]) if inside.any() else 0
    order = np.roll(np.arange(n), -k0)
    comps, cur = [], []
    for k in order:
        if inside[k]:
            if cur:
                comps.append(cur)
                cur = []
        else:
            cur.append(k)
    if cur:
        comps.append(cur)
    return comps, z, inside


def _snap(X: Region, z):
    q = shapely.ops.nearest_points(X.geom, shapely.points(z.real, z.imag))[0]
    return complex(q.x, q.y)


def _refine_crossing(X: Region, p, r, t_in, t_out, it=60):
    """Bisect the circle angle between an inside sample and an outside sample."""
    for _ in range(it):
        tm = (t_in + t_out) / 2
        if X.contains(np.array([p + r * np.exp(1j * tm)]), X.tol)[0]:
            t_in = tm
        else:
            t_out = tm
    return t_in


def repels_outside_witness(f, X: Region, p, R: PlaneCurve, radius=None, tol=None) -> RepelWitness:
    """Check the three hypotheses of the repelling-outside sufficient condition.

    R is a polyline from far away to its landing point p. On success the
    component C of ∂D \\ X crossed by R is returned with its variation.
    """
    f = as_map(f)
    p = complex(p)
    r = 0.25 * X.diam if radius is None else float(radius)
    scale = max(X.diam, r, 1.0)
    tol = 1e-7 * scale if tol is None else tol
    if abs(complex(f(np.array([p]))[0]) - p) > tol:
        raise PreconditionViolated("fixed", "p is not fixed")
    if abs(R.vertices[-1] - p) > tol:
        raise PreconditionViolated("landing", "R does not land at p")
    failed, details = [], {}
    # (1) injective near p and f(D ∩ X) ⊂ X; D itself serves as the neighbourhood
    try:
        deg = map_degree(f, PlaneCurve.circle(r, p, n=512), p)
    except ImageHitsBasepoint:
        deg = None
    dX = X.samples(2048, 128)
    dX = dX[np.abs(dX - p) <= r]
    local_ok = deg == 1 and X.contains(f(dX), max(X.tol, tol)).all() if dX.size else deg == 1
    if not local_ok:
        failed.append(1)
        details["1"] = f"degree about p on the probe circle is {deg} or f(D ∩ X) leaves X"
    # (2) f(∂D) misses D and ∂D \ X has at least two components
    circ = PlaneCurve.circle(r, p, n=2048)
    if np.abs(f(circ.vertices) - p).min() <= r:
        failed.append(2)
        details["2"] = "f(∂D) meets D"
    comps, zc, inside = _circle_components_outside(X, p, r)
    if len(comps) < 2:
        if 2 not in failed:
            failed.append(2)
        details["2b"] = f"∂D \\ X has {len(comps)} component(s)"
    # (3) R avoids X and f pushes ray points outward along R
    L = R.length
    reach = 1e3 * scale + L
    line = _ray_with_infinite_end(R, reach)
    rev = PlaneCurve(R.vertices[::-1].copy())
    s = np.geomspace(r / 16, L / 3, 200)
    xr = rev.point_at(s)
    if X.contains(xr, X.tol).any():
        failed.append(3)
        details["3"] = "R meets X"
    else:
        fr = f(xr)
        pts = shapely.points(fr.real, fr.imag)
        off = shapely.distance(line, pts)
        pos = shapely.line_locate_point(line, pts)
        if (off > tol * (1 + np.abs(fr))).any() or not (pos > s * (1 + 1e-9)).all():
            failed.append(3)
            details["3"] = "f does not move ray points away from p along R"
    if failed:
        raise HypothesisFailed(sorted(failed), details)
    # the component of ∂D \ X crossed by R
    hit = line.intersection(circ.to_shapely().exterior)
    pts = shapely.get_coordinates(hit)
    pts = pts[:, 0] + 1j * pts[:, 1]
    v = pts[np.argmin(np.abs(pts - p - 0))]  # any crossing; R meets ∂D
    tv = float(np.angle(v - p)) % (2 * np.pi)
    n = zc.size
    kv = int(round(tv / (2 * np.pi) * n)) % n
    comp = next(c for c in comps if kv in c)
    step = 2 * np.pi / n
    t_start = _refine_crossing(X, p, r, (comp[0] - 1) * step, comp[0] * step)
    t_end = _refine_crossing(X, p, r, (comp[-1] + 1) * step, comp[-1] * step)
    while t_end < t_start:
        t_end += 2 * np.pi
    C = PlaneCurve.arc_of_circle(r, p, t_start, t_end, n=max(65, int(256 * (t_end - t_start) / np.pi)))
    C = PlaneCurve(np.r_[_snap(X, C.vertices[0]), C.vertices[1:-1], _snap(X, C.vertices[-1])])
    # junction along R, pointing to infinity
    pr = shapely.line_locate_point(line, shapely.points(v.real, v.imag))
    q = line.interpolate(pr + 1e-3 * r)
    heading = float(np.angle(complex(q.x, q.y) - v))
    J = build_junction(v, heading, [X, C])
    rep = variation(f, C, X, J)
    try:
        orc = variation_oracle(f, C, X, J)
    except PlaneFixError:
        orc = None
    return RepelWitness(C, rep.total, orc, r, rep)


# ---------------------------------------------------------------------------
# degeneracy harness


@dataclass
class DegeneracyReport:
    status: str  # "point", "hypotheses-fail", "contradiction-alarm"
    failed: list
    fixed_points: list
    diameter: float
    resolution: float

    def to_json(self):
        return {"status": self.status, "failed": self.failed,
                "fixed_points": [r.to_json() for r in self.fixed_points],
                "diameter": self.diameter, "resolution": self.resolution}


def degeneracy_check(f, cfg: ScrambleConfig, rays: dict, resolution=None) -> DegeneracyReport:
    """Try to certify the hypotheses that force X to be a point.

    ``rays`` maps fixed points (rounded complex) to landing rays. If every
    hypothesis is certified while X has raster diameter above ``resolution``,
    a contradiction alarm is raised in the report.
    """
    f = as_map(f)
    X = cfg.X
    res = resolution if resolution is not None else X.diam / 512 if X.diam > 0 else 1e-9
    if X.diam <= max(res, X.tol):
        return DegeneracyReport("point", [], [], X.diam, res)
    failed = []
    minx, miny, maxx, maxy = X.bounds
    pad = 0.0313 * max(maxx - minx, maxy - miny) + 1e-3
    recs = [r for r in locate_fixed_points(f, (minx - pad, maxx + pad, miny - pad, maxy + pad))
            if X.contains(np.array([r.location]), max(X.tol, 2 * r.cell))[0]]
    for r in recs:
        if local_index(f, r.location) != 1:
            failed.append(f"index:{_r(r.location.real)},{_r(r.location.imag)}")
        R = _match_ray(rays, r.location)
        if R is None:
            failed.append(f"no-ray:{_r(r.location.real)},{_r(r.location.imag)}")
            continue
        try:
            repels_outside_witness(f, X, r.location, R)
        except (HypothesisFailed, PreconditionViolated, PlaneFixError):
            failed.append(f"repel:{_r(r.location.real)},{_r(r.location.imag)}")
    sc = scramble_check(f, cfg)
    if sc.verdict == "none":
        failed.append("scramble")
    else:
        for i, e in enumerate(cfg.exits):
            fk = f(e.K.samples(256, 32))
            if e.Z.contains(fk, X.tol).any():
                W = e.K.geom.buffer(0.01 * X.diam)
                xs = X.samples(1024, 64)
                near = shapely.contains_xy(W, xs.real, xs.imag)
                if not X.contains(f(xs[near]), X.tol).all():
                    failed.append(f"exit:{i}")
    status = "hypotheses-fail" if failed else "contradiction-alarm"
    return DegeneracyReport(status, failed, recs, X.diam, res)


def _match_ray(rays, p):
    for k, R in rays.items():
        if abs(complex(k) - p) < 1e-6:
            return R
    return None
