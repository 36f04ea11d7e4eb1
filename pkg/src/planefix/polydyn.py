"""Polynomial dynamics: external rays by Newton pullback, landing and impression
diagnostics, puzzle pieces with wedges, and the no-rotation harness."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import ndimage

from .analysis import (FixedPointRecord, _r, classify_multiplier, local_index)
from .errors import (ConditionFailed, InputError, NewtonDivergence, NotFixed, RayUnresolved)
from .geometry import Raster, RasterGrid, Region, region_to_json
from .maps import PolyMap

R0_DEFAULT = 1e4
SUBLEVELS = 4
EPS_LAND = 1e-3
EPS_FIX = 1e-9
RESIDUAL_MAX = 1e-8
TAIL_POINTS = 10


def as_poly(P) -> PolyMap:
    if isinstance(P, PolyMap):
        Q = P
    else:
        Q = PolyMap(tuple(complex(c) for c in P))
    if Q.degree < 2:
        raise InputError("polynomial of degree >= 2 required")
    return Q


def _horner(c, z):
    out = c[-1]
    for a in reversed(c[:-1]):
        out = out * z + a
    return out


def _horner_d(c, z):
    """Value and derivative."""
    p, dp = c[-1], 0j
    for a in reversed(c[:-1]):
        dp = dp * z + p
        p = p * z + a
    return p, dp


@dataclass(frozen=True)
class Normal:
    """P = A ∘ Q ∘ A⁻¹ with A(w) = a w + b and Q monic and centered."""

    poly: PolyMap
    coeffs: tuple  # of Q
    a: complex
    b: complex

    def to_plane(self, w):
        return self.a * w + self.b

    def from_plane(self, z):
        return (z - self.b) / self.a

    @property
    def degree(self):
        return len(self.coeffs) - 1


def normalize(P) -> Normal:
    """Monic centered conjugate; the principal (d-1)-th root fixes the angle convention."""
    P = as_poly(P)
    c = P.coeffs
    d = P.degree
    a = complex(c[-1]) ** (-1.0 / (d - 1))
    b = -c[-2] / (d * c[-1])
    # Q(w) = (P(a w + b) - b) / a
    poly = np.array([c[-1]], dtype=complex)
    lin = np.array([b, a], dtype=complex)
    for ck in reversed(c[:-1]):
        poly = np.polynomial.polynomial.polymul(poly, lin)
        poly[0] += ck
    poly[0] -= b
    poly = poly / a
    q = [complex(x) for x in poly]
    q[-1] = 1 + 0j
    q[-2] = 0j
    return Normal(P, tuple(q), a, b)


def critical_escape_warning(P, iters=200) -> str | None:
    """Coarse check of the connectedness assumption via critical orbits."""
    N = normalize(P)
    q = N.coeffs
    R = max(2.0, 1.0 + sum(abs(x) for x in q[:-1]))
    dq = [k * x for k, x in enumerate(q) if k > 0]
    crit = np.roots(dq[::-1]) if len(dq) > 1 else np.array([])
    for c0 in crit:
        z = complex(c0)
        for _ in range(iters):
            z = _horner(q, z)
            if abs(z) > R:
                return "a critical orbit escapes: the Julia set looks disconnected"
    return None


# ---------------------------------------------------------------------------
# fixed points


def classify_fixed(P, p, eps_fix=EPS_FIX, near=1e-3) -> FixedPointRecord:
    """Refine p by Newton on P(z) - z and classify by the multiplier."""
    P = as_poly(P)
    c = list(P.coeffs)
    z = complex(p)
    for _ in range(100):
        v, dv = _horner_d(c, z)
        g, dg = v - z, dv - 1
        if g == 0:
            break
        if dg == 0:
            break
        # Newton step, multiplicity-tolerant through the ratio test below
        step = g / dg
        z -= step
        if abs(step) < 1e-16 * max(1.0, abs(z)):
            break
    scale = max(1.0, abs(complex(p)))
    if abs(_horner(c, z) - z) >= eps_fix * scale or abs(z - complex(p)) > near * scale:
        raise NotFixed(f"{p} is not a fixed point (refined residual {abs(_horner(c, z) - z):.3g})")
    lam = _horner_d(c, z)[1]
    kind = classify_multiplier(lam)
    try:
        idx = local_index(P, z)
    except Exception:  # index is informative only here
        idx = 0
    return FixedPointRecord(z, idx, lam, kind)


# ---------------------------------------------------------------------------
# rays


def _orbit(theta: Fraction, d: int):
    seen, orb = {}, []
    a = theta
    while a not in seen:
        seen[a] = len(orb)
        orb.append(a)
        a = (a * d) % 1
    return orb, seen[a]  # angles, index where the cycle starts


def _angle(theta) -> Fraction:
    if isinstance(theta, float):
        theta = Fraction(theta).limit_denominator(10 ** 9)
        if theta.denominator > 10 ** 6:
            raise InputError("only rational angles are supported")
    try:
        return Fraction(theta) % 1
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad angle {theta!r}") from exc


@dataclass
class Ray:
    angle: Fraction
    points: np.ndarray  # from large radius toward the Julia set, in the input coordinates
    status: str  # landed, unresolved, escaped-tolerance
    landing: complex | None
    tail_diameter: float
    residual: float
    depth: int
    sublevels: int
    refined: bool
    warnings: list = field(default_factory=list)

    def to_json(self, with_points=True):
        out = {"angle": str(self.angle), "status": self.status,
               "landing": None if self.landing is None else [_r(self.landing.real), _r(self.landing.imag)],
               "tail_diameter": float(f"{self.tail_diameter:.6e}"),
               "residual": float(f"{self.residual:.3e}"),
               "depth": self.depth, "sublevels": self.sublevels, "refined": self.refined,
               "warnings": list(self.warnings)}
        if with_points:
            out["points"] = [[_r(z.real), _r(z.imag)] for z in self.points]
        return out


class RayTracer:
    """Traces rays of one polynomial, sharing pullback work between angles of one orbit."""

    def __init__(self, P, R0=R0_DEFAULT, sublevels=SUBLEVELS, eps_land=EPS_LAND, max_newton=50):
        self.P = as_poly(P)
        self.N = normalize(self.P)
        self.d = self.N.degree
        self.R0, self.S, self.eps_land, self.max_newton = float(R0), int(sublevels), eps_land, max_newton
        if self.R0 <= 10:
            raise InputError("R0 too small for the Böttcher approximation")
        self._cache = {}
        self.warning = critical_escape_warning(self.P)

    def _solve(self, target, z0, level):
        q = self.N.coeffs
        z = z0
        f0 = _horner(q, z) - target
        for _ in range(self.max_newton):
            v, dv = _horner_d(q, z)
            g = v - target
            if abs(g) <= 1e-15 * max(1.0, abs(target)):
                return z
            if dv == 0:
                raise NewtonDivergence(level, "critical point met during pullback")
            step = g / dv
            # halve the step until the residual decreases
            for _ in range(30):
                zn = z - step
                if abs(_horner(q, zn) - target) < abs(g):
                    break
                step *= 0.5
            else:
                return z
            z = zn
            if abs(step) <= 1e-16 * max(1.0, abs(z)):
                return z
        f1 = abs(_horner(q, z) - target)
        if not f1 <= 1e-12 * max(1.0, abs(target)) or not math.isfinite(f1) or f1 > abs(f0):
            raise NewtonDivergence(level, f"residual {f1:.3g}")
        return z

    def _seed(self, a, n_pts):
        S, d = self.S, self.d
        return [self.R0 ** (d ** (-n / S)) * cmath.exp(2j * math.pi * float(a)) for n in range(min(S, n_pts))]

    def _pullback(self, theta, depth):
        """Normalized-coordinate points for every angle of the orbit of theta."""
        store = self._cache.setdefault(depth, {})
        orb, start = _orbit(theta, self.d)
        S, d = self.S, self.d
        n_pts = S * depth + 1
        cyc = orb[start:]
        if any(a not in store for a in cyc):
            pts = {a: self._seed(a, n_pts) for a in cyc}
            for n in range(S, n_pts):
                for a in cyc:
                    pts[a].append(self._solve(pts[(a * d) % 1][n - S], pts[a][n - 1], n // S))
            store.update(pts)
        for a in reversed(orb[:start]):
            if a in store:
                continue
            img = store[(a * d) % 1]
            pa = self._seed(a, n_pts)
            for n in range(S, n_pts):
                pa.append(self._solve(img[n - S], pa[n - 1], n // S))
            store[a] = pa
        return {a: store[a] for a in orb}

    def _refine_landing(self, theta, pts):
        """Landing point: the cycle is pulled back to convergence, then the preperiod by Newton."""
        orb, start = _orbit(theta, self.d)
        q = self.N.coeffs
        tip = {a: pts[a][-1] for a in orb}
        # pulling the cycle back along the ray branch contracts toward the landing cycle
        cyc = orb[start:]
        cur = {a: tip[a] for a in cyc}
        for sweep in range(4000):
            new = {}
            for a in reversed(cyc):
                img = (a * self.d) % 1
                src = new.get(img, cur[img])
                new[a] = self._solve(src, cur[a], -1)
            moved = max(abs(new[a] - cur[a]) for a in cyc)
            cur = new
            if moved <= 1e-15 * max(1.0, max(abs(v) for v in cur.values())):
                break
        land = dict(cur)
        for i in range(start - 1, -1, -1):
            a = orb[i]
            y = land[orb[i + 1]]
            z = tip[a]
            for _ in range(200):
                v, dv = _horner_d(q, z)
                if dv == 0:
                    break
                step = (v - y) / dv
                z -= step
                if abs(step) < 1e-15:
                    break
            land[a] = z
        return land[theta]

    def trace(self, theta, depth=30) -> Ray:
        theta = _angle(theta)
        if depth < 1:
            raise InputError("depth must be >= 1")
        pts = self._pullback(theta, depth)
        w = np.array(pts[theta])
        z = self.N.to_plane(w)
        img = self.N.to_plane(np.array(pts[(theta * self.d) % 1]))
        # functional equation in the input coordinates
        S = self.S
        if len(z) > S:
            res = float(np.max(np.abs(self.P(z[S:]) - img[: len(z) - S])))
        else:
            res = 0.0
        tail = z[-TAIL_POINTS:]
        tail_diam = float(np.max(np.abs(tail[:, None] - tail[None, :])))
        warnings = [self.warning] if self.warning else []
        landing, refined = complex(z[-1]), False
        if res >= RESIDUAL_MAX:
            status = "escaped-tolerance"
        elif tail_diam < self.eps_land:
            status = "landed"
            cand = complex(self.N.to_plane(self._refine_landing(theta, pts)))
            if np.isfinite(cand) and abs(cand - z[-1]) <= max(self.eps_land, 10 * tail_diam):
                landing, refined = cand, True
            else:
                warnings.append("landing refinement rejected; tail endpoint reported")
        else:
            status = "unresolved"
        return Ray(theta, z, status, landing, tail_diam, res, depth, S, refined, warnings)


def trace_ray(P, theta, depth=30, R0=R0_DEFAULT, eps_land=EPS_LAND) -> Ray:
    return RayTracer(P, R0=R0, eps_land=eps_land).trace(theta, depth)


def angles_up_to(qmax: int):
    out = sorted({Fraction(p, q) for q in range(1, qmax + 1) for p in range(q)})
    return out


@dataclass
class FixedRays:
    point: complex
    angles: list
    permutation: dict
    status: str  # ok or numerical-fault
    unresolved: list

    def to_json(self):
        return {"point": [_r(self.point.real), _r(self.point.imag)],
                "angles": [str(a) for a in self.angles],
                "permutation": {str(a): str(b) for a, b in self.permutation.items()},
                "all_fixed": all(a == b for a, b in self.permutation.items()),
                "status": self.status, "unresolved": [str(a) for a in self.unresolved]}


def fixed_rays_at(P, p, qmax=8, depth=48, tracer: RayTracer | None = None, eps_land=EPS_LAND) -> FixedRays:
    """Rational rays with denominator <= qmax landing at the repelling or parabolic fixed point p."""
    P = as_poly(P)
    rec = classify_fixed(P, p)
    if rec.kind not in ("repelling", "parabolic"):
        raise InputError(f"fixed point {p} is {rec.kind}")
    tr = tracer or RayTracer(P, eps_land=eps_land)
    d = tr.d
    hits, unresolved = [], []
    for a in angles_up_to(qmax):
        ray = tr.trace(a, depth)
        if ray.status != "landed":
            unresolved.append(a)
            continue
        if abs(ray.landing - rec.location) < eps_land:
            hits.append(a)
    perm = {a: (a * d) % 1 for a in hits}
    ok = set(perm.values()) == set(hits)
    return FixedRays(rec.location, hits, perm, "ok" if ok else "numerical-fault", unresolved)


# ---------------------------------------------------------------------------
# impressions


@dataclass
class ImpressionReport:
    angle: Fraction
    landing: complex | None
    diameters: list  # raw estimate per level
    bound: list  # running minimum, non-increasing
    status: str  # consistent with degenerate / unresolved
    eps: float

    def to_json(self):
        return {"angle": str(self.angle),
                "landing": None if self.landing is None else [_r(self.landing.real), _r(self.landing.imag)],
                "diameters": [float(f"{x:.6e}") for x in self.diameters],
                "bound": [float(f"{x:.6e}") for x in self.bound], "status": self.status, "eps": self.eps}


def impression_diameter_bound(P, theta, depth=25, eps=1e-3, extra=12, tracer: RayTracer | None = None):
    """Diameter of the region cut off by the neighbouring rays theta ± d^-k below level k."""
    theta = _angle(theta)
    tr = tracer or RayTracer(P)
    d, S = tr.d, tr.S
    main = tr.trace(theta, depth + extra)
    diams = []
    for k in range(1, depth + 1):
        pts = [main.points[k * S:]]
        if main.landing is not None:
            pts.append([main.landing])
        for sgn in (-1, 1):
            nb = (theta + sgn * Fraction(1, d ** k)) % 1
            ray = tr.trace(nb, k + extra)
            pts.append(ray.points[k * S:])
            if ray.landing is not None:
                pts.append([ray.landing])
        allp = np.concatenate([np.asarray(x, dtype=complex) for x in pts])
        diams.append(float(math.hypot(np.ptp(allp.real), np.ptp(allp.imag))))
    bound = list(np.minimum.accumulate(diams)) if diams else []
    status = "consistent with degenerate" if bound and bound[-1] < eps else "unresolved"
    return ImpressionReport(theta, main.landing, diams, [float(x) for x in bound], status, eps)


# ---------------------------------------------------------------------------
# filled Julia set raster and puzzle pieces


def escape_radius(P) -> float:
    N = normalize(P)
    R = max(2.0, 1.0 + sum(abs(x) for x in N.coeffs[:-1]))
    return abs(N.a) * R + abs(N.b)


def julia_grid(P, cells=512) -> RasterGrid:
    N = normalize(P)
    R = escape_radius(P) - abs(N.b)
    h = 2 * R / cells
    return RasterGrid(N.b - complex(R, R), h, cells + 1, cells + 1)


def filled_julia(P, grid: RasterGrid | None = None, iters=256) -> Raster:
    P = as_poly(P)
    grid = grid or julia_grid(P)
    Z = grid.centers().copy()
    R = escape_radius(P)
    alive = np.ones(Z.shape, dtype=bool)
    for _ in range(iters):
        Z[alive] = P(Z[alive])
        alive &= np.abs(Z) <= R
    return grid.raster(alive)


def _grid_of(r: Raster) -> RasterGrid:
    ny, nx = r.mask.shape
    return RasterGrid(r.origin, r.h, nx, ny)


@dataclass
class PuzzlePiece:
    X: object  # Region or Raster
    exits: list  # of (Region, angles)

    def to_json(self):
        X = {"type": "raster", "cells": int(self.X.mask.sum())} if isinstance(self.X, Raster) else region_to_json(self.X)
        return {"X": X, "exits": [{"E": region_to_json(E), "angles": [str(a) for a in sorted(A)]}
                                  for E, A in self.exits]}


@dataclass
class PuzzleReport:
    ok: bool
    conditions: dict
    wedges: list  # per exit: {"count": n, "cells": int}
    landings: dict
    grid: dict

    def to_json(self):
        return {"ok": self.ok, "conditions": self.conditions, "wedges": self.wedges,
                "landings": {k: [_r(v.real), _r(v.imag)] for k, v in sorted(self.landings.items())},
                "grid": self.grid}


def _barrier(grid: RasterGrid, E: Region, rays):
    mask = grid.rasterize(E.geom)
    for ray in rays:
        pts = np.concatenate([ray.points, [ray.landing]])
        grid.mark_polyline(mask, pts)
    return mask


def _x_mask(grid: RasterGrid, X):
    if isinstance(X, Raster):
        return X.mask.copy()
    return grid.rasterize(X.geom)


def puzzle_piece_check(P, piece: PuzzlePiece, depth=40, tracer: RayTracer | None = None, raise_on_fail=True,
                       K: Raster | None = None):
    """Raster verification of the three puzzle-piece conditions and the wedges at each exit."""
    P = as_poly(P)
    tr = tracer or RayTracer(P)
    grid = _grid_of(piece.X) if isinstance(piece.X, Raster) else julia_grid(P)
    K = K or filled_julia(P, grid)
    h = grid.h
    X = _x_mask(grid, piece.X)
    conds = {"1": {"ok": True, "detail": ""}, "2": {"ok": True, "detail": ""}, "3": {"ok": True, "detail": ""}}

    def fail(k, msg):
        if conds[k]["ok"]:
            conds[k] = {"ok": False, "detail": msg}

    Xd = ndimage.binary_dilation(X, iterations=2)
    for j, (E, A) in enumerate(piece.exits):
        if len(A) < 2:
            fail("1", f"exit {j} has fewer than two angles")
        Em = grid.rasterize(E.geom)
        if not Xd[Em].all():
            fail("1", f"exit {j} is not inside X")
        if E.is_separating():
            fail("1", f"exit {j} separates the plane")
        for k in range(j):
            if E.geom.distance(piece.exits[k][0].geom) <= max(E.tol, h):
                fail("1", f"exits {k} and {j} meet")
    rays, landings = [], {}
    for j, (E, A) in enumerate(piece.exits):
        rj = []
        for a in sorted(A):
            ray = tr.trace(a, depth)
            if ray.status != "landed":
                raise RayUnresolved(f"ray {a} did not land at depth {depth}")
            landings[str(a)] = ray.landing
            if not E.contains(ray.landing, max(E.tol, tr.eps_land)):
                fail("2", f"ray {a} lands at {ray.landing:.6g}, outside exit {j}")
            rj.append(ray)
        rays.append(rj)
    wedges = []
    full = np.zeros(X.shape, dtype=bool)
    near_exit = np.zeros(X.shape, dtype=bool)
    for j, (E, A) in enumerate(piece.exits):
        B = _barrier(grid, E, rays[j])
        full |= B
        near_exit |= ndimage.binary_dilation(grid.rasterize(E.geom), iterations=3)
        lab, n = ndimage.label(~B)
        sizes = ndimage.sum(np.ones_like(B), lab, index=np.arange(1, n + 1))
        big = [i + 1 for i, s in enumerate(sizes) if s >= 16]
        xs = X & ~ndimage.binary_dilation(B, iterations=3)
        hit = sorted(set(np.unique(lab[xs])) - {0})
        wedges.append({"count": len(big), "contains_X": [int(i) for i in hit], "expected": len(A)})
        if len(hit) != 1:
            fail("3", f"X meets {len(hit)} wedges at exit {j}")
        wedges[-1]["mask"] = lab == hit[0] if len(hit) == 1 else None
    lab, n = ndimage.label(~full)
    core = X & ~near_exit & ~ndimage.binary_dilation(full, iterations=2)
    comps = sorted(set(np.unique(lab[core])) - {0})
    if len(comps) != 1:
        fail("3", f"X minus the exits meets {len(comps)} components")
    else:
        C = lab == comps[0]
        stray = C & K.mask & ~ndimage.binary_dilation(X, iterations=3) & ~near_exit
        if stray.sum() > 0:
            fail("3", f"{int(stray.sum())} cells of K in the component lie outside X")
    ok = all(c["ok"] for c in conds.values())
    rep = PuzzleReport(ok, conds, [{k: v for k, v in w.items() if k != "mask"} for w in wedges], landings,
                       {"h": h, "shape": list(X.shape)})
    rep._wedge_masks = [w["mask"] for w in wedges]
    rep._grid = grid
    if raise_on_fail and not ok:
        first = min(k for k, c in conds.items() if not c["ok"])
        raise ConditionFailed(int(first), conds[first]["detail"])
    return rep


def piece_from_component(P, exits, seed, depth=40, tracer: RayTracer | None = None, grid=None) -> PuzzlePiece:
    """X = closure of the component of the complement of the exits and their rays containing seed, within K."""
    P = as_poly(P)
    tr = tracer or RayTracer(P)
    grid = grid or julia_grid(P)
    K = filled_julia(P, grid)
    B = np.zeros(K.mask.shape, dtype=bool)
    E_mask = np.zeros_like(B)
    for E, A in exits:
        rays = [tr.trace(a, depth) for a in sorted(A)]
        for r in rays:
            if r.status != "landed":
                raise RayUnresolved(f"ray {r.angle} did not land")
        B |= _barrier(grid, E, rays)
        E_mask |= grid.rasterize(E.geom)
    lab, _ = ndimage.label(~B)
    j, i = grid.raster(B).index(complex(seed))
    comp = lab == lab[j, i]
    if lab[j, i] == 0:
        raise InputError("seed lies on a barrier")
    X = (ndimage.binary_dilation(comp) & K.mask) | (E_mask & ndimage.binary_dilation(comp, iterations=2))
    return PuzzlePiece(grid.raster(X), list(exits))


# ---------------------------------------------------------------------------
# no-rotation harness


@dataclass
class PointDynReport:
    status: str  # not-applicable, hypothesis-violated, hypotheses-uncertified, consistent, contradiction-alarm
    hypotheses: dict
    fixed_points: list
    rays: list
    diameter: float
    resolution: float
    note: str = ""

    def to_json(self):
        return {"status": self.status, "hypotheses": self.hypotheses,
                "fixed_points": [r.to_json() for r in self.fixed_points],
                "rays": [r.to_json() for r in self.rays], "diameter": _r(self.diameter),
                "resolution": _r(self.resolution), "note": self.note}


def _diam(X):
    if isinstance(X, Raster):
        return X.diameter()
    return X.diam


def pointdyn_harness(P, instance, qmax=8, depth=48, resolution=None, tracer: RayTracer | None = None):
    """Check the hypotheses forcing X to be a repelling or parabolic fixed point.

    ``instance`` is {"kind": "invariant", "X": Region} or {"kind": "puzzle", "piece": PuzzlePiece}.
    """
    P = as_poly(P)
    tr = tracer or RayTracer(P)
    kind = instance.get("kind")
    if kind == "puzzle":
        piece = instance["piece"]
        X = piece.X
    elif kind == "invariant":
        X = instance["X"]
        piece = None
    else:
        raise InputError("instance kind must be 'invariant' or 'puzzle'")
    grid = _grid_of(X) if isinstance(X, Raster) else julia_grid(P)
    res = resolution if resolution is not None else 2 * grid.h
    hyp = {}
    sep = _separating(X) if not isinstance(X, Raster) else _raster_separating(X.mask)
    if sep:
        hyp["non-separating"] = {"ok": False, "detail": "X separates the plane"}
        return PointDynReport("not-applicable", hyp, [], [], _diam(X), res, "X must be non-separating")
    hyp["non-separating"] = {"ok": True, "detail": ""}
    # fixed points of P inside X
    roots = np.roots(np.asarray(P.fixed_point_polynomial())[::-1])
    recs = []
    for z0 in sorted(roots, key=lambda z: (round(z.real, 9), round(z.imag, 9))):
        inX = (X.contains(np.array([z0]))[0] if isinstance(X, Raster)
               else X.contains(complex(z0), max(X.tol, 1e-6)))
        if inX:
            recs.append(classify_fixed(P, z0))
    bad = [r for r in recs if r.kind not in ("repelling", "parabolic")]
    hyp["fixed points repelling or parabolic"] = {
        "ok": not bad, "detail": ", ".join(f"{_fmtc(r.location)} is {r.kind}" for r in bad)}
    ray_reps, rot = [], []
    for r in recs:
        if r.kind not in ("repelling", "parabolic"):
            continue
        fr = fixed_rays_at(P, r.location, qmax=qmax, depth=depth, tracer=tr)
        ray_reps.append(fr)
        if not fr.angles or fr.status != "ok":
            rot.append(f"{_fmtc(r.location)}: landing rays not resolved")
        elif any(a != b for a, b in fr.permutation.items()):
            rot.append(f"{_fmtc(r.location)}: rays {', '.join(str(a) for a in fr.angles)} are permuted")
    hyp["all rays landing at them are fixed"] = {"ok": not rot, "detail": "; ".join(rot)}
    uncertified = []
    if kind == "invariant":
        xs = _samples(X)
        img = P(xs)
        inv = X.contains(img) if isinstance(X, Raster) else X.contains(img, max(X.tol, 1e-6))
        hyp["invariant"] = {"ok": bool(np.all(inv)), "detail": "" if np.all(inv) else "P(X) leaves X"}
    else:
        rep = puzzle_piece_check(P, piece, depth=depth, tracer=tr, raise_on_fail=False)
        hyp["general puzzle-piece"] = {"ok": rep.ok, "detail": "; ".join(
            f"({k}) {c['detail']}" for k, c in rep.conditions.items() if not c["ok"])}
        ex = []
        for j, (E, A) in enumerate(piece.exits):
            W = rep._wedge_masks[j]
            pts = E.samples(256, 16)
            if E.is_point and np.all(np.abs(P(pts) - pts) < 1e-9 * max(1.0, np.max(np.abs(pts)))):
                continue
            if W is None or not np.all(_grid_of(X).raster(W).contains(P(pts))):
                ex.append(f"exit {j} neither fixed nor mapped into its wedge")
        hyp["exits fixed or mapped into their wedges"] = {"ok": not ex, "detail": "; ".join(ex)}
        para = [r for r in recs if r.kind == "parabolic"]
        if para:
            uncertified.append("no invariant parabolic domain")
            hyp["no invariant parabolic domain"] = {"ok": None, "detail": "parabolic fixed point in X"}
        else:
            hyp["no invariant parabolic domain"] = {"ok": True, "detail": "no parabolic fixed point in X"}
    diam = _diam(X)
    if any(v["ok"] is False for v in hyp.values()):
        status = "hypothesis-violated"
    elif uncertified:
        status = "hypotheses-uncertified"
    elif diam > res:
        status = "contradiction-alarm"
    else:
        status = "consistent"
    return PointDynReport(status, hyp, recs, ray_reps, diam, res)


def _fmtc(z):
    return f"{_r(z.real, 6)}{'+' if z.imag >= 0 else '-'}{abs(_r(z.imag, 6))}i"


def _separating(X: Region) -> bool:
    return X.is_separating()


def _raster_separating(mask) -> bool:
    lab, n = ndimage.label(~mask)
    border = set(np.unique(np.concatenate([lab[0], lab[-1], lab[:, 0], lab[:, -1]]))) - {0}
    return n > len(border)


def _samples(X):
    if isinstance(X, Raster):
        return X.centers()[X.mask]
    return X.samples(512, 32)
