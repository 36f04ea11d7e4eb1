"""Command-line front end. Every subcommand writes a JSON report and can emit an SVG figure.

Exit codes: 0 property holds, 1 property fails or a hypothesis is violated,
2 input error, 3 numerical nonconvergence.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import __version__, svg
from .analysis import ScrambleConfig, _r, fixpt_theorem_check, locate_fixed_points, orientation_class, scramble_check
from .dendrite import (TreeMap, exits_away, fixed_point_via_retraction, fixed_points, full_tent_map,
                       periodic_cutpoints, scrambles_boundary, weakly_repelling)
from .errors import (CannotCloseArc, ConfigInvalid, InputError, NotDisjoint, NotFixed, NotSimple, NumericalFault,
                     OutsideDomain, PlaneFixError, PointOnCurve)
from .geometry import EPS_GEOM, PlaneCurve, Region, region_from_json
from .indexvar import fixed_point_index, fmot_verify, hull_region, variation, variation_oracle
from .lamination import FiniteLamination, chords, check_invariance, class_type, pullback_generate, quotient_tree
from .maps import PolyMap
from .polydyn import (EPS_LAND, PuzzlePiece, RayTracer, escape_radius, filled_julia, julia_grid, normalize,
                      piece_from_component, pointdyn_harness, puzzle_piece_check)

INPUT_ERRORS = (InputError, ConfigInvalid, NotSimple, OutsideDomain, NotDisjoint, NotFixed, PointOnCurve)
NUMERIC_ERRORS = (NumericalFault, CannotCloseArc)
COMMANDS = ("index", "variation", "fmot", "fixed-points", "scramble", "dendrite", "lamination", "ray", "puzzle",
            "render")


class Failure(Exception):
    """A property failed; the report is still written."""

    def __init__(self, report):
        super().__init__("property fails")
        self.report = report


# ---------------------------------------------------------------------------
# parsing


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg})") from exc


def _complex(x):
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise InputError(f"complex value needs [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float)):
        return complex(x)
    raise InputError(f"bad complex value {x!r}")


def _floats(s, n_min, n_max, what):
    try:
        vals = [float(v) for v in s.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"bad {what} {s!r}") from exc
    if not n_min <= len(vals) <= n_max:
        raise InputError(f"{what} takes {n_min}..{n_max} numbers")
    return vals


def parse_map(s):
    if s is None:
        raise InputError("--map is required")
    if s.startswith("poly:"):
        try:
            coeffs = json.loads(s[5:])
        except json.JSONDecodeError as exc:
            raise InputError(f"bad polynomial {s!r}") from exc
        return PolyMap(tuple(_complex(c) for c in coeffs))
    obj = _load_json(s)
    if isinstance(obj, dict):
        obj = obj.get("coeffs", obj.get("map"))
        if isinstance(obj, str):
            return parse_map(obj)
    if not isinstance(obj, list):
        raise InputError("polynomial file needs a coefficient array")
    return PolyMap(tuple(_complex(c) for c in obj))


def parse_curve(s):
    if s is None:
        raise InputError("--curve is required")
    kind, _, rest = s.partition(":")
    if kind == "circle":
        v = _floats(rest, 1, 4, "circle")
        r, cx, cy = v[0], (v[1] if len(v) > 1 else 0.0), (v[2] if len(v) > 2 else 0.0)
        n = int(v[3]) if len(v) > 3 else 512
        return PlaneCurve.circle(r, complex(cx, cy), n)
    if kind == "arc":
        v = _floats(rest, 3, 6, "arc")
        r, t0, t1 = v[:3]
        c = complex(v[3] if len(v) > 3 else 0.0, v[4] if len(v) > 4 else 0.0)
        n = int(v[5]) if len(v) > 5 else 257
        return PlaneCurve.arc_of_circle(r, c, math.radians(t0), math.radians(t1), n)
    if kind in ("polyline", "polygon"):
        pts = []
        for pair in rest.split(";"):
            x, y = _floats(pair, 2, 2, "vertex")
            pts.append(complex(x, y))
        return PlaneCurve.polyline(pts, closed=kind == "polygon")
    obj = _load_json(s)
    try:
        return PlaneCurve.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed curve: {exc}") from exc


def parse_region(s, curve=None):
    if s is None:
        raise InputError("--x is required")
    kind, _, rest = s.partition(":")
    if s == "hull":
        if curve is None:
            raise InputError("hull needs --curve")
        return hull_region(curve)
    if kind == "segment":
        x0, y0, x1, y1 = _floats(rest, 4, 4, "segment")
        return Region.segment(complex(x0, y0), complex(x1, y1))
    if kind == "disk":
        v = _floats(rest, 1, 3, "disk")
        return Region.disk(v[0], complex(v[1] if len(v) > 1 else 0, v[2] if len(v) > 2 else 0))
    if kind == "point":
        x, y = _floats(rest, 2, 2, "point")
        return Region.point(complex(x, y))
    if kind == "box":
        return Region.box(*_floats(rest, 4, 4, "box"))
    return region_from_json(_load_json(s))


def parse_angle(s):
    if s is None:
        raise InputError("--angle is required")
    try:
        return Fraction(s) % 1
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad angle {s!r}") from exc


# ---------------------------------------------------------------------------
# figure helpers


def _pts(z):
    return [[_r(w.real), _r(w.imag)] for w in np.asarray(z, dtype=complex).ravel()]


def _unpts(a):
    return np.array([complex(x, y) for x, y in a], dtype=complex)


def _thin(z, n=400):
    z = np.asarray(z, dtype=complex)
    if z.size <= n:
        return z
    return z[np.linspace(0, z.size - 1, n).round().astype(int)]


def _region_outline(X: Region):
    g = X.geom
    if g.geom_type == "Point":
        return np.array([complex(g.x, g.y)])
    return _thin(X.boundary_samples(512))


def _tree_coords(T):
    if T.coords and all(v in T.coords for v in T.vertices):
        return {v: tuple(T.coords[v]) for v in T.vertices}
    depth, order = {T.vertices[0]: 0}, [T.vertices[0]]
    adj = {v: [] for v in T.vertices}
    for a, b in T.edges:
        adj[a].append(b)
        adj[b].append(a)
    for v in order:
        for w in adj[v]:
            if w not in depth:
                depth[w] = depth[v] + 1
                order.append(w)
    rows = {}
    out = {}
    for v in order:
        k = rows.get(depth[v], 0)
        rows[depth[v]] = k + 1
        out[v] = (float(depth[v]), float(-k))
    return out


def render_report(rep) -> str:
    fig = rep.get("figure")
    cmd = rep.get("command")
    if fig is None:
        raise InputError("report carries no figure data")
    if cmd == "variation":
        rays = {lab: _unpts(fig["junction"][lab]) for lab in ("R+", "Ri", "R-")}
        cr = [(complex(*c["at"]), c["sign"]) for c in fig["crossings"]]
        return svg.variation_figure(_unpts(fig["curve"]), _unpts(fig["image"]), rays, cr, _unpts(fig["X"]))
    if cmd in ("index", "fmot", "fixed-points"):
        s = svg.Svg(svg._bounds(*[_unpts(fig[k]) for k in ("curve", "image") if fig.get(k)]
                                + [_unpts(fig.get("points", []))]))
        if fig.get("curve"):
            s.polyline(_unpts(fig["curve"]), 'stroke="#000"', closed=fig.get("closed", True), width=2.0)
        if fig.get("image"):
            s.polyline(_unpts(fig["image"]), 'stroke="#8e44ad"', closed=fig.get("closed", True))
        for z in _unpts(fig.get("points", [])):
            s.dot(z, 3.5, "#c0392b")
        return s.render(cmd)
    if cmd == "lamination":
        return svg.lamination_figure([tuple(c) for c in fig["chords"]])
    if cmd == "dendrite":
        coords = {k: tuple(v) for k, v in fig["coords"].items()}
        marks = [(complex(*m["at"]), m["label"]) for m in fig["marks"]]
        return svg.tree_figure(fig["vertices"], [tuple(e) for e in fig["edges"]], coords, marks)
    if cmd in ("ray", "puzzle"):
        rays = [(r["label"], _unpts(r["points"])) for r in fig["rays"]]
        return svg.rays_figure(rays, _unpts(fig["landings"]), tuple(fig["frame"]))
    if cmd == "scramble":
        s = svg.Svg(svg._bounds(*[_unpts(o) for o in fig["outlines"]]))
        for k, o in enumerate(fig["outlines"]):
            s.polyline(_unpts(o), 'stroke="#000"' if k == 0 else 'stroke="#2471a3"', width=2.0 if k == 0 else 1.2)
        for z in _unpts(fig.get("points", [])):
            s.dot(z, 3.5, "#c0392b")
        return s.render("scramble")
    raise InputError(f"cannot render report of command {cmd!r}")


# ---------------------------------------------------------------------------
# subcommands


def _eps(args, *diams):
    return args.tol_geom * max([1.0, *diams])


def cmd_index(args, cfg):
    f = parse_map(args.map)
    S = parse_curve(args.curve)
    if not S.closed:
        raise InputError("index needs a closed curve")
    eps = _eps(args, S.diameter)
    cfg["eps_geom_abs"] = eps
    n = fixed_point_index(f, S, eps)
    z = _thin(S.vertices)
    return {"index": n}, {"curve": _pts(z), "image": _pts(f(z)), "closed": True}


def cmd_variation(args, cfg):
    f = parse_map(args.map)
    A = parse_curve(args.curve)
    X = parse_region(args.x, A)
    eps = _eps(args, A.diameter, X.diam)
    cfg["eps_geom_abs"] = eps
    rep = variation(f, A, X, eps=eps)
    try:
        oracle, note = variation_oracle(f, A, X, rep.junction, eps=eps), ""
    except PlaneFixError as exc:
        oracle, note = None, f"{type(exc).__name__}: {exc}"
    res = rep.to_json()
    res["oracle"] = oracle
    res["oracle_note"] = note
    res["agrees"] = None if oracle is None else oracle == rep.total
    z = _thin(A.resampled(400).vertices)
    J = rep.junction
    reach = 2 * (X.diam + A.diameter)
    junction = {}
    for lab, ray in (("R+", J.ray_plus), ("Ri", J.ray_i), ("R-", J.ray_minus)):
        v = ray.vertices
        tail = v[-1] + reach * (v[-1] - v[-2]) / max(abs(v[-1] - v[-2]), 1e-300)
        junction[lab] = _pts(np.concatenate([v, [tail]]))
    crossings = []
    for pos, _, sign in rep.crossings:
        w = complex(f(np.array([A.point_at(pos)]))[0])
        crossings.append({"at": [_r(w.real), _r(w.imag)], "sign": int(sign)})
    fig = {"curve": _pts(z), "image": _pts(f(A.resampled(1024).vertices)), "junction": junction,
           "crossings": crossings, "X": _pts(_region_outline(X))}
    if oracle is not None and oracle != rep.total:
        raise Failure((res, fig))
    return res, fig


def cmd_fmot(args, cfg):
    f = parse_map(args.map)
    S = parse_curve(args.curve)
    X = None if args.x in (None, "hull") else parse_region(args.x, S)
    eps = _eps(args, S.diameter)
    cfg["eps_geom_abs"] = eps
    rep = fmot_verify(f, S, X, eps=eps)
    res = rep.to_json()
    res["varsum"] = res["variation_sum"]
    z = _thin(S.vertices)
    fig = {"curve": _pts(z), "image": _pts(f(z)), "closed": True, "points": _pts(rep.partition.points)}
    if not rep.holds:
        raise Failure((res, fig))
    return res, fig


def cmd_fixed_points(args, cfg):
    f = parse_map(args.map)
    box = _floats(args.box, 4, 4, "box") if args.box else [-2.0, 2.0, -2.0, 2.0]
    cfg["box"] = box
    recs = locate_fixed_points(f, tuple(box))
    orient = orientation_class(f)
    res = {"fixed_points": [r.to_json() for r in recs], "orientation": orient.to_json()}
    x0, x1, y0, y1 = box
    frame = np.array([complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)])
    return res, {"curve": _pts(frame), "closed": True, "points": _pts([r.location for r in recs])}


def cmd_scramble(args, cfg):
    f = parse_map(args.map)
    if args.x is None:
        raise InputError("--x must name a scramble configuration file")
    cfgx = ScrambleConfig.from_json(_load_json(args.x))
    sc = scramble_check(f, cfgx)
    fx = fixpt_theorem_check(f, cfgx)
    res = {"scramble": sc.to_json(), "fixpt": fx.to_json()}
    outl = [_pts(_region_outline(cfgx.X))] + [_pts(_region_outline(e.Z)) for e in cfgx.exits]
    pts = [] if fx.fixed_point is None else _pts([fx.fixed_point])
    fig = {"outlines": outl, "points": pts}
    if sc.verdict == "none":
        raise Failure((res, fig))
    return res, fig


def _load_treemap(s):
    if s in (None, "tent"):
        return full_tent_map(), "tent"
    return TreeMap.from_json(_load_json(s)), s


def cmd_dendrite(args, cfg):
    f, name = _load_treemap(args.input)
    N = args.depth if args.depth is not None else 3
    cfg["periods"] = N
    T = f.tree
    pts, segs = fixed_points(f)
    res = {"fixed_points": [p.to_json() for p in pts], "fixed_segments": [s.to_json() for s in segs]}
    res["scrambles_boundary"] = scrambles_boundary(f)
    res["exits_away"] = [e.to_json() for e in exits_away(f)]
    p, route = fixed_point_via_retraction(f)
    res["retraction_fixed_point"] = {"point": None if p is None else p.to_json(), "route": route}
    per = periodic_cutpoints(f, N) if f.is_self_map else None
    witnesses, missing = [], 0
    if per is not None:
        res["periodic"] = per.to_json()
        for q, n in per.points:
            w = weakly_repelling(f, q, n, multiples=4)
            missing += w is None
            witnesses.append({"point": q.to_json(), "period": n, "witness": None if w is None else w.to_json()})
    res["witnesses"] = witnesses
    coords = _tree_coords(T)

    def at(q):
        u, v = T.edges[q.edge]
        t = float(q.t)
        (x0, y0), (x1, y1) = coords[u], coords[v]
        return [_r(x0 + t * (x1 - x0)), _r(y0 + t * (y1 - y0))]

    marks = [{"at": at(q), "label": "fix"} for q in pts]
    fig = {"vertices": [str(v) for v in T.vertices], "edges": [[str(a), str(b)] for a, b in T.edges],
           "coords": {str(k): [_r(x), _r(y)] for k, (x, y) in coords.items()}, "marks": marks}
    if missing or (p is None and res["scrambles_boundary"]):
        raise Failure((res, fig))
    return res, fig


def cmd_lamination(args, cfg):
    if args.seed:
        d = args.degree or 2
        depth = args.depth if args.depth is not None else 3
        seed = [Fraction(a) for a in args.seed.split(",")]
        pb = pullback_generate(seed, d, depth, return_result=True)
        L = pb.lamination
        cfg.update({"seed": [str(a) for a in seed], "degree": d, "pullback_depth": depth})
        extra = {"levels": pb.to_json()["levels"], "ambiguities": pb.ambiguities}
    else:
        if args.input is None:
            raise InputError("lamination needs --input or --seed")
        L = FiniteLamination.from_json(_load_json(args.input))
        extra = {}
    inv = check_invariance(L)
    res = {"lamination": L.to_json(), "invariance": inv, **extra}
    res["types"] = {"{" + ",".join(str(a) for a in c) + "}": class_type(L, c) for c in L.classes}
    if inv["E2"]["ok"]:
        Q = quotient_tree(L)
        res["quotient"] = Q.to_json()
    fig = {"chords": [[float(a), float(b)] for a, b in chords(L)]}
    if not inv["ok"]:
        raise Failure((res, fig))
    return res, fig


def _frame(P):
    N = normalize(P)
    R = escape_radius(P) - abs(N.b)
    c = N.b
    return [_r(c.real - R), _r(c.real + R), _r(c.imag - R), _r(c.imag + R)]


def cmd_ray(args, cfg):
    P = parse_map(args.map)
    theta = parse_angle(args.angle)
    depth = args.depth if args.depth is not None else 30
    cfg.update({"depth": depth, "R0": args.r0})
    tr = RayTracer(P, R0=args.r0, eps_land=args.tol_land)
    ray = tr.trace(theta, depth)
    res = ray.to_json()
    fig = {"rays": [{"label": str(theta), "points": res["points"]}],
           "landings": [] if ray.landing is None else [res["landing"]], "frame": _frame(P)}
    if ray.status != "landed":
        raise NumericalFault(f"ray {theta} is {ray.status} (tail diameter {ray.tail_diameter:.3g})")
    return res, fig


def cmd_puzzle(args, cfg):
    if args.input is None:
        raise InputError("puzzle needs --input")
    spec = _load_json(args.input)
    P = parse_map(args.map) if args.map else parse_map("poly:" + json.dumps(spec.get("map")))
    depth = args.depth if args.depth is not None else 40
    cells = args.grid or 512
    cfg.update({"depth": depth, "cells": cells})
    tr = RayTracer(P, eps_land=args.tol_land)
    grid = julia_grid(P, cells)
    try:
        exits = [(region_from_json(e["E"]), {Fraction(a) for a in e["angles"]}) for e in spec.get("exits", [])]
        xs = spec.get("X", {"type": "filled-julia"})
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed puzzle file: {exc}") from exc
    if xs.get("type") == "component":
        piece = piece_from_component(P, exits, _complex(xs["seed"]), depth, tr, grid)
    elif xs.get("type") == "filled-julia":
        piece = PuzzlePiece(filled_julia(P, grid), exits)
    else:
        piece = PuzzlePiece(region_from_json(xs), exits)
    kind = spec.get("kind", "puzzle")
    rays = []
    for E, A in exits:
        for a in sorted(A):
            r = tr.trace(a, depth)
            rays.append({"label": str(a), "points": _pts(r.points)})
    land = [r["points"][-1] for r in rays]
    if kind == "invariant" or args.harness:
        inst = {"kind": "invariant", "X": piece.X} if kind == "invariant" else {"kind": "puzzle", "piece": piece}
        rep = pointdyn_harness(P, inst, depth=max(depth, 48), tracer=tr)
        res = {"harness": rep.to_json()}
        failed = rep.status in ("hypothesis-violated", "not-applicable", "contradiction-alarm")
    else:
        rep = puzzle_piece_check(P, piece, depth, tr, raise_on_fail=False)
        res = {"puzzle": rep.to_json()}
        failed = not rep.ok
    fig = {"rays": rays, "landings": land, "frame": _frame(P)}
    if failed:
        raise Failure((res, fig))
    return res, fig


def cmd_render(args, cfg):
    if args.input is not None:
        obj = _load_json(args.input)
        if isinstance(obj, dict) and "degree" in obj and "classes" in obj:
            L = FiniteLamination.from_json(obj)
            return None, svg.lamination_figure([(float(a), float(b)) for a, b in chords(L)])
        if isinstance(obj, dict) and "figure" in obj:
            return None, render_report(obj)
        raise InputError("render needs a report or a lamination file")
    if args.curve is not None:
        C = parse_curve(args.curve)
        s = svg.Svg(svg._bounds(C.vertices))
        s.polyline(C.vertices, 'stroke="#000"', closed=C.closed, width=2.0)
        return None, s.render("curve")
    raise InputError("render needs --input or --curve")


HANDLERS = {"index": cmd_index, "variation": cmd_variation, "fmot": cmd_fmot, "fixed-points": cmd_fixed_points,
            "scramble": cmd_scramble, "dendrite": cmd_dendrite, "lamination": cmd_lamination, "ray": cmd_ray,
            "puzzle": cmd_puzzle, "render": cmd_render}


def build_parser():
    p = argparse.ArgumentParser(prog="planefix", description="Fixed-point index, variation and dynamics checks.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--map", help="poly:[c0,c1,...] (entries x or [re,im]) or a JSON coefficient file")
    p.add_argument("--curve", help="circle:r[,cx,cy[,n]] | arc:r,deg0,deg1[,cx,cy[,n]] | polyline:x,y;... | JSON")
    p.add_argument("--x", help="hull | segment:x0,y0,x1,y1 | disk:r[,cx,cy] | point:x,y | box:... | JSON file")
    p.add_argument("--angle", help="rational angle p/q in turns")
    p.add_argument("--depth", type=int, help="ray depth, pullback depth or maximal period")
    p.add_argument("--input", help="input file (tree map, lamination, puzzle spec or report)")
    p.add_argument("--seed", help="lamination seed class, comma separated angles")
    p.add_argument("--degree", type=int, help="lamination degree for --seed")
    p.add_argument("--box", help="xmin,xmax,ymin,ymax for fixed-points; write --box=-2,2,-2,2 when xmin is negative")
    p.add_argument("--grid", type=int, help="raster cells per side")
    p.add_argument("--harness", action="store_true", help="puzzle: run the no-rotation harness")
    p.add_argument("--tol-geom", type=float, default=EPS_GEOM, help="geometric tolerance relative to diameter")
    p.add_argument("--tol-fix", type=float, default=1e-9, help="fixed-point residual tolerance")
    p.add_argument("--tol-land", type=float, default=EPS_LAND, help="ray landing tolerance")
    p.add_argument("--r0", type=float, default=1e4, help="outer radius for ray seeds")
    p.add_argument("--out", help="report path (default stdout)")
    p.add_argument("--svg", help="write an SVG figure to this path")
    return p


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _dump(obj):
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True, allow_nan=False) + "\n"


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    for name in ("tol_geom", "tol_fix", "tol_land", "r0"):
        v = getattr(args, name)
        if not (v > 0 and math.isfinite(v)):
            sys.stderr.write(f"error: --{name.replace('_', '-')} must be positive\n")
            return 2
    cfg = {"command": args.command, "tol_geom": args.tol_geom, "tol_fix": args.tol_fix,
           "tol_land": args.tol_land}
    for k in ("map", "curve", "x", "angle", "depth", "input", "seed", "degree", "box", "grid", "harness"):
        v = getattr(args, k)
        if v not in (None, False):
            cfg[k] = v
    code = 0
    try:
        res, fig = HANDLERS[args.command](args, cfg)
    except Failure as exc:
        (res, fig), code = exc.report, 1
    except INPUT_ERRORS as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2
    except NUMERIC_ERRORS as exc:
        sys.stderr.write(f"numerical fault: {type(exc).__name__}: {exc}\n")
        return 3
    except PlaneFixError as exc:
        sys.stderr.write(f"property fails: {type(exc).__name__}: {exc}\n")
        res = {"error": f"{type(exc).__name__}: {exc}"}
        fig, code = None, 1
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    try:
        if args.command == "render":
            _write(args.svg or args.out, fig)
            return 0
        report = {"command": args.command, "version": __version__, "config": cfg, "result": res,
                  "status": "ok" if code == 0 else "fails"}
        if fig is not None:
            report["figure"] = fig
        _write(args.out, _dump(report))
        if args.svg and fig is not None:
            _write(args.svg, render_report(report))
    except OSError as exc:
        sys.stderr.write(f"error: cannot write output: {exc}\n")
        return 2
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
