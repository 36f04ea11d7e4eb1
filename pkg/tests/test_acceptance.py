"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import cmath
import math
import os
import random
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest
import shapely
from shapely.geometry import LineString

from conftest import record
from planefix.analysis import local_index
from planefix.dendrite import (Tree, TreeMap, exits_away, fixed_in_arc, fixed_point_via_retraction, fixed_points,
                               full_tent_map, periodic_cutpoints, scrambles_boundary, weakly_repelling)
from planefix.errors import PlaneFixError
from planefix.geometry import PlaneCurve, Region
from planefix.indexvar import fixed_point_index, fmot_verify, variation, variation_oracle
from planefix.lamination import (FiniteLamination, basilica, check_invariance, lam_class, pullback_generate,
                                 quotient_tree, tree_valences)
from planefix.maps import PolyMap
from planefix.polydyn import RayTracer, angles_up_to, impression_diameter_bound, pointdyn_harness

DATA = os.path.join(os.path.dirname(__file__), "data")


def _roots_of_displacement(coeffs):
    c = np.array(coeffs, dtype=complex)
    c = np.pad(c, (0, max(0, 2 - len(c))))
    c[1] -= 1
    c = np.trim_zeros(c, "b")
    return np.roots(c[::-1]) if len(c) > 1 else np.array([])


def tight_zigzag_curve(h=0.15, b=0.1):
    """Counterclockwise curve hugging [-1, 1], touching it at four points."""
    xs = np.linspace(-1, 1, 81)

    def side(touch, sign):
        return [complex(x, sign * min(b, 2 * min(abs(x - t) for t in touch))) for x in xs]

    bottom = side([-0.4, 0.3], -1)
    top = side([0.35, -0.3], 1)[::-1]
    cap_r = [1 + h * np.exp(1j * t) for t in np.linspace(-np.pi / 2 + 0.3, np.pi / 2 - 0.3, 9)]
    cap_l = [-1 + h * np.exp(1j * t) for t in np.linspace(np.pi / 2 + 0.3, 3 * np.pi / 2 - 0.3, 9)]
    return PlaneCurve(np.array(bottom + cap_r + top + cap_l), closed=True)


# ---------------------------------------------------------------- criterion 1

def fmot_cases(seed=1):
    """Endless stream of (f, S, X) with deg f <= 3 and S a unit circle near the origin."""
    rng = np.random.default_rng(seed)
    while True:
        d = int(rng.integers(1, 4))
        c = tuple((rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)) * 0.45)
        S = PlaneCurve.circle(1.0, complex(*rng.normal(size=2) * 0.2), n=256)
        yield PolyMap(c), S, None


def test_criterion_1_fmot_identity():
    t0 = time.perf_counter()
    rows, skipped = [], 0
    for f, S, X in fmot_cases():
        if len(rows) == 26 or skipped > 400:
            break
        try:
            r = fmot_verify(f, S, X)
        except PlaneFixError:
            # curve through a fixed point or images leaving the hull: not a valid instance
            skipped += 1
            continue
        rows.append((r.index, r.variation_sum, r.holds))
    r = fmot_verify(PolyMap((0, -2)), tight_zigzag_curve(), Region.segment(-1, 1))
    rows.append((r.index, r.variation_sum, r.holds))
    dt = time.perf_counter() - t0
    ok = len(rows) >= 25 and all(i == v + 1 and h for i, v, h in rows) and dt < 10 and rows[-1][:2] == (1, 0)
    record(1, ok, f"{len(rows)} cases, {sum(h for *_, h in rows)} hold, {skipped} invalid skipped, {dt:.2f}s")
    assert ok


# ---------------------------------------------------------------- criterion 2

def test_criterion_2_argument_principle():
    rng = np.random.default_rng(7)
    done, bad = 0, []
    while done < 20:
        d = int(rng.integers(1, 6))
        c = (rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)) / (1 + np.arange(d + 1))
        roots = _roots_of_displacement(c)
        ctr = complex(*rng.uniform(-1, 1, 2))
        r = rng.uniform(0.3, 2.0)
        if len(roots) and np.min(np.abs(np.abs(roots - ctr) - r)) < 0.05:
            continue
        want = int(np.sum(np.abs(roots - ctr) < r))
        got = fixed_point_index(PolyMap(tuple(c)), PlaneCurve.circle(r, ctr, n=256))
        done += 1
        if got != want:
            bad.append((d, got, want))
    ok = not bad
    record(2, ok, f"20 polynomials, mismatches {bad}")
    assert ok


# ---------------------------------------------------------------- criterion 3

def _root_multiplicity_at_zero(coeffs):
    c = list(coeffs) + [0] * max(0, 2 - len(coeffs))
    c[1] -= 1
    return next(k for k, a in enumerate(c) if a != 0)


def test_criterion_3_local_index_table():
    table = {(0, 2): 1, (0, 0.5): 1, (0, 1, 1): 2, (0, 1, 0, 1): 3, (0, 1, 0, 0, 1): 4}
    got = {c: local_index(PolyMap(c), 0) for c in table}
    oracle = {c: _root_multiplicity_at_zero(c) for c in table}
    ok = got == table == oracle
    record(3, ok, f"indices {list(got.values())}, oracle {list(oracle.values())}")
    assert ok


# ---------------------------------------------------------------- criterion 4

def bumping_arc(i0, span, h, N=256):
    a0, a1 = 2 * np.pi * i0 / N, 2 * np.pi * (i0 + span) / N
    t = np.linspace(a0, a1, 200)
    r = 1 + h * np.sin(np.pi * (t - a0) / (a1 - a0))
    return PlaneCurve(r * np.exp(1j * t))


def variation_instances(n=20, seed=3):
    rng = np.random.default_rng(seed)
    D = Region.disk(1, n=256)
    out = []
    while len(out) < n:
        A = bumping_arc(int(rng.integers(0, 256)), int(rng.integers(16, 128)), rng.uniform(0.3, 1.5))
        k = int(rng.integers(1, 4))
        c = [0j] * (k + 1)
        c[k] = rng.uniform(0.5, 0.95) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        c[0] = 0.02 * (rng.normal() + 1j * rng.normal())
        if rng.uniform() < 0.4:
            c[k] *= 3  # expanding instances, where f(X) may reach the junction
        f = PolyMap(tuple(c))
        try:
            v, o = variation(f, A, D).total, variation_oracle(f, A, D)
        except PlaneFixError:
            continue
        out.append((f, A, D, v, o))
    return out


def _posvar_hypotheses(f, A, D):
    """X invariant (so f scrambles its boundary with no exits), f(C) misses C, endpoints map into X."""
    bd = D.boundary_samples(1024)
    if np.max(np.abs(f(bd))) >= 1:
        return False
    fa = f(A.vertices)
    return shapely.distance(LineString(np.c_[fa.real, fa.imag]),
                            LineString(np.c_[A.vertices.real, A.vertices.imag])) > 1e-9


def test_criterion_4_variation_oracles():
    inst = variation_instances()
    agree = sum(v == o for *_, v, o in inst)
    X = Region.segment(-1, 1)
    A = PlaneCurve.arc_of_circle(0.5, 0j, 0.0, math.pi, 128)
    repel = variation(PolyMap((0, 2)), A, X).total
    pos = [v for f, A_, D, v, _ in inst if _posvar_hypotheses(f, A_, D)]
    ok = agree == len(inst) == 20 and repel == 1 and all(v >= 0 for v in pos) and len(pos) > 0
    record(4, ok, f"oracle agreement {agree}/20, repelling case {repel:+d}, "
                  f"{len(pos)} nonnegative-variation instances min {min(pos) if pos else None}")
    assert ok


# ---------------------------------------------------------------- criterion 5

def test_criterion_5_tent_dendrite():
    f = full_tent_map()
    M = np.array([[1, 1], [1, 1]], dtype=object)
    counts, oracle = [], []
    g, Mn = f, np.identity(2, dtype=object)
    for n in range(1, 7):
        if n > 1:
            g = f.compose(g)
        Mn = Mn.dot(M)
        counts.append(len(fixed_points(g)[0]))
        oracle.append(int(np.trace(Mn)))
    per = [len(periodic_cutpoints(f, N).points) for N in (1, 2, 3)]
    rep = periodic_cutpoints(f, 3)
    witnesses = [weakly_repelling(f, p, n) is not None for p, n in rep.points]
    ok = (counts == oracle == [2 ** n for n in range(1, 7)] and per[0] == 1 and per[1] == 3
          and per[0] < per[1] < per[2] and all(witnesses))
    record(5, ok, f"Fix(f^n) {counts}, cutpoint counts {per}, witnesses {sum(witnesses)}/{len(witnesses)}")
    assert ok


# ---------------------------------------------------------------- criterion 6

def _random_tree(rng, nmin=3, nmax=9):
    n = rng.randint(nmin, nmax)
    V = [f"v{i}" for i in range(n)]
    E = [(V[rng.randrange(i)], V[i]) for i in range(1, n)]
    return Tree(V, E), V, E


def _random_subtree(rng, V, E, k):
    D = {rng.randrange(len(E))}
    while len(D) < k:
        verts = sorted({v for e in D for v in E[e]})
        D.add(rng.choice([i for i, e in enumerate(E) if i not in D and (e[0] in verts or e[1] in verts)]))
    return D


def scrambling_maps(n=50, seed=0):
    rng = random.Random(seed)
    out, tried = [], 0
    while len(out) < n:
        tried += 1
        T, V, E = _random_tree(rng)
        D = _random_subtree(rng, V, E, rng.randint(1, len(E)))
        verts = sorted({v for e in D for v in E[e]})
        f = TreeMap.from_vertex_images(T, {v: T.vertex_point(rng.choice(V)) for v in verts}, sorted(D))
        if scrambles_boundary(f):
            out.append(f)
    return out, tried


def two_exit_maps(n=20, seed=1):
    """Maps where two boundary points of D1 are sent to the outside components at them."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        T, V, E = _random_tree(rng, 5, 10)
        D = _random_subtree(rng, V, E, rng.randint(1, len(E) - 2))
        verts = sorted({v for e in D for v in E[e]})
        bnd = sorted(v for v in verts if any(u not in verts for _, u in T.adj[v]))
        if len(bnd) < 2:
            continue
        imgs = {v: T.vertex_point(rng.choice(V)) for v in verts}
        for v in rng.sample(bnd, 2):
            imgs[v] = T.vertex_point(rng.choice([u for _, u in T.adj[v] if u not in verts]))
        out.append(TreeMap.from_vertex_images(T, imgs, sorted(D)))
    return out


def test_criterion_6_boundary_scrambling():
    maps, tried = scrambling_maps()
    fails = 0
    for f in maps:
        p, _ = fixed_point_via_retraction(f)
        fails += p is None or f(p) != p
    arc_fails = 0
    twos = two_exit_maps()
    for f in twos:
        ex = exits_away(f)
        assert len(ex) >= 2
        c = fixed_in_arc(f, ex[0], ex[1]).point
        T = f.tree
        arc_fails += not (f(c) == c and T.separates(c, ex[0], ex[1]) and T.valence(c, f.domain.edges) >= 2)
    ok = fails == 0 and arc_fails == 0
    record(6, ok, f"{len(maps)} scrambling maps ({tried} sampled), {fails} without fixed point; "
                  f"{len(twos)} two-exit maps, {arc_fails} without fixed cutpoint between exits")
    assert ok


# ---------------------------------------------------------------- criterion 7

def angle_mutations(L, count=100, seed=5):
    rng = random.Random(seed)
    angles = sorted(L.angles())
    out = []
    for _ in range(count):
        a = rng.choice(angles)
        delta = Fraction(rng.choice((-1, 1)), 10 * a.denominator)
        new = [lam_class([(x + delta) % 1 if x == a else x for x in c]) for c in L.classes]
        out.append(FiniteLamination(L.degree, tuple(new)))
    return out


def test_criterion_7_lamination_invariance():
    L = basilica(5)
    rep = check_invariance(L)
    base_ok = all(rep[k]["ok"] for k in ("E2", "D1", "D2", "D3"))
    broken = sum(not check_invariance(M)["ok"] for M in angle_mutations(L))
    # val = |g| on the basilica (leaves, valence 2) and on the rabbit (triangle gaps)
    val_ok, checked = True, 0
    for Lx in (L, pullback_generate(lam_class(["1/7", "2/7", "4/7"]), 2, 3)):
        vals = tree_valences(quotient_tree(Lx))
        for c in Lx.classes:
            if len(c) >= 2:
                checked += 1
                val_ok &= vals[c] == len(c)
    ok = base_ok and broken == 100 and val_ok
    record(7, ok, f"depth 5: {len(L.classes)} classes pass={base_ok}; mutations broken {broken}/100; "
                  f"valence model matched on {checked} classes")
    assert ok


# ---------------------------------------------------------------- criterion 8

def test_criterion_8_ray_landing():
    t0 = time.perf_counter()
    cheb, sq = RayTracer([-2, 0, 1]), RayTracer([0, 0, 1])
    err, res, landed = 0.0, 0.0, True
    angles = angles_up_to(32)
    for a in angles:
        for tr, exact in ((sq, cmath.exp(2j * math.pi * a)), (cheb, 2 * math.cos(2 * math.pi * a))):
            r = tr.trace(a, 20)
            landed &= r.status == "landed"
            err, res = max(err, abs(r.landing - exact)), max(res, r.residual)
    dt = time.perf_counter() - t0
    ok = landed and err < 1e-6 and res < 1e-8 and dt < 30
    record(8, ok, f"{len(angles)} angles x 2 maps, max landing error {err:.1e}, max residual {res:.1e}, {dt:.1f}s")
    assert ok


# ---------------------------------------------------------------- criterion 9

def test_criterion_9_degeneracy_diagnostics():
    im = impression_diameter_bound([0, 0, 1], 0, depth=25)
    first = next((k + 1 for k, b in enumerate(im.bound) if b < 1e-3), None)
    h = pointdyn_harness([-2, 0, 1], {"kind": "invariant", "X": Region.segment(-2, 2)})
    rot = h.hypotheses["all rays landing at them are fixed"]
    at_minus_one = "-1" in rot["detail"] and "1/3" in rot["detail"] and "2/3" in rot["detail"]
    ok = (im.status == "consistent with degenerate" and first is not None and first <= 25
          and all(a >= b for a, b in zip(im.bound, im.bound[1:]))
          and h.status == "hypothesis-violated" and rot["ok"] is False and at_minus_one)
    record(9, ok, f"impression below 1e-3 at depth {first} (final {im.bound[-1]:.1e}); harness {h.status}: "
                  f"{rot['detail']}")
    assert ok


# ---------------------------------------------------------------- criterion 10

def cli_invocations(tmp):
    d = DATA
    return {
        "index": ["index", "--map", "poly:[0,0,1]", "--curve", "circle:2"],
        "variation": ["variation", "--map", "poly:[0,2]", "--curve", "arc:0.5,0,180", "--x", "segment:-1,0,1,0"],
        "fmot": ["fmot", "--map", "poly:[0,0,1]", "--curve", "circle:0.9", "--x", "hull"],
        "fixed-points": ["fixed-points", "--map", "poly:[-1,0,1]", "--box=-2,2,-2,2"],
        "scramble": ["scramble", "--map", "poly:[0,-2]", "--x", os.path.join(d, "scramble_segment.json")],
        "dendrite": ["dendrite", "--depth", "3"],
        "lamination": ["lamination", "--seed", "1/3,2/3", "--degree", "2", "--depth", "3"],
        "ray": ["ray", "--map", "poly:[-2,0,1]", "--angle", "1/3", "--depth", "20"],
        "puzzle": ["puzzle", "--input", os.path.join(d, "puzzle_basilica.json"), "--grid", "256"],
        "render": ["render", "--input", os.path.join(d, "lamination_basilica.json")],
    }


def _run_cli(argv, out, svg, threads):
    env = dict(os.environ, OMP_NUM_THREADS=str(threads), OPENBLAS_NUM_THREADS=str(threads),
               MKL_NUM_THREADS=str(threads))
    cmd = [sys.executable, "-m", "planefix.cli", *argv, "--svg", svg]
    if argv[0] != "render":
        cmd += ["--out", out]
    p = subprocess.run(cmd, env=env, capture_output=True, text=True, timeout=300)
    rep = open(out, "rb").read() if os.path.exists(out) else b""
    return p.returncode, rep, open(svg, "rb").read()


def test_criterion_10_cli_determinism(tmp_path):
    diffs, codes = [], {}
    for name, argv in cli_invocations(tmp_path).items():
        runs = []
        for i, threads in enumerate((1, 1, 4)):
            out, svg = str(tmp_path / f"{name}{i}.json"), str(tmp_path / f"{name}{i}.svg")
            runs.append(_run_cli(argv, out, svg, threads))
        codes[name] = runs[0][0]
        if not (runs[0] == runs[1] == runs[2]) or not runs[0][2]:
            diffs.append(name)
    ok = not diffs and all(c in (0, 1) for c in codes.values())
    record(10, ok, f"{len(codes)} subcommands, 3 runs each (threads 1, 1, 4); differing {diffs}; exit codes {codes}")
    assert ok
