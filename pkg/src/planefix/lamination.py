"""Finite invariant laminations: exact angle dynamics, invariance conditions,
pullbacks, dual-tree quotients and the induced topological polynomial."""
from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .dendrite import Tree, TreeMap, TreePoint, periodic_cutpoints, weakly_repelling
from .errors import InputError, NotCompatible, NotDisjoint, NoValidPairing

WANDERING_NOTE = ("bounded-horizon verdict; wandering continua are excluded for dendritic "
                  "topological Julia sets, so this only means no repetition was seen")


def angle(x) -> Fraction:
    """Exact angle in [0, 1) from a Fraction, int or 'p/q' string."""
    try:
        a = Fraction(x) if not isinstance(x, float) else Fraction(str(x))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad angle {x!r}") from exc
    return a % 1


def lam_class(angles) -> tuple:
    s = [angle(a) for a in angles]
    if len(set(s)) != len(s):
        raise InputError("duplicate angles in a class")
    if not s:
        raise InputError("empty class")
    return tuple(sorted(s))


def sigma(d: int, a) -> Fraction:
    if d < 2:
        raise InputError("degree must be >= 2")
    return (d * angle(a)) % 1


def sigma_class(d: int, c) -> tuple:
    return tuple(sorted({sigma(d, a) for a in c}))


def preimages(d: int, a) -> list:
    a = angle(a)
    return sorted(((a + k) / d) % 1 for k in range(d))


def _in_open_arc(x, s, t):
    """x in the counter-clockwise open arc from s to t (the whole circle minus s when s == t)."""
    if s == t:
        return x != s
    if s < t:
        return s < x < t
    return x > s or x < t


def unlinked(c1, c2) -> bool:
    """True iff c2 lies in a single complementary arc of c1 (disjoint convex hulls)."""
    c1, c2 = tuple(sorted(c1)), tuple(sorted(c2))
    if set(c1) & set(c2):
        raise NotDisjoint(f"classes share angles {sorted(set(c1) & set(c2))}")
    if len(c1) == 1:
        return True
    slots = {bisect.bisect(c1, a) % len(c1) for a in c2}
    return len(slots) == 1


def chord_length(c) -> Fraction:
    """Largest circular distance between two angles of the class."""
    best = Fraction(0)
    for a, b in itertools.combinations(c, 2):
        x = abs(a - b)
        best = max(best, min(x, 1 - x))
    return best


@dataclass(frozen=True)
class FiniteLamination:
    degree: int
    classes: tuple

    @classmethod
    def of(cls, degree, classes):
        if degree < 2:
            raise InputError("degree must be >= 2")
        cs = sorted({lam_class(c) for c in classes})
        return cls(int(degree), tuple(cs))

    def angles(self):
        return {a for c in self.classes for a in c}

    def class_of(self, a):
        for c in self.classes:
            if a in c:
                return c
        return None

    def to_json(self):
        return {"degree": self.degree, "classes": [[str(a) for a in c] for c in self.classes]}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls.of(int(obj["degree"]), [[angle(a) for a in c] for c in obj["classes"]])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed lamination: {exc}") from exc


def _fmt(c):
    return "{" + ",".join(str(a) for a in c) + "}"


def check_invariance(L: FiniteLamination) -> dict:
    """Per-condition pass/fail with the first counterexample."""
    d = L.degree
    rep = {"E1": {"ok": True, "note": "vacuous for finitely many finite classes"}}
    # disjointness and E2
    first = None
    for c1, c2 in itertools.combinations(L.classes, 2):
        try:
            ok = unlinked(c1, c2)
        except NotDisjoint:
            first = f"{_fmt(c1)} and {_fmt(c2)} share an angle"
            break
        if not ok:
            first = f"{_fmt(c1)} and {_fmt(c2)} are linked"
            break
    rep["E2"] = {"ok": first is None, "counterexample": first}
    classes = set(L.classes)
    # D1
    first = None
    for c in L.classes:
        img = sigma_class(d, c)
        if img not in classes:
            first = f"image of {_fmt(c)} is {_fmt(img)}, not a class"
            break
    rep["D1"] = {"ok": first is None, "counterexample": first}
    # D2 relative to the angles present in L
    first = None
    present = L.angles()
    for g in L.classes:
        for a in g:
            for y in preimages(d, a):
                if y in present and sigma_class(d, L.class_of(y)) != g:
                    first = f"preimage {y} of {a} lies in {_fmt(L.class_of(y))}, which does not map onto {_fmt(g)}"
                    break
            if first:
                break
        if first:
            break
    rep["D2"] = {"ok": first is None, "counterexample": first,
                 "note": "checked for preimage angles present in the truncation"}
    # D3: complementary arcs map onto complementary arcs
    first = None
    for g in L.classes:
        if len(g) < 2:
            continue
        img = set(sigma_class(d, g))
        for s, t in zip(g, g[1:] + g[:1]):
            a, b = sigma(d, s), sigma(d, t)
            if any(_in_open_arc(x, a, b) for x in img if x not in (a, b)):
                first = f"arc ({s},{t}) of {_fmt(g)} maps over points of its image"
                break
        if first:
            break
    rep["D3"] = {"ok": first is None, "counterexample": first}
    rep["ok"] = all(v["ok"] for k, v in rep.items() if isinstance(v, dict))
    return rep


def class_type(L: FiniteLamination | int, c, horizon: int = 64) -> dict:
    """critical, periodic, precritical, preperiodic or wandering-at-horizon."""
    d = L.degree if isinstance(L, FiniteLamination) else int(L)
    if horizon < 1:
        raise InputError("horizon must be >= 1")
    c = lam_class(c)
    orbit = [c]
    for _ in range(horizon):
        orbit.append(sigma_class(d, orbit[-1]))
    if len(orbit[1]) < len(c):
        return {"type": "critical"}
    if c in orbit[1:]:
        return {"type": "periodic", "period": orbit[1:].index(c) + 1}
    for j in range(1, horizon):
        if len(orbit[j + 1]) < len(orbit[j]):
            return {"type": "precritical", "steps": j}
    for j in range(1, horizon + 1):
        if orbit[j] in orbit[j + 1:]:
            return {"type": "preperiodic", "preperiod": j}
    return {"type": "wandering-at-horizon", "note": WANDERING_NOTE}


# ---------------------------------------------------------------------------
# pullback


def _blocks(R, g, d, fixed):
    """All partitions of the angle set R into blocks mapping bijectively onto g."""
    if not R:
        yield []
        return
    x = R[0]
    rest = R[1:]
    gx = sigma(d, x)
    others = [y for y in g if y != gx]
    choices = [[z for z in rest if sigma(d, z) == y] for y in others]
    for pick in itertools.product(*choices):
        block = tuple(sorted((x,) + pick))
        if any(not unlinked(block, c) for c in fixed):
            continue
        left = [z for z in rest if z not in pick]
        for tail in _blocks(left, g, d, fixed + [block]):
            yield [block] + tail


def _d3_ok(d, c):
    img = set(sigma_class(d, c))
    for s, t in zip(c, c[1:] + c[:1]):
        a, b = sigma(d, s), sigma(d, t)
        if any(_in_open_arc(x, a, b) for x in img if x not in (a, b)):
            return False
    return True


@dataclass
class PullbackResult:
    lamination: FiniteLamination
    levels: list  # classes added at each depth
    ambiguities: list = field(default_factory=list)

    def to_json(self):
        out = self.lamination.to_json()
        out["levels"] = [[[str(a) for a in c] for c in lvl] for lvl in self.levels]
        out["ambiguities"] = self.ambiguities
        return out


def pullback_generate(seed, d: int, depth: int, return_result=False):
    """Grow a finite lamination by pulling back classes, using the shortest-leaf pairing rule."""
    seed = lam_class(seed)
    orbit = [seed]
    while True:
        nxt = sigma_class(d, orbit[-1])
        if nxt in orbit:
            break
        orbit.append(nxt)
    for c1, c2 in itertools.combinations(orbit, 2):
        try:
            ok = unlinked(c1, c2)
        except NotDisjoint:
            ok = False
        if not ok:
            raise NoValidPairing(f"forward orbit of the seed is not a lamination: {_fmt(c1)} vs {_fmt(c2)}")
    classes = list(orbit)
    levels = [list(orbit)]
    ambiguities = []
    frontier = list(orbit)
    for level in range(1, depth + 1):
        added = []
        for g in sorted(frontier):
            P = [y for a in g for y in preimages(d, a)]
            present = {a: c for c in classes for a in c}
            R = []
            for y in sorted(set(P)):
                if y in present:
                    if sigma_class(d, present[y]) != g:
                        raise NoValidPairing(f"preimage {y} of {_fmt(g)} already lies in an incompatible class")
                else:
                    R.append(y)
            if not R:
                continue
            options = [bl for bl in _blocks(R, g, d, list(classes))
                       if all(_d3_ok(d, b) for b in bl)
                       and all(unlinked(b1, b2) for b1, b2 in itertools.combinations(bl, 2))]
            if not options:
                raise NoValidPairing(f"no unlinked pairing of the preimages of {_fmt(g)} at depth {level}")
            options.sort(key=lambda bl: (max(chord_length(b) for b in bl), sorted(bl)))
            if len(options) > 1:
                ambiguities.append({"depth": level, "class": [str(a) for a in g], "choices": len(options)})
            chosen = options[0]
            classes.extend(chosen)
            added.extend(chosen)
        levels.append(sorted(added))
        frontier = added
    L = FiniteLamination.of(d, classes)
    res = PullbackResult(L, levels, ambiguities)
    return res if return_result else L


def basilica(depth: int) -> FiniteLamination:
    return pullback_generate((Fraction(1, 3), Fraction(2, 3)), 2, depth)


# ---------------------------------------------------------------------------
# dual tree


def chords(L: FiniteLamination):
    out = []
    for c in L.classes:
        if len(c) == 2:
            out.append((c[0], c[1]))
        elif len(c) >= 3:
            for s, t in zip(c, c[1:] + c[:1]):
                out.append((min(s, t), max(s, t)))
    return sorted(set(out))


def _side(x, ch):
    return ch[0] < x < ch[1]


@dataclass
class Quotient:
    tree: Tree
    chords: list
    faces: list  # signatures, index = face id
    face_label: list
    projection: dict  # class -> TreePoint or None
    arcs: dict  # face id -> list of (s, t) circle arcs
    gap_face: dict  # class -> face id
    note: str = ""

    def face_of_angle_point(self, x):
        sig = tuple(_side(x, ch) for ch in self.chords)
        return self.faces.index(sig)

    def to_json(self):
        return {
            "tree": self.tree.to_json(),
            "chords": [[str(a), str(b)] for a, b in self.chords],
            "projection": {_fmt(c): (None if p is None else p.to_json()) for c, p in sorted(self.projection.items())},
            "note": self.note,
        }


def quotient_tree(L: FiniteLamination) -> Quotient:
    """Dual tree of the chord system: faces are vertices, chords are edges."""
    rep = check_invariance(L)
    if not rep["E2"]["ok"]:
        raise NotDisjoint(rep["E2"]["counterexample"])
    chs = chords(L)
    angles = sorted(L.angles())
    faces, arcs = [], {}
    if angles:
        pairs = list(zip(angles, angles[1:] + [angles[0] + 1]))
    else:
        pairs = [(Fraction(0), Fraction(1))]
    for s, t in pairs:
        m = ((s + t) / 2) % 1
        sig = tuple(_side(m, ch) for ch in chs)
        if sig not in faces:
            faces.append(sig)
        arcs.setdefault(faces.index(sig), []).append((s % 1, t % 1))
    gap_face = {}
    for c in L.classes:
        if len(c) < 3:
            continue
        sig = []
        for ch in chs:
            if ch[0] in c and ch[1] in c:
                other = next(a for a in c if a not in ch)
                sig.append(_side(other, ch))
            else:
                sig.append(_side(c[0] if c[0] not in ch else c[1], ch))
        sig = tuple(sig)
        if sig not in faces:
            faces.append(sig)
        gap_face[c] = faces.index(sig)
    order = sorted(range(len(faces)), key=lambda i: (i in gap_face.values(),
                                                      min((a for a, _ in arcs.get(i, [])), default=Fraction(2))))
    remap = {old: new for new, old in enumerate(order)}
    faces = [faces[i] for i in order]
    arcs = {remap[k]: v for k, v in arcs.items()}
    gap_face = {c: remap[i] for c, i in gap_face.items()}
    labels = [f"F{i}" for i in range(len(faces))]
    edges, chord_edge = [], {}
    for k, ch in enumerate(chs):
        pair = _adjacent_pair(faces, k, len(chs))
        chord_edge[ch] = len(edges)
        edges.append((labels[pair[0]], labels[pair[1]]))
    coords = {}
    for i, lab in enumerate(labels):
        if i in arcs:
            pts = [((s + ((t - s) % 1) / 2) % 1) for s, t in arcs[i]]
        else:
            c = next(c for c, j in gap_face.items() if j == i)
            pts = list(c)
        xs = [math.cos(2 * math.pi * float(a)) for a in pts]
        ys = [math.sin(2 * math.pi * float(a)) for a in pts]
        coords[lab] = (0.8 * sum(xs) / len(xs), 0.8 * sum(ys) / len(ys))
    tree = Tree(labels, edges, coords) if len(labels) > 1 else None
    note = "" if chs else "no chords: the true quotient is the circle, outside the dendrite model"
    proj = {}
    for c in L.classes:
        if len(c) == 2:
            proj[c] = TreePoint(chord_edge[(c[0], c[1])], Fraction(1, 2))
        elif len(c) >= 3:
            proj[c] = tree.vertex_point(labels[gap_face[c]]) if tree else None
        else:
            proj[c] = None
    if tree is None:
        tree = _single_vertex_tree(labels[0])
    return Quotient(tree, chs, faces, labels, proj, arcs, gap_face, note)


def _adjacent_pair(faces, k, n):
    for i, a in enumerate(faces):
        for j in range(i + 1, len(faces)):
            b = faces[j]
            if a[k] != b[k] and all(a[m] == b[m] for m in range(n) if m != k):
                return (i, j)
    raise NotCompatible("chord without two adjacent faces")


class _PointTree:
    def __init__(self, label):
        self.vertices = (label,)
        self.edges = ()
        self.coords = {label: (0.0, 0.0)}

    def to_json(self):
        return {"vertices": list(self.vertices), "edges": []}


def _single_vertex_tree(label):
    return _PointTree(label)


def tree_valences(Q: Quotient) -> dict:
    """Model valence of every class: vertex degree for gaps, 2 for leaves."""
    out = {}
    for c, p in Q.projection.items():
        if p is None:
            continue
        out[c] = Q.tree.valence(p)
    return out


# ---------------------------------------------------------------------------
# topological polynomial


@dataclass
class TopPoly:
    map: TreeMap
    deep: Quotient
    shallow: Quotient
    face_map: dict  # deep face label -> shallow face label
    inclusion: dict  # shallow face label -> deep face label

    def to_json(self):
        return {"tree": self.deep.tree.to_json(), "face_map": self.face_map, "inclusion": self.inclusion,
                "self_map": {v: self.map._vimg[v].to_json() for v in sorted(self.map._vimg)}}


def topological_polynomial(L_deep: FiniteLamination, L_shallow: FiniteLamination) -> TopPoly:
    """Self-map of the deep dual tree induced by σ_d followed by the inclusion of the shallow tree."""
    d = L_deep.degree
    if L_shallow.degree != d:
        raise NotCompatible("degrees differ")
    if not set(L_shallow.classes) <= set(L_deep.classes):
        raise NotCompatible("shallow lamination is not contained in the deep one")
    sh_classes = set(L_shallow.classes)
    for c in L_deep.classes:
        if sigma_class(d, c) not in sh_classes:
            raise NotCompatible(f"σ maps {_fmt(c)} outside the shallow lamination")
    Qd, Qs = quotient_tree(L_deep), quotient_tree(L_shallow)
    if not Qd.chords:
        raise NotCompatible("deep lamination has no chords")
    # σ on faces, via sample points on each boundary arc
    fmap = {}
    for i, arcs in Qd.arcs.items():
        imgs = set()
        for s, t in arcs:
            span = (t - s) % 1 or Fraction(1)
            for q in (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)):
                x = (s + q * span) % 1
                imgs.add(Qs.face_of_angle_point(sigma(d, x)))
        if len(imgs) != 1:
            raise NotCompatible(f"face {Qd.face_label[i]} has no well-defined image")
        fmap[i] = imgs.pop()
    for c, i in Qd.gap_face.items():
        img = sigma_class(d, c)
        if img in Qs.gap_face:
            fmap[i] = Qs.gap_face[img]
        else:
            raise NotCompatible(f"gap {_fmt(c)} does not map onto a gap")
    # inclusion of shallow faces into the deep tree
    idx = [Qd.chords.index(ch) for ch in Qs.chords]
    inc = {}
    for j, sig in enumerate(Qs.faces):
        inside = [i for i, dsig in enumerate(Qd.faces) if tuple(dsig[k] for k in idx) == sig]
        if not inside:
            raise NotCompatible(f"shallow face {Qs.face_label[j]} contains no deep face")

        def touches(i):
            n = 0
            for k in idx:
                flipped = list(Qd.faces[i])
                flipped[k] = not flipped[k]
                n += tuple(flipped) in Qd.faces
            return n

        inc[j] = min(inside, key=lambda i: (-touches(i), i))
    T = Qd.tree
    images = {Qd.face_label[i]: T.vertex_point(Qd.face_label[inc[fmap[i]]]) for i in range(len(Qd.faces))}
    F = TreeMap.from_vertex_images(T, images)
    return TopPoly(F, Qd, Qs, {Qd.face_label[i]: Qs.face_label[j] for i, j in fmap.items()},
                   {Qs.face_label[j]: Qd.face_label[i] for j, i in inc.items()})


@dataclass
class LamWkrpReport:
    entries: list
    flagged: list
    non_isolated: bool

    def to_json(self):
        return {"entries": self.entries, "flagged": self.flagged, "non_isolated": self.non_isolated}


def lamwkrp_verify(ladder, N: int, multiples: int = 4) -> LamWkrpReport:
    """Periodic cutpoints of the induced tree map, each with a weak-repelling witness."""
    ladder = list(ladder)
    for L in ladder:
        rep = check_invariance(L)
        if not rep["ok"]:
            bad = [k for k, v in rep.items() if isinstance(v, dict) and not v["ok"]]
            raise NotCompatible(f"lamination fails {bad}")
    if N <= 0:
        return LamWkrpReport([], [], False)
    if len(ladder) < 2:
        raise InputError("ladder needs at least two laminations")
    tp = topological_polynomial(ladder[-1], ladder[-2])
    F = tp.map
    per = periodic_cutpoints(F, N)
    entries, flagged = [], []
    for p, n in per.points:
        w = weakly_repelling(F, p, n, multiples=multiples)
        e = {"point": p.to_json(), "period": n, "witness": None if w is None else w.to_json()}
        entries.append(e)
        if w is None:
            flagged.append(p.to_json())
    return LamWkrpReport(entries, flagged, per.non_isolated)
