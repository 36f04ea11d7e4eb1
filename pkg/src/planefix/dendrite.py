"""Exact dynamics of edge-linear maps between finite trees.

Every edge has unit length and is parametrised by an exact ``Fraction`` t in
[0, 1] from its first to its second vertex. Maps are stored as linear pieces
(t0, t1) -> (target edge, s0, s1), so composition, fixed points, preimages and
retraction are all exact.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import HypothesisFailed, InputError, NotFixed

F0, F1 = Fraction(0), Fraction(1)


@dataclass(frozen=True, order=True)
class TreePoint:
    edge: int
    t: Fraction

    def to_json(self):
        return [self.edge, self.t.numerator, self.t.denominator]


class Tree:
    """Finite simplicial tree with unit-length edges."""

    def __init__(self, vertices: Iterable, edges: Iterable, coords: dict | None = None):
        self.vertices = tuple(vertices)
        self.edges = tuple(tuple(e) for e in edges)
        self.coords = dict(coords or {})
        vset = set(self.vertices)
        if not self.vertices or len(vset) != len(self.vertices):
            raise InputError("tree needs distinct vertices")
        for u, v in self.edges:
            if u not in vset or v not in vset or u == v:
                raise InputError(f"bad edge {(u, v)}")
        if len(self.edges) != len(self.vertices) - 1:
            raise InputError("a tree on n vertices has n-1 edges")
        self.adj = {v: [] for v in self.vertices}  # vertex -> [(edge id, neighbour)]
        for i, (u, v) in enumerate(self.edges):
            self.adj[u].append((i, v))
            self.adj[v].append((i, u))
        seen = self._bfs(self.vertices[0])[0]
        if len(seen) != len(self.vertices):
            raise InputError("tree is not connected")

    # ----------------------------------------------------------------- basics
    def _bfs(self, root):
        parent = {root: None}
        order = [root]
        q = deque([root])
        while q:
            x = q.popleft()
            for e, y in self.adj[x]:
                if y not in parent:
                    parent[y] = (x, e)
                    order.append(y)
                    q.append(y)
        return parent, order

    def vertex_point(self, v) -> TreePoint:
        if not self.adj[v]:
            raise InputError("isolated vertex has no edge parametrisation")
        e = min(i for i, _ in self.adj[v])
        return TreePoint(e, F0 if self.edges[e][0] == v else F1)

    def point(self, edge, t) -> TreePoint:
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise InputError("edge parameter outside [0, 1]")
        if t == 0:
            return self.vertex_point(self.edges[edge][0])
        if t == 1:
            return self.vertex_point(self.edges[edge][1])
        return TreePoint(edge, t)

    def canon(self, p: TreePoint) -> TreePoint:
        return self.point(p.edge, p.t)

    def vertex_of(self, p: TreePoint):
        if p.t == 0:
            return self.edges[p.edge][0]
        if p.t == 1:
            return self.edges[p.edge][1]
        return None

    def param_on(self, p: TreePoint, e):
        """Parameter of p on edge e, or None when p is not on e."""
        if p.edge == e:
            return p.t
        v = self.vertex_of(p)
        if v is None:
            return None
        if self.edges[e][0] == v:
            return F0
        if self.edges[e][1] == v:
            return F1
        return None

    def incident(self, p: TreePoint):
        """Germs of T \\ {p}: (edge, direction) pairs, direction +1 means increasing t."""
        v = self.vertex_of(p)
        if v is None:
            return [(p.edge, -1), (p.edge, +1)]
        return [(e, +1 if self.edges[e][0] == v else -1) for e, _ in self.adj[v]]

    def valence(self, p: TreePoint, edges=None) -> int:
        p = self.canon(p)
        if edges is None:
            return len(self.incident(p))
        return sum(1 for e, _ in self.incident(p) if e in edges)

    def to_json(self):
        out = {"vertices": list(self.vertices), "edges": [list(e) for e in self.edges]}
        if self.coords:
            out["coords"] = {str(k): list(v) for k, v in self.coords.items()}
        return out

    @classmethod
    def from_json(cls, obj):
        try:
            coords = {k: tuple(v) for k, v in obj.get("coords", {}).items()}
            return cls(obj["vertices"], [tuple(e) for e in obj["edges"]], coords)
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed tree: {exc}") from exc

    def embed(self, p: TreePoint):
        """Plane coordinates of a point (requires vertex coordinates)."""
        u, v = self.edges[p.edge]
        (x0, y0), (x1, y1) = self.coords[u], self.coords[v]
        t = float(p.t)
        return ((1 - t) * x0 + t * x1, (1 - t) * y0 + t * y1)

    # ------------------------------------------------------------------ paths
    def _vertex_path(self, a, b):
        parent, _ = self._bfs(a)
        out = []
        x = b
        while x != a:
            px, e = parent[x]
            out.append((e, px, x))
            x = px
        return out[::-1]

    def path(self, p: TreePoint, q: TreePoint):
        """Geodesic from p to q as segments (edge, s_from, s_to)."""
        p, q = self.canon(p), self.canon(q)
        if p == q:
            return []
        if p.edge == q.edge and self.vertex_of(p) is None and self.vertex_of(q) is None:
            return [(p.edge, p.t, q.t)]
        best = None
        for sv, pre in self._exits(p):
            for ev, post in self._exits(q, entering=True):
                mid = [(e, F0 if self.edges[e][0] == x else F1, F0 if self.edges[e][0] == y else F1)
                       for e, x, y in self._vertex_path(sv, ev)]
                segs = pre + mid + post
                length = sum(abs(b - a) for _, a, b in segs)
                if best is None or length < best[0]:
                    best = (length, segs)
        return best[1]

    def _exits(self, p, entering=False):
        v = self.vertex_of(p)
        if v is not None:
            return [(v, [])]
        u, w = self.edges[p.edge]
        if entering:
            return [(u, [(p.edge, F0, p.t)]), (w, [(p.edge, F1, p.t)])]
        return [(u, [(p.edge, p.t, F0)]), (w, [(p.edge, p.t, F1)])]

    def distance(self, p, q) -> Fraction:
        return sum((abs(b - a) for _, a, b in self.path(p, q)), F0)

    def point_along(self, segs, d) -> TreePoint:
        for e, a, b in segs:
            ln = abs(b - a)
            if d <= ln:
                return self.point(e, a + (d if b >= a else -d))
            d -= ln
        e, a, b = segs[-1]
        return self.point(e, b)

    def on_path(self, x: TreePoint, p: TreePoint, q: TreePoint) -> bool:
        """x in the closed arc [p, q]."""
        x = self.canon(x)
        return self.distance(p, x) + self.distance(x, q) == self.distance(p, q)

    def separates(self, x, p, q) -> bool:
        """x separates p from q: x lies on the arc [p, q] and differs from both."""
        x, p, q = self.canon(x), self.canon(p), self.canon(q)
        return x != p and x != q and self.on_path(x, p, q)

    def germ_towards(self, p: TreePoint, q: TreePoint):
        """The germ (edge, direction) at p of the arc towards q."""
        segs = self.path(p, q)
        if not segs:
            return None
        e, a, b = segs[0]
        return (e, +1 if b > a else -1)


# ---------------------------------------------------------------------------
# subtrees


@dataclass(frozen=True)
class Subtree:
    """A subtree of ``tree`` given by a set of edge ids (or a single vertex)."""

    tree: Tree
    edges: frozenset
    vertex: object = None

    @classmethod
    def of(cls, tree: Tree, edges=None, vertex=None):
        if edges is None and vertex is None:
            edges = range(len(tree.edges))
        es = frozenset(edges or ())
        if not es and vertex is None:
            raise InputError("empty subtree")
        sub = cls(tree, es, vertex)
        if es and len(sub.vertices()) != len(es) + 1:
            raise InputError("edge set is not a subtree")
        return sub

    def vertices(self):
        if not self.edges:
            return {self.vertex}
        return {v for e in self.edges for v in self.tree.edges[e]}

    def contains(self, p: TreePoint) -> bool:
        v = self.tree.vertex_of(p)
        if v is None:
            return p.edge in self.edges
        return v in self.vertices()

    def boundary_set(self):
        """Points of the subtree at which the ambient tree grows out of it."""
        out = []
        for v in sorted(self.vertices(), key=str):
            if any(e not in self.edges for e, _ in self.tree.adj[v]):
                out.append(self.tree.vertex_point(v))
        return sorted(out)

    def retract(self, x: TreePoint) -> TreePoint:
        """Nearest-point retraction onto the subtree."""
        T = self.tree
        x = T.canon(x)
        if self.contains(x):
            return x
        anchor = T.vertex_point(next(iter(sorted(self.vertices(), key=str))))
        for e, a, b in T.path(x, anchor):
            if e in self.edges:
                return T.point(e, a)
            end = T.point(e, b)
            if self.contains(end):
                return end
        return anchor


def boundary_set(D1: Subtree, D2: Tree = None):
    return D1.boundary_set()


def valence(T: Tree, p: TreePoint, sub: Subtree | None = None) -> int:
    return T.valence(p, None if sub is None else sub.edges)


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True)
class Piece:
    t0: Fraction
    t1: Fraction
    edge: int
    s0: Fraction
    s1: Fraction

    def at(self, t):
        if self.t1 == self.t0:
            return self.s0
        return self.s0 + (t - self.t0) / (self.t1 - self.t0) * (self.s1 - self.s0)

    def inverse(self, s):
        """Parameters t in [t0, t1] with at(t) == s (a single value, all, or none)."""
        lo, hi = min(self.s0, self.s1), max(self.s0, self.s1)
        if not lo <= s <= hi:
            return None
        if self.s0 == self.s1:
            return "all"
        return self.t0 + (s - self.s0) / (self.s1 - self.s0) * (self.t1 - self.t0)


class TreeMap:
    """Edge-linear map from a subtree D1 of ``tree`` into ``tree``."""

    def __init__(self, tree: Tree, domain: Subtree, pieces: dict, vertex_images: dict | None = None):
        self.tree = tree
        self.domain = domain
        self.pieces = {e: tuple(ps) for e, ps in pieces.items()}
        self._vimg = dict(vertex_images or {})

    @classmethod
    def from_vertex_images(cls, tree: Tree, images: dict, domain_edges=None, domain_vertex=None):
        """Stretch each domain edge linearly over the path between its endpoint images."""
        dom = Subtree.of(tree, domain_edges, domain_vertex)
        imgs = {v: tree.canon(images[v]) for v in dom.vertices()}
        pieces = {}
        for e in sorted(dom.edges):
            u, v = tree.edges[e]
            segs = tree.path(imgs[u], imgs[v])
            L = sum((abs(b - a) for _, a, b in segs), F0)
            if L == 0:
                p = imgs[u]
                pieces[e] = [Piece(F0, F1, p.edge, p.t, p.t)]
                continue
            out, c = [], F0
            for te, a, b in segs:
                ln = abs(b - a)
                out.append(Piece(c / L, (c + ln) / L, te, a, b))
                c += ln
            pieces[e] = out
        return cls(tree, dom, pieces, imgs)

    @property
    def is_self_map(self):
        return len(self.domain.edges) == len(self.tree.edges)

    def __call__(self, p: TreePoint) -> TreePoint:
        T = self.tree
        p = T.canon(p)
        v = T.vertex_of(p)
        if v is not None:
            if v in self._vimg:
                return self._vimg[v]
            if not self.domain.contains(p):
                raise InputError("point outside the map's domain")
            e = next(e for e, _ in T.adj[v] if e in self.domain.edges)
            t = T.param_on(p, e)
        else:
            if p.edge not in self.domain.edges:
                raise InputError("point outside the map's domain")
            e, t = p.edge, p.t
        for pc in self.pieces[e]:
            if pc.t0 <= t <= pc.t1:
                return T.point(pc.edge, pc.at(t))
        raise InputError("parameter not covered by pieces")

    def compose(self, inner: "TreeMap") -> "TreeMap":
        """self ∘ inner (inner's images must lie in self's domain)."""
        T = self.tree
        out = {}
        for e, ps in inner.pieces.items():
            new = []
            for pc in ps:
                if pc.s0 == pc.s1:
                    q = self(T.point(pc.edge, pc.s0))
                    new.append(Piece(pc.t0, pc.t1, q.edge, q.t, q.t))
                    continue
                lo, hi = min(pc.s0, pc.s1), max(pc.s0, pc.s1)
                cuts = sorted({lo, hi} | {x for g in self.pieces[pc.edge] for x in (g.t0, g.t1) if lo < x < hi})
                if pc.s1 < pc.s0:
                    cuts = cuts[::-1]
                for s_a, s_b in zip(cuts, cuts[1:]):
                    g = next(g for g in self.pieces[pc.edge] if g.t0 <= min(s_a, s_b) and max(s_a, s_b) <= g.t1)
                    t_a = pc.t0 + (s_a - pc.s0) / (pc.s1 - pc.s0) * (pc.t1 - pc.t0)
                    t_b = pc.t0 + (s_b - pc.s0) / (pc.s1 - pc.s0) * (pc.t1 - pc.t0)
                    new.append(Piece(t_a, t_b, g.edge, g.at(s_a), g.at(s_b)))
            out[e] = _merge(new)
        vimg = {v: self(q) for v, q in inner._vimg.items()}
        return TreeMap(T, inner.domain, out, vimg)

    def iterate(self, n: int) -> "TreeMap":
        if n < 1:
            raise InputError("n must be >= 1")
        g = self
        for _ in range(n - 1):
            g = self.compose(g)
        return g

    def to_json(self):
        return {"tree": self.tree.to_json(), "domain_edges": sorted(self.domain.edges),
                "images": {str(v): self._vimg[v].to_json() for v in sorted(self._vimg, key=str)}}

    @classmethod
    def from_json(cls, obj):
        try:
            T = Tree.from_json(obj["tree"])
            images = {}
            for k, (e, num, den) in obj["images"].items():
                key = next((v for v in T.vertices if str(v) == k), k)
                images[key] = T.point(int(e), Fraction(int(num), int(den)))
            dom = obj.get("domain_edges")
            return cls.from_vertex_images(T, images, dom)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed tree map: {exc}") from exc


def _merge(pieces):
    out = []
    for p in pieces:
        if p.t0 == p.t1:
            continue
        if out:
            q = out[-1]
            if q.edge == p.edge and q.s1 == p.s0 and q.t1 == p.t0 and (
                    (q.s1 - q.s0) * (p.t1 - p.t0) == (p.s1 - p.s0) * (q.t1 - q.t0)):
                out[-1] = Piece(q.t0, p.t1, q.edge, q.s0, p.s1)
                continue
        out.append(p)
    return out


def retracted_map(f: TreeMap) -> TreeMap:
    """g = r ∘ f, a self-map of the domain subtree."""
    T, D1 = f.tree, f.domain
    sub = Tree(sorted(D1.vertices(), key=str), [T.edges[e] for e in sorted(D1.edges)], T.coords)
    emap = {e: i for i, e in enumerate(sorted(D1.edges))}

    def to_sub(p: TreePoint) -> TreePoint:
        p = D1.retract(p)
        v = T.vertex_of(p)
        if v is not None:
            return sub.vertex_point(v)
        return TreePoint(emap[p.edge], p.t)

    pieces = {}
    for e, ps in f.pieces.items():
        new = []
        for pc in ps:
            if pc.edge in D1.edges:
                new.append(Piece(pc.t0, pc.t1, emap[pc.edge], pc.s0, pc.s1))
            else:
                a = to_sub(T.point(pc.edge, pc.s0))
                b = to_sub(T.point(pc.edge, pc.s1))
                if a != b:
                    raise InputError("retraction of a non-domain piece is not constant")
                new.append(Piece(pc.t0, pc.t1, a.edge, a.t, a.t))
        pieces[emap[e]] = _merge(new)
    vimg = {v: to_sub(q) for v, q in f._vimg.items()}
    g = TreeMap(sub, Subtree.of(sub), pieces, vimg)
    g.ambient = (T, emap)
    return g


def to_ambient(g: TreeMap, p: TreePoint) -> TreePoint:
    """Translate a point of a retracted map's tree back to the ambient tree."""
    T, emap = g.ambient
    inv = {i: e for e, i in emap.items()}
    return T.canon(TreePoint(inv[p.edge], p.t))


# ---------------------------------------------------------------------------
# fixed points


@dataclass(frozen=True)
class FixedSegment:
    edge: int
    t0: Fraction
    t1: Fraction

    def to_json(self):
        return {"edge": self.edge, "from": str(self.t0), "to": str(self.t1)}


def fixed_points(f: TreeMap):
    """Exact fixed set: (isolated points, fixed segments)."""
    T = f.tree
    pts, segs = set(), []
    for e, ps in f.pieces.items():
        for pc in ps:
            s0 = T.param_on(T.point(pc.edge, pc.s0), e) if pc.edge != e else pc.s0
            s1 = T.param_on(T.point(pc.edge, pc.s1), e) if pc.edge != e else pc.s1
            if pc.edge != e:
                # the image runs along another edge; only a shared vertex can be fixed
                if s0 is not None and s0 == s1 and pc.t0 <= s0 <= pc.t1:
                    pts.add(T.point(e, s0))
                for t in (pc.t0, pc.t1):
                    x = T.point(e, t)
                    if T.vertex_of(x) is not None and f(x) == x:
                        pts.add(x)
                continue
            dt = pc.t1 - pc.t0
            k = (s1 - s0) / dt
            if k == 1:
                if s0 == pc.t0:
                    segs.append(FixedSegment(e, pc.t0, pc.t1))
                continue
            t = (s0 - k * pc.t0) / (1 - k)
            if pc.t0 <= t <= pc.t1:
                pts.add(T.point(e, t))
    for v in f.domain.vertices():
        x = T.vertex_point(v)
        if f(x) == x:
            pts.add(x)
    segs = _merge_segments(segs)
    pts = {p for p in pts if not any(_in_segment(T, p, s) for s in segs)}
    return sorted(pts), segs


def _merge_segments(segs):
    segs = sorted(segs, key=lambda s: (s.edge, s.t0))
    out = []
    for s in segs:
        if out and out[-1].edge == s.edge and out[-1].t1 >= s.t0:
            out[-1] = FixedSegment(s.edge, out[-1].t0, max(out[-1].t1, s.t1))
        else:
            out.append(s)
    return out


def _in_segment(T, p, s: FixedSegment):
    t = T.param_on(p, s.edge)
    return t is not None and s.t0 <= t <= s.t1


def scrambles_boundary(f: TreeMap) -> bool:
    """Each non-fixed boundary point maps into a component of D2 \\ {e} meeting D1."""
    T, D1 = f.tree, f.domain
    for e in D1.boundary_set():
        fe = f(e)
        if fe == e:
            continue
        germ = T.germ_towards(e, fe)
        if germ[0] not in D1.edges:
            return False
    return True


def exits_away(f: TreeMap):
    """Boundary points mapped into a component of D2 \\ {e} disjoint from D1."""
    T, D1 = f.tree, f.domain
    out = []
    for e in D1.boundary_set():
        fe = f(e)
        if fe != e and T.germ_towards(e, fe)[0] not in D1.edges:
            out.append(e)
    return out


def fixed_point_via_retraction(f: TreeMap):
    """A fixed point of a boundary-scrambling map, found through g = r ∘ f.

    Returns (point, route) where route is 'boundary' if a point of E is fixed
    and 'retraction' otherwise. Returns (None, reason) if none is found.
    """
    E = f.domain.boundary_set()
    for e in E:
        if f(e) == e:
            return e, "boundary"
    g = retracted_map(f)
    pts, segs = fixed_points(g)
    cands = [to_ambient(g, p) for p in pts]
    for s in segs:
        cands.append(to_ambient(g, TreePoint(s.edge, (s.t0 + s.t1) / 2)))
    for c in sorted(cands):
        if c not in E and f(c) == c:
            return c, "retraction"
    return None, "no non-boundary fixed point of the retracted map"


def _arc_preimages(f: TreeMap, segs, q: TreePoint):
    """Positions d (distance from the arc start) of points x on the arc with f(x) = q."""
    T = f.tree
    out = []
    c = F0
    for e, a, b in segs:
        ln = abs(b - a)
        lo, hi = min(a, b), max(a, b)
        for pc in f.pieces[e]:
            if pc.t1 < lo or pc.t0 > hi:
                continue
            s = T.param_on(q, pc.edge)
            if s is None:
                continue
            t = pc.inverse(s)
            if t is None:
                continue
            ts = [max(pc.t0, lo), min(pc.t1, hi)] if t == "all" else [t]
            for tt in ts:
                if lo <= tt <= hi:
                    out.append(c + abs(tt - a))
        c += ln
    return sorted(set(out))


def pullback_sequence(f: TreeMap, a: TreePoint, b: TreePoint, steps=8):
    """a = a_0, a_{-1}, ...: each a_{-n-1} in (a_{-n}, b) with f(a_{-n-1}) = a_{-n}."""
    T = f.tree
    segs = T.path(a, b)
    L = T.distance(a, b)
    seq = [T.canon(a)]
    pos = F0
    for _ in range(steps):
        pre = [d for d in _arc_preimages(f, segs, seq[-1]) if pos < d < L]
        if not pre:
            break
        pos = pre[0]
        seq.append(T.point_along(segs, pos))
    return seq


@dataclass
class ArcFixedPoint:
    point: TreePoint
    pullback: list

    def to_json(self):
        return {"point": self.point.to_json(), "pullback": [p.to_json() for p in self.pullback]}


def fixed_in_arc(f: TreeMap, a: TreePoint, b: TreePoint, steps=8) -> ArcFixedPoint:
    """Fixed cutpoint strictly between a and b when a separates f(a) from b and b separates f(b) from a."""
    T = f.tree
    a, b = T.canon(a), T.canon(b)
    failed = []
    if not T.separates(a, f(a), b):
        failed.append("a-separates")
    if not T.separates(b, f(b), a):
        failed.append("b-separates")
    if failed:
        raise HypothesisFailed(failed, {"a": a.to_json(), "b": b.to_json()})
    pts, segs = fixed_points(f)
    cands = [p for p in pts if T.separates(p, a, b)]
    for s in segs:
        for t in (s.t0, s.t1, (s.t0 + s.t1) / 2):
            p = T.point(s.edge, t)
            if T.separates(p, a, b):
                cands.append(p)
    if not cands:
        raise HypothesisFailed(["no-fixed-point-found"], {})
    c = min(cands, key=lambda p: (T.distance(a, p), p))
    return ArcFixedPoint(c, pullback_sequence(f, a, b, steps))


# ---------------------------------------------------------------------------
# weak repelling and periodic cutpoints

K_MAX = 40


@dataclass
class WeakRepelWitness:
    germ: tuple  # (edge, direction) naming the component B
    kind: str  # "separation" or "fixed-cutpoints"
    point: TreePoint
    scale: int
    iterate: int = 1

    def to_json(self):
        return {"germ": list(self.germ), "kind": self.kind, "point": self.point.to_json(), "scale": self.scale,
                "iterate": self.iterate}


def weakly_repelling(f: TreeMap, p: TreePoint, n: int = 1, k_max: int = K_MAX, multiples: int = 2):
    """Witness that p is a weakly repelling fixed point of some f^(m*n), m <= ``multiples``.

    Iterates that reverse orientation at p admit no separating point, so the
    search moves on to the next multiple of n. Returns None when nothing is
    found at depth ``k_max``.
    """
    T = f.tree
    p = T.canon(p)
    g = f.iterate(n)
    if g(p) != p:
        raise NotFixed("p is not fixed by f^n")
    gm = g
    for m in range(1, multiples + 1):
        if m > 1:
            gm = g.compose(gm)
        w = _weak_witness(T, f.domain, gm, p, k_max)
        if w is not None:
            w.iterate = m * n
            return w
    return None


def _weak_witness(T, domain, g, p, k_max):
    _, segs = fixed_points(g)
    for germ in sorted(T.incident(p)):
        e, d = germ
        if e not in domain.edges:
            continue
        t0 = T.param_on(p, e)
        room = (F1 - t0) if d > 0 else t0
        for k in range(1, k_max + 1):
            step = Fraction(1, 2 ** k)
            if step >= room:
                continue
            x = T.point(e, t0 + d * step)
            gx = g(x)
            if gx != x and T.separates(x, p, gx):
                return WeakRepelWitness(germ, "separation", x, k)
            if any(_in_segment(T, x, s) for s in segs):
                return WeakRepelWitness(germ, "fixed-cutpoints", x, k)
    return None


@dataclass
class PeriodicReport:
    points: list  # [(TreePoint, period)]
    non_isolated: bool
    per_n: dict

    def to_json(self):
        return {"points": [{"point": p.to_json(), "period": n} for p, n in self.points],
                "non_isolated": self.non_isolated, "fixed_counts": {str(k): v for k, v in self.per_n.items()}}


def periodic_cutpoints(f: TreeMap, N: int) -> PeriodicReport:
    """Isolated periodic cutpoints of period <= N with minimal periods."""
    T = f.tree
    found = {}
    non_iso = False
    per_n = {}
    g = f
    for n in range(1, N + 1):
        if n > 1:
            g = f.compose(g)
        pts, segs = fixed_points(g)
        per_n[n] = len(pts)
        non_iso = non_iso or bool(segs)
        for p in pts:
            if p in found or T.valence(p, f.domain.edges) < 2:
                continue
            found[p] = n
    return PeriodicReport(sorted(found.items(), key=lambda kv: (kv[1], kv[0])), non_iso, per_n)


def full_tent_map() -> TreeMap:
    """Tent map on [0, 1] as a two-edge tree 0 - c - 1."""
    T = Tree(["0", "c", "1"], [("0", "c"), ("c", "1")], {"0": (0.0, 0.0), "c": (0.5, 0.0), "1": (1.0, 0.0)})
    return TreeMap.from_vertex_images(T, {"0": T.vertex_point("0"), "c": T.vertex_point("1"),
                                          "1": T.vertex_point("0")})


def tent_coordinate(p: TreePoint) -> Fraction:
    """Position in [0, 1] of a point of the tent tree."""
    return (p.t + (0 if p.edge == 0 else 1)) / 2
