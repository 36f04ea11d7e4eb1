import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from planefix.dendrite import (Subtree, Tree, TreeMap, TreePoint, exits_away, fixed_in_arc,
                               fixed_point_via_retraction, fixed_points, full_tent_map, periodic_cutpoints,
                               retracted_map, scrambles_boundary, tent_coordinate, to_ambient, weakly_repelling)
from planefix.errors import HypothesisFailed, InputError


def y_tree():
    return Tree(["c", "a", "b", "d"], [("c", "a"), ("c", "b"), ("c", "d")])


def line(*names):
    return Tree(list(names), list(zip(names, names[1:])))


def test_valence_on_y_tree():
    T = y_tree()
    assert T.valence(T.vertex_point("c")) == 3
    assert T.valence(T.vertex_point("a")) == 1
    assert T.valence(TreePoint(0, Fr(1, 3))) == 2


def test_boundary_set():
    T = y_tree()
    arm = Subtree.of(T, [0])
    assert arm.boundary_set() == [T.vertex_point("c")]
    assert Subtree.of(T).boundary_set() == []


def test_retraction():
    T = y_tree()
    arm = Subtree.of(T, [0])  # [c, a]
    assert arm.retract(TreePoint(1, Fr(1, 2))) == T.vertex_point("c")
    x = TreePoint(0, Fr(1, 3))
    assert arm.retract(x) == x
    f = TreeMap.from_vertex_images(T, {"c": T.vertex_point("c"), "a": TreePoint(1, Fr(1, 2))}, [0])
    g = retracted_map(f)
    a_sub = g.tree.vertex_point("a")
    assert to_ambient(g, g(a_sub)) == T.vertex_point("c")


def test_scrambles_boundary():
    T = y_tree()
    inward = TreeMap.from_vertex_images(T, {"c": TreePoint(0, Fr(1, 2)), "a": T.vertex_point("a")}, [0])
    assert scrambles_boundary(inward)
    outward = TreeMap.from_vertex_images(T, {"c": T.vertex_point("b"), "a": T.vertex_point("a")}, [0])
    assert not scrambles_boundary(outward)
    assert exits_away(outward) == [T.vertex_point("c")]
    fixed = TreeMap.from_vertex_images(T, {"c": T.vertex_point("c"), "a": T.vertex_point("c")}, [0])
    assert scrambles_boundary(fixed)


def test_fixed_points_interval():
    T = line("0", "1")
    flip = TreeMap.from_vertex_images(T, {"0": T.vertex_point("1"), "1": T.vertex_point("0")})
    assert fixed_points(flip) == ([TreePoint(0, Fr(1, 2))], [])
    ident = TreeMap.from_vertex_images(T, {"0": T.vertex_point("0"), "1": T.vertex_point("1")})
    pts, segs = fixed_points(ident)
    assert pts == [] and [(s.edge, s.t0, s.t1) for s in segs] == [(0, 0, 1)]
    half = TreeMap.from_vertex_images(T, {"0": T.vertex_point("0"), "1": TreePoint(0, Fr(1, 2))})
    assert fixed_points(half) == ([T.vertex_point("0")], [])


def expanding_line():
    """f(x) = 3x - 1 on [0, 1] inside [-1, 2]; vertex names are coordinates."""
    T = line("-1", "0", "1", "2")
    f = TreeMap.from_vertex_images(T, {"0": T.vertex_point("-1"), "1": T.vertex_point("2")}, [1])
    return T, f


def test_fixed_in_arc():
    T, f = expanding_line()
    r = fixed_in_arc(f, T.vertex_point("0"), T.vertex_point("1"))
    assert r.point == TreePoint(1, Fr(1, 2))
    # the pullback sequence moves monotonically towards the fixed point
    ts = [p.t if p.edge == 1 else Fr(p.edge) for p in r.pullback]
    assert all(f(q) == p for p, q in zip(r.pullback, r.pullback[1:]))
    assert ts == sorted(ts)
    Tl = line("0", "1")
    half = TreeMap.from_vertex_images(Tl, {"0": Tl.vertex_point("0"), "1": TreePoint(0, Fr(1, 2))})
    with pytest.raises(HypothesisFailed):
        fixed_in_arc(half, Tl.vertex_point("0"), Tl.vertex_point("1"))


def test_fixed_in_arc_on_y_tree():
    T = Tree(["c", "a", "b", "d", "A", "B"], [("c", "a"), ("c", "b"), ("c", "d"), ("a", "A"), ("b", "B")])
    f = TreeMap.from_vertex_images(T, {"c": T.vertex_point("c"), "a": T.vertex_point("A"),
                                       "b": T.vertex_point("B"), "d": T.vertex_point("c")}, [0, 1, 2])
    assert len(exits_away(f)) == 2
    assert fixed_in_arc(f, T.vertex_point("a"), T.vertex_point("b")).point == T.vertex_point("c")


def test_weakly_repelling():
    T, f = expanding_line()
    w = weakly_repelling(f, TreePoint(1, Fr(1, 2)))
    assert w is not None and w.kind == "separation"
    Tl = line("0", "1")
    half = TreeMap.from_vertex_images(Tl, {"0": Tl.vertex_point("0"), "1": TreePoint(0, Fr(1, 2))})
    assert weakly_repelling(half, Tl.vertex_point("0")) is None
    tent = full_tent_map()
    p = TreePoint(1, Fr(3, 5))  # coordinate 4/5
    assert tent_coordinate(p) == Fr(4, 5)
    w = weakly_repelling(tent, TreePoint(0, Fr(4, 5)), 2)  # coordinate 2/5
    assert w is not None and w.iterate % 2 == 0


def test_periodic_cutpoints_tent():
    f = full_tent_map()
    coords = lambda N: sorted(tent_coordinate(p) for p, _ in periodic_cutpoints(f, N).points)  # noqa: E731
    assert coords(1) == [Fr(2, 3)]
    assert coords(2) == [Fr(2, 5), Fr(2, 3), Fr(4, 5)]
    rep = periodic_cutpoints(f, 3)
    assert {n for _, n in rep.points} == {1, 2, 3}
    assert rep.per_n == {1: 2, 2: 4, 3: 8}


def test_constant_map_to_leaf_has_no_periodic_cutpoints():
    T = y_tree()
    f = TreeMap.from_vertex_images(T, {v: T.vertex_point("a") for v in T.vertices})
    assert periodic_cutpoints(f, 3).points == []


def test_tree_map_json_round_trip():
    f = full_tent_map()
    g = TreeMap.from_json(f.to_json())
    assert g.to_json() == f.to_json()
    with pytest.raises(InputError):
        TreeMap.from_json({"tree": {"vertices": ["a"], "edges": []}})


def random_map(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 7)
    V = [f"v{i}" for i in range(n)]
    T = Tree(V, [(V[rng.randrange(i)], V[i]) for i in range(1, n)])
    imgs = {}
    for v in V:
        e = rng.randrange(n - 1)
        imgs[v] = T.point(e, Fr(rng.randint(0, 4), 4))
    return T, TreeMap.from_vertex_images(T, imgs)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_fixed_points_are_fixed(seed):
    T, f = random_map(seed)
    pts, segs = fixed_points(f)
    assert all(f(p) == p for p in pts)
    for s in segs:
        assert f(T.point(s.edge, (s.t0 + s.t1) / 2)) == T.point(s.edge, (s.t0 + s.t1) / 2)
    # self-maps of trees always have a fixed point
    assert pts or segs
    p, _ = fixed_point_via_retraction(f)
    assert p is not None and f(p) == p


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 5), st.integers(1, 7))
def test_composition_matches_pointwise(seed, e, k):
    T, f = random_map(seed)
    x = T.point(e % len(T.edges), Fr(k, 8))
    assert f.iterate(2)(x) == f(f(x))
