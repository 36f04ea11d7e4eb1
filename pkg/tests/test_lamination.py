from fractions import Fraction as Fr
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from planefix.errors import NotCompatible, NotDisjoint, NoValidPairing
from planefix.lamination import (FiniteLamination, basilica, check_invariance, chords, class_type, lam_class,
                                 lamwkrp_verify, preimages, pullback_generate, quotient_tree, sigma, sigma_class,
                                 topological_polynomial, tree_valences, unlinked)

C = lambda *a: lam_class(list(a))  # noqa: E731


def test_sigma():
    assert sigma(2, Fr(1, 3)) == Fr(2, 3)
    assert sigma_class(2, C("1/6", "2/3")) == (Fr(1, 3),)
    assert sigma(3, Fr(1, 4)) == Fr(3, 4)
    assert preimages(2, Fr(1, 3)) == [Fr(1, 6), Fr(2, 3)]


def test_unlinked():
    assert unlinked(C("1/3", "2/3"), C("1/9", "2/9"))
    assert not unlinked(C(0, "1/2"), C("1/4", "3/4"))
    with pytest.raises(NotDisjoint):
        unlinked(C("1/3", "2/3"), C("1/3", "5/6"))


def test_check_invariance_reports():
    assert check_invariance(basilica(3))["ok"]
    assert "vacuous" in str(check_invariance(basilica(1))["E1"])
    bad = FiniteLamination(2, basilica(3).classes + (C(0, "1/2"),))
    rep = check_invariance(bad)
    assert not rep["E2"]["ok"] and rep["E2"]["counterexample"]
    rep = check_invariance(FiniteLamination.of(2, [["1/4", "1/2"]]))
    assert not rep["D1"]["ok"]


def test_class_type():
    assert class_type(2, C("1/3", "2/3"))["type"] == "periodic"
    assert class_type(2, C("1/6", "2/3"))["type"] == "critical"
    assert class_type(2, C("1/6", "1/3"))["type"] == "preperiodic"


def test_pullback_basilica():
    assert basilica(0).classes == (C("1/3", "2/3"),)
    # the fixed leaf is one of its own two preimages; the other is {1/6, 5/6}
    assert set(basilica(1).classes) == {C("1/3", "2/3"), C("1/6", "5/6")}
    assert [len(basilica(k).classes) for k in range(4)] == [1, 2, 4, 8]
    res = pullback_generate(C("1/3", "2/3"), 2, 3, return_result=True)
    assert res.ambiguities  # listed rather than silently resolved


def test_pullback_rejects_invalid_seed():
    with pytest.raises(NoValidPairing):
        pullback_generate(C(0, "1/2"), 2, 1)


def test_pullback_rabbit_gap():
    L = pullback_generate(C("1/7", "2/7", "4/7"), 2, 2)
    assert check_invariance(L)["ok"]
    vals = tree_valences(quotient_tree(L))
    assert all(vals[c] == len(c) for c in L.classes)


def test_quotient_tree_shapes():
    for k, n in ((1, 3), (2, 5)):
        Q = quotient_tree(basilica(k))
        assert len(Q.tree.vertices) == n
        degs = sorted(sum(v in e for e in Q.tree.edges) for v in Q.tree.vertices)
        assert degs == [1, 1] + [2] * (n - 2)  # a path
    Q = quotient_tree(FiniteLamination.of(2, [[0, "1/3", "2/3"]]))
    assert sorted(sum(v in e for e in Q.tree.edges) for v in Q.tree.vertices) == [1, 1, 1, 3]
    Q = quotient_tree(FiniteLamination(2, ()))
    assert len(Q.tree.vertices) == 1 and "circle" in Q.note


def test_topological_polynomial_basilica():
    tp = topological_polynomial(basilica(2), basilica(1))
    assert tp.face_map == {"F0": "F0", "F1": "F1", "F2": "F0", "F3": "F2", "F4": "F2"}
    F = tp.map
    assert F.is_self_map
    # the two faces next to the fixed chord {1/3, 2/3} are exchanged
    Q = tp.deep
    k = Q.chords.index((Fr(1, 3), Fr(2, 3)))
    a, b = Q.tree.edges[k]
    assert F(Q.tree.vertex_point(a)) == Q.tree.vertex_point(b)
    assert F(Q.tree.vertex_point(b)) == Q.tree.vertex_point(a)


def test_topological_polynomial_degenerate_and_incompatible():
    seed = basilica(0)
    tp = topological_polynomial(seed, seed)
    assert len(tp.deep.tree.vertices) == 2
    with pytest.raises(NotCompatible):
        topological_polynomial(basilica(1), FiniteLamination.of(2, [["1/7", "2/7"]]))


def test_lamwkrp():
    rep = lamwkrp_verify([basilica(1), basilica(2)], 2)
    assert rep.entries and not rep.flagged
    assert all(e["witness"] is not None for e in rep.entries)
    assert lamwkrp_verify([basilica(1), basilica(2)], 0).entries == []
    with pytest.raises(NotCompatible):
        lamwkrp_verify([FiniteLamination.of(2, [["1/4", "1/2"]]), basilica(1)], 2)


def test_json_round_trip():
    L = basilica(3)
    assert FiniteLamination.from_json(L.to_json()).classes == L.classes


angles = st.builds(lambda p, q: Fr(p % q, q), st.integers(0, 200), st.integers(2, 40))


@settings(max_examples=200, deadline=None)
@given(st.lists(angles, min_size=4, max_size=4, unique=True), angles)
def test_unlinked_symmetric_and_rotation_invariant(pts, r):
    c1, c2 = lam_class(pts[:2]), lam_class(pts[2:])
    u = unlinked(c1, c2)
    assert u == unlinked(c2, c1)
    rot = lambda c: lam_class([(a + r) % 1 for a in c])  # noqa: E731
    assert unlinked(rot(c1), rot(c2)) == u
    # brute-force interleaving oracle
    a, b = sorted(c1)
    inside = [a < x < b for x in c2]
    assert u == (inside[0] == inside[1])


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3), st.integers(1, 3), st.integers(0, 10 ** 4))
def test_pullback_classes_map_onto_classes(d, depth, k):
    """Seeds are periodic leaves of sigma_d; every added class maps onto an existing class."""
    q = d ** 2 - 1
    cands = [C(Fr(a, q), Fr(b, q)) for a, b in combinations(range(q), 2)
             if {sigma(d, Fr(a, q)), sigma(d, Fr(b, q))} == {Fr(b, q), Fr(a, q)}]
    if not cands:
        return
    seed = cands[k % len(cands)]
    try:
        L = pullback_generate(seed, d, depth)
    except NoValidPairing:
        return
    assert check_invariance(L)["ok"]
    classes = set(L.classes)
    for c in classes:
        assert sigma_class(d, c) in classes


def test_chords_of_gap():
    L = FiniteLamination.of(2, [["1/7", "2/7", "4/7"]])
    assert chords(L) == [(Fr(1, 7), Fr(2, 7)), (Fr(1, 7), Fr(4, 7)), (Fr(2, 7), Fr(4, 7))]
