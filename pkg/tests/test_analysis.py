import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from planefix.analysis import (ScrambleConfig, classify_multiplier, fixpt_theorem_check, local_index,
                               locate_fixed_points, orientation_class, repels_outside_witness, scramble_check,
                               topological_type)
from planefix.errors import ConfigInvalid, HypothesisFailed
from planefix.geometry import PlaneCurve, Region
from planefix.maps import FuncMap, PolyMap, abs2_map, conj_map

P = lambda *c: PolyMap(c)  # noqa: E731
UP = PlaneCurve(np.linspace(10j, 0j, 101))


def segment_config(pad=0.05):
    X = Region.segment(-1, 1)
    return ScrambleConfig.build(X, [Region.box(-2, -1, -pad, pad), Region.box(1, 2, -pad, pad)])


def test_orientation_class():
    assert orientation_class(P(0, 0, 1)).verdict == "positive"
    assert orientation_class(conj_map()).verdict == "negative"
    assert orientation_class(abs2_map()).verdict == "undetermined"
    assert "necessary-condition" in orientation_class(P(0, 0, 1)).note


def test_local_index():
    assert local_index(P(0, 2), 0) == 1
    assert local_index(P(0, 0.5), 0) == 1
    assert local_index(P(0, 1, 0, 1), 0) == 3


def _locs(recs):
    return sorted((round(r.location.real, 6), round(r.location.imag, 6)) for r in recs)


def test_locate_fixed_points_square():
    recs = locate_fixed_points(P(0, 0, 1), (-2, 2, -2, 2))
    assert _locs(recs) == [(0.0, 0.0), (1.0, 0.0)]
    by = {round(r.location.real): r for r in recs}
    assert by[0].kind == "attracting" and by[0].local_index == 1
    assert by[1].kind == "repelling" and abs(by[1].multiplier - 2) < 1e-9


def test_locate_fixed_points_translation_and_golden():
    assert locate_fixed_points(P(1, 1), (-2, 2, -2, 2)) == []
    recs = locate_fixed_points(P(-1, 0, 1), (-2, 2, -2, 2))
    phi = (1 + math.sqrt(5)) / 2
    assert _locs(recs) == [(round(1 - phi, 6), 0.0), (round(phi, 6), 0.0)]
    assert all(r.local_index == 1 for r in recs)


def test_topological_type():
    assert topological_type(P(0, 2), 0) == "repelling"
    assert topological_type(P(0, 0.5), 0) == "attracting"
    assert topological_type(P(0, 1, 1), 0) == "unknown"
    assert topological_type(FuncMap(lambda z: 2 * z), 0) == "repelling"


def test_classify_multiplier():
    assert classify_multiplier(2) == "repelling"
    assert classify_multiplier(0.3j) == "attracting"
    assert classify_multiplier(np.exp(2j * np.pi / 5)) == "parabolic"
    assert classify_multiplier(np.exp(2j * np.pi * (math.sqrt(5) - 1) / 2)) == "neutral-other"


def test_scramble_examples():
    assert scramble_check(P(0, 0.5), ScrambleConfig.build(Region.disk(1.0))).verdict == "strongly"
    assert scramble_check(P(0, -2), segment_config()).verdict == "strongly"
    X = Region.box(-1, 1, -0.1, 0.1)
    cfg = ScrambleConfig.build(X, [Region.box(1, 3, -0.1, 0.1)])
    rep = scramble_check(P(0, 2), cfg)
    # the image of the strip also leaves X on the left, so clause 1 fails as well
    assert rep.verdict == "none" and "3" in rep.violated


def test_scramble_config_rejects_overlapping_exits():
    X = Region.segment(-1, 1)
    with pytest.raises(ConfigInvalid):
        ScrambleConfig.build(X, [Region.box(0.5, 2, -1, 1), Region.box(1, 3, -1, 1)])
    with pytest.raises(ConfigInvalid):
        ScrambleConfig.build(X, [Region.box(3, 4, -1, 1)])


def test_fixpt_theorem():
    r = fixpt_theorem_check(P(0, -2), segment_config())
    assert r.applicable and abs(r.fixed_point) < 1e-6
    r = fixpt_theorem_check(P(0, 0.5), ScrambleConfig.build(Region.disk(1.0)))
    assert r.applicable and abs(r.fixed_point) < 1e-6
    assert not fixpt_theorem_check(P(5, 1), segment_config()).applicable


def test_repels_outside_witness():
    w = repels_outside_witness(P(0, 2), Region.segment(-1, 1), 0j, UP, radius=0.5)
    assert w.variation == 1
    assert np.allclose(np.abs(w.crosscut.vertices), 0.5)
    assert np.all(w.crosscut.vertices.imag >= -1e-12)
    with pytest.raises(HypothesisFailed) as e:
        repels_outside_witness(P(0, 0.5), Region.segment(-1, 1), 0j, UP, radius=0.5)
    assert 3 in e.value.clauses
    with pytest.raises(HypothesisFailed) as e:
        repels_outside_witness(P(0, 2), Region.segment(0, 1), 0j, UP, radius=0.25)
    assert e.value.clause == 2


@settings(max_examples=8, deadline=None)
@given(st.lists(st.tuples(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5)), min_size=1, max_size=3),
       st.floats(0.5, 2.0))
def test_locate_matches_roots(roots, lead):
    """f(z) = z + lead * prod(z - r): the fixed points are exactly the chosen roots."""
    rs = [complex(*r) for r in roots]
    if min((abs(a - b) for i, a in enumerate(rs) for b in rs[i + 1:]), default=1) < 0.1:
        return
    c = np.poly1d([1.0])
    for r in rs:
        c = c * np.poly1d([1.0, -r])
    coeffs = list(lead * c.coeffs[::-1]) + [0] * 2
    coeffs[1] += 1
    recs = locate_fixed_points(PolyMap(tuple(coeffs)), (-2, 2, -2, 2))
    found = [r.location for r in recs]
    assert len(found) == len(rs)
    for r in rs:
        assert min(abs(r - z) for z in found) < 1e-6
    assert all(r.local_index == 1 for r in recs)
