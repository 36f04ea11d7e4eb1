import cmath
import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from planefix.errors import ConditionFailed, InputError, NotFixed
from planefix.geometry import PlaneCurve, Region
from planefix.polydyn import (PuzzlePiece, RayTracer, classify_fixed, critical_escape_warning, filled_julia,
                              fixed_rays_at, impression_diameter_bound, normalize, piece_from_component,
                              pointdyn_harness, puzzle_piece_check, trace_ray)

SQ, CHEB, BAS = [0, 0, 1], [-2, 0, 1], [-1, 0, 1]
ALPHA = (1 - math.sqrt(5)) / 2


def test_classify_fixed():
    r = classify_fixed(SQ, 1)
    assert r.kind == "repelling" and abs(r.multiplier - 2) < 1e-12
    assert classify_fixed(SQ, 0).kind == "attracting"
    r = classify_fixed([0, 1, 1], 0)
    assert r.kind == "parabolic" and abs(r.multiplier - 1) < 1e-12
    with pytest.raises(NotFixed):
        classify_fixed(SQ, 0.5)
    with pytest.raises(InputError):
        classify_fixed([0, 2], 0)


@pytest.mark.parametrize("P,theta,land", [
    (SQ, Fr(0), 1),
    (SQ, Fr(1, 3), cmath.exp(2j * math.pi / 3)),
    (CHEB, Fr(0), 2),
    (CHEB, Fr(1, 2), -2),
    ([0, 0, 0, 1], Fr(1, 4), 1j),
    ([0, 0, 2], Fr(0), 0.5),  # 2z^2 is conjugate to z^2 by w -> w / 2
])
def test_ray_landing(P, theta, land):
    r = trace_ray(P, theta, 20)
    assert r.status == "landed"
    assert abs(r.landing - land) < 1e-6
    assert r.residual < 1e-8


def test_normalize_conjugates():
    N = normalize([1 + 1j, 0.5, 3, 2])
    z = np.array([0.3 + 0.1j, -1.2j, 2.0])
    P = np.polynomial.polynomial.polyval(z, [1 + 1j, 0.5, 3, 2])
    Q = np.polynomial.polynomial.polyval(N.from_plane(z), N.coeffs)
    assert np.allclose(N.from_plane(P), Q)
    assert N.coeffs[-1] == 1 and N.coeffs[-2] == 0


def test_critical_escape_warning():
    assert critical_escape_warning(BAS) is None
    assert critical_escape_warning([1, 0, 1]) is not None


def test_fixed_rays():
    assert fixed_rays_at(SQ, 1).angles == [Fr(0)]
    assert fixed_rays_at(CHEB, 2).angles == [Fr(0)]
    fr = fixed_rays_at(BAS, ALPHA)
    assert fr.angles == [Fr(1, 3), Fr(2, 3)] and fr.status == "ok"
    assert fr.permutation == {Fr(1, 3): Fr(2, 3), Fr(2, 3): Fr(1, 3)}
    with pytest.raises(InputError):
        fixed_rays_at(SQ, 0)


def test_impression_bounds():
    im = impression_diameter_bound(SQ, 0, 20)
    assert im.status == "consistent with degenerate"
    assert all(a >= b for a, b in zip(im.bound, im.bound[1:]))
    im = impression_diameter_bound(CHEB, Fr(1, 2), 20)
    assert abs(im.landing + 2) < 1e-6 and im.bound[-1] < im.bound[0]
    assert impression_diameter_bound(SQ, 0, 3, eps=1e-12).status == "unresolved"


@pytest.fixture(scope="module")
def basilica_piece():
    return piece_from_component(BAS, [(Region.point(ALPHA), {Fr(1, 3), Fr(2, 3)})], 0j)


def test_puzzle_piece(basilica_piece):
    rep = puzzle_piece_check(BAS, basilica_piece)
    assert rep.ok and rep.wedges[0]["count"] == 2
    with pytest.raises(ConditionFailed) as e:
        puzzle_piece_check(BAS, PuzzlePiece(basilica_piece.X, [(Region.point(0.5), {Fr(1, 3), Fr(2, 3)})]))
    assert e.value.condition == 2
    assert puzzle_piece_check(BAS, PuzzlePiece(filled_julia(BAS), [])).ok


def test_pointdyn_harness():
    h = pointdyn_harness(CHEB, {"kind": "invariant", "X": Region.segment(-2, 2)})
    assert h.status == "hypothesis-violated"
    assert not h.hypotheses["all rays landing at them are fixed"]["ok"]
    circle = Region.from_curve(PlaneCurve.circle(1.0, 0j, 256), filled=False)
    assert pointdyn_harness(SQ, {"kind": "invariant", "X": circle}).status == "not-applicable"
    h = pointdyn_harness(SQ, {"kind": "invariant", "X": Region.point(1)})
    assert h.status == "consistent"
    with pytest.raises(InputError):
        pointdyn_harness(SQ, {"kind": "other"})


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 15), st.integers(2, 16))
def test_rays_commute_with_dynamics(p, q):
    """The ray at angle d*theta lands at P(landing of theta)."""
    theta = Fr(p % q, q)
    tr = RayTracer(BAS)
    a, b = tr.trace(theta, 24), tr.trace(2 * theta % 1, 24)
    if a.status != "landed" or b.status != "landed":
        return
    assert abs(a.landing ** 2 - 1 - b.landing) < 1e-5


@settings(max_examples=15, deadline=None)
@given(st.complex_numbers(max_magnitude=1.0), st.complex_numbers(min_magnitude=0.5, max_magnitude=2.0))
def test_normalize_property(c0, lead):
    c = [c0, 0.3, -0.2j, lead]
    N = normalize(c)
    z = np.array([0.2 + 0.4j, -0.7])
    assert np.allclose(N.from_plane(np.polynomial.polynomial.polyval(z, c)),
                       np.polynomial.polynomial.polyval(N.from_plane(z), N.coeffs), atol=1e-9)
