from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dworkmod.lseries import LSeries, quotient
from dworkmod.polygon import Polygon, lower_hull

tails = st.lists(st.integers(0, 3**6 - 1), min_size=1, max_size=8)


@given(tails)
def test_inverse_round_trip(t):
    g = LSeries(3, 6, len(t), [1] + t)
    assert (g * g.inverse()).coeffs == LSeries.one(3, 6, len(t)).coeffs


@given(tails, tails)
def test_quotient_matches_division(a, b):
    D = 5
    A, B = LSeries(3, 6, D, [1] + a), LSeries(3, 6, D, [1] + b)
    assert quotient([A], [B], 3, 6, D).coeffs == (A / B).coeffs


def test_powers():
    g = LSeries(2, 6, 3, [1, 1])
    assert (g**2).coeffs == [1, 2, 1, 0]
    assert (g**-1).coeffs == [1, 63, 1, 63]
    assert (g**0).coeffs == [1, 0, 0, 0]


def test_eq_mod_lower_precision():
    a = LSeries(2, 6, 2, [1, 4, 0])
    b = LSeries(2, 6, 2, [1, 0, 0])
    assert a.eq_mod(b, prec=2) and not a.eq_mod(b, prec=3)


def test_constant_term_must_be_one():
    with pytest.raises(ValueError):
        LSeries(2, 6, 2, [2, 1, 0]).inverse()


def test_polygon_basics():
    P = Polygon.hull([(0, 0), (1, 0), (2, 1), (3, 3), (2, 5)])
    assert P.vertices == [(0, 0), (1, 0), (2, 1), (3, 3)]
    assert P.segments() == [(0, 1), (1, 1), (2, 1)]
    assert P.slope_length(1) == 1
    assert P.value_at(Fraction(3, 2)) == Fraction(1, 2)
    assert P.prefix_to_slope(1).vertices == [(0, 0), (1, 0), (2, 1)]
    assert P.lies_above(Polygon([(0, 0), (3, 0)]))
    assert not Polygon([(0, 0), (3, 0)]).lies_above(P)


@given(st.lists(st.tuples(st.integers(0, 12), st.integers(0, 30)), min_size=1, max_size=15))
def test_hull_is_below_points_and_convex(pts):
    P = Polygon(lower_hull(pts))
    for x, y in pts:
        if P.vertices[0][0] <= x <= P.vertices[-1][0]:
            assert P.value_at(x) <= y
    s = P.slopes()
    assert all(a < b for a, b in zip(s, s[1:]))
