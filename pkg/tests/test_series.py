import random
from fractions import Fraction

from hypothesis import given, strategies as st

from dworkmod.euler import enumerate_closed_points, monsky_tate_lift
from dworkmod.padic import PAdicContext, UnramifiedElement, build_extension, unramified_ring
from dworkmod.series import SigmaLift, TruncSeries, apply_sigma, laurent_invert, laurent_mul
from dworkmod.trace import split_basic

CTX = PAdicContext(2, 8)


def X(cap=4, ctx=CTX):
    return TruncSeries.monomial(ctx, (1,), 1, deg_cap=cap)


def one(cap=4, ctx=CTX):
    return TruncSeries.const(ctx, 1, 1, cap)


def series_from(coeffs, cap, ctx=CTX):
    return TruncSeries(1, {(i,): c for i, c in enumerate(coeffs)}, cap, ctx)


coeff_lists = st.lists(st.integers(0, 2**8 - 1), min_size=1, max_size=8)


def test_ring_ops_examples():
    assert ((one() + X()) * (one() - X())).items() == [((0,), 1), ((2,), 255)]
    assert (X() * TruncSeries.zero(CTX, 1, 4)).is_zero()


def test_geometric_square():
    D = 6
    g = series_from([1] * (D + 1), D)
    assert (g * g).items() == [((i,), i + 1) for i in range(D + 1)]


@given(coeff_lists, coeff_lists)
def test_mul_matches_convolution_oracle(a, b):
    cap = 6
    got = series_from(a, cap) * series_from(b, cap)
    want = [0] * (cap + 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j <= cap:
                want[i + j] += x * y
    assert got == series_from(want, cap)


def test_apply_sigma_examples():
    classical = SigmaLift(CTX, [TruncSeries.zero(CTX, 1, 0)])
    assert apply_sigma(X(1), classical).items() == [((2,), 1)]
    assert apply_sigma(TruncSeries.const(CTX, 5), classical).items() == [((0,), 5)]
    pert = SigmaLift(CTX, [TruncSeries.from_terms(CTX, 1, [((1,), 1)])])
    f = TruncSeries.monomial(CTX, (2,), deg_cap=4)
    assert apply_sigma(f, pert).items() == [((2,), 4), ((3,), 4), ((4,), 1)]


@given(coeff_lists, coeff_lists)
def test_apply_sigma_is_a_ring_homomorphism(a, b):
    lift = SigmaLift(CTX, [TruncSeries.from_terms(CTX, 1, [((1,), 1)])])
    f, g = series_from(a, 3), series_from(b, 3)
    fg = f.mul(g, 6)
    lhs = apply_sigma(fg, lift, cap=12)
    rhs = apply_sigma(f, lift, cap=12).mul(apply_sigma(g, lift, cap=12), 12)
    assert lhs == rhs
    assert apply_sigma(f + g, lift, cap=12) == apply_sigma(f, lift, cap=12) + apply_sigma(g, lift, cap=12)


def test_gauss_ord_examples():
    f = TruncSeries.from_terms(CTX, 1, [((1,), 2), ((2,), 4)])
    assert f.gauss_ord() == 1
    assert TruncSeries.zero(CTX).gauss_ord() == float("inf")


@given(coeff_lists)
def test_gauss_ord_matches_scan(a):
    f = series_from(a, len(a))
    vals = []
    for c in a:
        c %= 2**8
        if c:
            v = 0
            while c % 2 == 0:
                c //= 2
                v += 1
            vals.append(v)
    assert f.gauss_ord() == (min(vals) if vals else float("inf"))


def test_in_L_examples():
    assert TruncSeries.const(CTX, 4).in_L(1, 2)
    assert not X().in_L(2, 0)


def test_split_outputs_overconverge():
    rng = random.Random(3)
    lift = SigmaLift(CTX, [TruncSeries.from_terms(CTX, 1, [((1,), 1)])])
    b = Fraction(1, 2)
    for _ in range(20):
        f = TruncSeries(1, {(v,): 2**-(-v // 2) * rng.randrange(256) for v in range(11)}, 10, CTX)
        assert f.in_L(b, 0)
        for piece in split_basic(f, lift).values():
            assert piece.with_cap(10 // lift.q).in_L(lift.q * b, 0)


def test_evaluate_examples():
    R = unramified_ring(build_extension(2, 1), 8)
    assert X().evaluate(UnramifiedElement.from_int(R, 1)).c == (1,)
    f = TruncSeries.from_terms(CTX, 1, [((0,), 1), ((1,), 2)])
    assert f.evaluate(UnramifiedElement.from_int(R, -1)).c == (2**8 - 1,)


@given(coeff_lists, coeff_lists, st.integers(0, 2**8 - 1))
def test_evaluate_is_multiplicative(a, b, x0):
    R = unramified_ring(build_extension(2, 1), 8)
    x = UnramifiedElement.from_int(R, x0)
    f, g = series_from(a, 8), series_from(b, 8)
    fg = f.mul(g, 16)
    assert fg.evaluate(x) == f.evaluate(x) * g.evaluate(x)


def test_laurent_invert_geometric():
    h = laurent_invert(one() - X())
    assert h.items() == [((k,), 1) for k in range(5)]


def test_laurent_invert_X():
    h = laurent_invert(X(1))
    assert h.items() == [((-1,), 1)]


def test_laurent_invert_X_plus_p():
    g = TruncSeries.from_terms(CTX, 1, [((1,), 1), ((0,), 2)])
    h = laurent_invert(g)
    assert h.floor >= CTX.W
    # X^{-1} Σ (-2)^k X^{-k}
    for k in range(h.floor):
        assert h[(-1 - k,)] == (-2) ** k % 2**8
    assert laurent_mul(g, h, h.floor).items() == [((0,), 1)]


def test_monsky_tate_point_is_fixed():
    lift = SigmaLift(CTX, [TruncSeries.from_terms(CTX, 1, [((1,), 1)])])
    for pt in enumerate_closed_points(1, 2, 1):
        x = monsky_tate_lift(pt, lift)
        y = x.coords[0]
        R = x.ring
        assert R.add(R.mul(y, y), R.scal(2, y)) == y
