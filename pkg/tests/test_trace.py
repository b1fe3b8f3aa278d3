import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dworkmod.errors import UnsupportedDimension
from dworkmod.euler import l_euler
from dworkmod.lseries import LSeries
from dworkmod.series import TruncSeries, apply_sigma
from dworkmod.sigma_module import SigmaModule, direct_sum
from dworkmod.suites import make_lift, rank1_module, rank2_module, suite_modules
from dworkmod.trace import (dims, dwork_matrix, fredholm_det, jacobian_data, l_trace,
                            split_basic, theta_top, trace_functions, truncation_bound, unsplit)


def mono(ctx, e, cap=None):
    return TruncSeries.monomial(ctx, (e,), deg_cap=e if cap is None else cap)


def test_classical_split_is_exact(classical2):
    ctx = classical2.ctx
    for v in range(12):
        fam = split_basic(mono(ctx, v), classical2)
        s, u = divmod(v, 2)
        assert fam[(u,)].items() == [((s,), 1)]
        assert fam[(1 - u,)].is_zero()


def test_split_of_one(lift2):
    fam = split_basic(TruncSeries.const(lift2.ctx, 1), lift2)
    assert fam[(0,)].items() == [((0,), 1)]
    assert fam[(1,)].is_zero()


def test_perturbed_split_round_trip(perturbed2):
    f = mono(perturbed2.ctx, 1, 4)
    assert (unsplit(split_basic(f, perturbed2), perturbed2, 4) - f).is_zero(perturbed2.ctx.W)


@given(st.lists(st.integers(0, 2**10 - 1), min_size=1, max_size=10))
def test_split_round_trip_property(c):
    lift = make_lift(2, 10, "perturbed")
    f = TruncSeries(1, {(i,): x for i, x in enumerate(c)}, len(c) - 1, lift.ctx)
    assert (unsplit(split_basic(f, lift), lift, f.deg_cap) - f).is_zero(6)


def test_trace_function_examples(lift2):
    ctx = lift2.ctx
    assert trace_functions(TruncSeries.const(ctx, 1), lift2).items() == [((0,), 2)]


def test_trace_of_X_classical(classical2):
    # multiplication by X on {1, X} over σ(A) is [[0, X^2], [1, 0]]: trace 0
    assert trace_functions(mono(classical2.ctx, 1, 3), classical2).is_zero()


@given(st.lists(st.integers(0, 2**10 - 1), min_size=1, max_size=6), st.sampled_from(["classical", "perturbed"]))
def test_trace_of_sigma_image(c, kind):
    lift = make_lift(2, 10, kind)
    g = TruncSeries(1, {(i,): x for i, x in enumerate(c)}, len(c) - 1, lift.ctx)
    sg = apply_sigma(g, lift, cap=g.deg_cap * lift.q + lift.growth)
    tr = trace_functions(sg, lift, out_cap=g.deg_cap)
    assert (tr - g.scal(lift.q)).is_zero(6)


def test_jacobians():
    assert jacobian_data(make_lift(2, 8)).J.items() == [((1,), 2)]
    assert jacobian_data(make_lift(3, 8)).J.items() == [((2,), 3)]
    assert jacobian_data(make_lift(2, 8, "perturbed")).J.items() == [((0,), 2), ((1,), 2)]
    assert jacobian_data(make_lift(2, 8, n=2)).J.items() == [((1, 1), 4)]


def test_theta_top_classical_examples(classical2):
    tc = jacobian_data(classical2)
    ctx = classical2.ctx
    assert theta_top(mono(ctx, 3), tc).items() == [((1,), 1)]
    assert theta_top(mono(ctx, 2, 3), tc).is_zero()


@given(st.lists(st.integers(0, 2**10 - 1), min_size=1, max_size=5), st.sampled_from(["classical", "perturbed"]))
def test_theta_top_of_sigma_form(c, kind):
    lift = make_lift(2, 10, kind)
    tc = jacobian_data(lift)
    g = TruncSeries(1, {(i,): x for i, x in enumerate(c)}, len(c) - 1, lift.ctx)
    sg = apply_sigma(g, lift, cap=g.deg_cap * lift.q + lift.growth)
    h = sg.mul(tc.J, sg.deg_cap + tc.J.deg_cap)
    assert (theta_top(h, tc, out_cap=g.deg_cap) - g.scal(lift.q)).is_zero(6)


def test_truncation_bound_examples():
    assert truncation_bound(1, 0, 6, 2) == 5
    assert truncation_bound(Fraction(1, 2), 0, 6, 3) == 5


@given(st.integers(1, 20), st.sampled_from([Fraction(1), Fraction(1, 2), Fraction(1, 3)]), st.sampled_from([2, 3, 5]))
def test_truncation_bound_doubling(N, b, q):
    assert truncation_bound(b, 0, 2 * N, q) + 1 <= 2 * (truncation_bound(b, 0, N, q) + 1)


def test_dwork_matrix_shape_and_orders(lift2):
    M = rank2_module(lift2)
    tc = jacobian_data(lift2)
    for i in (0, 1):
        G = dwork_matrix(M, i, 5, tc=tc)
        assert G.size == dims(1, 5, 2, i)
        assert len(G.cols) == G.size


def test_dwork_matrix_of_trivial_module(classical2):
    # top degree on the unscaled basis: column v is the expansion of Tr(X^v)
    G = dwork_matrix(SigmaModule.trivial(classical2), 1, 5)
    ctx = classical2.ctx
    for c, (v, _, _) in enumerate(G.cols):
        img = trace_functions(mono(ctx, v[0], 5), classical2, out_cap=5)
        for r, (u, _, _) in enumerate(G.rows):
            assert G.entries[r][c] % 2**G.prec == img[u] % 2**G.prec
    assert G.entries[0][0] == 2
    # cross-check against the zeta identity
    G0 = dwork_matrix(SigmaModule.trivial(classical2), 0, 5)
    L = fredholm_det(G0, 5) / fredholm_det(G, 5)
    assert L.eq_mod(LSeries(2, 6, 5, [2**m for m in range(6)]), prec=6)


def test_fredholm_det_examples():
    assert fredholm_det([[0, 0], [0, 0]], 3, 2, 8).coeffs == [1, 0, 0, 0]
    assert fredholm_det([[2, 0], [0, 3]], 3, 2, 8).coeffs == [1, 256 - 5, 6, 0]
    assert fredholm_det([[0, 1], [0, 0]], 3, 2, 8).coeffs == [1, 0, 0, 0]


def test_zeta_by_trace(lift2):
    L = l_trace(SigmaModule.trivial(lift2), 6, N=6)
    assert L.coeffs == [2**m % 2**6 for m in range(7)]


def test_trace_multiplicative(lift2):
    A, B = rank1_module(lift2), rank2_module(lift2)
    assert l_trace(direct_sum(A, B), 5, N=5) == l_trace(A, 5, N=5) * l_trace(B, 5, N=5)


@pytest.mark.parametrize("label", ["trivial", "rank1", "rank2", "sym2", "wedge2"])
def test_trace_equals_euler(lift2, label):
    M = suite_modules(lift2)[label]
    assert l_trace(M, 5, N=5) == l_euler(M, 5, prec=5)


def test_two_variable_perturbed_is_unsupported():
    ctx = make_lift(2, 8).ctx
    from dworkmod.series import SigmaLift
    lift = SigmaLift(ctx, [TruncSeries.from_terms(ctx, 2, [((1, 0), 1)]), TruncSeries.zero(ctx, 2, 0)])
    with pytest.raises(UnsupportedDimension):
        l_trace(SigmaModule.trivial(lift), 3, N=3)
