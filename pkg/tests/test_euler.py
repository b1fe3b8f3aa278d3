from hypothesis import given, settings, strategies as st

from dworkmod.euler import (count_points_by_degree, enumerate_closed_points, euler_factor,
                            l_euler, l_power_euler, l_tensor_power_euler, monsky_tate_lift,
                            point_frobenius, teich_points)
from dworkmod.lseries import LSeries
from dworkmod.sigma_module import SigmaModule, direct_sum
from dworkmod.suites import make_lift, rank1_module, rank2_module


def test_points_of_the_line():
    pts = enumerate_closed_points(1, 2, 2)
    assert [x.rep for x in pts if x.degree == 1] == [((0,),), ((1,),)]
    assert [x.minpoly for x in pts if x.degree == 2] == [(1, 1, 1)]


@settings(max_examples=8)
@given(st.sampled_from([(1, 2, 4), (1, 3, 3), (2, 2, 2)]))
def test_orbit_counting_identity(args):
    n, p, d_max = args
    counts = count_points_by_degree(enumerate_closed_points(n, p, d_max))
    for d in range(1, d_max + 1):
        assert sum(e * counts.get(e, 0) for e in range(1, d + 1) if d % e == 0) == p ** (n * d)


def test_classical_lift_is_teichmuller(classical2):
    for x in teich_points(classical2, 3):
        R = x.ring
        assert tuple(R.teichmuller(c) for c in x.point.rep) == x.coords


def test_perturbed_lift_of_one(perturbed2):
    pt = [p for p in enumerate_closed_points(1, 2, 1) if p.rep == ((1,),)][0]
    x = monsky_tate_lift(pt, perturbed2)
    assert x.coords == ((2**10 - 1,),)
    assert point_frobenius(x).coords == x.coords
    zero = [p for p in enumerate_closed_points(1, 2, 1) if p.rep == ((0,),)][0]
    assert monsky_tate_lift(zero, perturbed2).coords == ((0,),)


def test_frobenius_orbit_closes(lift2):
    for x in teich_points(lift2, 3):
        y = x
        for _ in range(x.degree):
            y = point_frobenius(y)
        assert y.coords == x.coords


def test_classical_frobenius_is_q_power(classical2):
    for x in teich_points(classical2, 3):
        R = x.ring
        assert point_frobenius(x).coords == tuple(R.pow(c, classical2.q) for c in x.coords)


def test_euler_factor_examples(perturbed2):
    triv = SigmaModule.trivial(perturbed2)
    for x in teich_points(perturbed2, 3):
        assert euler_factor(triv, x).coeffs == [1, 2**10 - 1]     # 1 - T^d
    x = [x for x in teich_points(perturbed2, 1) if x.point.rep == ((1,),)][0]
    assert euler_factor(rank1_module(perturbed2), x).coeffs == [1, 1]


def test_euler_factor_of_direct_sum(lift2):
    A, B = rank1_module(lift2), rank2_module(lift2)
    S = direct_sum(A, B)
    W = lift2.ctx.W
    for x in teich_points(lift2, 2):
        fa = euler_factor(A, x).as_lseries(2, W, 6)
        fb = euler_factor(B, x).as_lseries(2, W, 6)
        assert euler_factor(S, x).as_lseries(2, W, 6) == fa * fb


def test_zeta_of_the_line(lift2):
    L = l_euler(SigmaModule.trivial(lift2), 8)
    assert L.coeffs == [2**m % L.modulus for m in range(9)]


def test_l_euler_multiplicative(lift2):
    A, B = rank1_module(lift2), rank2_module(lift2)
    assert l_euler(direct_sum(A, B), 5, prec=6) == l_euler(A, 5, prec=6) * l_euler(B, 5, prec=6)


def test_power_one_is_l_euler(lift2):
    M = rank2_module(lift2)
    assert l_power_euler(M, 1, 5, prec=6) == l_euler(M, 5, prec=6)


def test_rank_one_power(lift2):
    # L(φ^k) of a rank-1 module is L of the module with entry B^k
    R = rank1_module(lift2)
    B3 = R.B[0][0].with_cap(3)
    R3 = SigmaModule([[B3 * B3 * B3]], lift2)
    assert l_power_euler(R, 3, 5, prec=6) == l_euler(R3, 5, prec=6)


def test_tensor_power_reductions(lift2):
    R = rank1_module(lift2)
    M = rank2_module(lift2)
    triv = SigmaModule.trivial(lift2)
    assert l_tensor_power_euler(M, 2, triv, 0, 4, prec=6) == l_power_euler(M, 2, 4, prec=6)
    # rank 1 x rank 1: factor 1 - α^{k1} β^{k2} T^d
    B = SigmaModule.from_terms(lift2, [[[((0,), 3)]]])
    got = l_tensor_power_euler(R, 2, B, 3, 4, prec=6)
    B2 = R.B[0][0].with_cap(2)
    C = SigmaModule([[(B2 * B2).scal(27)]], lift2)
    assert got == l_euler(C, 4, prec=6)


def test_negative_power_inverts_factor(classical2):
    R = rank1_module(classical2)
    x = teich_points(classical2, 1)[0]
    a = euler_factor(R, x, k=-1).coeffs[1]
    b = euler_factor(R, x, k=1).coeffs[1]
    assert (a * b) % 2**10 == 1
