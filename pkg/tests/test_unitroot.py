import pytest

from dworkmod.errors import NotNormalized
from dworkmod.euler import l_euler, l_power_euler, teich_points
from dworkmod.sigma_module import SigmaModule, normalize_twist, sym_power
from dworkmod.suites import rank1_module, rank2_module
from dworkmod.unitroot import (congruence_check_75, decomposition_identity, eigen_residual,
                               hodge_newton_unit, l_limiting, limiting_module, orbit_product,
                               sym_power_truncated, unit_fiber_check, unit_root_euler, unit_root_l)


def test_diagonal_unit_root(classical2):
    M = SigmaModule.from_ints(classical2, [[1, 0], [0, 2]])
    ur = hodge_newton_unit(M, 6)
    assert ur.alpha.items() == [((0,), 1)]
    assert all(c.is_zero() for c in ur.cvec)
    assert ur.iterations == 1
    assert unit_fiber_check(ur, M, 3).ok


def test_rank_one_unit_root(lift2):
    R = rank1_module(lift2)
    ur = hodge_newton_unit(R, 6)
    assert ur.alpha == R.B[0][0] and ur.cvec == []


def test_rank_one_fiber_product(lift2):
    R = rank1_module(lift2)
    ur = hodge_newton_unit(R, 6)
    fc = unit_fiber_check(ur, R, 3)
    assert fc.ok
    for row, x in zip(fc.rows, teich_points(lift2, 3)):
        assert row["orbit_product"] == row["unit_root"]


def test_contraction_example(classical2):
    M = SigmaModule.from_ints(classical2, [[1, 2], [2, 2]])
    ur = hodge_newton_unit(M, 6)
    assert ur.alpha.constant_term() % 2 == 1
    assert eigen_residual(M, ur) >= 6
    assert unit_fiber_check(ur, M, 4).ok


def test_suite_module_fiber_check(lift2):
    M = rank2_module(lift2)
    ur = hodge_newton_unit(M, 8)
    assert unit_fiber_check(ur, M, 4).ok


def test_requires_normalized(classical2):
    with pytest.raises(NotNormalized):
        hodge_newton_unit(SigmaModule.from_ints(classical2, [[1, 2], [1, 2]]), 6)


def test_truncated_sym_power_rank_one(classical2):
    R = rank1_module(classical2)
    Lm = sym_power_truncated(R, 3, 6)
    assert Lm.basis == [()]
    assert Lm.entries[((), ())].items() == [((0,), 1), ((1,), 6), ((2,), 12), ((3,), 8)]


def test_truncated_sym_power_k0(classical2):
    Lm = sym_power_truncated(rank2_module(classical2), 0, 4)
    B = Lm.matrix()
    assert B[0][0].items() == [((0,), 1)]
    assert all(B[i][j].is_zero() for i in range(len(B)) for j in range(len(B)) if (i, j) != (0, 0))


def test_truncated_sym2_matches_sym_power(lift2):
    M = rank2_module(lift2)
    a = l_euler(sym_power_truncated(M, 2, 6).as_module(), 4, prec=5)
    b = l_euler(sym_power(M, 2), 4, prec=5)
    assert a == b


def test_limiting_rank_one(classical2):
    R = rank1_module(classical2)
    Lm = limiting_module(R, 3, 6)
    assert Lm.entries[((), ())] == (R.B[0][0].with_cap(3) ** 3)


def test_limiting_k0_empty_monomial(lift2):
    Lm = limiting_module(normalize_twist(rank2_module(lift2)).module, 0, 6)
    idx = Lm.basis.index(())
    assert Lm.matrix()[idx][idx].items() == [((0,), 1)]


def test_limiting_columns_divisible_by_degree(lift2):
    Lm = limiting_module(normalize_twist(rank2_module(lift2)).module, 2, 6)
    B = Lm.matrix()
    for j, s in enumerate(Lm.grading):
        col = min(B[i][j].gauss_ord() for i in range(len(B)))
        assert col >= s


@pytest.mark.parametrize("k,m", [(1, 2), (0, 2), (2, 1), (2, 3)])
def test_limiting_congruence(lift2, k, m):
    phi = normalize_twist(rank2_module(lift2)).module
    assert congruence_check_75(phi, k, m, D_f=6).ok
    assert congruence_check_75(rank1_module(lift2), k, m).ok


def test_l_limiting_rank_one(lift2):
    R = rank1_module(lift2)
    a = l_limiting(limiting_module(R, 2, 6), None, 1, 2, 5, 6)
    assert a == l_power_euler(R, 2, 5, prec=6)


def test_l_limiting_trace_vs_euler(lift2):
    phi = normalize_twist(rank2_module(lift2)).module
    Lm = limiting_module(phi, 1, 4)
    assert l_limiting(Lm, None, 1, 1, 4, 4) == l_limiting(Lm, None, 1, 1, 4, 4, method="euler")


def test_unit_root_l_rank_one(lift2):
    R = rank1_module(lift2)
    assert unit_root_l(R, None, 2, 5, 6).lseries == l_power_euler(R, 2, 5, prec=6)


@pytest.mark.parametrize("k", [1, -1])
def test_unit_root_l_against_orbit_products(lift2, k):
    M = rank2_module(lift2)
    A = unit_root_l(M, None, k, 4, 4)
    assert A.lseries == unit_root_euler(M, None, k, 4, 4, alpha_prec=7)


def test_unit_root_l_with_aux(classical2):
    M = rank2_module(classical2)
    aux = rank1_module(classical2)
    A = unit_root_l(M, aux, 1, 4, 4)
    assert A.lseries == unit_root_euler(M, aux, 1, 4, 4, alpha_prec=7)


def test_decomposition_rank_one(lift2):
    assert decomposition_identity(rank1_module(lift2), 3, 5, 6).ok


@pytest.mark.parametrize("k", [2, 3])
def test_decomposition_rank_two(lift2, k):
    assert decomposition_identity(rank2_module(lift2), k, 5, 5).ok


def test_orbit_product_in_prime_subring(lift2):
    R = rank1_module(lift2)
    for x in teich_points(lift2, 3):
        assert 0 <= orbit_product(R.B[0][0], x) < 2**10
