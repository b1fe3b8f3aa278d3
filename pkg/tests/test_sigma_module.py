import itertools

import pytest
import sympy
from hypothesis import given, strategies as st

from dworkmod.errors import NotOrdinaryShape
from dworkmod.euler import kron, teich_points
from dworkmod.sigma_module import (SigmaModule, basis_polygon, basis_sequence, direct_sum,
                                   ext_power, is_normalized, normalize_twist, seq_sum, seq_sym2,
                                   seq_tensor, seq_wedge2, sym_power, tensor)

seqs = st.lists(st.integers(0, 3), min_size=1, max_size=4)


def const_entries(M):
    return [[e.constant_term() for e in row] for row in M.B]


def test_wedge_of_diagonal(classical2):
    M = SigmaModule.from_ints(classical2, [[3, 0], [0, 5]])
    assert const_entries(ext_power(M, 2)) == [[15]]


def test_sym2_of_rank_one(classical2):
    R = SigmaModule.from_terms(classical2, [[[((0,), 1), ((1,), 2)]]])
    assert sym_power(R, 2).B[0][0].items() == [((0,), 1), ((1,), 4), ((2,), 4)]


def test_tensor_fiber_eigenvalues(classical2):
    # char poly of the tensor fiber vs the pairwise products of eigenvalues
    A = SigmaModule.from_ints(classical2, [[1, 2], [4, 6]])
    B = SigmaModule.from_ints(classical2, [[3, 2], [2, 2]])
    T = tensor(A, B)
    s = sympy.Symbol("s")
    ea = sympy.Matrix(const_entries(A)).eigenvals(multiple=True)
    eb = sympy.Matrix(const_entries(B)).eigenvals(multiple=True)
    want = sympy.expand(sympy.prod([s - a * b for a in ea for b in eb]))
    got = sympy.Matrix(const_entries(T)).charpoly(s).as_expr()
    assert sympy.simplify(want - got) == 0


def test_fiber_of_tensor_is_kronecker(perturbed2):
    M = SigmaModule.from_terms(perturbed2, [[[((0,), 1), ((1,), 2)], [((0,), 2)]],
                                            [[((1,), 2)], [((0,), 2), ((1,), 2)]]])
    T = tensor(M, M)
    for x in teich_points(perturbed2, 2):
        F = M.fiber_matrix(x.ring, x.coords)
        assert T.fiber_matrix(x.ring, x.coords) == kron(x.ring, F, F)


def test_ranks_of_constructions(classical2):
    M = SigmaModule.from_ints(classical2, [[1, 2, 0], [2, 2, 0], [0, 0, 4]])
    assert sym_power(M, 2).rank == 6
    assert ext_power(M, 2).rank == 3
    assert tensor(M, M).rank == 9
    assert direct_sum(M, M).rank == 6


def test_basis_sequence_examples(classical2):
    assert basis_sequence(SigmaModule.from_ints(classical2, [[1, 0], [0, 2]])).padded(3) == [1, 1, 0]
    assert basis_sequence(SigmaModule.trivial(classical2)).padded(2) == [1, 0]
    M = SigmaModule.from_ints(classical2, [[1, 2], [2, 2]])
    S2 = sym_power(M, 2)
    assert basis_sequence(S2).padded(4) == [1, 1, 1, 0]


def test_basis_polygon_examples():
    assert basis_polygon([1, 1]).vertices == [(0, 0), (1, 0), (2, 1)]
    assert basis_polygon([2, 0, 1]).vertices == [(0, 0), (2, 0), (3, 2)]
    assert basis_polygon([3]).vertices == [(0, 0), (3, 0)]


def test_sequence_combinators_examples():
    assert seq_tensor([1, 1], [1, 1]) == [1, 2, 1]
    assert seq_wedge2([1, 1])[:2] == [0, 1] and sum(seq_wedge2([1, 1])) == 1
    assert seq_sym2([1, 1]) == [1, 1, 1]
    assert seq_sum([1, 1], [2]) == [3, 1]


def _multiset(h):
    return sorted(i for i, c in enumerate(h) for _ in range(c))


@given(seqs, seqs)
def test_sequence_combinators_track_orders(h, g):
    # an h-sequence is the multiset of column orders; ⊗ adds orders pairwise
    a, b = _multiset(h), _multiset(g)
    assert _multiset(seq_tensor(h, g)) == sorted(x + y for x in a for y in b)
    assert _multiset(seq_sum(h, g)) == sorted(a + b)
    pairs = list(itertools.combinations_with_replacement(range(len(a)), 2))
    assert _multiset(seq_sym2(h)) == sorted(a[i] + a[j] for i, j in pairs)
    strict = list(itertools.combinations(range(len(a)), 2))
    assert _multiset(seq_wedge2(h)) == sorted(a[i] + a[j] for i, j in strict)


def test_is_normalized_examples(classical2):
    assert is_normalized(SigmaModule.from_ints(classical2, [[1, 2], [2, 2]]))
    assert not is_normalized(SigmaModule.from_ints(classical2, [[1, 2], [1, 2]]))
    assert is_normalized(SigmaModule.from_ints(classical2, [[3, 2], [2, 2]]))


def test_normalize_already_normalized(classical2):
    M = SigmaModule.from_ints(classical2, [[1, 2], [2, 2]])
    tw = normalize_twist(M)
    assert tw.a == 1
    assert tw.module.equals_mod(M, classical2.ctx.W)
    assert [[e.items() for e in row] for row in tw.basis] == [[[((0,), 1)], []], [[], [((0,), 1)]]]


def test_normalize_teichmuller_twist():
    from dworkmod.suites import make_lift
    lift = make_lift(3, 6)
    tw = normalize_twist(SigmaModule.from_ints(lift, [[2, 3], [3, 3]]))
    assert tw.a == 3**6 - 1
    assert is_normalized(tw.module)


def test_normalize_change_of_basis(classical2):
    tw = normalize_twist(SigmaModule.from_ints(classical2, [[1, 2], [1, 2]]))
    assert is_normalized(tw.module)
    assert tw.module.B[1][0].is_zero(1)


def test_normalize_rejects_non_ordinary(classical2):
    with pytest.raises(NotOrdinaryShape):
        normalize_twist(SigmaModule.from_ints(classical2, [[1, 0], [0, 1]]))


def test_fiber_examples(perturbed2):
    x = [x for x in teich_points(perturbed2, 1) if x.point.rep == ((1,),)][0]
    assert SigmaModule.trivial(perturbed2).fiber_matrix(x.ring, x.coords) == [[(1,)]]
    B = SigmaModule.from_terms(perturbed2, [[[((0,), 1), ((1,), 2)]]])
    assert B.fiber_matrix(x.ring, x.coords) == [[(2**10 - 1,)]]
