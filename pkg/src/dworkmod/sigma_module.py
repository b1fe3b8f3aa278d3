"""Finite-rank σ-modules given by polynomial matrices, and their linear algebra.

Column j of ``B`` holds the coordinates of φ(e_j).  Changing basis by an
invertible P gives P^{-1} B σ(P).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import ContextMismatch, NotOrdinaryShape, RankOverflow
from .padic import PAdicContext
from .polygon import Polygon
from .series import SigmaLift, TruncSeries, apply_sigma

DEFAULT_RANK_LIMIT = 64


def _const(lift: SigmaLift, c: int) -> TruncSeries:
    return TruncSeries.const(lift.ctx, c, lift.n, 0)


def _mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    return a.mul(b, a.deg_cap + b.deg_cap)


def det_series(mat, lift: SigmaLift) -> TruncSeries:
    """Leibniz determinant of a small square matrix of series."""
    k = len(mat)
    if k == 0:
        return _const(lift, 1)
    if k == 1:
        return mat[0][0]
    if k == 2:
        return _mul(mat[0][0], mat[1][1]) - _mul(mat[0][1], mat[1][0])
    total = TruncSeries.zero(lift.ctx, lift.n, 0)
    for perm in itertools.permutations(range(k)):
        inv = sum(1 for i in range(k) for j in range(i + 1, k) if perm[i] > perm[j])
        term = mat[0][perm[0]]
        for i in range(1, k):
            term = _mul(term, mat[i][perm[i]])
        total = total - term if inv % 2 else total + term
    return total


def matmul_series(A, B):
    n, m, l = len(A), len(B), len(B[0]) if B else 0
    out = []
    for i in range(n):
        row = []
        for j in range(l):
            acc = None
            for k in range(m):
                t = _mul(A[i][k], B[k][j])
                acc = t if acc is None else acc + t
            row.append(acc)
        out.append(row)
    return out


class SigmaModule:
    """A rank-r σ-module over the lift ``lift`` with matrix ``B``."""

    def __init__(self, B, lift: SigmaLift, label: str = "", rank_limit: int = DEFAULT_RANK_LIMIT):
        r = len(B)
        if any(len(row) != r for row in B):
            raise ValueError("matrix must be square")
        if r > rank_limit:
            raise RankOverflow(f"rank {r} exceeds the limit {rank_limit}")
        for row in B:
            for e in row:
                if e.ctx != lift.ctx or e.nvars != lift.n:
                    raise ContextMismatch("matrix entry has the wrong context")
        self.B = [list(row) for row in B]
        self.lift = lift
        self.label = label
        self.rank_limit = rank_limit

    @property
    def rank(self) -> int:
        return len(self.B)

    @property
    def ctx(self) -> PAdicContext:
        return self.lift.ctx

    def __repr__(self):
        return f"SigmaModule({self.label or 'unnamed'}, rank={self.rank})"

    @classmethod
    def trivial(cls, lift: SigmaLift, label="trivial"):
        return cls([[_const(lift, 1)]], lift, label)

    @classmethod
    def zero_module(cls, lift: SigmaLift, label="zero"):
        return cls([], lift, label)

    @classmethod
    def from_terms(cls, lift: SigmaLift, entries, label=""):
        """``entries[i][j]`` is a list of (exponent, integer) pairs for B[i][j]."""
        B = [[TruncSeries.from_terms(lift.ctx, lift.n, t) for t in row] for row in entries]
        return cls(B, lift, label)

    @classmethod
    def from_ints(cls, lift: SigmaLift, mat, label=""):
        return cls([[_const(lift, c) for c in row] for row in mat], lift, label)

    def entry(self, i, j) -> TruncSeries:
        return self.B[i][j]

    def columns(self):
        return [[self.B[i][j] for i in range(self.rank)] for j in range(self.rank)]

    def max_degree(self) -> int:
        return max((e.degree() for row in self.B for e in row), default=0)

    def scale(self, c: int, label=None) -> "SigmaModule":
        return SigmaModule([[e.scal(c) for e in row] for row in self.B], self.lift, label or self.label)

    def add_matrix(self, D, label=None) -> "SigmaModule":
        return SigmaModule([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.B, D)], self.lift,
                           label or self.label)

    def change_basis(self, P, Pinv) -> "SigmaModule":
        """Matrix P^{-1} B σ(P) of φ in the basis given by the columns of P."""
        sP = [[apply_sigma(e, self.lift) for e in row] for row in P]
        return SigmaModule(matmul_series(matmul_series(Pinv, self.B), sP), self.lift, self.label)

    def equals_mod(self, other, k: int) -> bool:
        return self.rank == other.rank and all(
            a.eq_mod(b, k) for r1, r2 in zip(self.B, other.B) for a, b in zip(r1, r2))

    def fiber_matrix(self, ring, point):
        """Entrywise evaluation at a point given as ring coordinate tuples."""
        return [[e.eval_tuple(ring, point) for e in row] for row in self.B]

    def to_terms(self):
        """Column-major list of serialized entries."""
        return [[self.B[i][j].serialize() for i in range(self.rank)] for j in range(self.rank)]


def _check_same_lift(M1, M2):
    if M1.lift is not M2.lift:
        raise ContextMismatch("modules use different Frobenius lifts")


def direct_sum(M1: SigmaModule, M2: SigmaModule) -> SigmaModule:
    _check_same_lift(M1, M2)
    r1, r2 = M1.rank, M2.rank
    z = TruncSeries.zero(M1.ctx, M1.lift.n, 0)
    B = [[z] * (r1 + r2) for _ in range(r1 + r2)]
    for i in range(r1):
        for j in range(r1):
            B[i][j] = M1.B[i][j]
    for i in range(r2):
        for j in range(r2):
            B[r1 + i][r1 + j] = M2.B[i][j]
    return SigmaModule(B, M1.lift, f"({M1.label}+{M2.label})", max(M1.rank_limit, M2.rank_limit))


def tensor(M1: SigmaModule, M2: SigmaModule) -> SigmaModule:
    """Basis e_i ⊗ f_j in lexicographic order (i major)."""
    _check_same_lift(M1, M2)
    r1, r2 = M1.rank, M2.rank
    limit = max(M1.rank_limit, M2.rank_limit)
    if r1 * r2 > limit:
        raise RankOverflow(f"tensor rank {r1 * r2} exceeds the limit {limit}")
    B = [[None] * (r1 * r2) for _ in range(r1 * r2)]
    for i, j, k, l in itertools.product(range(r1), range(r2), range(r1), range(r2)):
        B[i * r2 + j][k * r2 + l] = _mul(M1.B[i][k], M2.B[j][l])
    return SigmaModule(B, M1.lift, f"({M1.label}*{M2.label})", limit)


def sym_basis(r: int, k: int):
    return list(itertools.combinations_with_replacement(range(r), k))


def wedge_basis(r: int, i: int):
    return list(itertools.combinations(range(r), i))


def sym_power(M: SigmaModule, k: int) -> SigmaModule:
    """Sym^k on the basis of sorted index tuples; zero module for k < 0."""
    if k < 0:
        return SigmaModule.zero_module(M.lift, f"Sym^{k}({M.label})")
    if k == 0:
        return SigmaModule.trivial(M.lift, f"Sym^0({M.label})")
    r = M.rank
    basis = sym_basis(r, k)
    if len(basis) > M.rank_limit:
        raise RankOverflow(f"Sym^{k} rank {len(basis)} exceeds the limit {M.rank_limit}")
    index = {m: t for t, m in enumerate(basis)}
    z = TruncSeries.zero(M.ctx, M.lift.n, 0)
    B = [[z] * len(basis) for _ in basis]
    for col, src in enumerate(basis):
        # expand prod_t φ(e_{src_t}) as a polynomial in the e_i
        poly = {(): _const(M.lift, 1)}
        for s in src:
            nxt = {}
            for mono, c in poly.items():
                for i in range(r):
                    e = M.B[i][s]
                    if e.is_zero():
                        continue
                    key = tuple(sorted(mono + (i,)))
                    t = _mul(c, e)
                    nxt[key] = nxt[key] + t if key in nxt else t
            poly = nxt
        for mono, c in poly.items():
            B[index[mono]][col] = c
    return SigmaModule(B, M.lift, f"Sym^{k}({M.label})", M.rank_limit)


def ext_power(M: SigmaModule, i: int) -> SigmaModule:
    """∧^i on increasing index tuples; entry (T, S) is the minor det B[T, S]."""
    r = M.rank
    if i < 0 or i > r:
        return SigmaModule.zero_module(M.lift, f"Ext^{i}({M.label})")
    if i == 0:
        return SigmaModule.trivial(M.lift, f"Ext^0({M.label})")
    basis = wedge_basis(r, i)
    if len(basis) > M.rank_limit:
        raise RankOverflow(f"wedge rank {len(basis)} exceeds the limit {M.rank_limit}")
    B = [[det_series([[M.B[a][b] for b in S] for a in T], M.lift) for S in basis] for T in basis]
    return SigmaModule(B, M.lift, f"Ext^{i}({M.label})", M.rank_limit)


# ---------------------------------------------------------------------------
# basis sequences and polygons


@dataclass
class BasisSequence:
    h: list
    perm: list = field(default_factory=list)

    @property
    def d(self):
        out = [0]
        for x in self.h:
            out.append(out[-1] + x)
        return out

    def padded(self, n):
        return list(self.h) + [0] * max(0, n - len(self.h))


def column_orders(M: SigmaModule):
    return [min(M.B[i][j].gauss_ord() for i in range(M.rank)) for j in range(M.rank)]


def basis_sequence(M: SigmaModule, i_max: int | None = None) -> BasisSequence:
    """Counts of columns by exact p-divisibility; ``perm`` sorts columns by it."""
    ords = column_orders(M)
    perm = sorted(range(M.rank), key=lambda j: ords[j])
    finite = [o for o in ords if o != float("inf")]
    top = max(finite, default=0) if i_max is None else i_max
    h = [sum(1 for o in ords if o == i) for i in range(int(top) + 1)]
    return BasisSequence(h, perm)


def basis_polygon(h) -> Polygon:
    """Vertices (d_{i+1}, sum_{t<=i} t h_t) for the nonzero h_i."""
    if isinstance(h, BasisSequence):
        h = h.h
    verts = [(0, 0)]
    x = y = 0
    for i, hi in enumerate(h):
        if hi:
            x += hi
            y += i * hi
            verts.append((x, y))
    return Polygon(verts)


def _get(h, i):
    return h[i] if 0 <= i < len(h) else 0


def seq_sum(h, g):
    n = max(len(h), len(g))
    return [_get(h, i) + _get(g, i) for i in range(n)]


def seq_tensor(h, g):
    n = len(h) + len(g) - 1
    return [sum(_get(h, i) * _get(g, c - i) for i in range(c + 1)) for c in range(n)]


def _seq_square(h, sign):
    n = 2 * len(h) - 1
    out = []
    for c in range(n):
        v = sum(_get(h, i) * _get(h, c - i) for i in range(c + 1) if i < c - i)
        if c % 2 == 0:
            m = _get(h, c // 2)
            v += (m * m + sign * m) // 2
        out.append(v)
    return out


def seq_sym2(h):
    return _seq_square(h, 1)


def seq_wedge2(h):
    return _seq_square(h, -1)


# ---------------------------------------------------------------------------
# normalisation


def is_normalized(M: SigmaModule) -> bool:
    """Column 1 is e_1 mod p and every other column vanishes mod p."""
    if M.rank == 0:
        return False
    one = _const(M.lift, 1)
    for i in range(M.rank):
        for j in range(M.rank):
            e = M.B[i][j] - one if (i == 0 and j == 0) else M.B[i][j]
            if not e.is_zero(1):
                return False
    return True


@dataclass
class Twist:
    a: int
    module: SigmaModule
    basis: list
    basis_inv: list
    perm: list


def normalize_twist(M: SigmaModule) -> Twist:
    """Write M = a ⊗ M' with a a Teichmüller constant and M' normalized.

    The unit column is moved first, then e_1 is replaced by e_1 + sum_j c_j e_j
    with c_j = B_j0 / B_00 mod p, which kills the lower part of the first column
    mod p.

    Raises:
        NotOrdinaryShape: no single unit column, or B_00 mod p is not constant.
    """
    lift, p, r = M.lift, M.ctx.p, M.rank
    ords = column_orders(M)
    unit_cols = [j for j, o in enumerate(ords) if o == 0]
    if len(unit_cols) != 1:
        raise NotOrdinaryShape(f"expected one unit column, found {len(unit_cols)}")
    j0 = unit_cols[0]
    perm = [j0] + [j for j in range(r) if j != j0]
    z = TruncSeries.zero(M.ctx, lift.n, 0)
    one = _const(lift, 1)
    Pm = [[one if perm[j] == i else z for j in range(r)] for i in range(r)]
    Pm_inv = [[one if perm[i] == j else z for j in range(r)] for i in range(r)]
    N = M.change_basis(Pm, Pm_inv) if j0 else M
    b00 = N.B[0][0].reduce(1)
    if any(sum(u) for u in b00.coeffs):
        raise NotOrdinaryShape("unit entry is not constant mod p")
    cbar = b00.constant_term() % p
    cinv = pow(cbar, -1, p)
    cs = [N.B[i][0].reduce(1).scal(cinv).reduce(1) for i in range(1, r)]
    if all(c.is_zero() for c in cs):
        P, Pinv, N2 = [row[:] for row in Pm], [row[:] for row in Pm_inv], N
    else:
        P1 = [[one if i == j else z for j in range(r)] for i in range(r)]
        P1inv = [[one if i == j else z for j in range(r)] for i in range(r)]
        for i in range(1, r):
            P1[i][0] = cs[i - 1].with_cap(max(cs[i - 1].degree(), 0))
            P1inv[i][0] = -P1[i][0]
        N2 = N.change_basis(P1, P1inv)
        P = matmul_series(Pm, P1)
        Pinv = matmul_series(P1inv, Pm_inv)
    # Teichmüller lift of cbar in Z_p: iterate y -> y^p
    a = cbar
    for _ in range(M.ctx.W + 1):
        a = pow(a, p, M.ctx.modulus)
    ainv = pow(a, -1, M.ctx.modulus)
    out = N2.scale(ainv, f"normalized({M.label})")
    return Twist(a, out, P, Pinv, perm)


def fiber_charpoly_product(mats, ring):
    """Ordered product of fiber matrices over ``ring``."""
    r = len(mats[0])
    acc = [[ring.one() if i == j else ring.zero() for j in range(r)] for i in range(r)]
    for m in mats:
        acc = [[_dot(ring, acc, m, i, j) for j in range(r)] for i in range(r)]
    return acc


def _dot(ring, A, B, i, j):
    s = ring.zero()
    for k in range(len(B)):
        s = ring.add(s, ring.mul(A[i][k], B[k][j]))
    return s
