"""Closed points, Teichmüller lifts for a general Frobenius lift, and Euler products."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ._kernels import berkowitz_ring
from .errors import (
    BudgetExceeded,
    ContextMismatch,
    GaloisInvarianceViolation,
    NonContraction,
    NonInvertibleFiber,
)
from .lseries import LSeries
from .padic import build_extension, finite_field, unramified_ring
from .series import SigmaLift
from .sigma_module import SigmaModule

DEFAULT_BUDGET = 1 << 18


@dataclass(frozen=True)
class ClosedPoint:
    """A q-Frobenius orbit of size ``degree`` in F_{q^d}^n, stored by its lex-min member."""

    degree: int
    rep: tuple          # n coordinate tuples in F_{p^{a d}}
    p: int
    a: int
    orbit_id: int
    minpoly: tuple | None = None   # n = 1: coefficients over F_q, lowest first

    @property
    def ext(self):
        return build_extension(self.p, self.a * self.degree, self.a)


@dataclass(frozen=True)
class TeichPoint:
    coords: tuple
    degree: int
    ring: object
    lift: SigmaLift
    point: ClosedPoint


# ---------------------------------------------------------------------------
# enumeration


def _q_frob(F, x, a):
    for _ in range(a):
        x = F.frob(x)   # W = 1: frob is the p-power map on F_{p^m}
    return x


def _orbit(F, x, a, d):
    orb = [x]
    for _ in range(d - 1):
        orb.append(tuple(_q_frob(F, c, a) for c in orb[-1]))
    return orb


def _exact_orbit_size(F, x, a, d):
    y = x
    for k in range(1, d + 1):
        y = tuple(_q_frob(F, c, a) for c in y)
        if y == x:
            return k
    return None


def _minpoly(F, orbit):
    poly = [F.one()]
    for pt in orbit:
        root = pt[0]
        nxt = [F.zero()] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] = F.add(nxt[i + 1], c)
            nxt[i] = F.sub(nxt[i], F.mul(c, root))
        poly = nxt
    return tuple(c[0] if F.m and all(v == 0 for v in c[1:]) else c for c in poly)


def count_points_by_degree(points):
    out = {}
    for pt in points:
        out[pt.degree] = out.get(pt.degree, 0) + 1
    return out


def enumerate_closed_points(n: int, p: int, d_max: int, a: int = 1, budget: int = DEFAULT_BUDGET):
    """All closed points of affine n-space over F_q (q = p^a) of degree <= d_max.

    Raises:
        BudgetExceeded: if q^{n d_max} elements would have to be scanned.
    """
    q = p**a
    total = sum(q ** (n * d) for d in range(1, d_max + 1))
    if total > budget:
        raise BudgetExceeded(f"enumeration needs {total} elements, budget is {budget}")
    points = []
    for d in range(1, d_max + 1):
        ext = build_extension(p, a * d, a)
        F = finite_field(ext)
        elems = list(itertools.product(range(p), repeat=a * d))
        oid = 0
        for x in itertools.product(elems, repeat=n):
            if _exact_orbit_size(F, x, a, d) != d:
                continue
            orb = _orbit(F, x, a, d)
            if min(orb) != x:
                continue
            mp = _minpoly(F, orb) if n == 1 else None
            points.append(ClosedPoint(d, x, p, a, oid, mp))
            oid += 1
    return points


# ---------------------------------------------------------------------------
# Teichmüller points


def _apply_F(lift: SigmaLift, ring, y):
    """One step y_i -> y_i^q + p f_i(y)."""
    p = lift.ctx.p
    out = []
    for i in range(lift.n):
        v = ring.pow(y[i], lift.q)
        f = lift.fs[i]
        if f.coeffs:
            v = ring.add(v, ring.scal(p, f.eval_tuple(ring, y)))
        out.append(v)
    return tuple(out)


def monsky_tate_lift(pt: ClosedPoint, lift: SigmaLift, W: int | None = None) -> TeichPoint:
    """The unique lift x of ``pt`` with F^d(x) = x, where F(y) = y^q + p f(y).

    Starts from the Teichmüller lift and iterates the d-fold composite; the
    reduction mod p is checked at every step.

    Raises:
        NonContraction: if the iteration leaves the residue class of the point.
    """
    if pt.p != lift.ctx.p or pt.a != lift.a:
        raise ContextMismatch("point and lift have different base fields")
    W = lift.ctx.W if W is None else W
    ring = unramified_ring(pt.ext, W)
    y = tuple(ring.teichmuller(c) for c in pt.rep)
    if lift.classical:
        return TeichPoint(y, pt.degree, ring, lift, pt)
    for _ in range(W + 2):
        z = y
        for _ in range(pt.degree):
            z = _apply_F(lift, ring, z)
        if tuple(ring.reduce(c) for c in z) != pt.rep:
            raise NonContraction("iteration drifted away from the closed point")
        if z == y:
            return TeichPoint(y, pt.degree, ring, lift, pt)
        y = z
    raise NonContraction("iteration did not stabilise")


def point_frobenius(x: TeichPoint) -> TeichPoint:
    return TeichPoint(_apply_F(x.lift, x.ring, x.coords), x.degree, x.ring, x.lift, x.point)


def orbit_coords(x: TeichPoint):
    out = [x.coords]
    for _ in range(x.degree - 1):
        out.append(_apply_F(x.lift, x.ring, out[-1]))
    return out


def teich_points(lift: SigmaLift, d_max: int, budget: int = DEFAULT_BUDGET):
    """Cached Teichmüller points of degree <= d_max for this lift."""
    cache = lift.__dict__.setdefault("_teich_cache", {})
    key = (d_max, budget)
    if key not in cache:
        pts = enumerate_closed_points(lift.n, lift.ctx.p, d_max, lift.a, budget)
        cache[key] = [monsky_tate_lift(pt, lift) for pt in pts]
    return cache[key]


# ---------------------------------------------------------------------------
# matrices over W_m


def mat_mul(ring, A, B):
    n, m = len(A), len(B)
    l = len(B[0]) if m else 0
    out = []
    for i in range(n):
        row = []
        for j in range(l):
            s = ring.zero()
            for k in range(m):
                s = ring.add(s, ring.mul(A[i][k], B[k][j]))
            row.append(s)
        out.append(row)
    return out


def mat_identity(ring, r):
    return [[ring.one() if i == j else ring.zero() for j in range(r)] for i in range(r)]


def mat_inverse(ring, A):
    """Gauss-Jordan with unit pivots (works over Z/p^W-type rings)."""
    r = len(A)
    M = [list(row) + e for row, e in zip(A, mat_identity(ring, r))]
    for c in range(r):
        piv = next((i for i in range(c, r) if ring.is_unit(M[i][c])), None)
        if piv is None:
            raise NonInvertibleFiber("fiber matrix is not invertible mod p")
        M[c], M[piv] = M[piv], M[c]
        inv = ring.inv(M[c][c])
        M[c] = [ring.mul(inv, v) for v in M[c]]
        for i in range(r):
            if i != c and any(M[i][c]):
                f = M[i][c]
                M[i] = [ring.sub(v, ring.mul(f, w)) for v, w in zip(M[i], M[c])]
    return [row[r:] for row in M]


def mat_pow(ring, A, k: int):
    r = len(A)
    if k < 0:
        return mat_pow(ring, mat_inverse(ring, A), -k)
    out = mat_identity(ring, r)
    base = A
    while k:
        if k & 1:
            out = mat_mul(ring, out, base)
        k >>= 1
        if k:
            base = mat_mul(ring, base, base)
    return out


def kron(ring, A, B):
    ra, rb = len(A), len(B)
    return [[ring.mul(A[i // rb][j // rb], B[i % rb][j % rb]) for j in range(ra * rb)] for i in range(ra * rb)]


def frobenius_product(M: SigmaModule, x: TeichPoint):
    """B(x) B(x^σ) ... B(x^{σ^{d-1}}) over the point's ring."""
    ring = x.ring
    acc = None
    for c in orbit_coords(x):
        Bx = M.fiber_matrix(ring, c)
        acc = Bx if acc is None else mat_mul(ring, acc, Bx)
    return acc


# ---------------------------------------------------------------------------
# Euler factors


@dataclass
class EulerFactor:
    """det(I - Φ S) with S = T^degree; ``coeffs`` are integers mod p^W, lowest first."""

    degree: int
    coeffs: list

    def as_lseries(self, p, prec, tcap) -> LSeries:
        c = [0] * (tcap + 1)
        for i, v in enumerate(self.coeffs):
            if i * self.degree <= tcap:
                c[i * self.degree] = v
        return LSeries(p, prec, tcap, c)


def _project(ring, coeffs):
    out = []
    for c in coeffs:
        if any(v % ring.mod for v in c[1:]):
            raise GaloisInvarianceViolation("Euler factor coefficient outside the prime subring")
        out.append(c[0])
    return out


def _tau(ring, c):
    return ring.frob(c)


def _charpoly_factor(mat, x: TeichPoint, D: int):
    """Coefficients of det(I - mat S) in the point's ring, grouped over the p-Frobenius class."""
    ring = x.ring
    r = len(mat)
    if r == 0:
        return [1]
    D = min(D, r)
    poly = berkowitz_ring(mat, ring, D)
    lift = x.lift
    if lift.a > 1:
        g = _tau_class_size(x)
        total = poly
        conj = poly
        for _ in range(g - 1):
            conj = [_tau(ring, c) for c in conj]
            total = _poly_mul_ring(ring, total, conj)
        poly = total
    return _project(ring, poly)


def _poly_mul_ring(ring, a, b):
    out = [ring.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = ring.add(out[i + j], ring.mul(x, y))
    return out


def _tau_class_size(x: TeichPoint) -> int:
    """Number of distinct q-orbits among the p-Frobenius conjugates of the point."""
    pt = x.point
    F = finite_field(pt.ext)
    orb = set(_orbit(F, pt.rep, pt.a, pt.degree))
    y = pt.rep
    for g in range(1, pt.a + 1):
        y = tuple(F.frob(c) for c in y)
        if y in orb:
            return g
    return pt.a  # pragma: no cover


def _representatives(points):
    """For a > 1 keep one closed point per p-Frobenius class."""
    if not points or points[0].lift.a == 1:
        return points
    seen = set()
    out = []
    for x in points:
        pt = x.point
        F = finite_field(pt.ext)
        key = min(_orbit(F, pt.rep, pt.a, pt.degree))
        if (pt.degree, key) in seen:
            continue
        out.append(x)
        y = pt.rep
        for _ in range(pt.a):
            y = tuple(F.frob(c) for c in y)
            seen.add((pt.degree, min(_orbit(F, y, pt.a, pt.degree))))
    return out


def euler_factor(M: SigmaModule, x: TeichPoint, k: int = 1, D: int | None = None) -> EulerFactor:
    """det(I - Φ_d^k T^d) for the Teichmüller point x."""
    Phi = frobenius_product(M, x)
    if k != 1:
        Phi = mat_pow(x.ring, Phi, k) if M.rank else Phi
    return EulerFactor(x.degree, _charpoly_factor(Phi, x, M.rank if D is None else D))


def _default_prec(lift, prec):
    return lift.ctx.W if prec is None else prec


def _euler_product(factors, p, prec, D_T) -> LSeries:
    out = LSeries.one(p, prec, D_T)
    for fac in factors:
        out = out * fac.as_lseries(p, prec, D_T).inverse()
    return out


def l_euler(M: SigmaModule, D_T: int, prec: int | None = None, budget: int = DEFAULT_BUDGET) -> LSeries:
    """Euler product of 1/det(I - Φ_x T^{deg x}) over closed points, mod (p^prec, T^{D_T+1})."""
    return l_power_euler(M, 1, D_T, prec, budget)


def l_power_euler(M: SigmaModule, k: int, D_T: int, prec: int | None = None, budget: int = DEFAULT_BUDGET) -> LSeries:
    """Euler product with every fiber Frobenius raised to the k-th power.

    Raises:
        NonInvertibleFiber: for k < 0 when some Φ_d is singular mod p.
    """
    lift = M.lift
    prec = _default_prec(lift, prec)
    pts = _representatives(teich_points(lift, D_T, budget))
    factors = [euler_factor(M, x, k, D_T // x.degree) for x in pts]
    return _euler_product(factors, lift.ctx.p, prec, D_T)


def l_tensor_power_euler(M1: SigmaModule, k1: int, M2: SigmaModule, k2: int, D_T: int,
                         prec: int | None = None, budget: int = DEFAULT_BUDGET) -> LSeries:
    """Euler product of det(I - Φ1^{k1} ⊗ Φ2^{k2} T^d)^{-1}."""
    if M1.lift is not M2.lift:
        raise ContextMismatch("modules use different Frobenius lifts")
    lift = M1.lift
    prec = _default_prec(lift, prec)
    factors = []
    for x in _representatives(teich_points(lift, D_T, budget)):
        A = mat_pow(x.ring, frobenius_product(M1, x), k1)
        B = mat_pow(x.ring, frobenius_product(M2, x), k2)
        mat = kron(x.ring, A, B)
        factors.append(EulerFactor(x.degree, _charpoly_factor(mat, x, D_T // x.degree)))
    return _euler_product(factors, lift.ctx.p, prec, D_T)


def l_euler_scalar(values_by_point, lift: SigmaLift, D_T: int, prec: int | None = None) -> LSeries:
    """Euler product of 1/(1 - λ_x T^{deg x}) for prescribed constants λ_x (integers)."""
    prec = _default_prec(lift, prec)
    factors = [EulerFactor(d, [1, (-lam) % lift.ctx.modulus]) for d, lam in values_by_point]
    return _euler_product(factors, lift.ctx.p, prec, D_T)
