"""Unit-root splitting of ordinary σ-modules, limiting modules and the unit-root
L-function as a finite alternating product.

For a normalized B (first column ≡ e_1, other columns ≡ 0 mod p) we solve
B σ(w) = α w with w = (1, c) by the contraction
    α_m = B_00 + Σ_j B_0j σ(c_m,j),   c_{m+1} = α_m^{-1} (B_i0 + Σ_j B_ij σ(c_m,j)).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import factorial

from .errors import NotNormalized, NotOrdinaryAtPoint, UnitLost
from .euler import (
    frobenius_product,
    l_euler,
    l_power_euler,
    orbit_coords,
    teich_points,
)
from .lseries import LSeries
from .padic import build_extension, unramified_ring, vp
from .series import TruncSeries, apply_sigma
from .sigma_module import (
    SigmaModule,
    ext_power,
    is_normalized,
    normalize_twist,
    sym_power,
    tensor,
)
from ._kernels import berkowitz_ring

BIG_CAP = 1 << 40


def _big(f: TruncSeries) -> TruncSeries:
    return f.with_cap(BIG_CAP)


def _sigma(f, lift):
    return apply_sigma(_big(f), lift, cap=BIG_CAP, strict=False)


def series_inverse_1unit(a: TruncSeries, prec: int) -> TruncSeries:
    """Inverse of a ≡ 1 mod p as Σ_k (1 - a)^k, exact mod p^prec."""
    one = TruncSeries.const(a.ctx, 1, a.nvars, BIG_CAP)
    d = (one - a).reduce(prec)
    if not d.is_zero(1):
        raise UnitLost("series is not a 1-unit")
    total = one
    term = one
    for _ in range(1, prec):
        term = term.mul(d, BIG_CAP).reduce(prec)
        if term.is_zero():
            break
        total = total + term
    return total.reduce(prec)


def series_inverse_unit(a: TruncSeries, prec: int) -> TruncSeries:
    """Inverse of a series whose constant term is a unit and whose other terms are p-divisible."""
    M = a.ctx.modulus
    c0 = a.constant_term()
    if c0 % a.ctx.p == 0:
        raise UnitLost("constant term is not a unit")
    cinv = pow(c0, -1, M)
    return series_inverse_1unit(a.scal(cinv).reduce(prec), prec).scal(cinv).reduce(prec)


def _ord_mod(f: TruncSeries, k: int):
    pk = f.ctx.p**k
    vals = [vp(c % pk, f.ctx.p) for c in f.coeffs.values() if c % pk]
    return min(vals) if vals else float("inf")


@dataclass
class UnitRootData:
    alpha: TruncSeries
    cvec: list
    iterations: int
    achieved_prec: int
    achieved_deg: int
    degree_history: list = field(default_factory=list)
    gains: list = field(default_factory=list)

    def to_json(self):
        return {
            "alpha": self.alpha.serialize(),
            "achieved_prec": self.achieved_prec,
            "achieved_deg": self.achieved_deg,
            "iterations": self.iterations,
            "degree_history": self.degree_history,
        }


def hodge_newton_unit(M: SigmaModule, N: int, max_iter: int | None = None) -> UnitRootData:
    """Rank-one unit-root part of a normalized module, exact mod p^N.

    Iteration m is carried out mod p^{min(m+2, N)}; stops once both α and c are
    stable mod p^N.

    Raises:
        NotNormalized: M is not in normalized shape.
        UnitLost: some α_m has a non-unit constant term.
    """
    if not is_normalized(M):
        raise NotNormalized("module must be normalized first")
    lift, r = M.lift, M.rank
    if N > lift.ctx.W:
        raise ValueError("target precision exceeds the working precision")
    max_iter = N + 4 if max_iter is None else max_iter
    B = [[_big(e) for e in row] for row in M.B]
    if r == 1:
        a = B[0][0].reduce(N)
        return UnitRootData(a, [], 1, N, max(a.degree(), 0), [max(a.degree(), 0)], [])
    c = [TruncSeries.zero(lift.ctx, lift.n, BIG_CAP) for _ in range(r - 1)]
    if all(B[i][0].reduce(N).is_zero() for i in range(1, r)):
        # c = 0 is already the fixed point: one step at full precision
        a = B[0][0].reduce(N)
        if a.constant_term() % lift.ctx.p == 0:
            raise UnitLost("unit-root candidate lost its unit constant term")
        return UnitRootData(a, [x.reduce(N) for x in c], 1, N, max(a.degree(), 0), [max(a.degree(), 0)], [N])
    alpha = None
    hist, gains = [], []
    it = 0
    for m in range(max_iter):
        prec = min(m + 2, N)
        sc = [_sigma(x, lift).reduce(prec) for x in c]
        new_alpha = B[0][0].reduce(prec)
        for j in range(1, r):
            new_alpha = new_alpha + B[0][j].mul(sc[j - 1], BIG_CAP)
        new_alpha = new_alpha.reduce(prec)
        if new_alpha.constant_term() % lift.ctx.p == 0:
            raise UnitLost("unit-root candidate lost its unit constant term")
        inv = series_inverse_unit(new_alpha, prec)
        new_c = []
        for i in range(1, r):
            acc = B[i][0]
            for j in range(1, r):
                acc = acc + B[i][j].mul(sc[j - 1], BIG_CAP)
            new_c.append(inv.mul(acc.reduce(prec), BIG_CAP).reduce(prec))
        it = m + 1
        diff = min(_ord_mod(a - b, prec) for a, b in zip(new_c, c))
        gains.append(diff)
        stable = (prec == N and diff >= N and alpha is not None
                  and (new_alpha - alpha).reduce(N).is_zero())
        c, alpha = new_c, new_alpha
        hist.append(max([alpha.degree()] + [x.degree() for x in c]))
        if stable:
            break
    deg = max([alpha.degree()] + [x.degree() for x in c] + [0])
    return UnitRootData(alpha.reduce(N), [x.reduce(N) for x in c], it, N, deg, hist, gains)


def eigen_residual(M: SigmaModule, ur: UnitRootData):
    """Gauss order of B σ(w) - α w with w = (1, c)."""
    lift = M.lift
    w = [TruncSeries.const(lift.ctx, 1, lift.n, BIG_CAP)] + [_big(x) for x in ur.cvec]
    sw = [_sigma(x, lift) for x in w]
    worst = float("inf")
    for i in range(M.rank):
        lhs = None
        for j in range(M.rank):
            t = _big(M.B[i][j]).mul(sw[j], BIG_CAP)
            lhs = t if lhs is None else lhs + t
        res = (lhs - ur.alpha.mul(w[i], BIG_CAP)).reduce(lift.ctx.W)
        worst = min(worst, res.gauss_ord())
    return worst


# ---------------------------------------------------------------------------
# fiber oracle


def hensel_unit_root(coeffs, ring):
    """Unique unit reciprocal root of 1 + c_1 S + ... + c_r S^r over Z/p^W.

    Raises:
        NotOrdinaryAtPoint: if the reduction does not have a single simple unit root.
    """
    M, p = ring.mod, ring.p
    r = len(coeffs) - 1
    # χ(λ) = λ^r + c_1 λ^{r-1} + ... + c_r
    chi = [coeffs[r - i] for i in range(r + 1)]
    nonunit = [c % p == 0 for c in coeffs[2:]]
    if r == 0 or coeffs[1] % p == 0 or not all(nonunit):
        raise NotOrdinaryAtPoint("Euler factor does not have exactly one unit root")
    lam = (-coeffs[1]) % M

    def ev(poly, x):
        acc = 0
        for c in reversed(poly):
            acc = (acc * x + c) % M
        return acc

    dchi = [(i * chi[i]) % M for i in range(1, r + 1)]
    for _ in range(ring.W.bit_length() + 3):
        d = ev(dchi, lam)
        if d % p == 0:
            raise NotOrdinaryAtPoint("unit root is not simple")
        lam = (lam - ev(chi, lam) * pow(d, -1, M)) % M
    if ev(chi, lam) % M:
        raise NotOrdinaryAtPoint("Hensel iteration failed")
    return lam


@dataclass
class FiberCheck:
    rows: list
    ok: bool
    compare_prec: int

    def to_json(self):
        return {"ok": self.ok, "compare_prec": self.compare_prec, "points": self.rows}


def orbit_product(f: TruncSeries, x) -> int:
    """Π_i f(F^i x) as an element of the prime subring; checks Galois invariance."""
    ring = x.ring
    acc = ring.one()
    for c in orbit_coords(x):
        acc = ring.mul(acc, f.eval_tuple(ring, c))
    if any(acc[1:]):
        raise NotOrdinaryAtPoint("orbit product is not in the prime subring")
    return acc[0]


def unit_fiber_check(ur: UnitRootData, M: SigmaModule, d_max: int, slack: int = 2, scale: int = 1) -> FiberCheck:
    """Compare the Hensel unit root of each Euler factor with the α-orbit product."""
    lift = M.lift
    p = lift.ctx.p
    k = max(ur.achieved_prec - slack, 1)
    pk = p**k
    rows, ok = [], True
    for x in teich_points(lift, d_max):
        Phi = frobenius_product(M, x)
        poly = berkowitz_ring(Phi, x.ring, M.rank)
        ints = [c[0] for c in poly]
        base = unramified_ring(build_extension(p, 1), x.ring.W)
        lam = hensel_unit_root(ints, base)
        prod = orbit_product(ur.alpha, x) * pow(scale, x.degree, x.ring.mod)
        diff = (lam - prod) % pk
        agree = diff == 0
        ok &= agree
        rows.append({"degree": x.degree, "point": [list(c) for c in x.point.rep],
                     "unit_root": str(lam % pk), "orbit_product": str(prod % pk),
                     "residual_ord": "inf" if (lam - prod) % x.ring.mod == 0 else vp((lam - prod) % x.ring.mod, p),
                     "agree": agree})
    return FiberCheck(rows, ok, k)


# ---------------------------------------------------------------------------
# limiting module


def f_monomials(r: int, D_f: int):
    """Monomials in f_1..f_{r-1} of degree <= D_f as sorted index tuples."""
    out = []
    for s in range(D_f + 1):
        out.extend(itertools.combinations_with_replacement(range(1, r), s))
    return out


def binom_int(x: int, m: int) -> int:
    num = 1
    for t in range(m):
        num *= x - t
    return num // factorial(m)


def _poly_mul(a, b, D_f, cap):
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            if len(ma) + len(mb) > D_f:
                continue
            key = tuple(sorted(ma + mb))
            t = ca.mul(cb, cap)
            out[key] = out[key] + t if key in out else t
    return out


def _poly_add(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out[k] + v if k in out else v
    return out


def _poly_scale(a, c):
    return {k: v.scal(c) for k, v in a.items()}


@dataclass
class LimitingModule:
    k: int
    D_f: int
    basis: list
    entries: dict          # (target, source) -> TruncSeries
    base: SigmaModule
    ups_e: dict            # Υ(e) as a polynomial in the f_i
    finite: bool = False

    @property
    def grading(self):
        return [len(m) for m in self.basis]

    def matrix(self):
        ctx, n = self.base.ctx, self.base.lift.n
        z = TruncSeries.zero(ctx, n, 0)
        idx = {m: i for i, m in enumerate(self.basis)}
        B = [[z] * len(self.basis) for _ in self.basis]
        for (t, s), v in self.entries.items():
            B[idx[t]][idx[s]] = v
        return B

    def as_module(self, label=None) -> SigmaModule:
        kind = "Sym" if self.finite else "Lim"
        return SigmaModule(self.matrix(), self.base.lift, label or f"{kind}[k={self.k}]({self.base.label})",
                           rank_limit=max(len(self.basis), self.base.rank_limit))


def _columns_data(M: SigmaModule, D_f: int):
    if not is_normalized(M):
        raise NotNormalized("limiting module needs a normalized module")
    r, lift, ctx = M.rank, M.lift, M.ctx
    p = ctx.p
    one = TruncSeries.const(ctx, 1, lift.n, 0)
    # p Υ(e) = Υ(φ(e_1)) - 1, kept undivided so no digit is lost
    pE = {(): M.B[0][0] - one}
    for i in range(1, r):
        pE[(i,)] = M.B[i][0]
    Ls = {}
    for j in range(1, r):
        L = {(): M.B[0][j]}
        for i in range(1, r):
            L[(i,)] = M.B[i][j]
        Ls[j] = L
    return pE, Ls


def _build(M: SigmaModule, k: int, D_f: int, finite: bool) -> LimitingModule:
    pE, Ls = _columns_data(M, D_f)
    lift, ctx = M.lift, M.ctx
    p, W = ctx.p, ctx.W
    r = M.rank
    basis = f_monomials(r, D_f)
    cap = BIG_CAP
    one = {(): TruncSeries.const(ctx, 1, lift.n, 0)}
    pows = [one]
    for _ in range(1, W):
        pows.append(_poly_mul(pows[-1], pE, D_f, cap))
    entries = {}
    for src in basis:
        s = len(src)
        e = k - s
        if finite and e < 0:
            continue
        # (1 + pE)^e
        top = min(W, e + 1) if (finite or e >= 0) else W
        fac = {}
        for m in range(top):
            bc = binom_int(e, m) % ctx.modulus
            if bc:
                fac = _poly_add(fac, _poly_scale(pows[m], bc))
        img = fac
        for j in src:
            img = _poly_mul(img, Ls[j], D_f, cap)
        for tgt, v in img.items():
            v = v.reduce(W)
            if not v.is_zero():
                entries[(tgt, src)] = v.with_cap(max(v.degree(), 0))
    ups_e = {m: v.divide_by_p(1) for m, v in pE.items()}
    return LimitingModule(k, D_f, basis, entries, M, ups_e, finite)


def limiting_module(M: SigmaModule, k: int, D_f: int) -> LimitingModule:
    """φ_{∞,k}(f^I) = (1 + pΥ(e))^{k-|I|} Π_t Υ(φ(e_{i_t})), truncated at f-degree D_f."""
    return _build(M, k, D_f, finite=False)


def sym_power_truncated(M: SigmaModule, k: int, D_f: int) -> LimitingModule:
    """Sym^k in the Υ-coordinates: zero on f-monomials of degree > k."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return _build(M, k, D_f, finite=True)


@dataclass
class CongruenceReport:
    ok: bool
    exponent: int
    failures: list


def congruence_check_75(M: SigmaModule, k: int, m: int, D_f: int | None = None) -> CongruenceReport:
    """Sym^{k+p^m} ≡ φ_{∞,k} entrywise mod p^{min(k+p^m, m)}."""
    p = M.ctx.p
    km = k + p**m
    if km <= 0:
        raise ValueError("k + p^m must be positive")
    D_f = M.ctx.W if D_f is None else D_f
    e = min(km, m)
    A = sym_power_truncated(M, km, D_f)
    Bm = limiting_module(M, k, D_f)
    fails = []
    z = TruncSeries.zero(M.ctx, M.lift.n, 0)
    for key in set(A.entries) | set(Bm.entries):
        a, b = A.entries.get(key, z), Bm.entries.get(key, z)
        if not (a - b).is_zero(e):
            fails.append(key)
    return CongruenceReport(not fails, e, sorted(fails))


# ---------------------------------------------------------------------------
# L-functions


def _twist(M: SigmaModule, a: int, k: int) -> SigmaModule:
    if k == 0 or a == 1:
        return M
    Mod = M.ctx.modulus
    c = pow(a, k, Mod) if k >= 0 else pow(pow(a, -1, Mod), -k, Mod)
    return M.scale(c, f"a^{k}*{M.label}")


def l_limiting(Lm: LimitingModule, aux: SigmaModule | None, a: int, k: int, D_T: int, N: int,
               method: str = "trace", extra: SigmaModule | None = None, full: bool = False):
    """L(a^k ⊗ Lm ⊗ extra ⊗ aux) by the trace formula or by Euler products."""
    X = Lm.as_module()
    if extra is not None:
        X = tensor(X, extra)
    if aux is not None:
        X = tensor(X, aux)
    X = _twist(X, a, k)
    if method == "euler":
        return l_euler(X, D_T, prec=N)
    from .trace import l_trace

    return l_trace(X, D_T, N=N, full=full)


@dataclass
class UnitRootL:
    lseries: LSeries
    num: list
    den: list
    factors: list
    a: int
    num_mats: list = field(default_factory=list)
    den_mats: list = field(default_factory=list)

    @property
    def numerator(self) -> LSeries:
        return _prod(self.num, self.lseries)

    @property
    def denominator(self) -> LSeries:
        return _prod(self.den, self.lseries)


def _prod(items, like):
    out = LSeries.one(like.p, like.prec, like.tcap)
    for s in items:
        out = out * s
    return out


def unit_root_l(Mpsi: SigmaModule, aux: SigmaModule | None, k: int, D_T: int, N: int,
                D_f: int | None = None, method: str = "trace") -> UnitRootL:
    """L(ψ_unit^k ⊗ aux) = Π_{i=1}^r L(a^k ⊗ φ_{∞,k-i} ⊗ ∧^iφ ⊗ aux)^{(-1)^{i-1} i}."""
    tw = normalize_twist(Mpsi)
    phi = tw.module
    r = phi.rank
    D_f = N if D_f is None else D_f
    p = Mpsi.ctx.p
    num, den, factors = [], [], []
    mats = ([], [])
    total = LSeries.one(p, N, D_T)
    for i in range(1, r + 1):
        Lm = limiting_module(phi, k - i, D_f)
        res = l_limiting(Lm, aux, tw.a, k, D_T, N, method, extra=ext_power(phi, i),
                         full=method == "trace")
        e = (-1) ** (i - 1) * i
        if method == "trace":
            top, bot = res.num, res.den
            n = Mpsi.lift.n
            # matrices of the numerator factors are those with n - i odd
            mtop = [G for G in res.matrices if (n - G.i) % 2 == 1]
            mbot = [G for G in res.matrices if (n - G.i) % 2 == 0]
            res = res.lseries
        else:
            top, bot, mtop, mbot = [res], [], [], []
        factors.append((i, e, res))
        if e < 0:
            top, bot, mtop, mbot = bot, top, mbot, mtop
        num += top * abs(e)
        den += bot * abs(e)
        mats[0].extend(mtop * abs(e))
        mats[1].extend(mbot * abs(e))
        total = total * (res ** e)
    return UnitRootL(total, num, den, factors, tw.a, mats[0], mats[1])


def unit_root_euler(Mpsi: SigmaModule, aux: SigmaModule | None, k: int, D_T: int, N: int,
                    ur: UnitRootData | None = None, alpha_prec: int | None = None) -> LSeries:
    """Euler product of the α-orbit products of the unit part, raised to k."""
    tw = normalize_twist(Mpsi)
    if ur is None:
        ur = hodge_newton_unit(tw.module, alpha_prec or Mpsi.ctx.W)
    lift = Mpsi.lift
    U = SigmaModule([[ur.alpha.scal(tw.a).with_cap(max(ur.alpha.degree(), 0))]], lift, "unit")
    if aux is None:
        return l_power_euler(U, k, D_T, prec=N)
    from .euler import l_tensor_power_euler

    return l_tensor_power_euler(U, k, aux, 1, D_T, prec=N)


@dataclass
class DecompositionReport:
    ok: bool
    lhs: LSeries
    rhs: LSeries


def decomposition_identity(M: SigmaModule, k: int, D_T: int, N: int) -> DecompositionReport:
    """L(φ^k) against Π_{i>=1} L(Sym^{k-i}φ ⊗ ∧^iφ)^{(-1)^{i-1} i}, both by Euler products."""
    if k < 1:
        raise ValueError("k must be at least 1")
    lhs = l_power_euler(M, k, D_T, prec=N)
    rhs = LSeries.one(M.ctx.p, N, D_T)
    for i in range(1, min(k, M.rank) + 1):
        X = tensor(sym_power(M, k - i), ext_power(M, i))
        rhs = rhs * (l_euler(X, D_T, prec=N) ** ((-1) ** (i - 1) * i))
    return DecompositionReport(lhs.eq_mod(rhs), lhs, rhs)
