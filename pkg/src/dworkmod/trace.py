"""Dwork operators from the splitting A_0 = ⊕ σ(A_0) X^u, their matrices, and
the trace-formula L-function.

Conventions:
  * ``split_basic(f)[u]`` is Θ_u(f), so that f = Σ_u σ(Θ_u f) X^u.
  * ``trace_functions(f)`` is Σ_v Θ_v(X^v f), the trace of multiplication by f
    on A_0 over σ(A_0), pulled back by σ^{-1}.
  * ``theta_top(f)`` is the same trace on top forms f dX_1...dX_n, i.e.
    trace_functions(f / J) with J the Jacobian determinant of σ.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb

from ._kernels import berkowitz_mod
from .errors import (
    DegreeOverflow,
    IntegralityViolation,
    NegativeSupport,
    NonTermination,
    TruncationUnsound,
    UnsupportedDimension,
)
from .lseries import LSeries
from .padic import vp
from .series import LaurentSeries1, SigmaLift, TruncSeries, laurent_invert
from .sigma_module import SigmaModule, column_orders, det_series

INF = float("inf")


def _floordiv_exp(v, q):
    s = tuple(a // q for a in v)
    return s, tuple(a - q * b for a, b in zip(v, s))


def _digits(n, q):
    return list(itertools.product(range(q), repeat=n))


class _Tables:
    """Per-lift caches of monomial images."""

    def __init__(self, lift: SigmaLift):
        self.lift = lift
        self.split = {}
        self.trace = {}


def _tables(lift: SigmaLift) -> _Tables:
    t = lift.__dict__.get("_trace_tables")
    if t is None:
        t = _Tables(lift)
        lift.__dict__["_trace_tables"] = t
    return t


# ---------------------------------------------------------------------------
# splitting


def _split_monomial(lift: SigmaLift, v, floor: int = 0, work_cap: int | None = None):
    """{u: {s: coeff}} with X^v = Σ_u σ(Σ_s coeff X^s) X^u mod p^W."""
    tabs = _tables(lift)
    key = (v, floor)
    hit = tabs.split.get(key)
    if hit is not None:
        return hit
    p, q, W = lift.ctx.p, lift.q, lift.ctx.W
    n = lift.n
    out = {}
    if lift.classical:
        s, u = _floordiv_exp(v, q)
        out = {u: {s: 1}}
        tabs.split[key] = out
        return out
    if work_cap is None:
        work_cap = sum(v) + q * W * max(lift.max_f_deg - q + 1, 0) + q
    res = {v: 1}
    for m in range(W):
        if not res:
            break
        mod = p ** (W - m)
        pm = p**m
        new = {}
        for w, c in res.items():
            s, u = _floordiv_exp(w, q)
            slot = out.setdefault(u, {})
            slot[s] = (slot.get(s, 0) + c * pm) % lift.ctx.modulus
            new[w] = new.get(w, 0) + c
            for w2, d in lift.sigma_monomial(s).coeffs.items():
                ww = tuple(a + b for a, b in zip(w2, u))
                new[ww] = new.get(ww, 0) - c * d
        nxt = {}
        for w, c in new.items():
            c %= mod
            if not c:
                continue
            if c % p:
                raise NonTermination("splitting residual is not divisible by p")
            if n == 1 and w[0] < -floor:
                continue
            if sum(w) > work_cap:
                raise DegreeOverflow(f"splitting residual reached degree {sum(w)}")
            nxt[w] = c // p
        res = nxt
    out = {u: {s: c for s, c in d.items() if c} for u, d in out.items()}
    tabs.split[key] = out
    return out


def split_basic(f: TruncSeries, lift: SigmaLift):
    """Family {Θ_u(f)} for u in [0, q)^n with f = Σ σ(Θ_u f) X^u mod p^W."""
    q, n = lift.q, lift.n
    floor = f.floor
    acc = {u: {} for u in _digits(n, q)}
    for v, c in f.coeffs.items():
        for u, d in _split_monomial(lift, v, floor).items():
            slot = acc[u]
            for s, e in d.items():
                slot[s] = slot.get(s, 0) + c * e
    cap = max(f.deg_cap // q + 1, 0)
    out = {}
    for u, d in acc.items():
        top = max((sum(s) for s in d), default=0)
        out[u] = TruncSeries(n, d, max(cap, top), f.ctx, f.prec, floor)
    return out


def unsplit(family, lift: SigmaLift, cap: int) -> TruncSeries:
    """Σ_u σ(h_u) X^u, the inverse of ``split_basic``."""
    from .series import apply_sigma

    total = None
    for u, h in family.items():
        img = apply_sigma(h, lift, strict=False, cap=cap + lift.q).mul_monomial(u, deg_cap=cap + lift.q)
        total = img if total is None else total + img
    return total.with_cap(cap)


# ---------------------------------------------------------------------------
# traces


def _trace_monomial(lift: SigmaLift, w, floor: int = 0):
    tabs = _tables(lift)
    key = (w, floor)
    hit = tabs.trace.get(key)
    if hit is not None:
        return hit
    q, n = lift.q, lift.n
    if lift.classical:
        out = {tuple(a // q for a in w): q**n} if all(a % q == 0 for a in w) else {}
    else:
        out = {}
        for v in _digits(n, q):
            vw = tuple(a + b for a, b in zip(v, w))
            d = _split_monomial(lift, vw, floor).get(v, {})
            for s, c in d.items():
                out[s] = out.get(s, 0) + c
        M = lift.ctx.modulus
        out = {s: c % M for s, c in out.items() if c % M}
    tabs.trace[key] = out
    return out


def trace_functions(f: TruncSeries, lift: SigmaLift | None = None, out_cap: int | None = None) -> TruncSeries:
    """Σ_v Θ_v(X^v f) over v in [0, q)^n."""
    if lift is None:
        raise ValueError("a SigmaLift is required")
    n = lift.n
    acc = {}
    for w, c in f.coeffs.items():
        for s, d in _trace_monomial(lift, w, f.floor).items():
            acc[s] = acc.get(s, 0) + c * d
    cap = f.deg_cap // lift.q + 1 if out_cap is None else out_cap
    return TruncSeries(n, acc, cap, f.ctx, f.prec, f.floor)


# ---------------------------------------------------------------------------
# Jacobian data and the top-form operator


@dataclass
class TraceContext:
    lift: SigmaLift
    J: TruncSeries
    v: int
    jac: list                       # jac[s][t] = ∂σ(X_s)/∂X_t
    minors: dict = field(default_factory=dict)
    floor: int = 0
    _basis: dict = field(default_factory=dict)   # theta_top(X^u), u in [0,q)

    @property
    def classical(self):
        return self.lift.classical

    def minor(self, i, S1, S2) -> TruncSeries:
        """det[∂σ(X_s)/∂X_t] with t in S1 (rows), s in S2 (columns)."""
        key = (i, S1, S2)
        if key not in self.minors:
            mat = [[self.jac[s][t] for s in S2] for t in S1]
            self.minors[key] = det_series(mat, self.lift)
        return self.minors[key]


def jacobian_data(lift: SigmaLift, floor: int | None = None) -> TraceContext:
    """Jacobian matrix, determinant J and its p-content for the lift."""
    n, ctx = lift.n, lift.ctx
    jac = [[lift.sigma_x(s).derivative(t) for t in range(n)] for s in range(n)]
    J = det_series(jac, lift)
    v = J.gauss_ord()
    if floor is None:
        floor = (ctx.p - 1) * ctx.W * n + lift.q
    return TraceContext(lift, J, int(v) if v != INF else ctx.W, jac, {}, floor)


def _project_top(raw: TruncSeries, v: int, out_cap: int, ctx_prec: int) -> TruncSeries:
    """Divide by p^v and check the result lies in A_0 at the remaining precision."""
    p = raw.ctx.p
    keep = ctx_prec - v
    pk = p**keep
    pv = p**v
    out = {}
    for (e,), c in raw.coeffs.items():
        if c % (p ** ctx_prec) == 0:
            continue
        if c % pv:
            raise IntegralityViolation(f"coefficient of X^{e} is not divisible by p^{v}")
        c //= pv
        if e < 0:
            if c % pk:
                raise NegativeSupport(f"nonzero coefficient at X^{e}")
            continue
        if e <= out_cap:
            out[(e,)] = c % pk
    return TruncSeries(1, out, out_cap, raw.ctx, keep)


def theta_top_laurent(f: TruncSeries, tc: TraceContext, out_cap: int, in_cap: int | None = None) -> TruncSeries:
    """trace_functions(f / J) via the Laurent inverse of J (one variable)."""
    lift = tc.lift
    if lift.n != 1:
        raise UnsupportedDimension("Laurent route needs one variable")
    q, W = lift.q, lift.ctx.W
    if in_cap is None:
        in_cap = q * (out_cap + 2) + 2 * W + q
    Jinv = laurent_invert(tc.J, floor=tc.floor, deg_cap=in_cap)
    g = LaurentSeries1.from_series(f, tc.floor, in_cap).mul(LaurentSeries1(Jinv.coeffs, in_cap, f.ctx, tc.floor), in_cap)
    raw = trace_functions(g, lift, out_cap=out_cap)
    return _project_top(raw, tc.v, out_cap, min(f.prec, lift.ctx.W))


def _basis_images(tc: TraceContext, out_cap: int):
    """theta_top(X^u) for u in [0, q), computed once per output cap."""
    hit = tc._basis.get(out_cap)
    if hit is None:
        ctx = tc.lift.ctx
        hit = {u: theta_top_laurent(TruncSeries.monomial(ctx, (u,)), tc, out_cap) for u in range(tc.lift.q)}
        tc._basis[out_cap] = hit
    return hit


def theta_top(f: TruncSeries, tc: TraceContext, out_cap: int | None = None) -> TruncSeries:
    """σ_n^{-1} ∘ Tr_n on top forms, identifying f dX with f.

    Classical lifts use the closed form.  For one variable and a general lift,
    f = Σ σ(Θ_u f) X^u gives theta_top(f) = Σ_u Θ_u(f) theta_top(X^u), and the q
    images theta_top(X^u) come from the Laurent route.

    Raises:
        UnsupportedDimension: several variables with a non-classical lift.
        IntegralityViolation, NegativeSupport: the Laurent route left A_0.
    """
    lift = tc.lift
    q, n = lift.q, lift.n
    if out_cap is None:
        out_cap = max(f.deg_cap // q, 0)
    if lift.classical:
        out = {}
        for w, c in f.coeffs.items():
            if all((a + 1) % q == 0 for a in w):
                s = tuple((a + 1) // q - 1 for a in w)
                if sum(s) <= out_cap and min(s) >= 0:
                    out[s] = out.get(s, 0) + c
        return TruncSeries(n, out, out_cap, f.ctx, f.prec)
    if n != 1:
        raise UnsupportedDimension("top-form trace for a non-classical lift needs one variable")
    basis = _basis_images(tc, out_cap)
    fam = split_basic(f, lift)
    total = TruncSeries(1, {}, out_cap, f.ctx, basis[0].prec)
    for (u,), h in fam.items():
        if h.coeffs:
            total = total + h.with_cap(out_cap).mul(basis[u], out_cap)
    total.prec = min(total.prec, f.prec)
    return total


# ---------------------------------------------------------------------------
# operator matrices


def exponents_upto(n: int, U: int):
    """Exponent vectors with |u| <= U, by degree then lexicographically."""
    out = []
    for d in range(U + 1):
        for c in itertools.combinations_with_replacement(range(n), d):
            u = [0] * n
            for i in c:
                u[i] += 1
            out.append(tuple(u))
    out = sorted(set(out), key=lambda u: (sum(u), tuple(-a for a in u)))
    return out


def subsets(n, i):
    return list(itertools.combinations(range(n), i))


def default_b(q):
    return Fraction(1, q - 1)


def truncation_bound(b, c, N, q) -> int:
    """Smallest U >= 0 with (q-1) b (U+1) + c >= N."""
    b, c = Fraction(b), Fraction(c)
    if b <= 0:
        raise ValueError("b must be positive")
    t = (Fraction(N) - c) / ((q - 1) * b)
    return max(int(ceil(t)) - 1, 0)


def estimate_offset(M: SigmaModule, b, grading=None) -> Fraction:
    """min over entries B_{ij} X^w of ord - o(j) - b|w|, minus one as margin."""
    b = Fraction(b)
    grading = column_orders(M) if grading is None else grading
    best = None
    p = M.ctx.p
    for i in range(M.rank):
        for j in range(M.rank):
            for w, c in M.B[i][j].coeffs.items():
                val = vp(c, p) - grading[j] - b * sum(w)
                best = val if best is None or val < best else best
    return (Fraction(0) if best is None else Fraction(best)) - 1


@dataclass
class DworkOpMatrix:
    rows: list          # (u, j, S)
    cols: list
    entries: list       # entries[row][col], integers mod p^prec
    p: int
    prec: int
    b: Fraction
    U: int
    i: int
    label: str = ""

    @property
    def size(self):
        return len(self.rows)

    @property
    def modulus(self):
        return self.p**self.prec

    def scaled_ord(self, r, c):
        """Order of the entry in the basis p^{ceil(b|u|)} X^u."""
        x = self.entries[r][c] % self.modulus
        if not x:
            return INF
        u, v = self.rows[r][0], self.cols[c][0]
        return vp(x, self.p) + ceil(self.b * sum(v)) - ceil(self.b * sum(u))

    def to_csv(self) -> str:
        lines = []
        for r, row in enumerate(self.entries):
            for c, x in enumerate(row):
                if x % self.modulus:
                    lines.append((self.rows[r], self.cols[c], str(x % self.modulus)))
        lines.sort()
        return "\n".join(f"\"{a}\",\"{b}\",{x}" for a, b, x in lines)


def dwork_matrix(M: SigmaModule, i: int, U: int, b=None, tc: TraceContext | None = None,
                 min_U: int | None = None) -> DworkOpMatrix:
    """Matrix of Θ_i on X^u e_j^* ⊗ dX_S^∨ for |u| <= U (unscaled basis).

    Entry at row (u, j1, S1), column (v, j2, S2) is the X^u coefficient of
    theta_top(X^v B_{j2 j1} J_{S2 S1}), with the Jacobian minor J_{S2 S1}.

    Raises:
        TruncationUnsound: if U is below ``min_U``.
        UnsupportedDimension: middle degrees need the classical lift.
    """
    lift = M.lift
    n, q, ctx = lift.n, lift.q, lift.ctx
    if min_U is not None and U < min_U:
        raise TruncationUnsound(f"U = {U} is below the truncation bound {min_U}")
    if tc is None:
        tc = jacobian_data(lift)
    if b is None:
        b = default_b(q)
    if not lift.classical and 0 < i < n:
        raise UnsupportedDimension("middle-degree operators need the classical lift")
    if not lift.classical and n > 1 and i < n:
        raise UnsupportedDimension("top-form trace for a non-classical lift needs one variable")
    exps = exponents_upto(n, U)
    Ss = subsets(n, i)
    r = M.rank
    index = [(u, j, S) for u in exps for j in range(r) for S in Ss]
    pos = {key: k for k, key in enumerate(index)}
    size = len(index)
    columns = []
    prec = ctx.W
    for (v, j2, S2) in index:
        col = {}
        for j1 in range(r):
            Bj = M.B[j2][j1]
            if Bj.is_zero():
                continue
            g = Bj.mul_monomial(v)
            for S1 in Ss:
                if i == n:
                    img = trace_functions(g, lift, out_cap=U)
                else:
                    minor = tc.minor(i, S1, S2)
                    if minor.is_zero():
                        continue
                    h = g.mul(minor, g.deg_cap + minor.deg_cap)
                    img = theta_top(h, tc, out_cap=U)
                    prec = min(prec, img.prec)
                for u, c in img.coeffs.items():
                    if sum(u) <= U and min(u) >= 0:
                        k = pos[(u, j1, S1)]
                        col[k] = (col.get(k, 0) + c)
        columns.append(col)
    Mod = ctx.p**prec
    entries = [[0] * size for _ in range(size)]
    for cidx, col in enumerate(columns):
        for ridx, c in col.items():
            entries[ridx][cidx] = c % Mod
    return DworkOpMatrix(index, list(index), entries, ctx.p, prec, Fraction(b), U, i, M.label)


def fredholm_det(G, D_T: int, p: int | None = None, prec: int | None = None) -> LSeries:
    """det(I - T G) truncated at T^{D_T} by division-free Berkowitz."""
    if isinstance(G, DworkOpMatrix):
        p, prec, mat = G.p, G.prec, G.entries
    else:
        mat = G
    coeffs = berkowitz_mod(mat, p**prec, D_T)
    return LSeries(p, prec, D_T, coeffs)


@dataclass
class TraceResult:
    lseries: LSeries
    num: list
    den: list
    matrices: list
    U: int
    b: Fraction


def l_trace(M: SigmaModule, D_T: int, N: int | None = None, U: int | None = None, b=None,
            tc: TraceContext | None = None, grading=None, full: bool = False):
    """Trace-formula L-function Π_i det(I - TΘ_i)^{(-1)^{n-i+1}} mod (p^N, T^{D_T+1}).

    The numerator collects the i with n - i odd, the denominator the rest.
    """
    lift = M.lift
    n, q = lift.n, lift.q
    if not lift.classical and n > 1:
        raise UnsupportedDimension("trace formula for a non-classical lift needs one variable")
    N = lift.ctx.W - n - 4 if N is None else N
    b = default_b(q) if b is None else Fraction(b)
    if U is None:
        c = estimate_offset(M, b, grading)
        U = truncation_bound(b, c, N, q)
        U = max(U, lift.max_f_deg, M.max_degree())
    if tc is None:
        tc = jacobian_data(lift)
    num, den, mats = [], [], []
    for i in range(n + 1):
        G = dwork_matrix(M, i, U, b, tc)
        det = fredholm_det(G, D_T).reduce(N)
        mats.append(G)
        (num if (n - i) % 2 == 1 else den).append(det)
    # (-1)^{n-i+1} = +1 exactly when n - i is odd
    L = LSeries.one(lift.ctx.p, N, D_T)
    for d in num:
        L = L * d
    for d in den:
        L = L / d
    L.num, L.den = num, den
    if full:
        return TraceResult(L, num, den, mats, U, b)
    return L


def dims(n, U, r, i):
    return comb(n + U, n) * r * comb(n, i)
