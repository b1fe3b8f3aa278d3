"""Truncated power series over Z/p^W and Frobenius lifts acting on them.

A ``TruncSeries`` is a sparse map from exponent tuples to residues mod p^W with
a total-degree cap.  One-variable series may carry negative exponents down to
``-floor`` (``LaurentSeries1``), which is what the top-form trace needs.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil

from . import _kernels
from .errors import (
    ContextMismatch,
    DegreeOverflow,
    FloorTooShallow,
    NotInvertibleDiagnostic,
    PrecisionExhausted,
)
from .padic import PAdicContext, PAdicScalar, UnramifiedElement, vp

INF = float("inf")


def _add_exp(u, v):
    return tuple(a + b for a, b in zip(u, v))


class TruncSeries:
    """Sparse truncated series in ``nvars`` variables.

    ``coeffs`` maps exponent tuples to integers already reduced mod p^W; zero
    entries are never stored.  ``prec`` counts trustworthy p-adic digits.
    """

    __slots__ = ("nvars", "coeffs", "deg_cap", "ctx", "prec", "floor")

    def __init__(self, nvars: int, coeffs, deg_cap: int, ctx: PAdicContext, prec=None, floor: int = 0):
        self.nvars = nvars
        self.deg_cap = deg_cap
        self.ctx = ctx
        self.prec = ctx.W if prec is None else prec
        self.floor = floor
        M = ctx.modulus
        clean = {}
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        for u, c in items:
            u = tuple(u)
            if len(u) != nvars:
                raise ValueError("exponent length does not match nvars")
            c = int(c) % M
            if not c:
                continue
            if sum(u) > deg_cap:
                continue
            if min(u, default=0) < -floor:
                continue
            clean[u] = (clean.get(u, 0) + c) % M
        self.coeffs = {u: c for u, c in clean.items() if c}

    # constructors
    @classmethod
    def zero(cls, ctx, nvars=1, deg_cap=0):
        return cls(nvars, {}, deg_cap, ctx)

    @classmethod
    def const(cls, ctx, c, nvars=1, deg_cap=0):
        return cls(nvars, {(0,) * nvars: c}, deg_cap, ctx)

    @classmethod
    def monomial(cls, ctx, u, c=1, deg_cap=None):
        u = tuple(u)
        return cls(len(u), {u: c}, sum(u) if deg_cap is None else deg_cap, ctx)

    @classmethod
    def from_terms(cls, ctx, nvars, terms, deg_cap=None):
        """Build from (exponent, integer) pairs; the cap defaults to the top degree."""
        terms = [(tuple(u) if not isinstance(u, int) else (u,), c) for u, c in terms]
        if deg_cap is None:
            deg_cap = max((sum(u) for u, _ in terms), default=0)
        return cls(nvars, terms, deg_cap, ctx)

    def _like(self, coeffs, deg_cap=None, prec=None):
        return type(self)._make(self, coeffs, self.deg_cap if deg_cap is None else deg_cap,
                                self.prec if prec is None else prec)

    @staticmethod
    def _make(proto, coeffs, deg_cap, prec):
        return TruncSeries(proto.nvars, coeffs, deg_cap, proto.ctx, prec, proto.floor)

    # basic queries
    def __repr__(self):
        return f"TruncSeries(n={self.nvars}, {len(self.coeffs)} terms, cap={self.deg_cap}, p^{self.prec})"

    def __getitem__(self, u):
        if isinstance(u, int):
            u = (u,)
        return self.coeffs.get(tuple(u), 0)

    def items(self):
        return sorted(self.coeffs.items())

    def is_zero(self, k: int | None = None) -> bool:
        if k is None:
            return not self.coeffs
        pk = self.ctx.p**k
        return all(c % pk == 0 for c in self.coeffs.values())

    def degree(self) -> int:
        return max((sum(u) for u in self.coeffs), default=-1)

    def min_exponent(self) -> int:
        return min((min(u) for u in self.coeffs), default=0)

    def eq_mod(self, other, k: int | None = None) -> bool:
        k = min(self.prec, other.prec) if k is None else k
        return (self - other).is_zero(k)

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.nvars == other.nvars and self.eq_mod(other)

    def __hash__(self):
        return hash(tuple(self.items()))

    def scalar(self, u) -> PAdicScalar:
        return PAdicScalar(self[u], self.ctx, self.prec)

    def constant_term(self) -> int:
        return self[(0,) * self.nvars]

    def _check(self, other):
        if not isinstance(other, TruncSeries):
            raise TypeError("expected a TruncSeries")
        if other.ctx != self.ctx or other.nvars != self.nvars:
            raise ContextMismatch("series live in different contexts")

    # ring operations
    def __add__(self, other):
        if isinstance(other, int):
            other = TruncSeries.const(self.ctx, other, self.nvars, self.deg_cap)
        self._check(other)
        out = dict(self.coeffs)
        for u, c in other.coeffs.items():
            out[u] = out.get(u, 0) + c
        return TruncSeries(self.nvars, out, max(self.deg_cap, other.deg_cap), self.ctx,
                           min(self.prec, other.prec), max(self.floor, other.floor))

    __radd__ = __add__

    def __neg__(self):
        return self._like({u: -c for u, c in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scal(self, c: int):
        return self._like({u: c * v for u, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scal(other)
        if isinstance(other, PAdicScalar):
            return TruncSeries(self.nvars, {u: other.value * v for u, v in self.coeffs.items()},
                               self.deg_cap, self.ctx, min(self.prec, other.known_prec), self.floor)
        return self.mul(other)

    __rmul__ = __mul__

    def mul(self, other, deg_cap: int | None = None):
        """Product truncated at ``deg_cap`` (default: the larger of the two caps)."""
        self._check(other)
        cap = max(self.deg_cap, other.deg_cap) if deg_cap is None else deg_cap
        floor = max(self.floor, other.floor)
        prec = min(self.prec, other.prec)
        M = self.ctx.modulus
        if not self.coeffs or not other.coeffs:
            return TruncSeries(self.nvars, {}, cap, self.ctx, prec, floor)
        if self.nvars == 1 and len(self.coeffs) * len(other.coeffs) > 64:
            lo_a, lo_b = self.min_exponent(), other.min_exponent()
            hi_a, hi_b = self.degree(), other.degree()
            a = [0] * (hi_a - lo_a + 1)
            b = [0] * (hi_b - lo_b + 1)
            for (e,), c in self.coeffs.items():
                a[e - lo_a] = c
            for (e,), c in other.coeffs.items():
                b[e - lo_b] = c
            prod = _kernels.conv_mod(a, b, M, cap - lo_a - lo_b)
            out = {(i + lo_a + lo_b,): c for i, c in enumerate(prod) if c}
        else:
            out = {}
            for u, c in self.coeffs.items():
                du = sum(u)
                for v, d in other.coeffs.items():
                    if du + sum(v) > cap:
                        continue
                    w = _add_exp(u, v)
                    out[w] = out.get(w, 0) + c * d
        if floor:
            bad = [w for w, c in out.items() if min(w) < -floor and c % M]
            if bad:
                raise FloorTooShallow(f"product has support below exponent {-floor}")
        return TruncSeries(self.nvars, out, cap, self.ctx, prec, floor)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("use laurent_invert for negative powers")
        result = TruncSeries.const(self.ctx, 1, self.nvars, self.deg_cap)
        result.floor = self.floor
        base = self
        while e:
            if e & 1:
                result = result.mul(base)
            e >>= 1
            if e:
                base = base.mul(base)
        return result

    def with_cap(self, deg_cap: int):
        return TruncSeries(self.nvars, self.coeffs, deg_cap, self.ctx, self.prec, self.floor)

    def mul_monomial(self, v, c: int = 1, deg_cap: int | None = None):
        cap = self.deg_cap + sum(v) if deg_cap is None else deg_cap
        return TruncSeries(self.nvars, {_add_exp(u, v): c * d for u, d in self.coeffs.items()},
                           cap, self.ctx, self.prec, self.floor)

    def reduce(self, k: int):
        pk = self.ctx.p**k
        return TruncSeries(self.nvars, {u: c % pk for u, c in self.coeffs.items()},
                           self.deg_cap, self.ctx, min(k, self.prec), self.floor)

    def derivative(self, i: int):
        out = {}
        for u, c in self.coeffs.items():
            if u[i]:
                w = list(u)
                w[i] -= 1
                out[tuple(w)] = c * u[i]
        return self._like(out)

    def divide_by_p(self, k: int = 1):
        """Exact division by p^k, lowering known precision by k."""
        if k == 0:
            return self
        if k >= self.prec:
            raise PrecisionExhausted("division by p would exhaust known precision")
        pk = self.ctx.p**k
        if any(c % pk for c in self.coeffs.values()):
            raise ArithmeticError(f"series not divisible by p^{k}")
        return self._like({u: c // pk for u, c in self.coeffs.items()}, prec=self.prec - k)

    # valuations
    def gauss_ord(self) -> int | float:
        """Minimum p-adic order of the stored coefficients (inf for zero)."""
        pk = self.ctx.p**self.prec
        vals = [vp(c % pk, self.ctx.p) for c in self.coeffs.values() if c % pk]
        return min(vals) if vals else INF

    def content(self) -> int | float:
        return self.gauss_ord()

    def in_L(self, b, c) -> bool:
        """True iff every stored coefficient a_v has ord >= b|v| + c."""
        b, c = Fraction(b), Fraction(c)
        pk = self.ctx.p**self.prec
        for u, a in self.coeffs.items():
            a %= pk
            if a and vp(a, self.ctx.p) < b * sum(u) + c:
                return False
        return True

    # evaluation
    def eval_tuple(self, ring, xs):
        """Evaluate at a point given as ring coordinate tuples."""
        if self.nvars == 1 and self.min_exponent() >= 0:
            x = xs[0]
            acc = ring.zero()
            for e in range(self.degree(), -1, -1):
                acc = ring.mul(acc, x)
                c = self.coeffs.get((e,))
                if c:
                    acc = ring.add(acc, ring.from_int(c))
            return acc
        cache = {}

        def pw(i, e):
            key = (i, e)
            if key not in cache:
                cache[key] = ring.pow(xs[i], e)
            return cache[key]

        acc = ring.zero()
        for u, c in self.coeffs.items():
            term = ring.from_int(c)
            for i, e in enumerate(u):
                if e:
                    term = ring.mul(term, pw(i, e))
            acc = ring.add(acc, term)
        return acc

    def evaluate(self, x):
        """Evaluate at a point of W_m^n given as ``UnramifiedElement`` coordinates."""
        if isinstance(x, UnramifiedElement):
            x = [x]
        ring = x[0].ring
        if ring.mod != self.ctx.modulus and ring.W > self.ctx.W:
            raise ContextMismatch("point has higher precision than the series")
        kp = min(min(e.known_prec for e in x), self.prec)
        return UnramifiedElement(ring, self.eval_tuple(ring, [e.c for e in x]), kp)

    def __call__(self, *x):
        return self.evaluate(list(x))

    # canonical output
    def serialize(self):
        """Canonical list of (exponent vector, digit string) pairs, sorted."""
        return [(list(u), str(c)) for u, c in self.items()]

    def to_string(self, var="X") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for u, c in self.items():
            mon = "*".join(
                (f"{var}{i + 1}" if self.nvars > 1 else var) + (f"^{e}" if e != 1 else "")
                for i, e in enumerate(u) if e
            )
            parts.append(f"{c}" if not mon else (mon if c == 1 else f"{c}*{mon}"))
        return " + ".join(parts)


class LaurentSeries1(TruncSeries):
    """One-variable series with exponents in [-floor, deg_cap], scaled by p^pshift."""

    __slots__ = ("pshift",)

    def __init__(self, coeffs, deg_cap, ctx, floor, prec=None, pshift: int = 0):
        super().__init__(1, coeffs, deg_cap, ctx, prec, floor)
        self.pshift = pshift

    @staticmethod
    def _make(proto, coeffs, deg_cap, prec):
        return LaurentSeries1(coeffs, deg_cap, proto.ctx, proto.floor, prec, proto.pshift)

    @classmethod
    def from_series(cls, f: TruncSeries, floor: int, deg_cap: int | None = None):
        return cls(f.coeffs, f.deg_cap if deg_cap is None else deg_cap, f.ctx, floor, f.prec)


def laurent_invert(g: TruncSeries, floor: int | None = None, deg_cap: int | None = None) -> LaurentSeries1:
    """Inverse of a one-variable Laurent series in the p-adically completed ring.

    Writing g = p^v X^e c (1 + P + N) with P a power series without constant term
    and N a p-divisible part in negative exponents, the inverse is
    p^{-v} X^{-e} c^{-1} (1+P)^{-1} sum_j (-N (1+P)^{-1})^j.  The p^{-v} factor is
    kept in ``pshift``.

    Raises:
        NotInvertibleDiagnostic: no coefficient of g is a unit after removing p^v.
        FloorTooShallow: the inverse has non-negligible terms below -floor.
    """
    if g.nvars != 1:
        raise ValueError("laurent_invert needs a one-variable series")
    ctx, p, W = g.ctx, g.ctx.p, g.ctx.W
    M = ctx.modulus
    if floor is None:
        floor = max(g.floor, (p - 1) * W)
    cap = g.deg_cap if deg_cap is None else deg_cap
    v = g.gauss_ord()
    if v == INF:
        raise NotInvertibleDiagnostic("zero series is not invertible")
    pv = p**v
    u = {e: c // pv for (e,), c in g.coeffs.items()}
    units = sorted(e for e, c in u.items() if c % p)
    if not units:
        raise NotInvertibleDiagnostic("no unit coefficient")
    e0 = units[0]
    c0inv = pow(u[e0], -1, M)
    # shifted and normalised: 1 + P + N
    shifted = {k - e0: (c * c0inv) % M for k, c in u.items()}
    depth = max(0, -min(shifted))
    pos_cap = cap + e0 + W * depth
    P = {k: c for k, c in shifted.items() if k > 0}
    Nn = {k: c for k, c in shifted.items() if k < 0}
    work_floor = floor + W * depth + abs(e0) + 1
    # (1+P)^{-1} by the recursion a_k = -sum_{i>=1} P_i a_{k-i}
    inv = [0] * (pos_cap + 1)
    inv[0] = 1
    Pl = sorted(P.items())
    for k in range(1, pos_cap + 1):
        s = 0
        for i, c in Pl:
            if i > k:
                break
            s += c * inv[k - i]
        inv[k] = (-s) % M
    inv_s = TruncSeries(1, {(k,): c for k, c in enumerate(inv) if c}, pos_cap, ctx, g.prec, work_floor)
    total = inv_s
    if Nn:
        Ns = TruncSeries(1, {(k,): (-c) % M for k, c in Nn.items()}, pos_cap, ctx, g.prec, work_floor)
        step = Ns.mul(inv_s)
        term = inv_s
        for _ in range(W):
            term = term.mul(step)
            if term.is_zero():
                break
            total = total + term
    out = {}
    for (k,), c in total.coeffs.items():
        k2 = k - e0
        if k2 > cap:
            continue
        if k2 < -floor:
            raise FloorTooShallow(f"inverse has support at exponent {k2} below floor {-floor}")
        out[(k2,)] = c * c0inv
    return LaurentSeries1(out, cap, ctx, floor, g.prec, -v)


# ---------------------------------------------------------------------------
# Frobenius lifts


class SigmaLift:
    """σ(X_i) = X_i^q + p f_i, with cached powers of σ(X_i)."""

    def __init__(self, ctx: PAdicContext, fs, a: int = 1, laurent_floor: int | None = None):
        self.ctx = ctx
        self.a = a
        self.q = ctx.p**a
        self.n = len(fs)
        self.fs = [f if isinstance(f, TruncSeries) else TruncSeries.from_terms(ctx, len(fs), f) for f in fs]
        for f in self.fs:
            if f.ctx != ctx or f.nvars != self.n:
                raise ContextMismatch("perturbation has the wrong context")
        self.classical = all(f.is_zero() for f in self.fs)
        self.max_f_deg = max((f.degree() for f in self.fs), default=0)
        self.growth = max(self.q, self.max_f_deg)
        self.laurent_floor = laurent_floor
        self._sx = []
        for i, f in enumerate(self.fs):
            u = [0] * self.n
            u[i] = self.q
            sx = TruncSeries(self.n, {tuple(u): 1}, self.q, ctx) + f.scal(ctx.p).with_cap(self.growth)
            self._sx.append(sx.with_cap(self.growth))
        self._pow = {}
        self._mon = {}

    def __repr__(self):
        return f"SigmaLift(q={self.q}, n={self.n}, classical={self.classical})"

    def sigma_x(self, i: int) -> TruncSeries:
        return self._sx[i]

    def var_power(self, i: int, k: int) -> TruncSeries:
        """σ(X_i)^k; negative k uses the Laurent inverse (one variable only)."""
        key = (i, k)
        hit = self._pow.get(key)
        if hit is not None:
            return hit
        if k == 0:
            res = TruncSeries.const(self.ctx, 1, self.n, 0)
        elif k > 0:
            if self.classical:
                u = [0] * self.n
                u[i] = self.q * k
                res = TruncSeries(self.n, {tuple(u): 1}, self.q * k, self.ctx)
            else:
                prev = self.var_power(i, k - 1)
                res = prev.mul(self._sx[i], prev.deg_cap + self.growth)
        else:
            if self.n != 1:
                raise ValueError("negative powers of σ(X) need one variable")
            if self.classical:
                res = LaurentSeries1({(self.q * k,): 1}, 0, self.ctx, -self.q * k)
            else:
                base_floor = self.laurent_floor or (self.ctx.p - 1) * self.ctx.W + self.q
                if k == -1:
                    res = laurent_invert(self._sx[0], floor=base_floor, deg_cap=0)
                else:
                    res = laurent_mul(self.var_power(i, k + 1), self.var_power(i, -1),
                                      base_floor + self.q * (-k))
        self._pow[key] = res
        return res

    def sigma_monomial(self, s) -> TruncSeries:
        """σ(X^s) for an exponent tuple s."""
        s = tuple(s)
        hit = self._mon.get(s)
        if hit is not None:
            return hit
        if self.classical:
            res = TruncSeries(self.n, {tuple(self.q * e for e in s): 1}, self.q * sum(s), self.ctx,
                              floor=max(0, -self.q * min(s, default=0)))
        else:
            res = None
            for i, e in enumerate(s):
                if e == 0:
                    continue
                f = self.var_power(i, e)
                res = f if res is None else res.mul(f, res.deg_cap + f.deg_cap)
            if res is None:
                res = TruncSeries.const(self.ctx, 1, self.n, 0)
        self._mon[s] = res
        return res


def apply_sigma(f: TruncSeries, lift: SigmaLift, cap: int | None = None, strict: bool = True) -> TruncSeries:
    """f(σ(X_1), ..., σ(X_n)) truncated at ``cap``.

    The default cap is large enough for the exact image of a polynomial.  With
    ``strict`` a nonzero term above the cap raises ``DegreeOverflow`` instead of
    being dropped.
    """
    if f.ctx != lift.ctx or f.nvars != lift.n:
        raise ContextMismatch("series and lift have different contexts")
    if cap is None:
        cap = max(f.deg_cap, 0) * lift.growth
    out = {}
    for u, c in f.coeffs.items():
        img = lift.sigma_monomial(u)
        for w, d in img.coeffs.items():
            out[w] = out.get(w, 0) + c * d
    M = f.ctx.modulus
    if strict:
        over = [w for w, c in out.items() if sum(w) > cap and c % M]
        if over:
            raise DegreeOverflow(f"σ-image has degree {max(sum(w) for w in over)} above cap {cap}")
    floor = max([f.floor] + [max(0, -min(w)) for w in out]) if f.floor else 0
    return TruncSeries(f.nvars, out, cap, f.ctx, f.prec, floor)


def laurent_mul(f: TruncSeries, g: TruncSeries, floor: int, deg_cap: int | None = None) -> LaurentSeries1:
    """Product of one-variable Laurent series keeping exponents down to -floor.

    Terms below the floor must vanish mod p^W, otherwise ``FloorTooShallow``.
    """
    cap = max(f.deg_cap, g.deg_cap) if deg_cap is None else deg_cap
    wide = f.floor + g.floor + floor
    a = TruncSeries(1, f.coeffs, f.deg_cap, f.ctx, f.prec, wide)
    res = a.mul(TruncSeries(1, g.coeffs, g.deg_cap, g.ctx, g.prec, wide), cap)
    M = f.ctx.modulus
    if any(e < -floor and c % M for (e,), c in res.coeffs.items()):
        raise FloorTooShallow(f"product has support below exponent {-floor}")
    shift = getattr(f, "pshift", 0) + getattr(g, "pshift", 0)
    return LaurentSeries1(res.coeffs, cap, f.ctx, floor, res.prec, shift)


def ceil_frac(x) -> int:
    return ceil(Fraction(x))
