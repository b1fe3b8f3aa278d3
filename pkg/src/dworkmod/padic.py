"""Exact arithmetic in Z/p^W, in unramified extensions W_m = (Z/p^W)[t]/(h), and in F_{p^m}.

Elements of W_m are stored as tuples of residues (coordinates in 1, t, ..., t^{m-1}).
The ring objects below operate on those tuples directly; ``UnramifiedElement`` wraps
a tuple with its ring and a known-precision counter for user-facing code.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import (
    CompositeModulus,
    ContextMismatch,
    NotInvertibleDiagnostic,
    PrecisionExhausted,
)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def vp(x: int, p: int) -> int | float:
    """p-adic valuation of an integer, ``inf`` for 0."""
    if x == 0:
        return float("inf")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# Z/p^W scalars


@dataclass(frozen=True)
class PAdicContext:
    p: int
    W: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise CompositeModulus(f"{self.p} is not prime")
        if self.W < 1:
            raise ValueError("working precision must be positive")

    @property
    def modulus(self) -> int:
        return self.p**self.W


class PAdicScalar:
    """An integer residue modulo p^W with a count of trustworthy digits."""

    __slots__ = ("value", "known_prec", "ctx")

    def __init__(self, value: int, ctx: PAdicContext, known_prec: int | None = None):
        self.ctx = ctx
        self.known_prec = ctx.W if known_prec is None else known_prec
        if not 0 < self.known_prec <= ctx.W:
            raise PrecisionExhausted("known precision must lie in 1..W")
        self.value = value % ctx.modulus

    def _coerce(self, other) -> "PAdicScalar":
        if isinstance(other, PAdicScalar):
            if other.ctx != self.ctx:
                raise ContextMismatch("scalars live in different contexts")
            return other
        return PAdicScalar(int(other), self.ctx)

    def __add__(self, other):
        o = self._coerce(other)
        return PAdicScalar(self.value + o.value, self.ctx, min(self.known_prec, o.known_prec))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return PAdicScalar(self.value - o.value, self.ctx, min(self.known_prec, o.known_prec))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return PAdicScalar(-self.value, self.ctx, self.known_prec)

    def __mul__(self, other):
        o = self._coerce(other)
        return PAdicScalar(self.value * o.value, self.ctx, min(self.known_prec, o.known_prec))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return PAdicScalar(pow(self.value, e, self.ctx.modulus), self.ctx, self.known_prec)

    def __eq__(self, other):
        if not isinstance(other, (PAdicScalar, int)):
            return NotImplemented
        o = self._coerce(other)
        k = min(self.known_prec, o.known_prec)
        return (self.value - o.value) % self.ctx.p**k == 0

    def __hash__(self):
        return hash((self.value % self.ctx.p**self.known_prec, self.known_prec, self.ctx))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"PAdicScalar({self.value} mod {self.ctx.p}^{self.known_prec})"

    def ord(self) -> int | float:
        """Valuation, or ``inf`` when the value is zero at known precision."""
        r = self.value % self.ctx.p**self.known_prec
        return vp(r, self.ctx.p) if r else float("inf")

    def is_unit(self) -> bool:
        return self.value % self.ctx.p != 0

    def inverse(self) -> "PAdicScalar":
        if not self.is_unit():
            raise NotInvertibleDiagnostic("non-unit scalar")
        return PAdicScalar(pow(self.value, -1, self.ctx.modulus), self.ctx, self.known_prec)

    def divide_by_p(self, k: int = 1) -> "PAdicScalar":
        """Exact division by p^k; the top k digits become unknown."""
        if k >= self.known_prec:
            raise PrecisionExhausted("division by p would exhaust known precision")
        pk = self.ctx.p**k
        if self.value % pk:
            raise ArithmeticError(f"value not divisible by p^{k}")
        return PAdicScalar(self.value // pk, self.ctx, self.known_prec - k)


# ---------------------------------------------------------------------------
# polynomials over F_p (coefficient lists, lowest degree first)


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def fp_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def fp_divmod(a, b, p):
    a = [x % p for x in a]
    b = _trim([x % p for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    a = list(a)
    for k in range(len(a) - len(b), -1, -1):
        c = (a[k + len(b) - 1] * inv) % p
        q[k] = c
        if c:
            for i, y in enumerate(b):
                a[k + i] = (a[k + i] - c * y) % p
    return _trim(q), _trim(a[: len(b) - 1])


def fp_gcd(a, b, p):
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        a, b = b, fp_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [(x * inv) % p for x in a]
    return a


def fp_powmod(base, e, modpoly, p):
    result = [1]
    base = fp_divmod(base, modpoly, p)[1]
    while e:
        if e & 1:
            result = fp_divmod(fp_mul(result, base, p), modpoly, p)[1]
        base = fp_divmod(fp_mul(base, base, p), modpoly, p)[1]
        e >>= 1
    return result


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def fp_is_irreducible(g: list[int], p: int) -> bool:
    """Rabin's irreducibility test for a monic polynomial over F_p."""
    g = _trim([x % p for x in g])
    m = len(g) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    t = [0, 1]
    if _trim([x % p for x in _sub(fp_powmod(t, p**m, g, p), t)]):
        return False
    for ell in _prime_factors(m):
        w = _sub(fp_powmod(t, p ** (m // ell), g, p), t)
        if len(fp_gcd(g, w, p)) != 1:
            return False
    return True


def _sub(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]


# ---------------------------------------------------------------------------
# extension contexts


@dataclass(frozen=True)
class ExtensionContext:
    """Degree-m unramified extension data: ``h`` is monic, lowest coefficient first."""

    p: int
    m: int
    h: tuple[int, ...]
    a: int = 1

    @property
    def q(self) -> int:
        return self.p**self.a

    def h_string(self) -> str:
        terms = []
        for i in range(self.m, -1, -1):
            c = self.h[i]
            if not c:
                continue
            mon = "1" if i == 0 else ("t" if i == 1 else f"t^{i}")
            terms.append(mon if c == 1 and i else f"{c}" if i == 0 else f"{c}*{mon}")
        return " + ".join(terms)


@lru_cache(maxsize=None)
def build_extension(p: int, m: int, a: int = 1) -> ExtensionContext:
    """Return the degree-m extension whose modulus is the lex-smallest monic irreducible.

    Candidates t^m + c_{m-1} t^{m-1} + ... + c_0 are ordered lexicographically by
    (c_{m-1}, ..., c_0), so m = 1 gives h = t.

    Raises:
        CompositeModulus: if p is not prime.
    """
    if not is_prime(p):
        raise CompositeModulus(f"{p} is not prime")
    if m < 1:
        raise ValueError("extension degree must be positive")
    for digits in itertools.product(range(p), repeat=m):
        poly = list(reversed(digits)) + [1]
        if fp_is_irreducible(poly, p):
            return ExtensionContext(p, m, tuple(poly), a)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------
# rings W_m mod p^W acting on coordinate tuples


class UnramifiedRing:
    """(Z/p^W)[t]/(h) with h from an ``ExtensionContext``.  W = 1 gives F_{p^m}."""

    def __init__(self, ext: ExtensionContext, W: int):
        self.ext = ext
        self.p = ext.p
        self.m = ext.m
        self.W = W
        self.mod = ext.p**W
        m = self.m
        h = ext.h
        # t^k mod h for m <= k <= 2m-2
        self._red = {}
        row = [(-c) % self.mod for c in h[:m]]
        cur = row
        for k in range(m, 2 * m - 1):
            self._red[k] = cur
            nxt = [0] + cur[:-1]
            top = cur[-1]
            if top:
                nxt = [(nxt[i] + top * row[i]) % self.mod for i in range(m)]
            cur = nxt
        self._theta_pows = None

    def __repr__(self):
        return f"UnramifiedRing(p={self.p}, m={self.m}, W={self.W})"

    # construction
    def zero(self):
        return (0,) * self.m

    def one(self):
        return (1,) + (0,) * (self.m - 1)

    def from_int(self, c: int):
        return (c % self.mod,) + (0,) * (self.m - 1)

    def gen(self):
        if self.m == 1:
            return ((-self.ext.h[0]) % self.mod,)
        return (0, 1) + (0,) * (self.m - 2)

    def lift(self, xbar):
        """Coordinatewise lift of a residue tuple with digits in [0, p)."""
        return tuple(int(c) % self.mod for c in xbar)

    def reduce(self, x, k: int = 1):
        pk = self.p**k
        return tuple(c % pk for c in x)

    # arithmetic
    def add(self, x, y):
        M = self.mod
        return tuple((a + b) % M for a, b in zip(x, y))

    def sub(self, x, y):
        M = self.mod
        return tuple((a - b) % M for a, b in zip(x, y))

    def neg(self, x):
        M = self.mod
        return tuple((-a) % M for a in x)

    def scal(self, c: int, x):
        M = self.mod
        return tuple((c * a) % M for a in x)

    def mul(self, x, y):
        M = self.mod
        m = self.m
        if m == 1:
            return ((x[0] * y[0]) % M,)
        prod = [0] * (2 * m - 1)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        prod[i + j] += a * b
        res = prod[:m]
        red = self._red
        for k in range(m, 2 * m - 1):
            c = prod[k]
            if c:
                row = red[k]
                for i in range(m):
                    res[i] += c * row[i]
        return tuple(r % M for r in res)

    def pow(self, x, e: int):
        if e < 0:
            return self.pow(self.inv(x), -e)
        result = self.one()
        base = x
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def is_zero(self, x, k: int | None = None) -> bool:
        pk = self.mod if k is None else self.p**k
        return all(c % pk == 0 for c in x)

    def is_unit(self, x) -> bool:
        return any(c % self.p for c in x)

    def ord(self, x) -> int | float:
        vals = [vp(c, self.p) for c in x if c % self.mod]
        return min(vals) if vals else float("inf")

    def inv(self, x):
        """Inverse of a unit via an F_{p^m} inverse and Newton lifting."""
        p = self.p
        xbar = _trim([c % p for c in x])
        if not xbar:
            raise NotInvertibleDiagnostic("element is not a unit")
        if self.m == 1:
            return (pow(x[0], -1, self.mod),)
        # extended Euclid in F_p[t] against h
        r0, r1 = list(self.ext.h), xbar
        s0, s1 = [], [1]
        while r1:
            q, r = fp_divmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _trim([c % p for c in _sub(s0, fp_mul(q, s1, p))])
        # r0 is a nonzero constant
        c = pow(r0[0], -1, p)
        y = tuple(((s0[i] if i < len(s0) else 0) * c) % p for i in range(self.m))
        two = self.from_int(2)
        for _ in range(self.W.bit_length() + 2):
            y = self.mul(y, self.sub(two, self.mul(x, y)))
        if self.mul(x, y) != self.one():
            raise PrecisionExhausted("inverse failed to converge")
        return y

    # Frobenius
    def _theta(self):
        """Root of h congruent to t^p, found by Newton iteration."""
        if self._theta_pows is not None:
            return self._theta_pows
        m = self.m
        if m == 1:
            self._theta_pows = [self.one()]
            return self._theta_pows
        h = self.ext.h
        dh = [(i * h[i]) for i in range(1, m + 1)]

        def ev(poly, y):
            acc = self.zero()
            for c in reversed(poly):
                acc = self.add(self.mul(acc, y), self.from_int(c))
            return acc

        theta = self.pow(self.gen(), self.p)
        for _ in range(2 * self.W.bit_length() + 4):
            val = ev(h, theta)
            if self.is_zero(val):
                break
            theta = self.sub(theta, self.mul(val, self.inv(ev(dh, theta))))
        else:
            raise PrecisionExhausted("Newton iteration for the Frobenius root did not converge")
        pows = [self.one()]
        for _ in range(1, m):
            pows.append(self.mul(pows[-1], theta))
        self._theta_pows = pows
        return pows

    def frob(self, x):
        """Image of x under the ring endomorphism lifting y -> y^p."""
        if self.m == 1:
            return x
        pows = self._theta()
        M = self.mod
        out = [0] * self.m
        for c, tp in zip(x, pows):
            if c:
                for i in range(self.m):
                    out[i] += c * tp[i]
        return tuple(v % M for v in out)

    def frob_k(self, x, k: int):
        for _ in range(k % self.m if self.m > 1 else 0):
            x = self.frob(x)
        return x

    def teichmuller(self, xbar):
        """Unique lift y of xbar with y^{p^m} = y, by iterating y -> y^{p^m}."""
        y = self.lift(xbar)
        e = self.p**self.m
        for _ in range(self.W + 2):
            z = self.pow(y, e)
            if z == y:
                return y
            y = z
        raise PrecisionExhausted("Teichmüller iteration did not stabilise")  # pragma: no cover


@lru_cache(maxsize=None)
def unramified_ring(ext: ExtensionContext, W: int) -> UnramifiedRing:
    return UnramifiedRing(ext, W)


def finite_field(ext: ExtensionContext) -> UnramifiedRing:
    """F_{p^m} realised as the W = 1 ring."""
    return unramified_ring(ext, 1)


# ---------------------------------------------------------------------------
# element wrapper


class UnramifiedElement:
    """An element of W_m with value semantics and precision bookkeeping."""

    __slots__ = ("ring", "c", "known_prec")

    def __init__(self, ring: UnramifiedRing, coeffs, known_prec: int | None = None):
        coeffs = tuple(int(v) % ring.mod for v in coeffs)
        if len(coeffs) < ring.m:
            coeffs = coeffs + (0,) * (ring.m - len(coeffs))
        if len(coeffs) != ring.m:
            raise ValueError("coordinate vector has the wrong length")
        self.ring = ring
        self.c = coeffs
        self.known_prec = ring.W if known_prec is None else known_prec

    @classmethod
    def from_int(cls, ring: UnramifiedRing, c: int) -> "UnramifiedElement":
        return cls(ring, ring.from_int(c))

    @property
    def coeffs(self) -> list[PAdicScalar]:
        ctx = PAdicContext(self.ring.p, self.ring.W)
        return [PAdicScalar(v, ctx, self.known_prec) for v in self.c]

    def _coerce(self, other) -> "UnramifiedElement":
        if isinstance(other, UnramifiedElement):
            if other.ring is not self.ring:
                raise ContextMismatch("elements belong to different rings")
            return other
        if isinstance(other, PAdicScalar):
            return UnramifiedElement(self.ring, self.ring.from_int(other.value), other.known_prec)
        return UnramifiedElement(self.ring, self.ring.from_int(int(other)))

    def _wrap(self, c, other=None):
        kp = self.known_prec if other is None else min(self.known_prec, other.known_prec)
        return UnramifiedElement(self.ring, c, kp)

    def __add__(self, other):
        o = self._coerce(other)
        return self._wrap(self.ring.add(self.c, o.c), o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return self._wrap(self.ring.sub(self.c, o.c), o)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return self._wrap(self.ring.neg(self.c))

    def __mul__(self, other):
        o = self._coerce(other)
        return self._wrap(self.ring.mul(self.c, o.c), o)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return self._wrap(self.ring.pow(self.c, e))

    def inverse(self):
        return self._wrap(self.ring.inv(self.c))

    def __eq__(self, other):
        if not isinstance(other, (UnramifiedElement, int, PAdicScalar)):
            return NotImplemented
        o = self._coerce(other)
        k = min(self.known_prec, o.known_prec)
        return self.ring.is_zero(self.ring.sub(self.c, o.c), k)

    def __hash__(self):
        return hash(self.ring.reduce(self.c, self.known_prec))

    def __repr__(self):
        return f"UnramifiedElement({list(self.c)} mod {self.ring.p}^{self.known_prec}, m={self.ring.m})"

    def reduce(self) -> "UnramifiedElement":
        """Reduction into F_{p^m}."""
        return UnramifiedElement(finite_field(self.ring.ext), self.ring.reduce(self.c))

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.c)

    def divide_by_p(self, k: int = 1) -> "UnramifiedElement":
        if k >= self.known_prec:
            raise PrecisionExhausted("division by p would exhaust known precision")
        pk = self.ring.p**k
        if any(v % pk for v in self.c):
            raise ArithmeticError(f"element not divisible by p^{k}")
        return UnramifiedElement(self.ring, [v // pk for v in self.c], self.known_prec - k)


def frobenius(x: UnramifiedElement) -> UnramifiedElement:
    """Apply the p-power Frobenius of W_m (Newton root of h near t^p)."""
    return UnramifiedElement(x.ring, x.ring.frob(x.c), x.known_prec)


def teichmuller(xbar: UnramifiedElement, W: int) -> UnramifiedElement:
    """Teichmüller lift to precision W of an element of F_{p^m}."""
    ring = unramified_ring(xbar.ring.ext, W)
    return UnramifiedElement(ring, ring.teichmuller(xbar.ring.reduce(xbar.c)))
