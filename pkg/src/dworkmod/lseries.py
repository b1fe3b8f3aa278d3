"""Truncated T-series with constant term 1, as produced by L-function computations."""

from __future__ import annotations

from .padic import vp


def _mul_trunc(a, b, M, D):
    out = [0] * (D + 1)
    for i, x in enumerate(a[: D + 1]):
        if x:
            for j in range(min(len(b), D + 1 - i)):
                out[i + j] += x * b[j]
    return [c % M for c in out]


def _inv_trunc(a, M, D):
    if a[0] % M != 1 % M:
        raise ValueError("series must have constant term 1")
    inv = [0] * (D + 1)
    inv[0] = 1
    for k in range(1, D + 1):
        s = 0
        for i in range(1, min(k, len(a) - 1) + 1):
            s += a[i] * inv[k - i]
        inv[k] = (-s) % M
    return inv


class LSeries:
    """Coefficients c_0 = 1, c_1, ..., c_tcap modulo p^prec.

    ``num`` and ``den`` optionally hold lists of factor series whose quotient is
    this series; they are informational and never renormalised.
    """

    __slots__ = ("p", "prec", "tcap", "coeffs", "num", "den")

    def __init__(self, p: int, prec: int, tcap: int, coeffs, num=None, den=None):
        self.p = p
        self.prec = prec
        self.tcap = tcap
        M = p**prec
        c = [int(x) % M for x in list(coeffs)[: tcap + 1]]
        c += [0] * (tcap + 1 - len(c))
        if c[0] != 1 % M:
            raise ValueError("L-series must have constant term 1")
        self.coeffs = c
        self.num = num
        self.den = den

    @property
    def modulus(self) -> int:
        return self.p**self.prec

    @classmethod
    def one(cls, p, prec, tcap):
        return cls(p, prec, tcap, [1])

    @classmethod
    def from_poly(cls, p, prec, tcap, coeffs):
        return cls(p, prec, tcap, coeffs)

    def __repr__(self):
        return f"LSeries(p={self.p}, prec={self.prec}, tcap={self.tcap}, {self.coeffs})"

    def _align(self, other):
        if other.p != self.p:
            raise ValueError("L-series over different primes")
        return min(self.prec, other.prec), min(self.tcap, other.tcap)

    def __mul__(self, other):
        prec, D = self._align(other)
        return LSeries(self.p, prec, D, _mul_trunc(self.coeffs, other.coeffs, self.p**prec, D))

    def inverse(self):
        return LSeries(self.p, self.prec, self.tcap, _inv_trunc(self.coeffs, self.modulus, self.tcap),
                       num=self.den, den=self.num)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = LSeries.one(self.p, self.prec, self.tcap)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def reduce(self, prec=None, tcap=None):
        prec = self.prec if prec is None else min(prec, self.prec)
        tcap = self.tcap if tcap is None else min(tcap, self.tcap)
        return LSeries(self.p, prec, tcap, self.coeffs)

    def eq_mod(self, other, prec=None, tcap=None) -> bool:
        """Congruence modulo (p^prec, T^{tcap+1})."""
        P, D = self._align(other)
        P = P if prec is None else min(prec, P)
        D = D if tcap is None else min(tcap, D)
        M = self.p**P
        return all((self.coeffs[i] - other.coeffs[i]) % M == 0 for i in range(D + 1))

    def __eq__(self, other):
        if not isinstance(other, LSeries):
            return NotImplemented
        return self.eq_mod(other)

    def __hash__(self):
        return hash((self.p, self.prec, self.tcap, tuple(self.coeffs)))

    def ords(self):
        return [vp(c, self.p) if c else float("inf") for c in self.coeffs]

    def signed(self):
        """Coefficients as symmetric residues in (-M/2, M/2]."""
        M = self.modulus
        return [c - M if c > M // 2 else c for c in self.coeffs]

    def to_json(self) -> dict:
        return {"prec": self.prec, "tcap": self.tcap, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, p, data):
        return cls(p, data["prec"], data["tcap"], [int(c) for c in data["coeffs"]])


def product(series, p, prec, tcap) -> LSeries:
    out = LSeries.one(p, prec, tcap)
    for s in series:
        out = out * s
    return out


def quotient(num: list, den: list, p, prec, tcap) -> LSeries:
    """Expanded product(num) / product(den), remembering the factors."""
    res = product(num, p, prec, tcap) / product(den, p, prec, tcap)
    res.num, res.den = list(num), list(den)
    return res
