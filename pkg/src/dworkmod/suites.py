"""Shipped lifts and modules used by the verification suite, the CLI and the tests."""

from __future__ import annotations

from .padic import PAdicContext
from .series import SigmaLift, TruncSeries
from .sigma_module import SigmaModule, ext_power, sym_power, tensor


def perturbation_terms(p: int):
    """σ(X) = X^p + p f with f = X for p = 2 and f = X^2 + X otherwise."""
    return [((1,), 1)] if p == 2 else [((2,), 1), ((1,), 1)]


def make_lift(p: int, W: int, kind: str = "classical", n: int = 1, a: int = 1) -> SigmaLift:
    ctx = PAdicContext(p, W)
    if kind == "classical":
        fs = [TruncSeries.zero(ctx, n, 0) for _ in range(n)]
    elif kind == "perturbed":
        if n != 1:
            raise ValueError("the perturbed lift is defined in one variable")
        fs = [TruncSeries.from_terms(ctx, 1, perturbation_terms(p))]
    else:
        raise ValueError(f"unknown lift kind {kind!r}")
    return SigmaLift(ctx, fs, a=a)


def both_lifts(p: int, W: int):
    return {"classical": make_lift(p, W, "classical"), "perturbed": make_lift(p, W, "perturbed")}


def rank1_module(lift: SigmaLift) -> SigmaModule:
    """B = 1 + pX."""
    p = lift.ctx.p
    return SigmaModule.from_terms(lift, [[[((0,), 1), ((1,), p)]]], "rank1")


def rank2_module(lift: SigmaLift) -> SigmaModule:
    """Normalized ordinary rank-2 module [[1 + pX, p], [pX, p + pX]]."""
    p = lift.ctx.p
    if lift.n != 1:
        raise ValueError("the rank-2 suite module is defined in one variable")
    entries = [[[((0,), 1), ((1,), p)], [((0,), p)]],
               [[((1,), p)], [((0,), p), ((1,), p)]]]
    return SigmaModule.from_terms(lift, entries, "rank2")


def suite_modules(lift: SigmaLift) -> dict:
    M = rank2_module(lift)
    return {
        "trivial": SigmaModule.trivial(lift),
        "rank1": rank1_module(lift),
        "rank2": M,
        "sym2": sym_power(M, 2),
        "wedge2": ext_power(M, 2),
        "tensor2": tensor(M, M),
    }
