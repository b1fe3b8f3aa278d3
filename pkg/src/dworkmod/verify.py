"""The desk-scale verification suite: fourteen identity and property checks.

Each check returns a CriterionResult; ``run_suite`` runs a selection in order.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import analytics as an
from .euler import euler_factor, l_euler, teich_points
from .lseries import LSeries
from .series import TruncSeries, apply_sigma
from .sigma_module import SigmaModule, basis_polygon, basis_sequence, normalize_twist
from .suites import both_lifts, make_lift, rank1_module, rank2_module, suite_modules
from .trace import fredholm_det, jacobian_data, l_trace, split_basic, theta_top, trace_functions, unsplit
from .unitroot import (congruence_check_75, decomposition_identity, eigen_residual,
                       hodge_newton_unit, l_limiting, limiting_module, unit_fiber_check,
                       unit_root_euler, unit_root_l)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: list = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d}: {self.title}"

    def to_json(self, timing: bool = False):
        out = {"number": self.number, "title": self.title, "passed": self.passed,
               "details": [str(d) for d in self.details]}
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def _random_series(rng, ctx, cap, b=None, c=0):
    M = ctx.modulus
    coeffs = {}
    for v in range(cap + 1):
        e = 0 if b is None else max(0, math.ceil(b * v + c))
        coeffs[(v,)] = ctx.p**e * rng.randrange(M) % M
    return TruncSeries(1, coeffs, cap, ctx)


def _record(details, ok, msg):
    if not ok:
        details.append(msg)
    return ok


# ---------------------------------------------------------------------------


def check_zeta_line(p=2, N=8, D_T=10):
    details, ok = [], True
    for name, lift in both_lifts(p, N + 5).items():
        T = suite_modules(lift)["trivial"]
        q = lift.q
        Le = l_euler(T, D_T)
        exact = [q**m % Le.modulus for m in range(D_T + 1)]
        ok &= _record(details, Le.coeffs == exact, f"{name}: euler {Le.coeffs}")
        Lt = l_trace(T, D_T, N=N)
        ok &= _record(details, Lt.eq_mod(LSeries(p, N, D_T, exact)), f"{name}: trace {Lt.coeffs}")
    return ok, details


def check_trace_formula(p=2, N=6, D_T=6):
    details, ok = [], True
    for name, lift in both_lifts(p, N + 5).items():
        for label, M in suite_modules(lift).items():
            Le, Lt = l_euler(M, D_T, prec=N), l_trace(M, D_T, N=N)
            ok &= _record(details, Le.eq_mod(Lt), f"{name}/{label}: {Le.coeffs} vs {Lt.coeffs}")
    # two-variable smoke case with the classical lift
    lift2 = make_lift(p, N + 6, "classical", n=2)
    M = SigmaModule.from_terms(lift2, [[[((0, 0), 1), ((1, 0), p), ((0, 1), p)]]], "rank1-2var")
    Le, Lt = l_euler(M, 3, prec=N), l_trace(M, 3, N=N)
    ok &= _record(details, Le.eq_mod(Lt), f"n=2: {Le.coeffs} vs {Lt.coeffs}")
    return ok, details


def check_splitting(p=2, N=6, trials=200, seed=0):
    rng = random.Random(seed)
    details, ok = [], True
    b = Fraction(1, 2)
    for name, lift in both_lifts(p, N + 5).items():
        ctx = lift.ctx
        for t in range(trials):
            f = _random_series(rng, ctx, rng.randint(1, 12))
            g = unsplit(split_basic(f, lift), lift, f.deg_cap)
            ok &= _record(details, (g - f).is_zero(N), f"{name}: round trip failed on trial {t}")
            h = _random_series(rng, ctx, 10, b, 0)
            fam = split_basic(h, lift)
            cap = h.deg_cap // lift.q
            inside = all(x.with_cap(cap).in_L(lift.q * b, 0) for x in fam.values())
            ok &= _record(details, inside, f"{name}: contraction failed on trial {t}")
    return ok, details


def check_trace_identities(p=2, N=6, trials=100, seed=1):
    rng = random.Random(seed)
    details, ok = [], True
    for name, lift in both_lifts(p, N + 5).items():
        tc = jacobian_data(lift)
        qn = lift.q**lift.n
        for t in range(trials):
            g = _random_series(rng, lift.ctx, rng.randint(0, 6))
            sg = apply_sigma(g, lift, cap=g.deg_cap * lift.q + lift.growth)
            tr = trace_functions(sg, lift, out_cap=g.deg_cap)
            ok &= _record(details, (tr - g.scal(qn)).is_zero(N), f"{name}: trace(σg) trial {t}")
            h = sg.mul(tc.J, sg.deg_cap + tc.J.deg_cap)
            th = theta_top(h, tc, out_cap=g.deg_cap)
            ok &= _record(details, (th - g.scal(qn)).is_zero(N), f"{name}: θ(σg J) trial {t}")
    return ok, details


def check_fredholm_congruence(p=2, N=6, D_T=6, seed=2):
    rng = random.Random(seed)
    details, ok = [], True
    for name, lift in both_lifts(p, N + 5).items():
        ctx = lift.ctx
        for label in ("rank1", "rank2"):
            M = suite_modules(lift)[label]
            base = l_trace(M, D_T, N=N, full=True)
            for i in (1, 2, 3):
                D = [[TruncSeries.from_terms(ctx, 1, [((e,), p**i * rng.randrange(p**3)) for e in range(3)])
                      for _ in range(M.rank)] for _ in range(M.rank)]
                P = M.add_matrix(D)
                pert = l_trace(P, D_T, N=N, U=base.U, full=True)
                for k, (a, b) in enumerate(zip(base.num + base.den, pert.num + pert.den)):
                    ok &= _record(details, a.eq_mod(b, prec=i), f"{name}/{label}: i={i} factor {k}")
    return ok, details


def check_truncation(p=2, N=6, D_T=6, N_lim=4, D_T_lim=5):
    details, ok = [], True
    for name, lift in both_lifts(p, N + 5).items():
        for label, M in suite_modules(lift).items():
            a = l_trace(M, D_T, N=N, full=True)
            b = l_trace(M, D_T, N=N, U=a.U + 3, full=True)
            same = all(x.eq_mod(y) for x, y in zip(a.num + a.den, b.num + b.den))
            ok &= _record(details, same, f"{name}/{label}: U+3 changed a determinant")
    for name, lift in both_lifts(p, N_lim + 5).items():
        phi = normalize_twist(rank2_module(lift)).module
        for k in (0, 1, 2):
            x = l_limiting(limiting_module(phi, k, N_lim), None, 1, k, D_T_lim, N_lim)
            y = l_limiting(limiting_module(phi, k, N_lim + 2), None, 1, k, D_T_lim, N_lim)
            ok &= _record(details, x.eq_mod(y), f"{name}: D_f+2 changed the limiting L-function, k={k}")
    return ok, details


def check_hodge_newton(p=2, N=8, d_max=4):
    details, ok = [], True
    for name, lift in both_lifts(p, N + 5).items():
        M = rank2_module(lift)
        ur = hodge_newton_unit(M, N)
        ok &= _record(details, ur.iterations <= 10, f"{name}: {ur.iterations} iterations")
        res = eigen_residual(M, ur)
        ok &= _record(details, res >= N, f"{name}: eigen residual ord {res}")
        fc = unit_fiber_check(ur, M, d_max, slack=2)
        ok &= _record(details, fc.ok and fc.compare_prec >= 6, f"{name}: fiber check failed")
    return ok, details


def check_decomposition(p=2, N=5, D_T=5):
    details, ok = [], True
    for name, lift in both_lifts(p, N + 5).items():
        M = rank2_module(lift)
        for k in (2, 3):
            rep = decomposition_identity(M, k, D_T, N)
            ok &= _record(details, rep.ok, f"{name}: k={k}")
    return ok, details


def check_limiting_congruence(p=2, N=8, D_f=8):
    details, ok = [], True
    for name, lift in both_lifts(p, N + 5).items():
        phi = normalize_twist(rank2_module(lift)).module
        for k in (0, 1, 2):
            for m in (1, 2, 3):
                rep = congruence_check_75(phi, k, m, D_f=D_f)
                ok &= _record(details, rep.ok, f"{name}: k={k} m={m} fails at {rep.failures[:3]}")
    return ok, details


def check_unit_root_identity(p=2, N=4, D_T=5):
    details, ok = [], True
    for name, lift in both_lifts(p, N + 5).items():
        M = rank2_module(lift)
        for k in (-1, 0, 1, 2, 5):
            A = unit_root_l(M, None, k, D_T, N)
            B = unit_root_euler(M, None, k, D_T, N, alpha_prec=N + 3)
            ok &= _record(details, A.lseries.eq_mod(B), f"{name}: k={k} {A.lseries.coeffs} vs {B.coeffs}")
    return ok, details


def check_strong_family(p=2, N=4, D_T=5, ks=(0, 1)):
    details, ok = [], True
    for name, lift in both_lifts(p, N + 5).items():
        M = rank2_module(lift)
        cache = {}

        def get(k):
            if k not in cache:
                cache[k] = unit_root_l(M, None, k, D_T, N)
            return cache[k]

        for j in (1, 2, 3):
            for k1 in ks:
                k2 = k1 + (lift.q - 1) * p**j
                a, b = get(k1), get(k2)
                good = a.numerator.eq_mod(b.numerator, prec=j) and a.denominator.eq_mod(b.denominator, prec=j)
                ok &= _record(details, good, f"{name}: j={j} k={k1},{k2}")
    return ok, details


def check_polygon_dominance(p=2, N=6, D_T=6, d_max=3, W_fiber=16):
    details, ok = [], True
    # fibers need enough precision for det(Φ_x) itself to be resolved
    for name, lift in both_lifts(p, W_fiber).items():
        pts = teich_points(lift, d_max)
        for label, M in suite_modules(lift).items():
            B = basis_polygon(basis_sequence(M))
            for x in pts:
                fac = euler_factor(M, x)
                coeffs = [c[0] if isinstance(c, tuple) else c for c in fac.coeffs]
                P = an.newton_polygon((p, x.ring.W, coeffs), unit=x.degree, exhaustive=True)
                ok &= _record(details, P.floor_polygon.lies_above(B), f"{name}/{label}: fiber at degree {x.degree}")
    for name, lift in both_lifts(p, N + 5).items():
        for label, M in suite_modules(lift).items():
            res = l_trace(M, D_T, N=N, full=True)
            for G in res.matrices:
                det = an.newton_polygon(fredholm_det(G, D_T))
                offs = an.entry_offsets(G, lift.q)
                c = min(offs.values())
                mult = len(offs)
                EB = an.entry_bound_polygon(lift.n, 1, (lift.q - 1) * G.b, c, G.U + 2, mult=mult)
                ok &= _record(details, det.polygon.lies_above(EB), f"{name}/{label}: Θ_{G.i} below entry bound")
                ok &= _record(details, det.polygon.lies_above(an.fredholm_bound(G, lift.q)),
                              f"{name}/{label}: Θ_{G.i} below fitted bound")
                if len(det.vertices) < 2:
                    continue            # the fit needs a non-trivial polygon
                fit = an.q_bound_fit(det, lift.n, M.rank)
                ok &= _record(details, fit.passed, f"{name}/{label}: q-bound fit c5={fit.c5}")
    return ok, details


def check_np_criterion(pairs=50, seed=13, p=2, deg=12):
    rng = random.Random(seed)
    details, ok = [], True
    for t in range(pairs):
        prof = an.BoundProfile(Fraction(1, 2) + Fraction(rng.randint(0, 4), 8), Fraction(1), 1, 2, True)
        s = Fraction(rng.randint(1, 6), 2)
        m = prof.m_nu(s)
        prec = m + 2 + math.ceil(prof.Q(deg)) + 4
        c = [1] + [p**(max(0, math.ceil(prof.Q(x))) + rng.randint(0, 3)) * rng.choice([1, 3, 5, 7])
                   for x in range(1, deg + 1)]
        d = [0] + [p**max(m + 1, math.ceil(prof.Q(x))) * rng.randint(0, 7) for x in range(1, deg + 1)]
        g1 = LSeries(p, prec, deg, c)
        g2 = LSeries(p, prec, deg, [a + b for a, b in zip(c, d)])
        v = an.np_congruence_criterion(g1, g2, prof, s, exhaustive=True)
        ok &= _record(details, v.congruence_held and v.polygons_agree, f"pair {t}: s={s} m={m}")
    return ok, details


def check_gm_scan(p=2, N1=6, D_T1=6, N2=4, D_T2=5):
    details, ok = [], True
    for name, lift in both_lifts(p, N1 + 5).items():
        M = rank1_module(lift)
        for j in (1, 2, 3):
            ks = [0, 1, 2, 3]
            ks += [k + (lift.q - 1) * p**j for k in ks]
            res = an.gm_scan(M, None, ks, 3, j, D_T1, N1)
            ok &= _record(details, res.ok and bool(res.pairs), f"r=1 {name}: j={j} {res.pairs}")
            details.append(f"r=1 {name} j={j}: compared slopes per pair {[x[3] for x in res.pairs]}")
    for name, lift in both_lifts(p, N2 + 5).items():
        M = rank2_module(lift)
        for j in (2, 3):
            ks = [0, 1]
            ks += [k + (lift.q - 1) * p**j for k in ks]
            res = an.gm_scan(M, None, ks, 2, j, D_T2, N2)
            ok &= _record(details, res.ok and bool(res.pairs), f"r=2 {name}: j={j} {res.pairs}")
            details.append(f"r=2 {name} j={j}: compared slopes per pair {[x[3] for x in res.pairs]}")
    return ok, details


CRITERIA = {
    1: ("zeta of the affine line", check_zeta_line),
    2: ("trace formula against Euler products", check_trace_formula),
    3: ("splitting round trip and contraction", check_splitting),
    4: ("trace identities", check_trace_identities),
    5: ("Fredholm congruence under perturbation", check_fredholm_congruence),
    6: ("truncation soundness", check_truncation),
    7: ("unit-root eigenvector and fiber oracle", check_hodge_newton),
    8: ("decomposition via Euler products", check_decomposition),
    9: ("limiting congruence", check_limiting_congruence),
    10: ("unit-root L-function identity", check_unit_root_identity),
    11: ("strong-family congruence", check_strong_family),
    12: ("Newton polygon dominance", check_polygon_dominance),
    13: ("polygon congruence criterion", check_np_criterion),
    14: ("slope-degree scan over weights", check_gm_scan),
}


def run_criterion(number: int) -> CriterionResult:
    title, fn = CRITERIA[number]
    t = time.perf_counter()
    try:
        ok, details = fn()
    except Exception as exc:        # a crash is a failure with its reason recorded
        ok, details = False, [f"{type(exc).__name__}: {exc}"]
    return CriterionResult(number, title, bool(ok), details, time.perf_counter() - t)


def run_suite(numbers=None, echo=None):
    out = []
    for k in (sorted(CRITERIA) if numbers is None else numbers):
        r = run_criterion(k)
        if echo:
            echo(r.line())
        out.append(r)
    return out
