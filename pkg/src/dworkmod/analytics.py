"""Newton polygons with precision awareness, polygon lower bounds, slope-degree
tables and congruence scans over the weight k."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb, floor

from .errors import UnresolvedOrd
from .lseries import LSeries
from .padic import vp
from .polygon import Polygon, lower_hull
from .series import INF


@dataclass
class NewtonPolygon:
    polygon: Polygon                    # hull of the nonzero coefficients
    certified_x: Fraction
    resolved_below: Fraction | None     # sides of slope < this are certified; None = all
    unit: int = 1
    floor_polygon: Polygon | None = None   # hull with every unknown term at its lowest

    @property
    def vertices(self):
        return self.polygon.vertices

    def segments(self):
        return self.polygon.segments()

    def certified_polygon(self) -> Polygon:
        return Polygon([v for v in self.polygon.vertices if v[0] <= self.certified_x])

    def is_certified(self, s) -> bool:
        return self.resolved_below is None or Fraction(s) < self.resolved_below

    def length_at_slope(self, s) -> Fraction:
        if not self.is_certified(s):
            raise UnresolvedOrd(f"slope {s} is not resolved at this precision")
        return self.certified_polygon().slope_length(s)

    def to_json(self):
        rb = None if self.resolved_below is None else str(self.resolved_below)
        return {"vertices": self.polygon.to_json(), "certified_x": str(self.certified_x),
                "resolved_below": rb}


def _coeff_data(f):
    if isinstance(f, LSeries):
        return f.p, f.prec, f.coeffs
    p, prec, coeffs = f
    return p, prec, list(coeffs)


def newton_polygon(f, unit: int = 1, lower_bound: Polygon | None = None,
                   require_slope=None, exhaustive: bool = False) -> NewtonPolygon:
    """Lower hull of (m, ord(c_m)/unit), keeping only what precision certifies.

    ``f`` is an LSeries or a (p, prec, coeffs) triple.  A coefficient that is zero
    at the known precision is unknown, with ord >= prec.  Terms past the
    truncation are unknown too unless ``exhaustive`` says f is a polynomial of
    that degree.  ``lower_bound`` is a polygon known to lie below the true one;
    it lifts unknown terms and covers the tail up to its last vertex.

    The hull with unknowns dropped and the hull with unknowns at their lowest
    possible height share a leading part, which is certified.  Sides of slope
    below the first side where they part are exact.

    Raises:
        UnresolvedOrd: if ``require_slope`` is given and is not resolved.
    """
    p, prec, coeffs = _coeff_data(f)
    M = p**prec
    u = Fraction(unit)

    def floor_at(x):
        y = Fraction(prec)
        if lower_bound is not None and x <= lower_bound.vertices[-1][0]:
            y = max(y, lower_bound.value_at(x))
        return y / u

    known, unknown = [], []
    for m, c in enumerate(coeffs):
        c %= M
        if c:
            known.append((m, Fraction(vp(c, p)) / u))
        elif m:
            unknown.append((m, floor_at(m)))
    last = len(coeffs) - 1
    open_tail = not exhaustive
    tail_slope = None
    if open_tail:
        if lower_bound is not None and lower_bound.vertices[-1][0] > last:
            # the bound continues past its last vertex along its last side
            unknown += [(x, y / u) for x, y in lower_bound.vertices if x > last]
            tail_slope = lower_bound.slopes()[-1] / u
        else:
            # nothing is known about the next term beyond integrality
            unknown.append((last + 1, Fraction(0)))
    if not known:
        known = [(0, Fraction(0))]
    hi = lower_hull(known)
    lo = lower_hull(known + unknown)
    k = 0
    while k < min(len(hi), len(lo)) and hi[k] == lo[k]:
        k += 1
    common = hi[:max(k, 1)]
    cx = common[-1][0]

    def side(h, i):
        (x1, y1), (x2, y2) = h[i - 1], h[i]
        return (y2 - y1) / (x2 - x1)

    cands = [side(h, len(common)) for h in (hi, lo) if len(h) > len(common)]
    if tail_slope is not None:
        cands.append(tail_slope)
    rb = min(cands) if cands else None
    if require_slope is not None and rb is not None and Fraction(require_slope) >= rb:
        raise UnresolvedOrd(f"polygon resolved only below slope {rb}")
    return NewtonPolygon(Polygon(hi), cx, rb, unit, Polygon(lo))


def minkowski_sum(polys) -> Polygon:
    """Polygon whose slope multiset is the union of the inputs' (the product bound)."""
    segs = sorted((s, ln) for P in polys for s, ln in P.segments())
    verts = [(Fraction(0), Fraction(0))]
    for s, ln in segs:
        x, y = verts[-1]
        verts.append((x + ln, y + s * ln))
    return Polygon.hull(verts)


def entry_bound_polygon(n: int, r: int, c1, c, ell_max: int = 8, mult: int = 1) -> Polygon:
    """Polygon with vertices (#{|w| <= ℓ}, Σ_{|w| <= ℓ} (c1 |w| + c)) over w in Z_{>=0}^{n+r-1}.

    The origin is included as the first vertex.  ``mult`` counts every lattice
    point that many times (a module of rank mult over n coordinates).
    """
    D = n + r - 1
    c1, c = Fraction(c1), Fraction(c)
    verts = [(0, Fraction(0))]
    x, y = 0, Fraction(0)
    for ell in range(ell_max + 1):
        cnt = comb(ell + D - 1, D - 1) * mult
        x += cnt
        y += cnt * (c1 * ell + c)
        verts.append((x, y))
    return Polygon(verts)


def row_bound_polygon(bounds) -> Polygon:
    """Polygon through cumulative sums of the sorted row bounds."""
    verts = [(0, Fraction(0))]
    y = Fraction(0)
    for i, b in enumerate(sorted(Fraction(x) for x in bounds)):
        y += b
        verts.append((i + 1, y))
    return Polygon.hull(verts)


def entry_offsets(G, q: int) -> dict:
    """Per basis class (j, S): min over resolved rows of (row minimum of scaled ord) - (q-1)b|u|.

    Rows whose entries all vanish at the working precision carry no information
    and are skipped.
    """
    w = (q - 1) * G.b
    out = {}
    for r, (u, j, S) in enumerate(G.rows):
        m = min((G.scaled_ord(r, c) for c in range(G.size)), default=INF)
        if m == INF:
            continue
        val = Fraction(m) - w * sum(u)
        key = (j, S)
        out[key] = val if key not in out or val < out[key] else out[key]
    return out


def fredholm_bound(G, q: int, levels: int | None = None) -> Polygon:
    """Fitted lower bound for the polygon of det(I - TG), extended past the truncation.

    Every row of class (j, S) at level |u| = ℓ is bounded by (q-1)bℓ + c_{j,S},
    with the offsets read off the resolved rows (``entry_offsets``).  Each T^m
    coefficient is a sum of products over m distinct rows, so the cumulative
    sums of the sorted row bounds bound its order.
    """
    n = len(G.rows[0][0]) if G.rows else 1
    levels = G.U + 2 * G.prec + 4 if levels is None else levels
    w = (q - 1) * G.b
    offs = entry_offsets(G, q)
    bounds = []
    for ell in range(levels + 1):
        cnt = comb(ell + n - 1, n - 1)
        for c in offs.values():
            bounds += [w * ell + c] * cnt
    return row_bound_polygon(bounds)


@dataclass
class BoundProfile:
    c5: Fraction
    c6: Fraction
    n: int
    r: int
    passed: bool

    @property
    def D(self):
        return self.n + self.r - 1

    def Q(self, x) -> float:
        return float(self.c5) * float(x) ** (1 + 1 / self.D) - float(self.c6) * float(x)

    def nu_inverse(self, s) -> float:
        return ((float(s) + float(self.c6)) / float(self.c5)) ** self.D

    def m_nu(self, s) -> int:
        """⌊s ν^{-1}(s)⌋ for ν(x) = c5 x^{1/D} - c6."""
        return int(floor(float(s) * self.nu_inverse(s) + 1e-12))

    def to_json(self):
        return {"c5": str(self.c5), "c6": str(self.c6), "n": self.n, "r": self.r, "passed": self.passed}


def q_bound_fit(polygon, n: int, r: int, c6=None) -> BoundProfile:
    """Largest c5 with polygon >= c5 x^{1+1/D} - c6 x at every vertex, D = n + r - 1.

    By default c6 = 1 + max(0, -smallest slope), so every polygon whose slopes stay
    above -c6 gets a positive c5.
    """
    poly = polygon.polygon if isinstance(polygon, NewtonPolygon) else polygon
    D = n + r - 1
    if c6 is None:
        slopes = poly.slopes()
        c6 = 1 + max(Fraction(0), -min(slopes, default=Fraction(0)))
    c6 = Fraction(c6)
    best = None
    for x, y in poly.vertices:
        if x <= 0:
            continue
        val = Fraction((float(y) + float(c6) * float(x)) / float(x) ** (1 + 1 / D)).limit_denominator(10**9)
        best = val if best is None or val < best else best
    if best is None:
        best = Fraction(0)
    return BoundProfile(best, c6, n, r, best > 0)


@dataclass
class SlopeReport:
    rows: dict = field(default_factory=dict)       # slope -> (d_s, D_s)
    resolved_below: Fraction | None = None
    label: str = ""

    def d(self, s):
        return self.rows.get(Fraction(s), (0, 0))[0]

    def D(self, s):
        return self.rows.get(Fraction(s), (0, 0))[1]

    def is_certified(self, s) -> bool:
        return self.resolved_below is None or Fraction(s) < self.resolved_below

    def cumulative(self, s):
        return sum(D for t, (_, D) in self.rows.items() if t <= Fraction(s))

    def to_csv_rows(self, k):
        return [(k, str(s), d, D, self.is_certified(s)) for s, (d, D) in sorted(self.rows.items())]


def _slope_lengths(np_: NewtonPolygon, s_max):
    out = {}
    for s, ln in np_.certified_polygon().segments():
        if s <= s_max and np_.is_certified(s):
            out[s] = out.get(s, 0) + ln
    return out


def slope_degrees(num, den, s_max, label="", strict: bool = True, num_bound=None,
                  den_bound=None) -> SlopeReport:
    """d_s = len_num(s) - len_den(s) and D_s = len_num(s) + len_den(s) for s <= s_max.

    Raises:
        UnresolvedOrd: if ``strict`` and some slope up to s_max is not resolved.
    """
    s_max = Fraction(s_max)
    pn = num if isinstance(num, NewtonPolygon) else newton_polygon(num, lower_bound=num_bound)
    pd = den if isinstance(den, NewtonPolygon) else newton_polygon(den, lower_bound=den_bound)
    rbs = [x for x in (pn.resolved_below, pd.resolved_below) if x is not None]
    rb = min(rbs) if rbs else None
    if strict and rb is not None and s_max >= rb:
        raise UnresolvedOrd(f"slopes resolved only below {rb}, asked for {s_max}")
    ln, ld = _slope_lengths(pn, s_max), _slope_lengths(pd, s_max)
    rows = {}
    for s in sorted(set(ln) | set(ld)):
        if rb is not None and s >= rb:
            continue
        a, b = ln.get(s, 0), ld.get(s, 0)
        rows[s] = (int(a - b), int(a + b))
    return SlopeReport(rows, rb, label)


@dataclass
class CriterionVerdict:
    congruence_held: bool
    polygons_agree: bool
    m: int

    @property
    def implication_holds(self):
        return (not self.congruence_held) or self.polygons_agree


def np_congruence_criterion(g1, g2, nu: BoundProfile, s, exhaustive: bool = False,
                            lower_bound: Polygon | None = None) -> CriterionVerdict:
    """If g1 ≡ g2 mod p^{m_ν(s)+1}, their polygons must agree up to slope s.

    Raises:
        UnresolvedOrd: if either polygon is not resolved up to slope s.
    """
    m = nu.m_nu(s)
    e = m + 1
    held = min(g1.prec, g2.prec) >= e and g1.eq_mod(g2, prec=e)
    polys = []
    for g in (g1, g2):
        P = newton_polygon(g, lower_bound=lower_bound, exhaustive=exhaustive, require_slope=s)
        polys.append(P.certified_polygon().prefix_to_slope(s))
    return CriterionVerdict(held, polys[0] == polys[1], m)


def certified_slope_for(nu: BoundProfile, j: int, s_hi: float = 64.0) -> float:
    """Largest s with m_ν(s) + 1 <= j (0 if none)."""
    if nu.m_nu(0) + 1 > j:
        return 0.0
    lo, hi = 0.0, s_hi
    for _ in range(80):
        mid = (lo + hi) / 2
        if nu.m_nu(mid) + 1 <= j:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass
class ScanResult:
    table: dict                      # k -> SlopeReport
    pairs: list                      # (k1, k2, s_j, equal)
    profile: BoundProfile
    ok: bool

    def csv(self):
        lines = ["k,slope,d_s,D_s,certified"]
        for k in sorted(self.table):
            for row in self.table[k].to_csv_rows(k):
                lines.append(",".join(str(v) for v in row))
        return "\n".join(lines)


def product_bound(mats, q: int) -> Polygon | None:
    """Lower bound for the polygon of a product of Fredholm determinants."""
    if not mats:
        return None
    return minkowski_sum([fredholm_bound(G, q) for G in mats])


def _scan_polygons(res, q):
    nb, db = product_bound(res.num_mats, q), product_bound(res.den_mats, q)
    num, den = res.numerator, res.denominator
    pn = newton_polygon(num, lower_bound=nb, exhaustive=not res.num)
    pd = newton_polygon(den, lower_bound=db, exhaustive=not res.den)
    return pn, pd


def gm_scan(Mpsi, aux, k_list, s_max, j: int, D_T: int, N: int, n: int | None = None) -> ScanResult:
    """d_t(k) tables and their stability on pairs k1 ≡ k2 mod (q-1) p^j.

    Slopes are compared only where both polygons are resolved and below s(j),
    the largest slope the fitted bound certifies at precision p^j.
    """
    from .unitroot import unit_root_l

    lift = Mpsi.lift
    q, p = lift.q, lift.ctx.p
    n = lift.n if n is None else n
    r = Mpsi.rank + (aux.rank - 1 if aux is not None else 0)
    table, polys = {}, []
    ks = sorted(set(k_list))
    for k in ks:
        res = unit_root_l(Mpsi, aux, k, D_T, N, method="trace")
        pn, pd = _scan_polygons(res, q)
        polys += [pn, pd]
        table[k] = slope_degrees(pn, pd, s_max, label=f"k={k}", strict=False)
    fits = [q_bound_fit(pp, n, r) for pp in polys if len(pp.vertices) > 1]
    prof = min(fits, key=lambda b: b.c5) if fits else BoundProfile(Fraction(1), Fraction(1), n, r, True)
    sj = min(certified_slope_for(prof, j), float(s_max))
    mod = (q - 1) * p**j
    pairs, ok = [], True
    for a in ks:
        for b in ks:
            if a < b and (b - a) % mod == 0:
                ta, tb = table[a], table[b]
                slopes = [t for t in sorted(set(ta.rows) | set(tb.rows))
                          if t <= sj and ta.is_certified(t) and tb.is_certified(t)]
                eq = all(ta.d(t) == tb.d(t) for t in slopes)
                ok &= eq
                pairs.append((a, b, sj, len(slopes), eq))
    return ScanResult(table, pairs, prof, ok)
