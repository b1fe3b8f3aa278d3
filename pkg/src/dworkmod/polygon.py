"""Lower convex polygons with exact rational vertices."""

from __future__ import annotations

from fractions import Fraction


def lower_hull(points):
    """Lower convex hull of (x, y) points, x-sorted, duplicates keep the lowest y."""
    best = {}
    for x, y in points:
        x, y = Fraction(x), Fraction(y)
        if x not in best or y < best[x]:
            best[x] = y
    pts = sorted(best.items())
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point if it lies on or above the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


class Polygon:
    """Vertex list with strictly increasing x and non-decreasing slopes."""

    __slots__ = ("vertices",)

    def __init__(self, vertices):
        self.vertices = [(Fraction(x), Fraction(y)) for x, y in vertices]
        for (x1, _), (x2, _) in zip(self.vertices, self.vertices[1:]):
            if x2 <= x1:
                raise ValueError("polygon x-coordinates must increase")

    @classmethod
    def hull(cls, points):
        return cls(lower_hull(points))

    def __repr__(self):
        return "Polygon(" + ", ".join(f"({x}, {y})" for x, y in self.vertices) + ")"

    def __eq__(self, other):
        return isinstance(other, Polygon) and self.vertices == other.vertices

    @property
    def length(self):
        return self.vertices[-1][0] - self.vertices[0][0] if self.vertices else Fraction(0)

    def segments(self):
        """(slope, horizontal length) pairs, merging equal consecutive slopes."""
        out = []
        for (x1, y1), (x2, y2) in zip(self.vertices, self.vertices[1:]):
            s = (y2 - y1) / (x2 - x1)
            if out and out[-1][0] == s:
                out[-1] = (s, out[-1][1] + x2 - x1)
            else:
                out.append((s, x2 - x1))
        return out

    def slopes(self):
        return [s for s, _ in self.segments()]

    def slope_length(self, s) -> Fraction:
        s = Fraction(s)
        return sum((ln for t, ln in self.segments() if t == s), Fraction(0))

    def value_at(self, x):
        x = Fraction(x)
        vs = self.vertices
        if not vs or x < vs[0][0] or x > vs[-1][0]:
            raise ValueError("x outside polygon range")
        for (x1, y1), (x2, y2) in zip(vs, vs[1:]):
            if x1 <= x <= x2:
                return y1 + (y2 - y1) * (x - x1) / (x2 - x1)
        return vs[0][1]

    def lies_above(self, other: "Polygon") -> bool:
        """True if self >= other on the common x-range (ties allowed)."""
        lo = max(self.vertices[0][0], other.vertices[0][0])
        hi = min(self.vertices[-1][0], other.vertices[-1][0])
        xs = {x for x, _ in self.vertices + other.vertices if lo <= x <= hi}
        return all(self.value_at(x) >= other.value_at(x) for x in xs)

    def prefix_to_slope(self, s) -> "Polygon":
        """The part of the polygon made of sides of slope <= s."""
        s = Fraction(s)
        vs = [self.vertices[0]]
        for (x1, y1), (x2, y2) in zip(self.vertices, self.vertices[1:]):
            if (y2 - y1) / (x2 - x1) > s:
                break
            vs.append((x2, y2))
        return Polygon(vs)

    def to_json(self):
        return [[str(x), str(y)] for x, y in self.vertices]
