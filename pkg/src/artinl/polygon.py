"""Lower convex polygons with exact rational vertices.

Used for both Newton polygons of p-adic polynomials and ramification-side
Hodge polygons.  Infinite ordinates (exactly-zero coefficients) enter hull
construction as absent points.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class PolygonError(ValueError):
    pass


QQ = Fraction


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise PolygonError(f"expected an exact rational, got {type(v).__name__}")


@dataclass(frozen=True)
class AboveReport:
    """Outcome of a lies-above comparison at the common refinement."""

    holds: bool
    min_margin: Fraction
    witness_x: Fraction
    margins: tuple[tuple[Fraction, Fraction], ...]


class RationalPolygon:
    """Lower-convex piecewise-linear graph from (0, 0)-anchored vertex list."""

    __slots__ = ("vertices",)

    def __init__(self, vertices: Sequence[tuple[Fraction, Fraction]]):
        vs = [(_as_fraction(x), _as_fraction(y)) for x, y in vertices]
        if not vs:
            raise PolygonError("a polygon needs at least one vertex")
        for (x0, _), (x1, _) in zip(vs, vs[1:]):
            if x1 <= x0:
                raise PolygonError("vertex abscissae must strictly increase")
        # convexity: slopes strictly increase between consecutive segments
        slopes = [
            (y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(vs, vs[1:])
        ]
        for s0, s1 in zip(slopes, slopes[1:]):
            if s1 <= s0:
                raise PolygonError("vertices are not in lower-convex position")
        object.__setattr__(self, "vertices", tuple(vs))

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("RationalPolygon is immutable")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RationalPolygon) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        pts = ", ".join(f"({x},{y})" for x, y in self.vertices)
        return f"RationalPolygon[{pts}]"

    # -- construction ------------------------------------------------------

    @classmethod
    def lower_hull(cls, points: Iterable[tuple[int, Fraction | None]]) -> RationalPolygon:
        """Lower convex hull of (x, ordinate) points; ordinate None means +infinity."""
        pts = sorted(
            (
                (_as_fraction(x), _as_fraction(y))
                for x, y in points
                if y is not None
            ),
            key=lambda t: (t[0], t[1]),
        )
        dedup: list[tuple[Fraction, Fraction]] = []
        for x, y in pts:
            if dedup and dedup[-1][0] == x:
                continue  # keep the lowest ordinate at each abscissa
            dedup.append((x, y))
        if not dedup:
            raise PolygonError("no finite points to hull")
        hull: list[tuple[Fraction, Fraction]] = []
        for pt in dedup:
            while len(hull) >= 2:
                (x0, y0), (x1, y1) = hull[-2], hull[-1]
                # drop hull[-1] if it lies on or above chord hull[-2] -> pt
                if (y1 - y0) * (pt[0] - x1) >= (pt[1] - y1) * (x1 - x0):
                    hull.pop()
                else:
                    break
            hull.append(pt)
        return cls(hull)

    @classmethod
    def from_slopes(
        cls,
        slopes: Iterable[tuple[Fraction, int | Fraction]] | Iterable[Fraction],
        start: tuple[Fraction, Fraction] = (Fraction(0), Fraction(0)),
    ) -> RationalPolygon:
        """Polygon with the given slope multiset, anchored at start.

        Entries are slopes (unit width) or (slope, width) pairs; widths may be
        fractional, so slope blocks of non-integral multiplicity are allowed.
        """
        widths: dict[Fraction, Fraction] = {}
        for item in slopes:
            if isinstance(item, tuple):
                s, mult = _as_fraction(item[0]), _as_fraction(item[1])
            else:
                s, mult = _as_fraction(item), Fraction(1)
            if mult < 0:
                raise PolygonError("negative slope multiplicity")
            if mult:
                widths[s] = widths.get(s, Fraction(0)) + mult
        x, y = _as_fraction(start[0]), _as_fraction(start[1])
        verts = [(x, y)]
        for s in sorted(widths):
            x += widths[s]
            y += s * widths[s]
            verts.append((x, y))
        return cls(verts)

    # -- queries -----------------------------------------------------------

    @property
    def start(self) -> tuple[Fraction, Fraction]:
        return self.vertices[0]

    @property
    def end(self) -> tuple[Fraction, Fraction]:
        return self.vertices[-1]

    @property
    def width(self) -> Fraction:
        return self.end[0] - self.start[0]

    def slopes(self) -> tuple[Fraction, ...]:
        """Slope multiset, one entry per unit of width (widths must be integral)."""
        out: list[Fraction] = []
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            w = x1 - x0
            if w.denominator != 1:
                raise PolygonError("non-integral segment width has no slope multiset")
            out.extend([(y1 - y0) / w] * int(w))
        return tuple(out)

    def value_at(self, x: Fraction) -> Fraction:
        x = _as_fraction(x)
        if not (self.start[0] <= x <= self.end[0]):
            raise PolygonError(f"abscissa {x} outside polygon domain")
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            if x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        return self.end[1]

    def lies_above(self, lower: RationalPolygon) -> AboveReport:
        """Compare self >= lower at every vertex of the common refinement."""
        hi, lo = self, lower
        x_min = max(hi.start[0], lo.start[0])
        x_max = min(hi.end[0], lo.end[0])
        if x_max < x_min:
            raise PolygonError("polygons have disjoint domains")
        xs = sorted(
            {x for x, _ in hi.vertices if x_min <= x <= x_max}
            | {x for x, _ in lo.vertices if x_min <= x <= x_max}
            | {x_min, x_max}
        )
        margins = tuple((x, hi.value_at(x) - lo.value_at(x)) for x in xs)
        bad = [(x, m) for x, m in margins if m < 0]
        if bad:
            witness, worst = min(bad, key=lambda t: (t[1], t[0]))
            return AboveReport(False, worst, bad[0][0], margins)
        min_x, min_m = min(margins, key=lambda t: (t[1], t[0]))
        return AboveReport(True, min_m, min_x, margins)

    def dual(self) -> RationalPolygon:
        """Slope multiset mapped alpha -> 1 - alpha, widths preserved."""
        segs = [
            ((1 - (y1 - y0) / (x1 - x0)), x1 - x0)
            for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:])
        ]
        return RationalPolygon.from_slopes(segs, start=self.start)

    def truncate_below(self, bound: Fraction) -> RationalPolygon:
        """Sub-polygon carrying the slopes strictly below bound."""
        bound = _as_fraction(bound)
        kept = [s for s in self.slopes() if s < bound]
        return RationalPolygon.from_slopes(kept, start=self.start)

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        slope_runs: list[list[int]] = []
        for s in self.slopes():
            if slope_runs and slope_runs[-1][0] == s.numerator and slope_runs[-1][1] == s.denominator:
                slope_runs[-1][2] += 1
            else:
                slope_runs.append([s.numerator, s.denominator, 1])
        return {
            "vertices": [
                [x.numerator, x.denominator, y.numerator, y.denominator]
                for x, y in self.vertices
            ],
            "slopes": slope_runs,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> RationalPolygon:
        verts = [
            (Fraction(xn, xd), Fraction(yn, yd))
            for xn, xd, yn, yd in data["vertices"]
        ]
        poly = cls(verts)
        expect = []
        for n, d, mult in data.get("slopes", []):
            expect.extend([Fraction(n, d)] * mult)
        if expect and tuple(expect) != poly.slopes():
            raise PolygonError("slope list inconsistent with vertices")
        return poly

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def to_tsv(self) -> str:
        """One vertex per line: x_num, x_den, y_num, y_den, tab-separated."""
        lines = ["x_num\tx_den\ty_num\ty_den"]
        for x, y in self.vertices:
            lines.append(f"{x.numerator}\t{x.denominator}\t{y.numerator}\t{y.denominator}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_tsv(cls, text: str) -> RationalPolygon:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].split("\t") != ["x_num", "x_den", "y_num", "y_den"]:
            raise PolygonError("polygon TSV must start with the standard header")
        verts = []
        for ln in lines[1:]:
            parts = ln.split("\t")
            if len(parts) != 4:
                raise PolygonError(f"polygon TSV row needs 4 columns: {ln!r}")
            try:
                xn, xd, yn, yd = (int(v) for v in parts)
            except ValueError as exc:
                raise PolygonError(f"non-integer polygon TSV entry: {ln!r}") from exc
            verts.append((Fraction(xn, xd), Fraction(yn, yd)))
        return cls(verts)
