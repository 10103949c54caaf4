"""Rank-one character data on open subsets of the projective line over F_q.

A character is a wild-by-tame product: the wild part is a length-n vector of
rational functions (Witt coordinates), the tame part a Kummer pair (f, gamma).
All ramified points must be F_q-rational.  Local rewriting makes every
residual pole order prime to p; the Swan conductor, the base-p digit sums of
the tame exponents, and the Hodge-side polygon are read off the result.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - Python 3.10
    import tomli as tomllib

from .arith import (
    MAX_WITT_LENGTH,
    ArithError,
    FieldDesc,
    Fq,
    Poly,
    RatFunc,
    field_desc,
    make_extension,
    witt_add,
    witt_neg,
    witt_scalar,
    witt_sum_polys,
    witt_eval_poly,
)
from .polygon import RationalPolygon

# finite points are Fq elements; None marks the point at infinity


class SpecError(ValueError):
    """Invalid or unsupported character data."""


# ---------------------------------------------------------------------------
# truncated Laurent series over F_q (internal)


class TruncLaurent:
    """Laurent series known below an exponent ceiling; coefficients in one F_q."""

    __slots__ = ("field", "coeffs", "prec")

    EXACT = 10**9

    def __init__(self, field: FieldDesc, coeffs: dict[int, Fq], prec: int):
        self.field = field
        self.coeffs = {e: c for e, c in coeffs.items() if c and e < prec}
        self.prec = prec

    @classmethod
    def zero(cls, field: FieldDesc, prec: int | None = None) -> TruncLaurent:
        return cls(field, {}, cls.EXACT if prec is None else prec)

    @classmethod
    def monomial(cls, field: FieldDesc, e: int, c: Fq) -> TruncLaurent:
        return cls(field, {e: c}, cls.EXACT)

    def order(self) -> int:
        return min(self.coeffs) if self.coeffs else self.prec

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TruncLaurent)
            and self.field == other.field
            and self.coeffs == other.coeffs
            and self.prec == other.prec
        )

    def __add__(self, other: TruncLaurent) -> TruncLaurent:
        prec = min(self.prec, other.prec)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = out.get(e, self.field.zero()) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return TruncLaurent(self.field, out, prec)

    def __neg__(self) -> TruncLaurent:
        return TruncLaurent(self.field, {e: -c for e, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other: TruncLaurent) -> TruncLaurent:
        return self + (-other)

    def __mul__(self, other: TruncLaurent) -> TruncLaurent:
        prec = min(self.prec + other.order(), other.prec + self.order())
        out: dict[int, Fq] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e >= prec:
                    continue
                v = out.get(e, self.field.zero()) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return TruncLaurent(self.field, out, min(prec, TruncLaurent.EXACT))

    def scale(self, c: int) -> TruncLaurent:
        return TruncLaurent(
            self.field, {e: v.scale(c) for e, v in self.coeffs.items()}, self.prec
        )

    def principal(self, keep_constant: bool = False) -> dict[int, Fq]:
        bound = 1 if keep_constant else 0
        if self.prec < bound:
            raise ArithError("Laurent precision too low to split off the principal part")
        return {e: c for e, c in self.coeffs.items() if e < bound}

    def integral_part(self) -> TruncLaurent:
        return TruncLaurent(
            self.field, {e: c for e, c in self.coeffs.items() if e >= 0}, self.prec
        )


def laurent_expansion(rf: RatFunc, point: Fq | None, prec: int) -> TruncLaurent:
    """Expansion of rf in the local parameter at the point (1/t at infinity)."""
    field = rf.field
    if not rf.num:
        return TruncLaurent.zero(field, prec)
    if point is None:
        dn, dd = rf.num.degree, rf.den.degree
        num = rf.num.reversed_coeffs()
        den = rf.den.reversed_coeffs()
        shift = dd - dn
    else:
        num = rf.num.shift_origin(point)
        den = rf.den.shift_origin(point)
        k = den.ord_at_zero()
        den = Poly(field, den.coeffs[k:])
        shift = -k
        kn = num.ord_at_zero() if num else 0
        if kn:
            num = Poly(field, num.coeffs[kn:])
            shift += kn
    nterms = prec - shift
    if nterms <= 0:
        return TruncLaurent.zero(field, prec)
    series = num * den.series_inverse(nterms)
    coeffs = {shift + i: c for i, c in enumerate(series.coeffs[:nterms]) if c}
    return TruncLaurent(field, coeffs, prec)


# ---------------------------------------------------------------------------
# the character specification


class CharacterSpec:
    """Wild-by-tame character data over F_q on the projective line."""

    __slots__ = ("field", "wild", "tame_f", "gamma", "genus")

    def __init__(
        self,
        field: FieldDesc,
        wild: Sequence[RatFunc],
        tame_f: RatFunc,
        gamma: int,
        genus: int = 0,
    ):
        if genus != 0:
            raise SpecError("only genus-zero base curves are supported")
        wild = tuple(wild)
        if not 1 <= len(wild) <= MAX_WITT_LENGTH:
            raise SpecError(f"Witt length must be between 1 and {MAX_WITT_LENGTH}")
        for r in wild:
            if r.field != field:
                raise SpecError("wild coordinate defined over the wrong field")
        if tame_f.field != field:
            raise SpecError("tame function defined over the wrong field")
        if not tame_f.num:
            raise SpecError("tame function must be nonzero")
        if not 0 <= gamma <= field.q - 2:
            raise SpecError("tame exponent out of range [0, q-2]")
        self.field = field
        self.wild = wild
        self.tame_f = tame_f
        self.gamma = gamma
        self.genus = genus
        self._candidate_points()  # raises if some candidate point is not rational

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def a(self) -> int:
        return self.field.m

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def n(self) -> int:
        return len(self.wild)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CharacterSpec)
            and self.field == other.field
            and self.wild == other.wild
            and self.tame_f == other.tame_f
            and self.gamma == other.gamma
        )

    def __hash__(self) -> int:
        return hash(self.hash_hex())

    def __repr__(self) -> str:
        return f"CharacterSpec(q={self.q}, n={self.n}, gamma={self.gamma})"

    def _candidate_points(self) -> set[Fq | None]:
        pts: set[Fq | None] = set()
        for r in self.wild:
            for root, _ in _rational_roots(r.den):
                pts.add(root)
            if r.num.degree > r.den.degree:
                pts.add(None)
        for poly in (self.tame_f.num, self.tame_f.den):
            for root, _ in _rational_roots(poly):
                pts.add(root)
        if self.tame_f.ord_at(None) != 0:
            pts.add(None)
        return pts

    def removed_points(self) -> tuple[Fq | None, ...]:
        """Poles of the given wild coordinates plus the support of div f."""
        return _sort_points(self._candidate_points())

    def hash_hex(self) -> str:
        return hashlib.sha256(serialize_spec(self).encode()).hexdigest()


def _rational_roots(poly: Poly) -> list[tuple[Fq, int]]:
    """All roots with multiplicity; raises if a nonrational factor remains."""
    if not poly:
        raise SpecError("cannot factor the zero polynomial")
    field = poly.field
    out = []
    work = poly
    for c in field.elements():
        lin = Poly(field, [-c, field.one()])
        mult = 0
        while True:
            quo, rem = work.divmod(lin)
            if rem:
                break
            work = quo
            mult += 1
        if mult:
            out.append((c, mult))
    if work.degree > 0:
        raise SpecError("a ramified point is not rational over the base field")
    return out


def _sort_points(pts: Iterable[Fq | None]) -> tuple[Fq | None, ...]:
    finite = sorted((p for p in pts if p is not None), key=lambda e: e.to_int_code())
    tail = [None] if None in set(pts) else []
    return tuple(finite) + tuple(tail)


def point_label(pt: Fq | None) -> str:
    return "inf" if pt is None else str(list(pt.coeffs))


# ---------------------------------------------------------------------------
# local reduction of the wild part


@dataclass(frozen=True)
class LocalWittData:
    """Reduced local wild data at one point: per level, pole order -> coefficient.

    integral_constants holds the value at the point of the integral part of the
    splitting, one field element per level; when the reduced pole data is empty
    it determines the local character of the residue extension.
    """

    point: "Fq | None"
    n: int
    p: int
    levels: tuple[tuple[tuple[int, Fq], ...], ...]
    integral_constants: tuple[Fq, ...]

    @property
    def swan(self) -> int:
        best = 0
        for i, level in enumerate(self.levels):
            if level:
                m = max(e for e, _ in level)
                best = max(best, self.p ** (self.n - 1 - i) * m)
        return best

    def level_dict(self, i: int) -> dict[int, Fq]:
        return dict(self.levels[i])


def _reduce_moves(coords: list[TruncLaurent], p: int, field: FieldDesc) -> list[TruncLaurent]:
    """Kill p-divisible pole orders level by level via (F-1) monomial moves."""
    n = len(coords)
    one = TruncLaurent.monomial(field, 0, field.one())
    vec = list(coords)
    for i in range(n):
        while True:
            divisible = [e for e in vec[i].coeffs if e < 0 and (-e) % p == 0]
            if not divisible:
                break
            e = min(divisible)  # most negative first
            c = vec[i].coeffs[e]
            y = TruncLaurent.monomial(field, e // p, c.frobenius(-1))
            move = [TruncLaurent.zero(field) for _ in range(n)]
            move[i] = TruncLaurent.monomial(field, e, c)  # y^p at level i
            vec = list(witt_add(vec, witt_neg(move), one, p))
            move[i] = y
            vec = list(witt_add(vec, move, one, p))
    return vec


def local_expand(spec: CharacterSpec, point: Fq | None) -> LocalWittData:
    """Reduced local wild data at a point, with Witt-carry-correct splitting.

    The expansion is split as (integral) + (principal) inside the Witt group,
    so carries from integral tails feed the principal parts of higher levels
    before the pole orders are made prime to p.
    """
    field, p, n = spec.field, spec.p, spec.n
    max_pole = 0
    for r in spec.wild:
        if r.num:
            max_pole = max(max_pole, -min(0, r.ord_at(point)))
    prec = 2 + p ** (n - 1) * (max_pole + 1)
    expansions = [laurent_expansion(r, point, prec) for r in spec.wild]
    one = TruncLaurent.monomial(field, 0, field.one())
    zero = TruncLaurent.zero(field)
    sums = witt_sum_polys(p, n)
    principal: list[TruncLaurent] = []
    integral: list[TruncLaurent] = []
    for j in range(n):
        vals = integral + [zero] + [zero] * (n - 1 - j) + principal + [zero] + [zero] * (n - 1 - j)
        carry = witt_eval_poly(sums[j], vals, one, p)
        rest = expansions[j] - carry
        pr = TruncLaurent(field, rest.principal(), TruncLaurent.EXACT)
        principal.append(pr)
        integral.append(rest.integral_part())
    reduced = _reduce_moves(principal, p, field)
    levels = []
    for comp in reduced:
        terms = tuple(sorted(((-e, c) for e, c in comp.coeffs.items()), key=lambda t: t[0]))
        assert all(m > 0 and m % p for m, _ in terms), "reduction left a p-divisible pole"
        levels.append(terms)
    assert all(part.prec >= 1 for part in integral)
    constants = tuple(part.coeffs.get(0, field.zero()) for part in integral)
    return LocalWittData(point=point, n=n, p=p, levels=tuple(levels), integral_constants=constants)


def reduce_at_infinity(wild: Sequence[RatFunc]) -> tuple[dict[int, Fq], ...]:
    """Global reduction of polynomial wild data at infinity, constants kept.

    The moves subtract exact coboundaries of global monomials, so the result
    defines the same character, not merely the same local class.  Returned
    per level as {t-degree: coefficient}; every positive degree is prime to p.
    """
    if not wild:
        raise SpecError("empty wild data")
    field = wild[0].field
    p = field.p
    coords = []
    for r in wild:
        if r.den.degree != 0:
            raise SpecError("wild data must be polynomial for the reduction at infinity")
        poly = r.num * Poly.constant(r.den.coeffs[0].inverse())
        coords.append(
            TruncLaurent(field, {-i: c for i, c in enumerate(poly.coeffs) if c}, TruncLaurent.EXACT)
        )
    reduced = _reduce_moves(coords, p, field)
    out = []
    for comp in reduced:
        assert all(e <= 0 for e in comp.coeffs)
        out.append({-e: c for e, c in comp.coeffs.items()})
    return tuple(out)


# ---------------------------------------------------------------------------
# ramification invariants


@dataclass(frozen=True)
class PointData:
    point: "Fq | None"
    swan: int
    eps: int
    omega: int


@dataclass(frozen=True)
class RamificationData:
    p: int
    a: int
    n: int
    points: tuple[PointData, ...]

    @property
    def m(self) -> int:
        return len(self.points)

    @property
    def chi_ramified(self) -> int:
        return sum(1 for pd in self.points if pd.eps)

    @property
    def big_omega(self) -> Fraction:
        # a * big_omega is always integral (the digit sums of the rotated
        # exponents epsilon_{Q,j} each sum to a multiple of q-1); the sharper
        # divisibility by a(p-1) fails for some split tame parts with a >= 2,
        # so the invariant is exact rational, integral in the generic case.
        total = sum(pd.omega for pd in self.points if pd.eps)
        assert total % (self.p - 1) == 0, "digit-sum total is not divisible by p-1"
        return Fraction(total, self.a * (self.p - 1))

    @property
    def omega_integral(self) -> bool:
        return self.big_omega.denominator == 1


def digit_sum(value: int, p: int) -> int:
    total = 0
    while value:
        total += value % p
        value //= p
    return total


def tame_exponents(spec: CharacterSpec) -> dict["Fq | None", int]:
    """eps at every point of supp(div f): gamma * ord mod (q-1)."""
    out: dict[Fq | None, int] = {}
    f = spec.tame_f
    for poly, sign in ((f.num, 1), (f.den, -1)):
        for root, mult in _rational_roots(poly):
            out[root] = (out.get(root, 0) + sign * mult * spec.gamma) % (spec.q - 1)
    o_inf = f.ord_at(None)
    if o_inf:
        out[None] = (o_inf * spec.gamma) % (spec.q - 1)
    return out


def ramification_data(spec: CharacterSpec) -> RamificationData:
    eps_map = tame_exponents(spec)
    swan_map: dict[Fq | None, int] = {}
    for pt in spec._candidate_points():
        swan_map[pt] = local_expand(spec, pt).swan
    points = []
    for pt in _sort_points(set(eps_map) | set(swan_map)):
        s = swan_map.get(pt, 0)
        eps = eps_map.get(pt, 0)
        if s == 0 and eps == 0:
            continue
        points.append(PointData(point=pt, swan=s, eps=eps, omega=digit_sum(eps, spec.p)))
    if not points:
        raise SpecError("the character is everywhere unramified")
    return RamificationData(p=spec.p, a=spec.a, n=spec.n, points=tuple(points))


def euler_poincare_degree(spec: CharacterSpec) -> int:
    """Degree of the completed L-polynomial: 2(m-1) + sum (s_Q - 1) over ramified Q."""
    ram = ramification_data(spec)
    return 2 * (ram.m - 1) + sum(pd.swan - 1 for pd in ram.points)


def naive_degree_estimate(spec: CharacterSpec) -> int:
    """The weaker count (m-1) + sum s_Q; kept for empirical comparison."""
    ram = ramification_data(spec)
    return (ram.m - 1) + sum(pd.swan for pd in ram.points)


def hodge_polygon(spec: CharacterSpec) -> RationalPolygon:
    """Ramification-side lower bound polygon, normalized to start at the origin."""
    ram = ramification_data(spec)
    m, nchi, omega = ram.m, ram.chi_ramified, ram.big_omega
    a, p = ram.a, ram.p
    zeros, ones = m - 1 - omega, m - 1 - nchi + omega
    assert zeros >= 0 and ones >= 0, "negative outer block width"
    slopes: list[tuple[Fraction, int | Fraction]] = []
    if zeros:
        slopes.append((Fraction(0), zeros))
    if ones:
        slopes.append((Fraction(1), ones))
    for pd in ram.points:
        s = pd.swan
        if s == 0:
            continue
        if pd.omega == 0:
            slopes.extend((Fraction(k, s), 1) for k in range(1, s))
        else:
            drop = Fraction(pd.omega, a * s * (p - 1))
            slopes.extend((Fraction(k, s) - drop, 1) for k in range(1, s + 1))
    total = sum(mult for _, mult in slopes)
    assert total == euler_poincare_degree(spec), "Hodge slope count disagrees with the degree"
    return RationalPolygon.from_slopes(slopes)


# ---------------------------------------------------------------------------
# functorial constructions


def base_change(spec: CharacterSpec, k: int) -> CharacterSpec:
    """The same character data pulled back to F_{q^k}."""
    if k < 1:
        raise SpecError("extension degree must be positive")
    ext = make_extension(spec.field, k)
    gamma = spec.gamma * (spec.q**k - 1) // (spec.q - 1)
    return CharacterSpec(
        field=ext.field,
        wild=tuple(r.map_coeffs(ext.embed, ext.field) for r in spec.wild),
        tame_f=spec.tame_f.map_coeffs(ext.embed, ext.field),
        gamma=gamma,
        genus=spec.genus,
    )


def inverse_spec(spec: CharacterSpec) -> CharacterSpec:
    """Data of the inverse character: negated wild part, complementary gamma."""
    return CharacterSpec(
        field=spec.field,
        wild=tuple(-r for r in spec.wild),
        tame_f=spec.tame_f,
        gamma=(spec.q - 1 - spec.gamma) % (spec.q - 1),
        genus=spec.genus,
    )


def scale_witt_vector(wild: Sequence[RatFunc], j: int) -> tuple[RatFunc, ...]:
    """The j-fold Witt multiple of a wild vector (characters of a cyclic cover)."""
    if not wild:
        raise SpecError("empty wild data")
    field = wild[0].field
    one = RatFunc.from_poly(Poly.constant(field.one()))
    return tuple(witt_scalar(j, tuple(wild), one, field.p))


# ---------------------------------------------------------------------------
# serialization


def _element_to_list(c: Fq) -> list[int]:
    return list(c.coeffs)


def _element_from_obj(field: FieldDesc, obj) -> Fq:
    if isinstance(obj, int):
        return field.element([obj])
    return field.element(list(obj))


def _poly_to_list(poly: Poly) -> list[list[int]]:
    return [_element_to_list(c) for c in poly.coeffs] or [[0] * poly.field.m]

def _poly_from_obj(field: FieldDesc, obj) -> Poly:
    return Poly(field, [_element_from_obj(field, c) for c in obj])


def _ratfunc_to_pair(rf: RatFunc) -> list:
    return [_poly_to_list(rf.num), _poly_to_list(rf.den)]


def _ratfunc_from_pair(field: FieldDesc, pair) -> RatFunc:
    if len(pair) != 2:
        raise SpecError("a rational function needs numerator and denominator")
    return RatFunc(_poly_from_obj(field, pair[0]), _poly_from_obj(field, pair[1]))


def spec_to_dict(spec: CharacterSpec) -> dict:
    return {
        "p": spec.p,
        "a": spec.a,
        "n": spec.n,
        "genus": spec.genus,
        "wild": [_ratfunc_to_pair(r) for r in spec.wild],
        "tame": {"f": _ratfunc_to_pair(spec.tame_f), "gamma": spec.gamma},
    }


def spec_from_dict(data: dict) -> CharacterSpec:
    try:
        p, a, n = int(data["p"]), int(data["a"]), int(data["n"])
        genus = int(data.get("genus", 0))
        wild_raw = data["wild"]
        tame = data["tame"]
        gamma = int(tame["gamma"])
        f_raw = tame["f"]
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed character data: {exc}") from exc
    field = field_desc(p, a)
    wild = [_ratfunc_from_pair(field, pair) for pair in wild_raw]
    if len(wild) != n:
        raise SpecError("wild coordinate count disagrees with n")
    tame_f = _ratfunc_from_pair(field, f_raw)
    return CharacterSpec(field=field, wild=wild, tame_f=tame_f, gamma=gamma, genus=genus)


def parse_spec(text: str) -> CharacterSpec:
    return spec_from_dict(tomllib.loads(text))


def load_spec(path) -> CharacterSpec:
    with open(path, "rb") as fh:
        return spec_from_dict(tomllib.load(fh))


def _fmt_nested(obj) -> str:
    if isinstance(obj, list):
        return "[" + ", ".join(_fmt_nested(v) for v in obj) + "]"
    return str(obj)


def serialize_spec(spec: CharacterSpec) -> str:
    """Canonical TOML text; parsing it back reproduces the spec bit for bit."""
    d = spec_to_dict(spec)
    lines = [
        f"p = {d['p']}",
        f"a = {d['a']}",
        f"n = {d['n']}",
        f"genus = {d['genus']}",
        f"wild = {_fmt_nested(d['wild'])}",
        "",
        "[tame]",
        f"f = {_fmt_nested(d['tame']['f'])}",
        f"gamma = {d['tame']['gamma']}",
        "",
    ]
    return "\n".join(lines)


def spec_hash(spec: CharacterSpec) -> str:
    return spec.hash_hex()
