"""L-polynomials of wild-by-tame characters on open subsets of the line.

Character sums S_k over F_{q^k} feed the exponential recursion for the
L-coefficients, which live exactly in Z[zeta_{p^n}, zeta_{q-1}].  Everything
downstream (guard vanishing, Euler-factor completion, Newton polygon) is a
certificate: failures raise instead of degrading to approximate answers.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .arith import ArithError, Fq, Poly, RatFunc, make_extension, witt_pack, witt_trace
from .character import (
    CharacterSpec,
    SpecError,
    euler_poincare_degree,
    hodge_polygon,
    inverse_spec,
    laurent_expansion,
    local_expand,
    naive_degree_estimate,
    point_label,
    ramification_data,
    scale_witt_vector,
    spec_hash,
    tame_exponents,
)
from .cyclotomic import (
    CycloInt,
    PrecisionError,
    PrecisionFloor,
    canonical_generator,
    cyclo_params,
    padic_valuation,
)
from .polygon import AboveReport, RationalPolygon
from .tables import SENT, sum_tables

DEFAULT_POINT_BUDGET = 10**7
GUARD_TERMS = 3
CACHE_ENV = "ARTINL_CACHE_DIR"
_CROSSCHECK_MAX = 400


class BudgetError(RuntimeError):
    """The requested enumeration exceeds the point budget."""


# ---------------------------------------------------------------------------
# sum ledger


class SumLedger:
    """Append-only JSONL cache of character sums, keyed by (spec hash, k)."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._cache: dict[tuple[str, int], tuple[tuple[int, ...], ...]] | None = None

    @classmethod
    def from_env(cls) -> "SumLedger | None":
        root = os.environ.get(CACHE_ENV)
        if not root:
            return None
        return cls(Path(root) / "sums.jsonl")

    def _load(self) -> dict[tuple[str, int], tuple[tuple[int, ...], ...]]:
        if self._cache is None:
            self._cache = {}
            if self.path.exists():
                with self.path.open() as fh:
                    for line in fh:
                        line = line.strip()
                        if not line:
                            continue
                        rec = json.loads(line)
                        rows = tuple(tuple(int(c) for c in row) for row in rec["s"])
                        self._cache[(rec["spec_hash"], rec["k"])] = rows
        return self._cache

    def get(self, key: str, k: int, params) -> CycloInt | None:
        rows = self._load().get((key, k))
        return None if rows is None else CycloInt(params, rows)

    def put(self, key: str, k: int, value: CycloInt) -> None:
        cache = self._load()
        if (key, k) in cache:
            return
        cache[(key, k)] = value.rows
        self.path.parent.mkdir(parents=True, exist_ok=True)
        rec = {"spec_hash": key, "k": k, "s": [list(r) for r in value.rows]}
        with self.path.open("a") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _resolve_ledger(ledger) -> SumLedger | None:
    if ledger == "auto":
        return SumLedger.from_env()
    return ledger


# ---------------------------------------------------------------------------
# pointwise character values


def _value_at(rf: RatFunc, point: Fq | None) -> Fq:
    """Value of a rational function at a point where it is regular."""
    field = rf.field
    if not rf.num:
        return field.zero()
    if point is None:
        o = rf.ord_at(None)
        if o < 0:
            raise ArithError("pole at infinity")
        if o > 0:
            return field.zero()
        return rf.num.coeffs[-1] / rf.den.coeffs[-1]
    den = rf.den(point)
    if not den:
        raise ArithError("pole at a finite point")
    return rf.num(point) / den


def _leading_coefficient(rf: RatFunc, point: Fq | None) -> Fq:
    """First Laurent coefficient of rf at the point (the leading unit)."""
    o = rf.ord_at(point)
    exp = laurent_expansion(rf, point, o + 2)
    lead = exp.coeffs.get(o)
    assert lead, "leading Laurent coefficient vanished"
    return lead


def _dlog_base(field, value: Fq) -> int:
    wbar = canonical_generator(field)
    acc = field.one()
    for c in range(field.q - 1):
        if acc == value:
            return c
        acc = acc * wbar
    raise ArithError("discrete log failed in the base field")


def unramified_frobenius_value(spec: CharacterSpec, point: Fq | None) -> CycloInt:
    """The character value at the Frobenius of an unramified removed point.

    The wild factor comes from the integral part of the local Witt splitting
    evaluated at the point; the tame factor from the leading unit of f, which
    is well defined because (q-1) divides gamma * ord(f) there.
    """
    params = cyclo_params(spec.p, spec.n, spec.a)
    data = local_expand(spec, point)
    if data.swan:
        raise SpecError("point is wildly ramified")
    if tame_exponents(spec).get(point, 0):
        raise SpecError("point is tamely ramified")
    w = witt_trace(witt_pack(data.integral_constants, spec.n))
    c = _dlog_base(spec.field, _leading_coefficient(spec.tame_f, point))
    return CycloInt.root_of_unity(params, w, (-spec.gamma * c) % (spec.q - 1))


def _big_field_value(spec: CharacterSpec, ext, wild_big, f_big, point: Fq | None) -> CycloInt:
    """Character value at one good point of P^1(F_{q^k})."""
    params = cyclo_params(spec.p, spec.n, spec.a)
    big = ext.field
    coords = [_value_at(r, point) for r in wild_big]
    w = witt_trace(witt_pack(coords, spec.n))
    fx = _value_at(f_big, point)
    assert fx, "tame function vanished off the removed set"
    norm = fx ** ((big.q - 1) // (spec.q - 1))
    c = 0
    wimg = ext.embed(canonical_generator(spec.field))
    acc = big.one()
    while acc != norm:
        acc = acc * wimg
        c += 1
        if c >= spec.q - 1:
            raise ArithError("norm left the base subgroup")
    return CycloInt.root_of_unity(params, w, (-spec.gamma * c) % (spec.q - 1))


# ---------------------------------------------------------------------------
# character sums


def character_sum(
    spec: CharacterSpec,
    k: int,
    budget: int = DEFAULT_POINT_BUDGET,
    method: str = "auto",
    ledger="auto",
) -> CycloInt:
    """S_k: the exact sum of character values over the good points of P^1(F_{q^k}).

    method "auto" runs the table engine and, on fields small enough to afford
    it, certifies the result against the direct scalar enumeration.
    """
    if k < 1:
        raise SpecError("k must be positive")
    Q = spec.q**k
    if Q > budget:
        raise BudgetError(f"q^k = {Q} exceeds the point budget {budget}")
    params = cyclo_params(spec.p, spec.n, spec.a)
    led = _resolve_ledger(ledger)
    key = spec_hash(spec)
    if led is not None:
        hit = led.get(key, k, params)
        if hit is not None:
            return hit
    if method == "direct":
        total = _character_sum_direct(spec, k)
    else:
        total = _character_sum_tables(spec, k)
        if method == "auto" and Q <= _CROSSCHECK_MAX:
            direct = _character_sum_direct(spec, k)
            assert total == direct, "table engine disagrees with direct enumeration"
    if led is not None:
        led.put(key, k, total)
    return total


def _removed_split(spec: CharacterSpec):
    finite = [pt for pt in spec.removed_points() if pt is not None]
    inf_removed = None in spec.removed_points()
    return finite, inf_removed


def _character_sum_direct(spec: CharacterSpec, k: int) -> CycloInt:
    params = cyclo_params(spec.p, spec.n, spec.a)
    ext = make_extension(spec.field, k)
    big = ext.field
    wild_big = [r.map_coeffs(ext.embed, big) for r in spec.wild]
    f_big = spec.tame_f.map_coeffs(ext.embed, big)
    finite, inf_removed = _removed_split(spec)
    removed = {ext.embed(pt) for pt in finite}
    total = CycloInt.zero(params)
    for x in big.elements():
        if x in removed:
            continue
        total = total + _big_field_value(spec, ext, wild_big, f_big, x)
    if not inf_removed:
        total = total + _big_field_value(spec, ext, wild_big, f_big, None)
    return total


def _character_sum_tables(spec: CharacterSpec, k: int) -> CycloInt:
    params = cyclo_params(spec.p, spec.n, spec.a)
    t = sum_tables(spec.field, k, spec.n)
    M, d = t.M, spec.q - 1
    ext = t.ext

    def poly_logs(poly: Poly) -> list[int]:
        return [t.log_of(ext.embed(c)) for c in poly.coeffs]

    finite, inf_removed = _removed_split(spec)
    keep = np.ones(M, dtype=bool)
    zero_removed = False
    for pt in finite:
        if pt:
            keep[t.log_of(ext.embed(pt))] = False
        else:
            zero_removed = True

    bad = np.zeros(M, dtype=bool)
    coord_logs = []
    for r in spec.wild:
        lnum = t.eval_poly_logs(poly_logs(r.num))
        lden = t.eval_poly_logs(poly_logs(r.den))
        bad |= lden == SENT
        u = np.where(lnum == SENT, SENT, (lnum - np.where(lden == SENT, 0, lden)) % M)
        coord_logs.append(u)
    ufn = t.eval_poly_logs(poly_logs(spec.tame_f.num))
    ufd = t.eval_poly_logs(poly_logs(spec.tame_f.den))
    bad |= (ufn == SENT) | (ufd == SENT)
    assert not bool((bad & keep).any()), "pole or zero of the data off the removed set"
    uf = (ufn - ufd) % M

    w = t.trace_of_packed(coord_logs)
    cls = uf.astype(np.int64) * t.norm_dlog % d
    counts = np.bincount((w * d + cls)[keep], minlength=spec.p**spec.n * d)
    total = CycloInt.zero(params)
    for idx in np.flatnonzero(counts):
        wv, cv = divmod(int(idx), d)
        term = CycloInt.root_of_unity(params, wv, (-spec.gamma * cv) % d)
        total = total + term.scale(int(counts[idx]))

    wild_big = [r.map_coeffs(ext.embed, t.field) for r in spec.wild]
    f_big = spec.tame_f.map_coeffs(ext.embed, t.field)
    if not zero_removed:
        total = total + _big_field_value(spec, ext, wild_big, f_big, t.field.zero())
    if not inf_removed:
        total = total + _big_field_value(spec, ext, wild_big, f_big, None)
    return total


# ---------------------------------------------------------------------------
# L-polynomial assembly


@dataclass(frozen=True)
class LPolynomial:
    """L-polynomial data: coefficients on the open set and after completion."""

    spec_hash: str
    q: int
    coeffs: tuple[CycloInt, ...]
    open_coeffs: tuple[CycloInt, ...]
    degree: int
    open_degree: int
    removed_values: tuple[tuple[str, CycloInt], ...]


def _divide_linear(coeffs: list[CycloInt], v: CycloInt) -> list[CycloInt]:
    """Exact division by (1 - v s); raises if v is not a root's reciprocal."""
    if len(coeffs) < 2:
        raise ArithError("nothing to divide")
    quot: list[CycloInt] = [coeffs[0]]
    for b in coeffs[1:-1]:
        quot.append(b + v * quot[-1])
    rem = coeffs[-1] + v * quot[-1]
    if rem:
        raise ArithError("Euler factor does not divide the L-polynomial")
    return quot


def l_polynomial(
    spec: CharacterSpec,
    budget: int = DEFAULT_POINT_BUDGET,
    ledger="auto",
) -> LPolynomial:
    """L on the open set and the completed L, assembled from exact sums."""
    params = cyclo_params(spec.p, spec.n, spec.a)
    ram = ramification_data(spec)
    degree = euler_poincare_degree(spec)
    removed = spec.removed_points()
    ram_points = {pd.point: pd.swan for pd in ram.points}
    unramified = [pt for pt in removed if pt not in ram_points]
    open_degree = len(removed) - 2 + sum(ram_points.values())
    assert open_degree == degree + len(unramified)
    terms = open_degree + GUARD_TERMS
    if spec.q**terms > budget:
        raise BudgetError(
            f"needs S_k through k = {terms}; q^k = {spec.q**terms} exceeds budget {budget}"
        )
    sums = [character_sum(spec, k, budget, ledger=ledger) for k in range(1, terms + 1)]
    coeffs = [CycloInt.one(params)]
    for j in range(1, terms + 1):
        acc = CycloInt.zero(params)
        for k in range(1, j + 1):
            acc = acc + sums[k - 1] * coeffs[j - k]
        coeffs.append(acc.divexact(j))
    tail = [j for j in range(open_degree + 1, terms + 1) if coeffs[j]]
    if tail:
        apparent = max(j for j in range(terms + 1) if coeffs[j])
        raise ArithError(
            "guard coefficients do not vanish: "
            f"expected degree {open_degree} on the open set, nonzero through {apparent}; "
            f"the weaker degree estimate gives {naive_degree_estimate(spec) + len(unramified)}"
        )
    open_coeffs = coeffs[: open_degree + 1]
    completed = list(open_coeffs)
    values = []
    for pt in unramified:
        v = unramified_frobenius_value(spec, pt)
        completed = _divide_linear(completed, v)
        values.append((point_label(pt), v))
    assert len(completed) == degree + 1
    if degree and not completed[degree]:
        raise ArithError("completed L-polynomial dropped below the expected degree")
    return LPolynomial(
        spec_hash=spec_hash(spec),
        q=spec.q,
        coeffs=tuple(completed),
        open_coeffs=tuple(open_coeffs),
        degree=degree,
        open_degree=open_degree,
        removed_values=tuple(values),
    )


def newton_polygon_of_l(lp: LPolynomial) -> RationalPolygon:
    """q-adic Newton polygon of the completed L-polynomial."""
    return newton_polygon_of_coeffs(lp.coeffs)


def integer_newton_polygon(coeffs: Sequence[int], p: int, a: int = 1) -> RationalPolygon:
    """q-adic Newton polygon of an integer polynomial, q = p^a."""
    points: list[tuple[int, Fraction | None]] = []
    for k, c in enumerate(coeffs):
        if c == 0:
            points.append((k, None))
            continue
        v = 0
        while c % p == 0:
            c //= p
            v += 1
        points.append((k, Fraction(v, a)))
    return RationalPolygon.lower_hull(points)


def newton_polygon_of_coeffs(coeffs: Sequence[CycloInt]) -> RationalPolygon:
    """q-adic Newton polygon of an exact polynomial given by its coefficients."""
    params = coeffs[0].params
    a = params.a
    degree = len(coeffs) - 1
    M = max(6, (degree + 2) * a * params.e)
    for _ in range(3):
        pts: list[tuple[int, Fraction | None]] = []
        retry = False
        for j, c in enumerate(coeffs):
            if not c:
                pts.append((j, None))
                continue
            v = padic_valuation(c.to_padic(M))
            if isinstance(v, PrecisionFloor):
                if v.at_least > a * (degree + 1):
                    pts.append((j, None))  # provably above every hull chord
                else:
                    retry = True
                    break
            else:
                pts.append((j, v / a))
        if not retry:
            return RationalPolygon.lower_hull(pts)
        M *= 2
    raise PrecisionError("Newton polygon did not stabilize under precision doubling")


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class VerifyReport:
    spec_hash: str
    q: int
    degree: int
    newton: RationalPolygon
    hodge: RationalPolygon
    above: AboveReport
    theorem_holds: bool
    endpoint_match: bool
    degree_match: bool
    naive_degree_match: bool
    duality_holds: bool | None
    omega: Fraction
    omega_integral: bool

    def to_json_dict(self) -> dict:
        return {
            "spec_hash": self.spec_hash,
            "q": self.q,
            "degree": self.degree,
            "omega": [self.omega.numerator, self.omega.denominator],
            "omega_integral": self.omega_integral,
            "np": self.newton.to_json_dict(),
            "hp": self.hodge.to_json_dict(),
            "holds": self.theorem_holds,
            "margins": [
                [x.numerator, x.denominator, m.numerator, m.denominator]
                for x, m in self.above.margins
            ],
            "min_margin": [
                self.above.min_margin.numerator,
                self.above.min_margin.denominator,
            ],
            "endpoints": self.endpoint_match,
            "degree_match": self.degree_match,
            "naive_degree_match": self.naive_degree_match,
            "duality": self.duality_holds,
        }


def verify_newton_over_hodge(
    spec: CharacterSpec,
    budget: int = DEFAULT_POINT_BUDGET,
    ledger="auto",
    check_duality: bool = True,
) -> VerifyReport:
    """Newton-over-Hodge verification with endpoint, degree and duality checks."""
    lp = l_polynomial(spec, budget, ledger=ledger)
    np_poly = newton_polygon_of_l(lp)
    hp = hodge_polygon(spec)
    above = np_poly.lies_above(hp)
    slopes = np_poly.slopes()
    assert all(0 <= s <= 1 for s in slopes), "Newton slope outside [0, 1]"
    duality: bool | None = None
    if check_duality:
        inv = inverse_spec(spec)
        np_inv = newton_polygon_of_l(l_polynomial(inv, budget, ledger=ledger))
        duality = sorted(1 - s for s in slopes) == sorted(np_inv.slopes())
        duality = duality and hodge_polygon(inv) == hp.dual()
    ram = ramification_data(spec)
    return VerifyReport(
        spec_hash=lp.spec_hash,
        q=spec.q,
        degree=lp.degree,
        newton=np_poly,
        hodge=hp,
        above=above,
        theorem_holds=above.holds,
        endpoint_match=np_poly.end == hp.end,
        degree_match=len(slopes) == lp.degree,
        naive_degree_match=len(slopes) == naive_degree_estimate(spec),
        duality_holds=duality,
        omega=ram.big_omega,
        omega_integral=ram.omega_integral,
    )


# ---------------------------------------------------------------------------
# cyclic covers of the line


def cover_characters(field, wild) -> tuple[CharacterSpec, ...]:
    """The nontrivial characters of the cyclic cover defined by the wild vector."""
    n = len(wild)
    one_f = RatFunc.from_poly(Poly.constant(field.one()))
    specs = []
    for j in range(1, field.p**n):
        specs.append(CharacterSpec(field, scale_witt_vector(wild, j), one_f, 0, 0))
    return tuple(specs)


def cover_bound_polygon(field, wild) -> RationalPolygon:
    """Union of the per-character lower-bound polygons of the cover."""
    slopes: list[Fraction] = []
    for spec in cover_characters(field, wild):
        slopes.extend(hodge_polygon(spec).slopes())
    return RationalPolygon.from_slopes(slopes)


def cover_zeta_numerator(
    field,
    wild,
    budget: int = DEFAULT_POINT_BUDGET,
    ledger="auto",
) -> tuple[int, ...]:
    """Numerator of the cover's zeta function as an integer polynomial."""
    prod: list[CycloInt] | None = None
    for spec in cover_characters(field, wild):
        lp = l_polynomial(spec, budget, ledger=ledger)
        if prod is None:
            prod = list(lp.coeffs)
            continue
        out = [CycloInt.zero(lp.coeffs[0].params) for _ in range(len(prod) + lp.degree)]
        for i, ci in enumerate(prod):
            for j, cj in enumerate(lp.coeffs):
                out[i + j] = out[i + j] + ci * cj
        prod = out
    assert prod is not None
    return tuple(c.as_integer() for c in prod)


def corollary_polygon(
    p: int,
    n: int,
    genus: int,
    points,
    base_polygon: RationalPolygon | None = None,
) -> RationalPolygon:
    """Closed-form lower bound for the cover's zeta numerator polygon.

    points: per ramified point a pair (breaks, r) with breaks = (s(1)..s(n)),
    the largest ramification break of each order-p^j quotient, and p^r the
    ramification index.  The base curve's own numerator polygon may be passed
    when its genus is positive.
    """
    if not points:
        raise SpecError("at least one ramified point is required")
    omega = 0
    for breaks, r in points:
        if len(breaks) != n or not 1 <= r <= n:
            raise SpecError("malformed break data")
        omega += p ** (n - r) * (p**r - 1)
    flat_mult = (p**n - 1) * (genus - 1) + omega
    if flat_mult < 0:
        raise SpecError("negative slope multiplicity in the cover bound")
    slopes: list[tuple[Fraction, int]] = [
        (Fraction(0), flat_mult),
        (Fraction(1), flat_mult),
    ]
    for breaks, _ in points:
        for j, s in enumerate(breaks, start=1):
            if s == 0:
                continue
            mult = p ** (j - 1) * (p - 1)
            for k in range(1, s):
                slopes.append((Fraction(k, s), mult))
    if base_polygon is not None:
        slopes.extend((s, 1) for s in base_polygon.slopes())
    return RationalPolygon.from_slopes(slopes)
