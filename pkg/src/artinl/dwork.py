"""p-adic cross-check of L-polynomials through a truncated semilinear operator.

Desk-scale verification for characters over a prime field: the wild part must
be polynomial in t (pole at infinity only) and the tame part supported on
{0, infinity}.  The multiplier is assembled from Artin-Hasse factors with a
certified termwise growth bound, the U_p matrix is truncated so that every
dropped coefficient is provably below the working precision, and the Fredholm
coefficients are recomputed at a larger truncation and must agree on all
trusted digits before they are compared against the L-polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .arith import ArithError, FieldDesc, Fq, witt_add
from .character import (
    CharacterSpec,
    SpecError,
    TruncLaurent,
    local_expand,
    ramification_data,
    reduce_at_infinity,
    tame_exponents,
)
from .cyclotomic import (
    CycloInt,
    CycloPadic,
    PadicContext,
    PrecisionError,
    PrecisionFloor,
    artin_hasse_mod,
    cyclo_params,
    padic_context,
    padic_valuation,
    solve_gamma,
)
from .lfunction import (
    DEFAULT_POINT_BUDGET,
    l_polynomial,
    newton_polygon_of_coeffs,
    unramified_frobenius_value,
)
from .polygon import RationalPolygon


class TruncationError(RuntimeError):
    """Truncation order too small to certify the requested precision."""


class CongruenceError(RuntimeError):
    """The operator determinant disagrees with the L-polynomial."""


def monomial_witt_levels(
    field: FieldDesc, reduced: Sequence[Mapping[int, Fq]]
) -> tuple[dict[int, Fq], ...]:
    """Rewrite a reduced coordinate vector as per-level monomial data.

    The multiplier wants the vector presented as a Witt sum of single-monomial
    Teichmueller terms.  Splitting level 0 into monomials creates carries, so
    those are subtracted from level 1, where addition is plain.  Length <= 2.
    """
    n = len(reduced)
    if n == 1:
        return (dict(reduced[0]),)
    if n != 2:
        raise SpecError("operator cross-check supports Witt length <= 2")
    p = field.p
    one = TruncLaurent.monomial(field, 0, field.one())
    zero = TruncLaurent.zero(field)
    acc: tuple = (zero, zero)
    for deg in sorted(reduced[0]):
        mono = (TruncLaurent.monomial(field, deg, reduced[0][deg]), zero)
        acc = witt_add(acc, mono, one, p)
    assert dict(acc[0].coeffs) == dict(reduced[0]), "monomial split changed level 0"
    level1 = dict(reduced[1])
    for deg, c in acc[1].coeffs.items():
        assert deg >= 0
        rest = level1.get(deg, field.zero()) - c
        if rest:
            level1[deg] = rest
        else:
            level1.pop(deg, None)
    return (dict(reduced[0]), level1)


@dataclass(frozen=True, eq=False)
class SplittingSeries:
    """Multiplier series in t^{-1}; coeffs[k] multiplies t^{-k}.

    floors[k] is the certified valuation lower bound for coeffs[k], the
    smaller of k/(s(p-1)) and the working precision.
    """

    ctx: PadicContext
    swan: int
    coeffs: tuple[CycloPadic, ...]
    floors: tuple[Fraction, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1


def _factor_terms(
    ctx: PadicContext, ah: Sequence[int], z: CycloPadic, gv: Fraction, deg: int, order: int
) -> list[tuple[int, CycloPadic]]:
    """Nonzero terms e_m * z^m, cut at exponent `order` and at valuation M."""
    out = []
    zm = ctx.one()
    m = 0
    while (deg == 0 or m * deg <= order) and (m == 0 or m * gv < ctx.M):
        c = zm.scale(ah[m])
        if c:
            out.append((m, c))
        m += 1
        zm = zm * z
    return out


def splitting_series(
    field: FieldDesc, levels: Sequence[Mapping[int, Fq]], order: int, precision: int
) -> SplittingSeries:
    """Product of Artin-Hasse factors for per-level monomial data, to t^{-order}.

    Level i with monomial c*t^j contributes E([c] gamma_{n-i} t^{-j}); degree-0
    monomials give scalar factors.  The constant term must reduce to 1 and
    every coefficient must meet the growth floor, else the input data or the
    gamma solutions are wrong and this raises.
    """
    if field.m != 1:
        raise SpecError("operator cross-check requires a prime base field")
    n = len(levels)
    p = field.p
    params = cyclo_params(p, n, 1)
    ctx = padic_context(params, precision)
    swan = 0
    for i, lev in enumerate(levels):
        for deg, c in lev.items():
            if deg < 0 or not c:
                raise SpecError("monomial data must have nonnegative degrees and nonzero coefficients")
            if deg > 0:
                swan = max(swan, p ** (n - 1 - i) * deg)
    gammas = {w: solve_gamma(params, w, precision) for w in range(1, n + 1)}
    ah = artin_hasse_mod(p, precision, max(order, precision * params.e) + 2)
    acc = [ctx.one()] + [ctx.zero()] * order
    for i, lev in enumerate(levels):
        gamma = gammas[n - i]
        gv = Fraction(1, p ** (n - i - 1) * (p - 1))
        for deg in sorted(lev):
            z = gamma.scale(ctx.teichmuller_int(lev[deg].to_int_code()))
            terms = _factor_terms(ctx, ah, z, gv, deg, order)
            if deg == 0:
                scalar = ctx.zero()
                for _, tm in terms:
                    scalar = scalar + tm
                acc = [a * scalar if a else a for a in acc]
            else:
                out = [ctx.zero()] * (order + 1)
                for m, tm in terms:
                    step = m * deg
                    for k in range(order + 1 - step):
                        a = acc[k]
                        if a:
                            out[k + step] = out[k + step] + a * tm
                acc = out
    v0 = padic_valuation(acc[0] - ctx.one())
    if not (isinstance(v0, PrecisionFloor) or v0 > 0):
        raise ArithError("multiplier constant term does not reduce to 1")
    floors = [Fraction(0)]
    for k in range(1, order + 1):
        bound = min(Fraction(k, swan * (p - 1)), Fraction(precision)) if swan else Fraction(precision)
        v = padic_valuation(acc[k])
        if not (isinstance(v, PrecisionFloor) or v >= bound):
            raise ArithError(f"growth bound violated at exponent {k}: valuation {v} < {bound}")
        floors.append(bound)
    return SplittingSeries(ctx=ctx, swan=swan, coeffs=tuple(acc), floors=tuple(floors))


@dataclass(frozen=True, eq=False)
class UpMatrix:
    """Truncated matrix of U_p composed with multiplication by the multiplier.

    Index k stands for the basis vector t^{-k}, 0 <= k < size; entry (k, j)
    is the t^{-pk} coefficient of multiplier * t^{-j-eps} times the tame unit.
    The admitted multipliers have no positive powers, so the truncated basis
    is preserved exactly.  Entries pointing past the series order are kept
    zero only under a growth certificate, recorded in `certified`.
    """

    series: SplittingSeries
    size: int
    eps: int
    unit: int
    comps: tuple
    certified: tuple[tuple[int, int], ...]

    @property
    def ctx(self) -> PadicContext:
        return self.series.ctx

    def extended(self, size: int) -> UpMatrix:
        return up_matrix(self.series, size, self.eps, self.unit)

    def entry(self, k: int, j: int) -> CycloPadic:
        pM = self.ctx.pM
        return CycloPadic(self.ctx, tuple((int(c[k, j]) % pM,) for c in self.comps))


def up_matrix(series: SplittingSeries, size: int, eps: int, unit: int = 1) -> UpMatrix:
    ctx = series.ctx
    p = ctx.params.p
    e = ctx.params.e
    pM = ctx.pM
    if not 0 <= eps < p - 1:
        raise SpecError("tame exponent must be reduced into [0, p-2]")
    dtype = np.int64 if (pM - 1) ** 2 * (size + 1) < 2**62 else object
    table = np.zeros((e, series.order + 1), dtype=dtype)
    for k, c in enumerate(series.coeffs):
        for g in range(e):
            table[g, k] = c.rows[g][0]
    idx = p * np.arange(size)[:, None] - np.arange(size)[None, :] - eps
    inside = (idx >= 0) & (idx <= series.order)
    certified: list[tuple[int, int]] = []
    beyond = idx > series.order
    if beyond.any() and series.swan:
        for k, j in zip(*np.nonzero(beyond)):
            need = Fraction(int(idx[k, j]), series.swan * (p - 1))
            if need < ctx.M:
                raise TruncationError(
                    f"entry ({int(k)}, {int(j)}) needs series exponent {int(idx[k, j])}"
                    f" beyond order {series.order}; growth floor {need} is below"
                    f" precision {ctx.M}"
                )
            certified.append((int(k), int(j)))
    safe = np.where(inside, idx, 0)
    comps = []
    for g in range(e):
        comp = np.where(inside, table[g][safe], 0)
        if unit != 1:
            comp = (comp * unit) % pM
        comps.append(comp)
    return UpMatrix(
        series=series, size=size, eps=eps, unit=unit, comps=tuple(comps), certified=tuple(certified)
    )


def growth_scan(um: UpMatrix) -> list[dict]:
    """Per-column check of entry valuations against the certified floors.

    The floor for entry (k, j) is (pk - j - eps)/(s(p-1)) capped at the
    working precision; `min_margin` is the worst valuation minus floor in the
    column, with unreadably-high valuations counted at the precision cap.
    """
    ctx = um.ctx
    p, M = ctx.params.p, ctx.M
    s = um.series.swan
    out = []
    for j in range(um.size):
        margins = []
        for k in range(um.size):
            i = p * k - j - um.eps
            if i < 0:
                continue
            floor = min(Fraction(i, s * (p - 1)), Fraction(M)) if s else (
                Fraction(0) if i == 0 else Fraction(M)
            )
            v = padic_valuation(um.entry(k, j))
            if isinstance(v, PrecisionFloor):
                v = Fraction(M)
            margins.append(v - floor)
        worst = min(margins)
        out.append({"column": j, "min_margin": worst, "ok": worst >= 0})
    return out


def _mat_mul(a: Sequence, b: Sequence, xrel: Sequence[int], pM: int) -> tuple:
    e = len(a)
    work: list = [None] * (2 * e - 1)
    for g in range(e):
        for h in range(e):
            prod = (a[g] @ b[h]) % pM
            if work[g + h] is None:
                work[g + h] = prod
            else:
                work[g + h] = (work[g + h] + prod) % pM
    for f in range(2 * e - 2, e - 1, -1):
        top = work[f]
        if top is None:
            continue
        base = f - e
        for i, c in enumerate(xrel):
            if c:
                contrib = (top * (c % pM)) % pM
                if work[base + i] is None:
                    work[base + i] = contrib
                else:
                    work[base + i] = (work[base + i] + contrib) % pM
    return tuple(w if w is not None else np.zeros_like(a[0]) for w in work[:e])


def _trace(comps: Sequence, ctx: PadicContext) -> CycloPadic:
    pM = ctx.pM
    return CycloPadic(ctx, tuple((int(np.trace(c)) % pM,) for c in comps))


def _divide_by_int(z: CycloPadic, k: int) -> CycloPadic:
    """Exact division by k; digits above M - v_p(k) become untrusted."""
    p = z.ctx.params.p
    pM = z.ctx.pM
    v, u = 0, k
    while u % p == 0:
        u //= p
        v += 1
    inv = pow(u, -1, pM)
    pv = p**v
    rows = []
    for r in z.rows:
        row = []
        for c in r:
            c = (c * inv) % pM
            if c % pv:
                raise PrecisionError("trace recursion produced a non-integral division")
            row.append((c // pv) % pM)
        rows.append(tuple(row))
    return CycloPadic(z.ctx, tuple(rows))


def _factorial_valuation(d: int, p: int) -> int:
    v, q = 0, p
    while q <= d:
        v += d // q
        q *= p
    return v


def _det_coeffs(um: UpMatrix, d: int) -> list[CycloPadic]:
    """det(1 - sU) coefficients through s^d by the trace recursion."""
    ctx = um.ctx
    xrel = ctx.params.x_relation()
    pM = ctx.pM
    traces = [_trace(um.comps, ctx)]
    power = um.comps
    for _ in range(d - 1):
        power = _mat_mul(power, um.comps, xrel, pM)
        traces.append(_trace(power, ctx))
    coeffs = [ctx.one()]
    for k in range(1, d + 1):
        acc = ctx.zero()
        for i in range(1, k + 1):
            acc = acc + traces[i - 1] * coeffs[k - i]
        coeffs.append(_divide_by_int(-acc, k))
    return coeffs


@dataclass(frozen=True)
class FredholmResult:
    coeffs: tuple[CycloPadic, ...]
    precision: int
    loss: int


def fredholm_series(um: UpMatrix, s_degree: int) -> FredholmResult:
    """det(1 - sU) through s^s_degree, certified stable under size -> size + p.

    Trusted digits: the working precision minus v_p(s_degree!) lost to the
    divisions in the trace recursion.  Both truncations must agree on all
    trusted digits of every coefficient.
    """
    p = um.ctx.params.p
    if s_degree < 1 or s_degree > um.size // p:
        raise ArithError("s-degree outside the stable range of this truncation")
    loss = _factorial_valuation(s_degree, p)
    precision = um.ctx.M - loss
    if precision < 1:
        raise PrecisionError("no trusted digits left after division losses")
    first = _det_coeffs(um, s_degree)
    second = _det_coeffs(um.extended(um.size + p), s_degree)
    pP = p**precision
    for c1, c2 in zip(first, second):
        for r1, r2 in zip(c1.rows, c2.rows):
            if any((x - y) % pP for x, y in zip(r1, r2)):
                raise PrecisionError("Fredholm coefficients unstable between truncations")
    return FredholmResult(coeffs=tuple(first), precision=precision, loss=loss)


def _l_on_torus(spec: CharacterSpec, budget: int, ledger) -> list[CycloInt]:
    """Exact L on P^1 minus {0, infinity}, padding the open L by Euler factors."""
    removed = set(spec.removed_points())
    if not removed <= {None, spec.field.zero()}:
        raise SpecError("removed points outside {0, infinity}")
    lp = l_polynomial(spec, budget=budget, ledger=ledger)
    coeffs = list(lp.open_coeffs)
    zero = CycloInt.zero(coeffs[0].params)
    for pt in (spec.field.zero(), None):
        if pt not in removed:
            v = unramified_frobenius_value(spec, pt)
            padded = coeffs + [zero]
            coeffs = [padded[0]] + [padded[k] - v * padded[k - 1] for k in range(1, len(padded))]
    return coeffs


@dataclass(frozen=True)
class DworkReport:
    spec_hash: str
    p: int
    truncation: int
    s_degree: int
    precision_requested: int
    precision_achieved: int
    lhs: tuple[CycloPadic, ...]
    rhs: tuple[CycloPadic, ...]
    np_fredholm: RationalPolygon
    np_l: RationalPolygon

    def to_json_dict(self) -> dict:
        pP = self.p**self.precision_achieved
        dump = lambda cs: [[r[0] % pP for r in c.rows] for c in cs]
        return {
            "spec_hash": self.spec_hash,
            "p": self.p,
            "truncation": self.truncation,
            "s_degree": self.s_degree,
            "precision_achieved": self.precision_achieved,
            "lhs_coeffs": dump(self.lhs),
            "rhs_coeffs": dump(self.rhs),
            "np_fredholm": self.np_fredholm.to_json_dict(),
            "np_l": self.np_l.to_json_dict(),
        }


def _coeff_dump(cs: Sequence[CycloPadic], modulus: int) -> list[list[int]]:
    return [[r[0] % modulus for r in c.rows] for c in cs]


def trace_formula_check(
    spec: CharacterSpec,
    truncation: int = 60,
    precision: int = 12,
    s_degree: int = 3,
    budget: int = DEFAULT_POINT_BUDGET,
    ledger="auto",
) -> DworkReport:
    """det(1 - sU) against L * det(1 - psU), coefficientwise on trusted digits.

    Also requires the sub-unit-slope parts of the two Newton polygons to agree
    exactly.  Raises CongruenceError on either mismatch, with both coefficient
    lists in the message.
    """
    field = spec.field
    p = spec.p
    if spec.a != 1:
        raise SpecError("operator cross-check requires a prime base field")
    if spec.n > 2:
        raise SpecError("operator cross-check supports Witt length <= 2")
    for r in spec.wild:
        if r.den.degree != 0:
            raise SpecError("wild part must be polynomial; move its pole to infinity")
    fnum = [i for i, c in enumerate(spec.tame_f.num.coeffs) if c]
    fden = [i for i, c in enumerate(spec.tame_f.den.coeffs) if c]
    if len(fnum) != 1 or len(fden) != 1:
        raise SpecError("tame part must be supported on {0, infinity}")
    ramification_data(spec)  # rejects the trivial character
    g = fnum[0] - fden[0]
    eps = tame_exponents(spec).get(None, 0)
    assert eps == (-spec.gamma * g) % (p - 1)
    reduced = reduce_at_infinity(spec.wild)
    levels = monomial_witt_levels(field, reduced)
    order = p * (truncation + p - 1)
    series = splitting_series(field, levels, order, precision)
    assert series.swan == local_expand(spec, None).swan, "swan mismatch between reductions"
    ctx = series.ctx
    const = spec.tame_f.num.coeffs[fnum[0]] / spec.tame_f.den.coeffs[fden[0]]
    unit = pow(ctx.teichmuller_int(const.to_int_code()), (-spec.gamma) % (p - 1), ctx.pM)
    um = up_matrix(series, truncation, eps, unit)
    fred = fredholm_series(um, s_degree)

    lcoeffs = _l_on_torus(spec, budget, ledger)
    lpad = [c.to_padic(precision) for c in lcoeffs]
    rhs = []
    for k in range(s_degree + 1):
        acc = ctx.zero()
        for i in range(min(k, len(lpad) - 1) + 1):
            acc = acc + lpad[i] * fred.coeffs[k - i].scale(pow(p, k - i, ctx.pM))
        rhs.append(acc)
    lhs = list(fred.coeffs)
    pP = p**fred.precision
    bad = [
        k
        for k in range(s_degree + 1)
        if any(c % pP for row in (lhs[k] - rhs[k]).rows for c in row)
    ]
    if bad:
        raise CongruenceError(
            f"determinant congruence fails at s-powers {bad} mod {p}^{fred.precision}: "
            f"lhs={_coeff_dump(lhs, pP)} rhs={_coeff_dump(rhs, pP)}"
        )

    np_l = newton_polygon_of_coeffs(lcoeffs)
    below_l = np_l.truncate_below(Fraction(1))
    if below_l.width > s_degree:
        raise ArithError("s-degree too small to compare the sub-unit-slope polygons")
    pts: list[tuple[int, Fraction | None]] = []
    for k, c in enumerate(fred.coeffs):
        v = padic_valuation(c)
        if isinstance(v, PrecisionFloor) or v >= fred.precision:
            pts.append((k, None))
        else:
            pts.append((k, v))
    np_f = RationalPolygon.lower_hull(pts)
    if np_f.truncate_below(Fraction(1)) != below_l:
        raise CongruenceError(
            f"sub-unit-slope Newton polygons disagree: operator {np_f.to_json_dict()},"
            f" L-polynomial {np_l.to_json_dict()}"
        )
    return DworkReport(
        spec_hash=spec.hash_hex(),
        p=p,
        truncation=truncation,
        s_degree=s_degree,
        precision_requested=precision,
        precision_achieved=fred.precision,
        lhs=tuple(lhs),
        rhs=tuple(rhs),
        np_fredholm=np_f,
        np_l=np_l,
    )
