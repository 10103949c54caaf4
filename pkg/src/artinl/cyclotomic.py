"""Exact cyclotomic integers Z[zeta_{p^n}, zeta_{q-1}] and their p-adic images.

CycloInt is exact: coefficients are arbitrary-precision integers on the
basis x^i y^j with x = zeta_{p^n} - 1 (degree e = p^(n-1)(p-1), Eisenstein
relation) and y = zeta_{q-1} (full cyclotomic relation Phi_{q-1}).  CycloPadic
is the image in the ramified local ring mod p^M, where the unramified part
collapses to degree a via the Hensel factor of Phi_{q-1} through the
Teichmueller lift of the pinned generator of F_q^*.  Valuations are read off
termwise; the fractional parts i/e are distinct, so the minimum is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .arith import (
    ArithError,
    Fq,
    FieldDesc,
    _poly_mulmod,
    _poly_rem,
    field_desc,
    galois_frobenius,
    galois_ring,
    teichmuller_lift,
)


class PrecisionError(RuntimeError):
    """Raised when a computation cannot reach its requested p-adic precision."""


@dataclass(frozen=True)
class PrecisionFloor:
    """Marker for 'valuation is at least this'; never a fake finite number."""

    at_least: Fraction


def canonical_generator(desc: FieldDesc) -> Fq:
    """Smallest-code generator of F_q^*; pins the Teichmueller character."""
    best = None
    for elt in desc.elements():
        if elt and elt.multiplicative_order() == desc.q - 1:
            best = elt
            break  # elements() yields in code order
    if best is None:
        raise ArithError("no generator found (impossible for a field)")
    return best


@lru_cache(maxsize=None)
def cyclotomic_polynomial(d: int) -> tuple[int, ...]:
    """Phi_d over Z, by exact division of y^d - 1 by the proper divisors."""
    if d == 1:
        return (-1, 1)
    num = [-1] + [0] * (d - 1) + [1]
    for dd in range(1, d):
        if d % dd == 0:
            phi = cyclotomic_polynomial(dd)
            num = _exact_poly_div(num, list(phi))
    return tuple(num)


def _exact_poly_div(num: list[int], den: list[int]) -> list[int]:
    out = [0] * (len(num) - len(den) + 1)
    rem = list(num)
    for shift in range(len(out) - 1, -1, -1):
        lead = rem[shift + len(den) - 1]
        assert lead % den[-1] == 0
        c = lead // den[-1]
        out[shift] = c
        for i, dc in enumerate(den):
            rem[shift + i] -= c * dc
    assert not any(rem), "inexact cyclotomic division"
    return out


def _int_poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


@lru_cache(maxsize=None)
def _eisenstein_relation(p: int, n: int) -> tuple[int, ...]:
    """Coefficients c with x^e = sum c_i x^i, from Phi_{p^n}(1 + x)."""
    e = p ** (n - 1) * (p - 1)
    # Phi_{p^n}(z) = sum_{j<p} z^(j p^(n-1)); substitute z = 1 + x
    acc = [0]
    one_plus_x = [1, 1]
    block = [1]  # (1+x)^(p^(n-1)) accumulated per j
    step = [1]
    for _ in range(p ** (n - 1)):
        step = _int_poly_mul(step, one_plus_x)
    for _ in range(p):
        acc = [u + v for u, v in zip(acc + [0] * len(block), block + [0] * len(acc))]
        block = _int_poly_mul(block, step)
    acc = acc[: e + 1] if len(acc) > e + 1 else acc + [0] * (e + 1 - len(acc))
    assert acc[e] == 1 and acc[0] == p, "Eisenstein expansion failed"
    return tuple(-c for c in acc[:e])


@dataclass(frozen=True)
class CycloParams:
    """Ambient ring parameters: p odd, Witt length n, unramified degree a."""

    p: int
    n: int
    a: int

    def __post_init__(self) -> None:
        if self.p < 3 or self.n < 1 or self.a < 1:
            raise ArithError("invalid cyclotomic parameters")

    @property
    def e(self) -> int:
        return self.p ** (self.n - 1) * (self.p - 1)

    @property
    def q(self) -> int:
        return self.p**self.a

    @property
    def d(self) -> int:
        return self.q - 1

    @property
    def phi(self) -> int:
        return len(cyclotomic_polynomial(self.d)) - 1

    def x_relation(self) -> tuple[int, ...]:
        return _eisenstein_relation(self.p, self.n)

    def y_relation(self) -> tuple[int, ...]:
        """y^phi = sum c_j y^j from the monic Phi_{q-1}."""
        phi = cyclotomic_polynomial(self.d)
        return tuple(-c for c in phi[:-1])


@lru_cache(maxsize=None)
def cyclo_params(p: int, n: int, a: int) -> CycloParams:
    return CycloParams(p, n, a)


def _reduce_bivariate(params: CycloParams, rows: list[list[int]]) -> tuple[tuple[int, ...], ...]:
    """Fold x-degrees >= e and y-degrees >= phi down via the two relations."""
    e, phi = params.e, params.phi
    yrel = params.y_relation()
    xrel = params.x_relation()
    # reduce y in every row first, then normalize widths for the x fold
    for row in rows:
        while len(row) > phi:
            off = len(row) - 1 - phi
            lead = row.pop()
            if lead:
                for j, c in enumerate(yrel):
                    row[off + j] += lead * c
        row.extend([0] * (phi - len(row)))
    while len(rows) > e:
        off = len(rows) - 1 - e
        top = rows.pop()
        if any(top):
            for i, c in enumerate(xrel):
                if c:
                    dst = rows[off + i]
                    for j, v in enumerate(top):
                        dst[j] += c * v
    out = []
    for i in range(e):
        row = rows[i] if i < len(rows) else []
        row = row + [0] * (phi - len(row))
        out.append(tuple(row[:phi]))
    return tuple(out)


class CycloInt:
    """Exact element of Z[zeta_{p^n}, zeta_{q-1}] on the x^i y^j basis."""

    __slots__ = ("params", "rows")

    def __init__(self, params: CycloParams, rows: Sequence[Sequence[int]]):
        self.params = params
        rws = [list(r) for r in rows]
        if len(rws) != params.e or any(len(r) != params.phi for r in rws):
            raise ArithError("coefficient array has the wrong shape")
        self.rows = tuple(tuple(r) for r in rws)

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, params: CycloParams) -> CycloInt:
        return cls(params, [[0] * params.phi for _ in range(params.e)])

    @classmethod
    def integer(cls, params: CycloParams, c: int) -> CycloInt:
        rows = [[0] * params.phi for _ in range(params.e)]
        rows[0][0] = c
        return cls(params, rows)

    @classmethod
    def one(cls, params: CycloParams) -> CycloInt:
        return cls.integer(params, 1)

    @classmethod
    def monomial(cls, params: CycloParams, i: int, j: int, c: int = 1) -> CycloInt:
        work = [[0] * (j + 1) for _ in range(i + 1)]
        work[i][j] = c
        return cls(params, _reduce_bivariate(params, work))

    @classmethod
    def zeta_power(cls, params: CycloParams, w: int) -> CycloInt:
        """(1 + x)^w = zeta_{p^n}^w, exact; w taken mod p^n."""
        w %= params.p**params.n
        out = cls.one(params)
        base = cls(params, _reduce_bivariate(params, [[1], [1]]))  # 1 + x
        while w:
            if w & 1:
                out = out * base
            base = base * base
            w >>= 1
        return out

    @classmethod
    def tame_power(cls, params: CycloParams, c: int) -> CycloInt:
        """y^c = zeta_{q-1}^c, exact; c taken mod q-1."""
        c %= params.d
        return cls.monomial(params, 0, 0, 1) if c == 0 else cls._y_pow(params, c)

    @classmethod
    def _y_pow(cls, params: CycloParams, c: int) -> CycloInt:
        work = [[0] * (c + 1)]
        work[0][c] = 1
        return cls(params, _reduce_bivariate(params, work))

    @classmethod
    def root_of_unity(cls, params: CycloParams, w: int, c: int) -> CycloInt:
        return cls.zeta_power(params, w) * cls.tame_power(params, c)

    # -- ring operations -------------------------------------------------

    def _check(self, other: CycloInt) -> None:
        if self.params != other.params:
            raise ArithError("mixed cyclotomic rings")

    def __bool__(self) -> bool:
        return any(any(r) for r in self.rows)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CycloInt)
            and self.params == other.params
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.params, self.rows))

    def __repr__(self) -> str:
        terms = []
        for i, row in enumerate(self.rows):
            for j, c in enumerate(row):
                if c:
                    terms.append(f"{c}*x^{i}*y^{j}")
        return "CycloInt(" + (" + ".join(terms) or "0") + ")"

    def __add__(self, other: CycloInt) -> CycloInt:
        self._check(other)
        return CycloInt(
            self.params,
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
        )

    def __neg__(self) -> CycloInt:
        return CycloInt(self.params, [[-a for a in r] for r in self.rows])

    def __sub__(self, other: CycloInt) -> CycloInt:
        return self + (-other)

    def scale(self, c: int) -> CycloInt:
        return CycloInt(self.params, [[a * c for a in r] for r in self.rows])

    def __mul__(self, other: CycloInt) -> CycloInt:
        self._check(other)
        e, phi = self.params.e, self.params.phi
        work = [[0] * (2 * phi - 1) for _ in range(2 * e - 1)]
        for i, r1 in enumerate(self.rows):
            for j, a in enumerate(r1):
                if not a:
                    continue
                for k, r2 in enumerate(other.rows):
                    row = work[i + k]
                    for l, b in enumerate(r2):
                        if b:
                            row[j + l] += a * b
        return CycloInt(self.params, _reduce_bivariate(self.params, work))

    def __pow__(self, e: int) -> CycloInt:
        out = CycloInt.one(self.params)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base if e > 1 else base
            e >>= 1
        return out

    def divexact(self, k: int) -> CycloInt:
        """Divide by a nonzero integer; raises if any coefficient is inexact."""
        if k == 0:
            raise ArithError("division by zero")
        rows = []
        for r in self.rows:
            row = []
            for c in r:
                if c % k:
                    raise ArithError("inexact integer division of a cyclotomic element")
                row.append(c // k)
            rows.append(row)
        return CycloInt(self.params, rows)

    def to_padic(self, M: int) -> CycloPadic:
        ctx = padic_context(self.params, M)
        return ctx.from_exact(self)

    def as_integer(self) -> int:
        """The value as a rational integer; raises if any root-of-unity part remains."""
        for i, r in enumerate(self.rows):
            for j, c in enumerate(r):
                if c and (i, j) != (0, 0):
                    raise ArithError("element is not a rational integer")
        return self.rows[0][0]


# ---------------------------------------------------------------------------
# the p-adic side


class PadicContext:
    """Mod-p^M model of Z_p[zeta_{p^n}, zeta_{q-1}]: shape e x a via Hensel factor."""

    def __init__(self, params: CycloParams, M: int):
        if M < 1:
            raise ArithError("precision must be >= 1")
        self.params = params
        self.M = M
        self.pM = params.p**M
        base = field_desc(params.p, params.a)
        self.base_field = base
        self.generator = canonical_generator(base)
        ring = galois_ring(base, M)
        teich = teichmuller_lift(self.generator, M)
        # h(T) = prod_i (T - Frob^i(teich)), coefficients in Z/p^M
        factors = []
        cur = teich
        for _ in range(params.a):
            factors.append(cur)
            cur = galois_frobenius(cur)
        hcoeffs = [ring.one()]
        for root in factors:
            nxt = [ring.zero() for _ in range(len(hcoeffs) + 1)]
            for i, c in enumerate(hcoeffs):
                nxt[i + 1] = nxt[i + 1] + c
                nxt[i] = nxt[i] - c * root
            hcoeffs = nxt
        for c in hcoeffs:
            assert c.is_in_prime_ring(), "Hensel factor has non-rational coefficients"
        self.h = tuple(c.coeffs[0] for c in hcoeffs)
        assert self.h[-1] == 1
        # images of y^j (j < phi) as polynomials in t of degree < a
        self.y_powers: list[tuple[int, ...]] = []
        cur_p = [1]
        for _ in range(params.phi):
            padded = tuple(cur_p + [0] * (params.a - len(cur_p)))
            self.y_powers.append(padded)
            cur_p = _poly_mulmod(cur_p, [0, 1], list(self.h), self.pM)
        # sanity: the fractional parts i/e must be pairwise distinct
        fracs = {Fraction(i, params.e) % 1 for i in range(params.e)}
        assert len(fracs) == params.e

    def __repr__(self) -> str:
        return f"PadicContext(p={self.params.p}, n={self.params.n}, a={self.params.a}, M={self.M})"

    def zero(self) -> CycloPadic:
        return CycloPadic(self, tuple(tuple(0 for _ in range(self.params.a)) for _ in range(self.params.e)))

    def one(self) -> CycloPadic:
        return self.integer(1)

    def integer(self, c: int) -> CycloPadic:
        rows = [[0] * self.params.a for _ in range(self.params.e)]
        rows[0][0] = c % self.pM
        return CycloPadic(self, tuple(tuple(r) for r in rows))

    def from_exact(self, z: CycloInt) -> CycloPadic:
        if z.params != self.params:
            raise ArithError("parameter mismatch")
        a = self.params.a
        rows = []
        for r in z.rows:
            acc = [0] * a
            for j, c in enumerate(r):
                if c:
                    yp = self.y_powers[j]
                    for l in range(a):
                        acc[l] = (acc[l] + c * yp[l]) % self.pM
            rows.append(tuple(acc))
        return CycloPadic(self, tuple(rows))

    def zeta_power(self, w: int) -> CycloPadic:
        return CycloInt.zeta_power(self.params, w).to_padic(self.M)

    def teichmuller_int(self, c: int) -> int:
        """Teichmueller lift of c in F_p, as an integer mod p^M."""
        return pow(c % self.params.p, self.params.p ** (self.M - 1), self.pM)


@lru_cache(maxsize=None)
def padic_context(params: CycloParams, M: int) -> PadicContext:
    return PadicContext(params, M)


class CycloPadic:
    """Element of the mod-p^M local ring, shape e x a (x-power by t-power)."""

    __slots__ = ("ctx", "rows")

    def __init__(self, ctx: PadicContext, rows: tuple[tuple[int, ...], ...]):
        self.ctx = ctx
        self.rows = rows

    def _check(self, other: CycloPadic) -> None:
        if self.ctx is not other.ctx:
            if self.ctx.params != other.ctx.params or self.ctx.M != other.ctx.M:
                raise ArithError("mixed p-adic contexts")

    def __bool__(self) -> bool:
        return any(any(r) for r in self.rows)

    def is_zero(self) -> bool:
        return not self

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CycloPadic)
            and self.ctx.params == other.ctx.params
            and self.ctx.M == other.ctx.M
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.ctx.params, self.ctx.M, self.rows))

    def __repr__(self) -> str:
        nz = sum(1 for r in self.rows for c in r if c)
        return f"CycloPadic({nz} terms, M={self.ctx.M})"

    def __add__(self, other: CycloPadic) -> CycloPadic:
        self._check(other)
        pM = self.ctx.pM
        return CycloPadic(
            self.ctx,
            tuple(
                tuple((a + b) % pM for a, b in zip(r1, r2))
                for r1, r2 in zip(self.rows, other.rows)
            ),
        )

    def __neg__(self) -> CycloPadic:
        pM = self.ctx.pM
        return CycloPadic(self.ctx, tuple(tuple((-a) % pM for a in r) for r in self.rows))

    def __sub__(self, other: CycloPadic) -> CycloPadic:
        return self + (-other)

    def scale(self, c: int) -> CycloPadic:
        pM = self.ctx.pM
        return CycloPadic(self.ctx, tuple(tuple((a * c) % pM for a in r) for r in self.rows))

    def __mul__(self, other: CycloPadic) -> CycloPadic:
        self._check(other)
        params = self.ctx.params
        e, a = params.e, params.a
        pM = self.ctx.pM
        h = list(self.ctx.h)
        # convolve x-power rows; entries are t-polynomials mod (p^M, h)
        work: list[list[int]] = [[0] * a for _ in range(2 * e - 1)]
        for i, r1 in enumerate(self.rows):
            if not any(r1):
                continue
            for k, r2 in enumerate(other.rows):
                if not any(r2):
                    continue
                prod = _poly_mulmod(list(r1), list(r2), h, pM)
                dst = work[i + k]
                for l, v in enumerate(prod):
                    dst[l] = (dst[l] + v) % pM
        xrel = params.x_relation()
        while len(work) > e:
            off = len(work) - 1 - e
            top = work.pop()
            if any(top):
                for i, c in enumerate(xrel):
                    if c:
                        dst = work[off + i]
                        for l, v in enumerate(top):
                            dst[l] = (dst[l] + c * v) % pM
        return CycloPadic(self.ctx, tuple(tuple(r) for r in work))

    def __pow__(self, e: int) -> CycloPadic:
        out = self.ctx.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base if e > 1 else base
            e >>= 1
        return out

    def unit_inverse(self) -> CycloPadic:
        """Newton inversion; requires the element to be a unit."""
        residue = [c % self.ctx.params.p for c in self.rows[0]]
        if not any(residue):
            raise ArithError("not a unit: residue vanishes")
        fdesc = FieldDesc(self.ctx.params.p, self.ctx.params.a, tuple(c % self.ctx.params.p for c in self.ctx.h))
        r0 = fdesc.element(residue)
        y = self.ctx.zero()
        inv0 = r0.inverse()
        rows = [list(r) for r in y.rows]
        rows[0] = [c for c in inv0.coeffs]
        y = CycloPadic(self.ctx, tuple(tuple(r) for r in rows))
        two = self.ctx.integer(2)
        # each step doubles the precision of 1 - self*y in the maximal ideal
        steps = (self.ctx.M * self.ctx.params.e).bit_length() + 2
        for _ in range(steps):
            y = y * (two - self * y)
            if (self * y - self.ctx.one()).is_zero():
                break
        if not (self * y - self.ctx.one()).is_zero():
            raise PrecisionError("unit inversion did not converge")
        return y

    def valuation(self) -> Fraction | PrecisionFloor:
        return padic_valuation(self)


def padic_valuation(z: CycloPadic) -> Fraction | PrecisionFloor:
    """min over terms of v_p(coefficient) + i/e; exact below precision M."""
    params = z.ctx.params
    p, M = params.p, z.ctx.M
    best: Fraction | None = None
    for i, row in enumerate(z.rows):
        vrow: int | None = None
        for c in row:
            if c:
                v = 0
                while c % p == 0:
                    c //= p
                    v += 1
                vrow = v if vrow is None or v < vrow else vrow
        if vrow is not None:
            cand = Fraction(vrow) + Fraction(i, params.e)
            best = cand if best is None or cand < best else best
    if best is None:
        return PrecisionFloor(Fraction(M))
    return best


# ---------------------------------------------------------------------------
# Artin-Hasse exponential and the splitting roots gamma_i


@lru_cache(maxsize=None)
def artin_hasse_fractions(p: int, prec: int) -> tuple[Fraction, ...]:
    """Coefficients of E(x) = exp(sum x^(p^i)/p^i) as exact rationals, checked p-integral."""
    log_coeffs = [Fraction(0)] * prec
    power, i = 1, 0
    while power < prec:
        log_coeffs[power] = Fraction(1, p**i)
        power *= p
        i += 1
    out = [Fraction(1)] + [Fraction(0)] * (prec - 1)
    for k in range(1, prec):
        acc = Fraction(0)
        for i in range(1, k + 1):
            if log_coeffs[i]:
                acc += i * log_coeffs[i] * out[k - i]
        out[k] = acc / k
        assert out[k].denominator % p != 0, "Artin-Hasse coefficient not p-integral"
    return tuple(out)


def artin_hasse_mod(p: int, M: int, prec: int) -> tuple[int, ...]:
    """The same coefficients reduced mod p^M."""
    pM = p**M
    out = []
    for c in artin_hasse_fractions(p, prec):
        out.append((c.numerator * pow(c.denominator, -1, pM)) % pM)
    return tuple(out)


def _eval_series_at(coeffs: Sequence[int], z: CycloPadic) -> CycloPadic:
    acc = z.ctx.zero()
    for c in reversed(coeffs):
        acc = acc * z
        if c:
            acc = acc + z.ctx.integer(c)
    return acc


def solve_gamma(params: CycloParams, i: int, M: int) -> CycloPadic:
    """gamma_i with E(gamma_i) = zeta_{p^n}^(p^(n-i)) and v = 1/(p^(i-1)(p-1)).

    Newton iteration from gamma = zeta^(p^(n-i)) - 1 with certified unit
    inversion; the residual must vanish identically mod p^M.
    """
    if not (1 <= i <= params.n):
        raise ArithError("splitting index out of range")
    ctx = padic_context(params, M)
    p = params.p
    target_val = Fraction(1, p ** (i - 1) * (p - 1))
    nterms = int(M / target_val) + 2
    ah = artin_hasse_mod(p, M, nterms)
    target = ctx.zeta_power(p ** (params.n - i))
    gamma = target - ctx.one()
    cap = 4 * M
    for _ in range(cap):
        egamma = _eval_series_at(ah, gamma)
        resid = egamma - target
        if resid.is_zero():
            break
        # E'(gamma) = E(gamma) * sum_j gamma^(p^j - 1)
        u = ctx.one()
        pj = p
        while pj - 1 < nterms:
            u = u + gamma ** (pj - 1)
            pj *= p
        gamma = gamma - resid * (egamma * u).unit_inverse()
    else:
        raise PrecisionError("gamma iteration failed to converge within the cap")
    assert _eval_series_at(ah, gamma) == target
    v = padic_valuation(gamma)
    if v != target_val:
        raise PrecisionError(f"gamma has valuation {v}, expected {target_val}")
    return gamma


# ---------------------------------------------------------------------------
# truncated power series over the p-adic ring


class PadicSeries:
    """Truncated power series with CycloPadic coefficients; index < prec known."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: PadicContext, coeffs: Sequence[CycloPadic]):
        self.ctx = ctx
        self.coeffs = tuple(coeffs)

    @property
    def prec(self) -> int:
        return len(self.coeffs)

    @classmethod
    def one(cls, ctx: PadicContext, prec: int) -> PadicSeries:
        return cls(ctx, [ctx.one()] + [ctx.zero()] * (prec - 1))

    def __getitem__(self, k: int) -> CycloPadic:
        return self.coeffs[k]

    def __mul__(self, other: PadicSeries) -> PadicSeries:
        prec = min(self.prec, other.prec)
        out = [self.ctx.zero() for _ in range(prec)]
        for i, a in enumerate(self.coeffs[:prec]):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs[: prec - i]):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return PadicSeries(self.ctx, out)

    def scale_elt(self, c: CycloPadic) -> PadicSeries:
        return PadicSeries(self.ctx, [a * c for a in self.coeffs])
