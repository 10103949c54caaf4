"""Finite fields F_{p^m}, Galois rings GR(p^n, m), and truncated Witt vectors.

Everything here is exact: field elements are coefficient tuples mod p,
Galois ring elements are coefficient tuples mod p^n, and the universal
Witt sum polynomials are integer polynomials computed once per (p, n)
by ghost-component lifting.  Only odd p is supported.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence


class ArithError(ValueError):
    pass


MAX_WITT_LENGTH = 3


# ---------------------------------------------------------------------------
# bare integer-coefficient polynomial helpers (bootstrap layer, mod p^n)


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a: Sequence[int], b: Sequence[int], mod: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % mod
    return _trim(out)


def _poly_rem(a: Sequence[int], f: Sequence[int], mod: int) -> list[int]:
    # f monic
    a = list(a)
    df = len(f) - 1
    while len(a) - 1 >= df and a:
        lead = a[-1] % mod
        if lead:
            shift = len(a) - 1 - df
            for i, fi in enumerate(f):
                a[shift + i] = (a[shift + i] - lead * fi) % mod
        a.pop()
    return _trim(a)


def _poly_mulmod(a: Sequence[int], b: Sequence[int], f: Sequence[int], mod: int) -> list[int]:
    return _poly_rem(_poly_mul(a, b, mod), f, mod)


def _poly_powmod(a: Sequence[int], e: int, f: Sequence[int], mod: int) -> list[int]:
    result = [1]
    base = _poly_rem(a, f, mod)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, mod)
        base = _poly_mulmod(base, base, f, mod)
        e >>= 1
    return result


def _poly_gcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = list(a), list(b)
    while b:
        a, b = b, _poly_rem(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [(c * inv) % p for c in a]
    return a


def _is_prime(v: int) -> bool:
    if v < 2:
        return False
    d = 2
    while d * d <= v:
        if v % d == 0:
            return False
        d += 1
    return True


def _prime_factors(v: int) -> list[int]:
    out = []
    d = 2
    while d * d <= v:
        if v % d == 0:
            out.append(d)
            while v % d == 0:
                v //= d
        d += 1
    if v > 1:
        out.append(v)
    return out


def _is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Rabin test: x^(p^m) = x mod f, and gcd(x^(p^(m/l)) - x, f) = 1."""
    m = len(coeffs) - 1
    if m < 1 or coeffs[-1] != 1:
        return False
    x = _poly_rem([0, 1], coeffs, p)
    xq = _poly_powmod(x, p**m, coeffs, p)
    pad = max(len(x), len(xq))
    if _trim([(a - b) % p for a, b in zip(xq + [0] * pad, x + [0] * pad)]):
        return False
    for ell in _prime_factors(m):
        xe = _poly_powmod(x, p ** (m // ell), coeffs, p)
        pad = max(len(x), len(xe))
        d = [(a - b) % p for a, b in zip(xe + [0] * pad, x + [0] * pad)]
        g = _poly_gcd(_trim(d), list(coeffs), p)
        if len(g) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# field descriptions


@dataclass(frozen=True)
class FieldDesc:
    """Description of F_{p^m} as F_p[x]/(modulus); modulus monic, irreducible."""

    p: int
    m: int
    modulus: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.p < 3 or not _is_prime(self.p):
            raise ArithError(f"p must be an odd prime, got {self.p}")
        if self.m < 1:
            raise ArithError(f"extension degree must be positive, got {self.m}")
        if len(self.modulus) != self.m + 1:
            raise ArithError("modulus length does not match degree")
        if any(not (0 <= c < self.p) for c in self.modulus):
            raise ArithError("modulus coefficients must be reduced mod p")
        if not _is_irreducible(self.modulus, self.p):
            raise ArithError(f"modulus {self.modulus} is reducible over F_{self.p}")

    @property
    def q(self) -> int:
        return self.p**self.m

    def zero(self) -> Fq:
        return Fq(self, (0,) * self.m)

    def one(self) -> Fq:
        return self.element([1])

    def gen(self) -> Fq:
        return self.element([0, 1])

    def element(self, coeffs: Iterable[int]) -> Fq:
        c = [int(v) % self.p for v in coeffs]
        if len(c) > self.m:
            c = _poly_rem(c, self.modulus, self.p)
        c += [0] * (self.m - len(c))
        return Fq(self, tuple(c))

    def elements(self) -> Iterable[Fq]:
        """All q elements, ordered by base-p digit code."""
        for code in range(self.q):
            digs, v = [], code
            for _ in range(self.m):
                digs.append(v % self.p)
                v //= self.p
            yield Fq(self, tuple(digs))


MODULUS_SEED = "artinl-modulus-v1"


@lru_cache(maxsize=None)
def field_desc(p: int, m: int) -> FieldDesc:
    """Deterministic modulus for F_{p^m}: seeded random search, Rabin-checked."""
    rng = random.Random(f"{MODULUS_SEED}:{p}:{m}")
    if m == 1:
        return FieldDesc(p, 1, (rng.randrange(1, p), 1))
    while True:
        coeffs = [rng.randrange(p) for _ in range(m)] + [1]
        if coeffs[0] == 0:
            continue
        if _is_irreducible(coeffs, p):
            return FieldDesc(p, m, tuple(coeffs))


class Fq:
    """Element of F_{p^m}, stored as a coefficient tuple in the field generator."""

    __slots__ = ("desc", "coeffs")

    def __init__(self, desc: FieldDesc, coeffs: tuple[int, ...]):
        self.desc = desc
        self.coeffs = coeffs

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Fq)
            and self.desc == other.desc
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.desc, self.coeffs))

    def __repr__(self) -> str:
        return f"Fq{self.coeffs}@{self.desc.p}^{self.desc.m}"

    def _check(self, other: Fq) -> None:
        if self.desc != other.desc:
            raise ArithError("mixed fields")

    def __add__(self, other: Fq) -> Fq:
        self._check(other)
        p = self.desc.p
        return Fq(self.desc, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: Fq) -> Fq:
        self._check(other)
        p = self.desc.p
        return Fq(self.desc, tuple((a - b) % p for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> Fq:
        p = self.desc.p
        return Fq(self.desc, tuple((-a) % p for a in self.coeffs))

    def __mul__(self, other: Fq) -> Fq:
        self._check(other)
        d = self.desc
        prod = _poly_mulmod(list(self.coeffs), list(other.coeffs), d.modulus, d.p)
        prod += [0] * (d.m - len(prod))
        return Fq(d, tuple(prod))

    def scale(self, c: int) -> Fq:
        p = self.desc.p
        return Fq(self.desc, tuple((a * c) % p for a in self.coeffs))

    def inverse(self) -> Fq:
        if not self:
            raise ArithError("division by zero in F_q")
        return self ** (self.desc.q - 2)

    def __truediv__(self, other: Fq) -> Fq:
        return self * other.inverse()

    def __pow__(self, e: int) -> Fq:
        if e < 0:
            return self.inverse() ** (-e)
        d = self.desc
        out = _poly_powmod(list(self.coeffs), e, d.modulus, d.p)
        out += [0] * (d.m - len(out))
        return Fq(d, tuple(out))

    def frobenius(self, j: int = 1) -> Fq:
        """x -> x^(p^j); j may be negative (the field Frobenius has order m)."""
        j %= self.desc.m
        return self ** (self.desc.p**j)

    def multiplicative_order(self) -> int:
        if not self:
            raise ArithError("zero has no multiplicative order")
        order = self.desc.q - 1
        for ell in _prime_factors(order):
            while order % ell == 0 and self ** (order // ell) == self.desc.one():
                order //= ell
        return order

    def to_int_code(self) -> int:
        code = 0
        for c in reversed(self.coeffs):
            code = code * self.desc.p + c
        return code


# ---------------------------------------------------------------------------
# Galois rings GR(p^n, m) = Z[x]/(p^n, modulus lift)


class GaloisRing:
    """W_n(F_{p^m}) presented as Z[x]/(p^n, modulus); shares FieldDesc's modulus."""

    def __init__(self, field: FieldDesc, n: int):
        if n < 1:
            raise ArithError("Witt length must be >= 1")
        self.field = field
        self.n = n
        self.p = field.p
        self.m = field.m
        self.pn = field.p**n
        self._frob_gen_powers: tuple[tuple[int, ...], ...] | None = None

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GaloisRing)
            and self.field == other.field
            and self.n == other.n
        )

    def __hash__(self) -> int:
        return hash((self.field, self.n))

    def __repr__(self) -> str:
        return f"GR({self.p}^{self.n}, {self.m})"

    def element(self, coeffs: Iterable[int]) -> GRElement:
        c = [int(v) % self.pn for v in coeffs]
        if len(c) > self.m:
            c = _poly_rem(c, self.field.modulus, self.pn)
        c += [0] * (self.m - len(c))
        return GRElement(self, tuple(c))

    def zero(self) -> GRElement:
        return GRElement(self, (0,) * self.m)

    def one(self) -> GRElement:
        return self.element([1])

    def lift(self, c: Fq) -> GRElement:
        if c.desc != self.field:
            raise ArithError("element not in the residue field of this ring")
        return GRElement(self, c.coeffs)

    def _frobenius_gen(self) -> tuple[tuple[int, ...], ...]:
        """Powers of sigma(x), the Hensel root of the modulus above x^p."""
        if self._frob_gen_powers is not None:
            return self._frob_gen_powers
        f = list(self.field.modulus)
        fprime = _trim([(i * f[i]) % self.pn for i in range(1, len(f))])
        y = _poly_powmod([0, 1], self.p, f, self.pn)
        for _ in range(self.n.bit_length() + 1):
            fy = self._eval_poly_mod(f, y)
            if not fy:
                break
            fpy = self._eval_poly_mod(fprime, y)
            inv = self._invert_unit(fpy)
            delta = _poly_mulmod(fy, inv, f, self.pn)
            y = _trim([(a - b) % self.pn for a, b in zip(y + [0] * len(delta), delta + [0] * len(y))])
        assert not self._eval_poly_mod(f, y), "Hensel lift of Frobenius failed"
        powers = [[1]]
        for _ in range(self.m - 1):
            powers.append(_poly_mulmod(powers[-1], y, f, self.pn))
        self._frob_gen_powers = tuple(tuple(c) for c in powers)
        return self._frob_gen_powers

    def _eval_poly_mod(self, poly: Sequence[int], at: Sequence[int]) -> list[int]:
        out: list[int] = []
        for c in reversed(poly):
            out = _poly_mulmod(out, at, self.field.modulus, self.pn)
            if c:
                if out:
                    out[0] = (out[0] + c) % self.pn
                else:
                    out = [c % self.pn]
        return _trim(out)

    def _invert_unit(self, u: Sequence[int]) -> list[int]:
        """Hensel inversion: invert mod p in the field, then lift quadratically."""
        fld = self.field
        ubar = fld.element(u)
        vbar = ubar.inverse()
        v = list(vbar.coeffs)
        prec = 1
        while prec < self.n:
            uv = _poly_mulmod(list(u), v, fld.modulus, self.pn)
            two_minus = [(-c) % self.pn for c in uv]
            if two_minus:
                two_minus[0] = (two_minus[0] + 2) % self.pn
            else:
                two_minus = [2 % self.pn]
            v = _poly_mulmod(v, two_minus, fld.modulus, self.pn)
            prec *= 2
        return _trim(v)


@lru_cache(maxsize=None)
def galois_ring(field: FieldDesc, n: int) -> GaloisRing:
    return GaloisRing(field, n)


class GRElement:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: GaloisRing, coeffs: tuple[int, ...]):
        self.ring = ring
        self.coeffs = coeffs

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GRElement)
            and self.ring == other.ring
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.ring, self.coeffs))

    def __repr__(self) -> str:
        return f"GR{self.coeffs}@{self.ring!r}"

    def _check(self, other: GRElement) -> None:
        if self.ring != other.ring:
            raise ArithError("mixed Galois rings")

    def __add__(self, other: GRElement) -> GRElement:
        self._check(other)
        pn = self.ring.pn
        return GRElement(self.ring, tuple((a + b) % pn for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: GRElement) -> GRElement:
        self._check(other)
        pn = self.ring.pn
        return GRElement(self.ring, tuple((a - b) % pn for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> GRElement:
        pn = self.ring.pn
        return GRElement(self.ring, tuple((-a) % pn for a in self.coeffs))

    def __mul__(self, other: GRElement) -> GRElement:
        self._check(other)
        r = self.ring
        prod = _poly_mulmod(list(self.coeffs), list(other.coeffs), r.field.modulus, r.pn)
        prod += [0] * (r.m - len(prod))
        return GRElement(r, tuple(prod))

    def scale(self, c: int) -> GRElement:
        pn = self.ring.pn
        return GRElement(self.ring, tuple((a * c) % pn for a in self.coeffs))

    def __pow__(self, e: int) -> GRElement:
        if e < 0:
            raise ArithError("negative powers not supported in GR")
        r = self.ring
        out = _poly_powmod(list(self.coeffs), e, r.field.modulus, r.pn)
        out += [0] * (r.m - len(out))
        return GRElement(r, tuple(out))

    def reduce_mod_p(self) -> Fq:
        return self.ring.field.element(self.coeffs)

    def is_in_prime_ring(self) -> bool:
        return not any(self.coeffs[1:])


def teichmuller_lift(c: Fq, n: int) -> GRElement:
    """The unique lift with [c]^q = [c]: chat^(q^(n-1)) mod p^n."""
    ring = galois_ring(c.desc, n)
    z = ring.lift(c)
    return z ** (c.desc.q ** (n - 1))


def galois_frobenius(z: GRElement) -> GRElement:
    """Ring automorphism of GR(p^n, m) lifting x -> x^p."""
    r = z.ring
    powers = r._frobenius_gen()
    acc = [0] * r.m
    for i, ci in enumerate(z.coeffs):
        if ci == 0:
            continue
        pw = powers[i]
        for j, gj in enumerate(pw):
            acc[j] = (acc[j] + ci * gj) % r.pn
    return GRElement(r, tuple(acc))


def galois_trace(z: GRElement) -> int:
    """Trace of GR(p^n, m) over Z/p^n, returned as an int in [0, p^n)."""
    acc = z.ring.zero()
    cur = z
    for _ in range(z.ring.m):
        acc = acc + cur
        cur = galois_frobenius(cur)
    assert acc.is_in_prime_ring(), "trace landed outside the prime ring"
    return acc.coeffs[0]


def witt_pack(coords: Sequence[Fq], n: int | None = None) -> GRElement:
    """Witt coordinates (a_0..a_{n-1}) -> sum_i p^i [a_i^(p^-i)] in GR(p^n, m)."""
    if n is None:
        n = len(coords)
    if n != len(coords):
        raise ArithError("coordinate count must equal the Witt length")
    desc = coords[0].desc
    ring = galois_ring(desc, n)
    acc = ring.zero()
    for i, a in enumerate(coords):
        if a.desc != desc:
            raise ArithError("mixed fields in Witt coordinates")
        digit = a.frobenius(-i)
        acc = acc + teichmuller_lift(digit, n).scale(desc.p**i)
    return acc


def witt_trace(z: GRElement) -> int:
    """Trace W_n(F_{p^m}) -> W_n(F_p) = Z/p^n of a packed Witt vector."""
    return galois_trace(z)


# ---------------------------------------------------------------------------
# universal Witt sum polynomials (ghost lift over Z), lengths <= 3

Mono = tuple[int, ...]
ZPoly = dict[Mono, int]


def _zp_add(a: ZPoly, b: ZPoly) -> ZPoly:
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0) + v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def _zp_scale(a: ZPoly, c: int) -> ZPoly:
    if c == 0:
        return {}
    return {k: v * c for k, v in a.items()}


def _zp_mul(a: ZPoly, b: ZPoly) -> ZPoly:
    out: ZPoly = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            nv = out.get(k, 0) + va * vb
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
    return out


def _zp_pow(a: ZPoly, e: int) -> ZPoly:
    nvars = len(next(iter(a))) if a else 0
    out: ZPoly = {(0,) * nvars: 1}
    base = a
    while e:
        if e & 1:
            out = _zp_mul(out, base)
        base = _zp_mul(base, base) if e > 1 else base
        e >>= 1
    return out


def _zp_divexact(a: ZPoly, c: int) -> ZPoly:
    out = {}
    for k, v in a.items():
        if v % c:
            raise ArithError("inexact division while unghosting (not a Witt vector)")
        out[k] = v // c
    return out


def _unghost(ghost: list[ZPoly], p: int) -> list[ZPoly]:
    """Solve w_j = sum_{i<=j} p^i s_i^(p^(j-i)) for s over Z, exactly."""
    coords: list[ZPoly] = []
    for j, wj in enumerate(ghost):
        acc = wj
        for i, si in enumerate(coords):
            acc = _zp_add(acc, _zp_scale(_zp_pow(si, p ** (j - i)), -(p**i)))
        coords.append(_zp_divexact(acc, p**j))
    return coords


@lru_cache(maxsize=None)
def witt_sum_polys(p: int, n: int) -> tuple[ZPoly, ...]:
    """S_0..S_{n-1} in Z[x_0..x_{n-1}, y_0..y_{n-1}] with (x) + (y) = (S(x,y))."""
    if n > MAX_WITT_LENGTH:
        raise ArithError(f"Witt length {n} exceeds supported maximum {MAX_WITT_LENGTH}")
    nv = 2 * n

    def var(i: int) -> ZPoly:
        e = [0] * nv
        e[i] = 1
        return {tuple(e): 1}

    ghost = []
    for j in range(n):
        wj: ZPoly = {}
        for i in range(j + 1):
            wj = _zp_add(wj, _zp_scale(_zp_pow(var(i), p ** (j - i)), p**i))
            wj = _zp_add(wj, _zp_scale(_zp_pow(var(n + i), p ** (j - i)), p**i))
        ghost.append(wj)
    return tuple(_unghost(ghost, p))


def witt_eval_poly(poly: ZPoly, vals: Sequence, one, p: int):
    """Evaluate an integer polynomial (mod p) on elements of any F_p-algebra."""
    cache: dict[tuple[int, int], object] = {}

    def power(idx: int, e: int):
        if e == 0:
            return one
        key = (idx, e)
        if key not in cache:
            half = power(idx, e // 2)
            acc = half * half
            if e & 1:
                acc = acc * vals[idx]
            cache[key] = acc
        return cache[key]

    total = None
    for mono, c in poly.items():
        c %= p
        if c == 0:
            continue
        term = one.scale(c)
        for idx, e in enumerate(mono):
            if e:
                term = term * power(idx, e)
        total = term if total is None else total + term
    return one.scale(0) if total is None else total


def witt_add(a: Sequence, b: Sequence, one, p: int) -> tuple:
    """Witt vector addition on coordinates over any F_p-algebra (length <= 3)."""
    n = len(a)
    if len(b) != n:
        raise ArithError("Witt length mismatch")
    polys = witt_sum_polys(p, n)
    vals = list(a) + list(b)
    return tuple(witt_eval_poly(s, vals, one, p) for s in polys)


def witt_neg(a: Sequence) -> tuple:
    """Coordinatewise negation; valid for odd p."""
    return tuple(-x for x in a)


def witt_scalar(j: int, a: Sequence, one, p: int) -> tuple:
    """j-fold Witt sum of a with itself, by binary addition chains."""
    n = len(a)
    zero = tuple(one.scale(0) for _ in range(n))
    if j < 0:
        return witt_scalar(-j, witt_neg(a), one, p)
    acc = zero
    base = tuple(a)
    while j:
        if j & 1:
            acc = witt_add(acc, base, one, p)
        j >>= 1
        if j:
            base = witt_add(base, base, one, p)
    return acc


# ---------------------------------------------------------------------------
# polynomials and rational functions over F_q


class Poly:
    """Dense polynomial over one F_q; immutable, trailing zeros stripped."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldDesc, coeffs: Sequence[Fq]):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def from_ints(cls, field: FieldDesc, ints: Sequence[int]) -> Poly:
        return cls(field, [field.element([v]) for v in ints])

    @classmethod
    def from_elements(cls, field: FieldDesc, elts: Sequence[Fq]) -> Poly:
        return cls(field, list(elts))

    @classmethod
    def constant(cls, c: Fq) -> Poly:
        return cls(c.desc, [c])

    @classmethod
    def x(cls, field: FieldDesc) -> Poly:
        return cls(field, [field.zero(), field.one()])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Poly) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __repr__(self) -> str:
        return f"Poly{[c.coeffs for c in self.coeffs]}"

    def __add__(self, other: Poly) -> Poly:
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(self.field, out)

    def __neg__(self) -> Poly:
        return Poly(self.field, [-c for c in self.coeffs])

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly) -> Poly:
        if not self or not other:
            return Poly(self.field, [])
        zero = self.field.zero()
        out = [zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(self.field, out)

    def scale(self, c: int) -> Poly:
        return Poly(self.field, [a.scale(c) for a in self.coeffs])

    def scale_elt(self, c: Fq) -> Poly:
        return Poly(self.field, [a * c for a in self.coeffs])

    def __pow__(self, e: int) -> Poly:
        out = Poly.constant(self.field.one())
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base if e > 1 else base
            e >>= 1
        return out

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        if not other:
            raise ArithError("polynomial division by zero")
        field = self.field
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(field, []), self
        inv_lead = other.coeffs[-1].inverse()
        quot = [field.zero()] * (dq + 1)
        for shift in range(dq, -1, -1):
            lead = rem[shift + other.degree]
            if lead:
                f = lead * inv_lead
                quot[shift] = f
                for i, oc in enumerate(other.coeffs):
                    rem[shift + i] = rem[shift + i] - f * oc
        return Poly(field, quot), Poly(field, rem[: other.degree])

    def __floordiv__(self, other: Poly) -> Poly:
        return self.divmod(other)[0]

    def __mod__(self, other: Poly) -> Poly:
        return self.divmod(other)[1]

    def gcd(self, other: Poly) -> Poly:
        a, b = self, other
        while b:
            a, b = b, a % b
        return a.monic() if a else a

    def monic(self) -> Poly:
        if not self:
            return self
        return self.scale_elt(self.coeffs[-1].inverse())

    def __call__(self, x: Fq) -> Fq:
        if x.desc != self.field:
            raise ArithError("evaluation point in a different field")
        acc = self.field.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_in(self, embed: Callable[[Fq], Fq], x: Fq) -> Fq:
        """Horner evaluation after coefficientwise embedding into x's field."""
        acc = x.desc.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + embed(c)
        return acc

    def shift_origin(self, x0: Fq) -> Poly:
        """Coefficients of self(x0 + u) as a polynomial in u."""
        out = Poly(self.field, [])
        lin = Poly(self.field, [x0, self.field.one()])
        for c in reversed(self.coeffs):
            out = out * lin + Poly.constant(c)
        return out

    def reversed_coeffs(self, at_degree: int | None = None) -> Poly:
        """x^d * self(1/x) for d = at_degree (defaults to deg self)."""
        d = self.degree if at_degree is None else at_degree
        if d < self.degree:
            raise ArithError("reversal degree below actual degree")
        zero = self.field.zero()
        cs = list(self.coeffs) + [zero] * (d + 1 - len(self.coeffs))
        return Poly(self.field, list(reversed(cs)))

    def map_coeffs(self, fn: Callable[[Fq], Fq], field: FieldDesc | None = None) -> Poly:
        return Poly(field or self.field, [fn(c) for c in self.coeffs])

    def ord_at_zero(self) -> int:
        if not self:
            raise ArithError("zero polynomial has no finite order")
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        raise AssertionError

    def series_inverse(self, prec: int) -> Poly:
        """Inverse of a unit power series, modulo u^prec."""
        if not self or not self.coeffs[0]:
            raise ArithError("series inverse needs a unit constant term")
        inv0 = self.coeffs[0].inverse()
        out = [inv0]
        for k in range(1, prec):
            acc = self.field.zero()
            for i in range(1, min(k, len(self.coeffs) - 1) + 1):
                acc = acc + self.coeffs[i] * out[k - i]
            out.append(-inv0 * acc)
        return Poly(self.field, out)


class RatFunc:
    """Rational function over F_q, normalized: gcd cancelled, monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        if not den:
            raise ArithError("zero denominator")
        if num.field != den.field:
            raise ArithError("mixed fields in rational function")
        g = num.gcd(den)
        if g and g.degree > 0:
            num = num // g
            den = den // g
        lead = den.coeffs[-1]
        if lead != den.field.one():
            inv = lead.inverse()
            num = num.scale_elt(inv)
            den = den.scale_elt(inv)
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, p: Poly) -> RatFunc:
        return cls(p, Poly.constant(p.field.one()))

    @classmethod
    def zero(cls, field: FieldDesc) -> RatFunc:
        return cls(Poly(field, []), Poly.constant(field.one()))

    @property
    def field(self) -> FieldDesc:
        return self.num.field

    def __bool__(self) -> bool:
        return bool(self.num)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RatFunc) and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RatFunc({self.num!r}/{self.den!r})"

    def __add__(self, other: RatFunc) -> RatFunc:
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> RatFunc:
        return RatFunc(-self.num, self.den)

    def __sub__(self, other: RatFunc) -> RatFunc:
        return self + (-other)

    def __mul__(self, other: RatFunc) -> RatFunc:
        return RatFunc(self.num * other.num, self.den * other.den)

    def scale(self, c: int) -> RatFunc:
        return RatFunc(self.num.scale(c), self.den)

    def __truediv__(self, other: RatFunc) -> RatFunc:
        if not other:
            raise ArithError("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __pow__(self, e: int) -> RatFunc:
        if e < 0:
            inv = RatFunc(self.den, self.num)
            return inv ** (-e)
        out = RatFunc.from_poly(Poly.constant(self.field.one()))
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base if e > 1 else base
            e >>= 1
        return out

    def ord_at(self, point: Fq | None) -> int:
        """Order of vanishing at a finite point, or at infinity for None."""
        if not self.num:
            raise ArithError("the zero function has no order")
        if point is None:
            return self.den.degree - self.num.degree
        lin = Poly(self.field, [-point, self.field.one()])

        def ord_in(poly: Poly) -> int:
            count = 0
            while True:
                q, r = poly.divmod(lin)
                if r:
                    return count
                count += 1
                poly = q

        return ord_in(self.num) - ord_in(self.den)

    def map_coeffs(self, fn: Callable[[Fq], Fq], field: FieldDesc | None = None) -> RatFunc:
        return RatFunc(self.num.map_coeffs(fn, field), self.den.map_coeffs(fn, field))


# ---------------------------------------------------------------------------
# field extensions and embeddings


@dataclass(frozen=True)
class Extension:
    """F_{q} -> F_{q^k} with the embedding pinned by a chosen root of the base modulus."""

    base: FieldDesc
    field: FieldDesc
    degree: int
    beta_powers: tuple[Fq, ...]

    def embed(self, c: Fq) -> Fq:
        if c.desc != self.base:
            raise ArithError("element not in the base field")
        acc = self.field.zero()
        for ci, bp in zip(c.coeffs, self.beta_powers):
            if ci:
                acc = acc + bp.scale(ci)
        return acc


def _find_root(poly: Poly, rng: random.Random) -> Fq:
    """One root of a totally split squarefree polynomial, by CZ splitting."""
    field = poly.field
    f = poly.monic()
    budget = 200
    while f.degree > 1:
        budget -= 1
        if budget < 0:
            raise ArithError("root search budget exhausted")
        delta = field.element([rng.randrange(field.p) for _ in range(field.m)])
        shifted = Poly(field, [delta, field.one()])
        h = _poly_powmod_poly(shifted, (field.q - 1) // 2, f)
        g = (h - Poly.constant(field.one())).gcd(f)
        if 0 < g.degree < f.degree:
            f = g if g.degree <= f.degree - g.degree else f // g
            f = f.monic()
    return -f.coeffs[0]


def _poly_powmod_poly(base: Poly, e: int, mod: Poly) -> Poly:
    out = Poly.constant(base.field.one())
    base = base % mod
    while e:
        if e & 1:
            out = (out * base) % mod
        base = (base * base) % mod
        e >>= 1
    return out


@lru_cache(maxsize=None)
def make_extension(base: FieldDesc, k: int) -> Extension:
    """Build F_{q^k} and the embedding of F_q, deterministically."""
    if k < 1:
        raise ArithError("extension degree must be positive")
    ext = field_desc(base.p, base.m * k)
    rng = random.Random(f"{MODULUS_SEED}:embed:{base.p}:{base.m}:{k}")
    base_mod_in_ext = Poly.from_ints(ext, list(base.modulus))
    if base.m == 1:
        # prime base field: the embedding is by constants
        beta = -base_mod_in_ext.coeffs[0]
    elif ext == base:
        beta = base.gen()
    else:
        beta = _find_root(base_mod_in_ext, rng)
    assert not base_mod_in_ext(beta), "embedding root does not satisfy the base modulus"
    powers = [ext.one()]
    for _ in range(base.m - 1):
        powers.append(powers[-1] * beta)
    return Extension(base, ext, k, tuple(powers))
