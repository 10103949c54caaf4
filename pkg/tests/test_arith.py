from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from artinl import arith
from artinl.arith import (
    ArithError,
    Fq,
    Poly,
    RatFunc,
    field_desc,
    galois_frobenius,
    galois_ring,
    make_extension,
    teichmuller_lift,
    witt_add,
    witt_neg,
    witt_pack,
    witt_scalar,
    witt_sum_polys,
    witt_trace,
)

F3 = field_desc(3, 1)
F5 = field_desc(5, 1)
F9 = field_desc(3, 2)
F25 = field_desc(5, 2)


# ---------------------------------------------------------------------------
# independent ghost-component oracle: exact integer lifts in Z[theta]/(hhat)


def _zx_mulmod(a: list[int], b: list[int], mod: tuple[int, ...]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    deg = len(mod) - 1
    while len(out) > deg:
        lead = out.pop()
        if lead:
            for i, mi in enumerate(mod[:-1]):
                out[len(out) - deg + i] -= lead * mi
    return out


def _zx_pow(a: list[int], e: int, mod: tuple[int, ...]) -> list[int]:
    out = [1]
    while e:
        if e & 1:
            out = _zx_mulmod(out, a, mod)
        a = _zx_mulmod(a, a, mod)
        e >>= 1
    return out


def _ghost_witt_sum(xs: tuple[Fq, ...], ys: tuple[Fq, ...]) -> tuple[Fq, ...]:
    """Oracle Witt addition: lift to Z[theta]/(hhat), add ghosts, unghost exactly."""
    desc = xs[0].desc
    n = len(xs)
    p = desc.p
    mod = desc.modulus
    lift = lambda c: list(c.coeffs)

    def ghost(coords):
        w = []
        for j in range(n):
            acc = [0] * desc.m
            for i in range(j + 1):
                term = _zx_pow(lift(coords[i]), p ** (j - i), mod)
                term += [0] * (desc.m - len(term))
                acc = [u + (p**i) * v for u, v in zip(acc, term)]
            w.append(acc)
        return w

    wx, wy = ghost(xs), ghost(ys)
    wsum = [[a + b for a, b in zip(u, v)] for u, v in zip(wx, wy)]
    coords: list[list[int]] = []
    for j in range(n):
        acc = list(wsum[j]) + [0] * desc.m
        for i in range(j):
            term = _zx_pow(coords[i], p ** (j - i), mod)
            term += [0] * (desc.m - len(term))
            acc = [u - (p**i) * v for u, v in zip(acc, term)]
        assert all(v % p**j == 0 for v in acc), "ghost sum is not a Witt vector"
        coords.append([v // p**j for v in acc])
    return tuple(desc.element(c) for c in coords)


def _random_elt(desc, rng):
    return desc.element([rng.randrange(desc.p) for _ in range(desc.m)])


# ---------------------------------------------------------------------------
# fields


def test_field_desc_rejects_even_characteristic():
    with pytest.raises(ArithError):
        arith.FieldDesc(2, 1, (1, 1))


def test_field_desc_rejects_reducible_modulus():
    with pytest.raises(ArithError):
        arith.FieldDesc(3, 2, (0, 0, 1))


def test_field_axioms_small():
    for desc in (F3, F9, F25):
        elts = list(desc.elements())
        assert len(elts) == desc.q
        one = desc.one()
        for a in elts[:6]:
            for b in elts[:6]:
                assert (a + b) - b == a
                assert a * b == b * a
            if a:
                assert a * a.inverse() == one


def test_frobenius_is_additive_and_has_order_m():
    rng = random.Random(7)
    for desc in (F9, F25, field_desc(3, 3)):
        a, b = _random_elt(desc, rng), _random_elt(desc, rng)
        assert (a + b).frobenius() == a.frobenius() + b.frobenius()
        c = a
        for _ in range(desc.m):
            c = c.frobenius()
        assert c == a
        assert a.frobenius(-1).frobenius() == a


def test_multiplicative_order_of_generator_search():
    # not every gen() is primitive; multiplicative_order must still divide q-1
    for desc in (F9, F25):
        g = desc.gen()
        assert (desc.q - 1) % g.multiplicative_order() == 0


# ---------------------------------------------------------------------------
# Galois rings, Teichmueller, trace


def test_teichmuller_frozen_value():
    assert teichmuller_lift(F3.element([2]), 2).coeffs == (8,)


def test_teichmuller_is_multiplicative_and_stable():
    rng = random.Random(3)
    for desc, n in ((F9, 2), (F5, 3), (F25, 2)):
        for _ in range(5):
            a, b = _random_elt(desc, rng), _random_elt(desc, rng)
            ta, tb = teichmuller_lift(a, n), teichmuller_lift(b, n)
            assert ta * tb == teichmuller_lift(a * b, n)
            assert ta ** desc.q == ta
            assert ta.reduce_mod_p() == a


def test_galois_frobenius_is_ring_map_and_lifts_p_power():
    rng = random.Random(11)
    for desc, n in ((F9, 2), (F9, 3), (F25, 2)):
        ring = galois_ring(desc, n)
        for _ in range(5):
            z = ring.element([rng.randrange(ring.pn) for _ in range(desc.m)])
            w = ring.element([rng.randrange(ring.pn) for _ in range(desc.m)])
            assert galois_frobenius(z * w) == galois_frobenius(z) * galois_frobenius(w)
            assert galois_frobenius(z + w) == galois_frobenius(z) + galois_frobenius(w)
            assert galois_frobenius(z).reduce_mod_p() == z.reduce_mod_p().frobenius()
        zf = z
        for _ in range(desc.m):
            zf = galois_frobenius(zf)
        assert zf == z


def test_witt_trace_of_one_is_field_degree():
    ring = galois_ring(F9, 2)
    assert witt_trace(ring.one()) == 2


def test_trace_is_additive_onto_prime_ring():
    rng = random.Random(5)
    ring = galois_ring(F9, 2)
    for _ in range(10):
        z = ring.element([rng.randrange(9) for _ in range(2)])
        w = ring.element([rng.randrange(9) for _ in range(2)])
        t = (arith.galois_trace(z) + arith.galois_trace(w)) % ring.pn
        assert arith.galois_trace(z + w) == t


# ---------------------------------------------------------------------------
# Witt layer


def test_witt_pack_frozen_value():
    assert witt_pack([F3.one(), F3.one()]).coeffs == (4,)


def test_witt_sum_poly_length_one_is_plain_addition():
    polys = witt_sum_polys(3, 1)
    assert polys[0] == {(1, 0): 1, (0, 1): 1}


def test_witt_sum_matches_ghost_oracle():
    rng = random.Random(17)
    for desc, n in ((F3, 2), (F3, 3), (F9, 2), (F5, 2), (F25, 2), (F9, 3)):
        for _ in range(8):
            xs = tuple(_random_elt(desc, rng) for _ in range(n))
            ys = tuple(_random_elt(desc, rng) for _ in range(n))
            assert witt_add(xs, ys, desc.one(), desc.p) == _ghost_witt_sum(xs, ys)


def test_witt_pack_is_additive_against_oracle():
    rng = random.Random(23)
    for desc, n in ((F3, 3), (F9, 2), (F5, 2)):
        for _ in range(6):
            xs = tuple(_random_elt(desc, rng) for _ in range(n))
            ys = tuple(_random_elt(desc, rng) for _ in range(n))
            s = _ghost_witt_sum(xs, ys)
            assert witt_pack(xs) + witt_pack(ys) == witt_pack(s)


def test_witt_neg_and_scalar():
    rng = random.Random(29)
    desc = F9
    xs = tuple(_random_elt(desc, rng) for _ in range(2))
    zero = tuple(desc.zero() for _ in range(2))
    assert witt_add(xs, witt_neg(xs), desc.one(), 3) == zero
    triple = witt_add(witt_add(xs, xs, desc.one(), 3), xs, desc.one(), 3)
    assert witt_scalar(3, xs, desc.one(), 3) == triple
    # p * x = (0, x_0^p, ...) by V o F
    assert witt_scalar(3, xs, desc.one(), 3)[0] == desc.zero()
    assert witt_scalar(3, xs, desc.one(), 3)[1] == xs[0] ** 3


def test_witt_length_cap():
    with pytest.raises(ArithError):
        witt_sum_polys(3, 4)


@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8), st.integers(0, 8))
@settings(max_examples=60, deadline=None)
def test_witt_add_associative_on_w2_f9(a0, a1, b0, b1):
    mk = lambda u, v: (F9.element([u % 3, u // 3]), F9.element([v % 3, v // 3]))
    x, y = mk(a0, a1), mk(b0, b1)
    z = mk((a0 * 7 + 1) % 9, (b1 * 5 + 2) % 9)
    one = F9.one()
    lhs = witt_add(witt_add(x, y, one, 3), z, one, 3)
    rhs = witt_add(x, witt_add(y, z, one, 3), one, 3)
    assert lhs == rhs


# ---------------------------------------------------------------------------
# polynomials / rational functions


def test_poly_divmod_roundtrip():
    rng = random.Random(41)
    for _ in range(20):
        a = Poly(F9, [_random_elt(F9, rng) for _ in range(rng.randrange(1, 7))])
        b = Poly(F9, [_random_elt(F9, rng) for _ in range(rng.randrange(1, 5))])
        if not b:
            continue
        q, r = a.divmod(b)
        assert q * b + r == a
        assert r.degree < b.degree


def test_poly_gcd_divides_both():
    x = Poly.x(F3)
    one = Poly.constant(F3.one())
    f = (x - one) * (x - one) * x
    g = (x - one) * (x + one)
    d = f.gcd(g)
    assert not f % d and not g % d
    assert d == x - one


def test_shift_origin_and_reversal():
    x = Poly.x(F5)
    f = x**2 + x.scale(3) + Poly.constant(F5.element([1]))
    x0 = F5.element([2])
    shifted = f.shift_origin(x0)
    u = F5.element([1])
    assert shifted(u) == f(x0 + u)
    rev = f.reversed_coeffs()
    # rev(u) = u^2 f(1/u)
    v = F5.element([2])
    assert rev(v) == v**2 * f(v.inverse())


def test_ratfunc_normalization_and_order():
    x = Poly.x(F3)
    one = Poly.constant(F3.one())
    r = RatFunc((x - one) * x, (x - one) * (x + one))
    assert r.num == x and r.den == x + one
    assert r.ord_at(F3.zero()) == 1
    assert r.ord_at(-F3.one()) == -1
    assert r.ord_at(None) == 0
    t5 = RatFunc.from_poly(x**5)
    assert t5.ord_at(None) == -5


def test_series_inverse():
    x = Poly.x(F9)
    f = Poly.constant(F9.one()) + x.scale(2) + x**3
    g = f.series_inverse(6)
    prod = f * g
    assert all(not c for c in prod.coeffs[1:6])
    assert prod.coeffs[0] == F9.one()


# ---------------------------------------------------------------------------
# extensions


def test_make_extension_embedding_is_field_map():
    rng = random.Random(55)
    for base, k in ((F9, 2), (F9, 3), (F25, 2), (F5, 4)):
        ext = make_extension(base, k)
        assert ext.field.m == base.m * k
        for _ in range(6):
            a, b = _random_elt(base, rng), _random_elt(base, rng)
            assert ext.embed(a * b) == ext.embed(a) * ext.embed(b)
            assert ext.embed(a + b) == ext.embed(a) + ext.embed(b)
        # embedding commutes with the q-power Frobenius
        a = _random_elt(base, rng)
        assert ext.embed(a.frobenius()) == ext.embed(a).frobenius()


def test_make_extension_is_deterministic():
    e1 = make_extension(F9, 3)
    make_extension.cache_clear()
    e2 = make_extension(F9, 3)
    assert e1.field == e2.field and e1.beta_powers == e2.beta_powers


def test_prime_field_embedding_is_constant_inclusion():
    ext = make_extension(F3, 4)
    two = F3.element([2])
    assert ext.embed(two) == ext.field.element([2])
