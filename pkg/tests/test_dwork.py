"""Operator cross-check: multiplier growth, truncated matrices, determinants."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from artinl.arith import Poly, RatFunc, field_desc, witt_add
from artinl.character import (
    CharacterSpec,
    SpecError,
    TruncLaurent,
    reduce_at_infinity,
    tame_exponents,
)
from artinl.cyclotomic import (
    PrecisionError,
    PrecisionFloor,
    cyclo_params,
    padic_context,
    padic_valuation,
)
from artinl.dwork import (
    SplittingSeries,
    TruncationError,
    UpMatrix,
    _det_coeffs,
    fredholm_series,
    growth_scan,
    monomial_witt_levels,
    splitting_series,
    trace_formula_check,
    up_matrix,
)

F3 = field_desc(3, 1)
F5 = field_desc(5, 1)


def _rf(field, num, den=(1,)):
    return RatFunc(Poly.from_ints(field, num), Poly.from_ints(field, den))


def _gauss_spec():
    t = _rf(F3, (0, 1))
    return CharacterSpec(field=F3, wild=(t,), tame_f=t, gamma=1, genus=0)


def _carry_spec():
    # two monomials in level 0; splitting them leaves a carry in level 1
    wild = (_rf(F3, (0, 1, 1)), RatFunc.zero(F3))
    return CharacterSpec(field=F3, wild=wild, tame_f=_rf(F3, (0, 1)), gamma=1, genus=0)


def _witt_total(field, levels):
    one = TruncLaurent.monomial(field, 0, field.one())
    zero = TruncLaurent.zero(field)
    acc = (zero, zero)
    for deg, c in sorted(levels[0].items()):
        acc = witt_add(acc, (TruncLaurent.monomial(field, deg, c), zero), one, field.p)
    for deg, c in sorted(levels[1].items()):
        acc = witt_add(acc, (zero, TruncLaurent.monomial(field, deg, c)), one, field.p)
    return acc


def _laurent(field, data):
    out = TruncLaurent.zero(field)
    for deg, c in data.items():
        out = out + TruncLaurent.monomial(field, deg, c)
    return out


def test_monomial_witt_levels_reassembles_the_vector():
    one, two = F3.one(), F3.element((2,))
    reduced = ({1: one, 2: two, 4: two}, {2: one})
    levels = monomial_witt_levels(F3, reduced)
    assert levels[0] == dict(reduced[0])
    total = _witt_total(F3, levels)
    assert total == (_laurent(F3, reduced[0]), _laurent(F3, reduced[1]))


def test_monomial_witt_levels_single_monomial_has_no_carry():
    reduced = ({1: F3.one()}, {1: F3.one()})
    assert monomial_witt_levels(F3, reduced) == ({1: F3.one()}, {1: F3.one()})
    assert monomial_witt_levels(F3, ({2: F3.one()},)) == ({2: F3.one()},)


def test_splitting_series_trivial_data_gives_constant_one():
    series = splitting_series(F3, ({},), 5, 8)
    ctx = series.ctx
    assert series.swan == 0
    assert series.coeffs[0] == ctx.one()
    assert all(not c for c in series.coeffs[1:])


def test_splitting_series_degree_one_leading_valuation():
    for field, c in ((F3, 1), (F3, 2), (F5, 3)):
        p = field.p
        series = splitting_series(field, ({1: field.element((c,))},), 6, 10)
        assert series.swan == 1
        assert padic_valuation(series.coeffs[1]) == Fraction(1, p - 1)


def test_splitting_series_growth_floor_for_degree_two():
    series = splitting_series(F3, ({2: F3.one()},), 12, 10)
    assert series.swan == 2
    for k in range(1, 13):
        assert series.floors[k] == min(Fraction(k, 4), Fraction(10))
        v = padic_valuation(series.coeffs[k])
        if not isinstance(v, PrecisionFloor):
            assert v >= series.floors[k]
    assert padic_valuation(series.coeffs[2]) == Fraction(1, 2)


def test_up_matrix_identity_multiplier_is_the_p_power_chain():
    series = splitting_series(F3, ({},), 0, 6)
    um = up_matrix(series, 7, 0)
    ones = {(k, 3 * k) for k in range(7) if 3 * k < 7}
    for k in range(7):
        for j in range(7):
            want = 1 if (k, j) in ones else 0
            assert int(um.comps[0][k, j]) == want
    assert not any(um.comps[1].ravel())


def test_up_matrix_tame_shift_moves_the_diagonal():
    series = splitting_series(F3, ({},), 0, 6)
    um = up_matrix(series, 7, 1)
    for k in range(7):
        for j in range(7):
            assert int(um.comps[0][k, j]) == (1 if 3 * k - j == 1 else 0)


def test_up_matrix_certifies_entries_past_the_order():
    series = splitting_series(F3, ({1: F3.one()},), 1, 1)
    um = up_matrix(series, 2, 0)
    assert set(um.certified) == {(1, 0), (1, 1)}
    assert int(um.comps[0][1, 0]) == 0 and int(um.comps[0][1, 1]) == 0


def test_up_matrix_raises_when_series_is_too_short():
    series = splitting_series(F3, ({1: F3.one()},), 2, 8)
    with pytest.raises(TruncationError):
        up_matrix(series, 4, 0)


def test_fredholm_identity_multiplier_det_is_one_minus_s():
    series = splitting_series(F3, ({},), 0, 12)
    um = up_matrix(series, 12, 0)
    res = fredholm_series(um, 3)
    ctx = series.ctx
    assert res.precision == 11
    assert res.coeffs[0] == ctx.one()
    assert res.coeffs[1] == ctx.integer(-1)
    assert not res.coeffs[2] and not res.coeffs[3]


def test_fredholm_zero_matrix_det_is_one():
    ctx = padic_context(cyclo_params(3, 1, 1), 8)
    series = SplittingSeries(ctx=ctx, swan=0, coeffs=(ctx.zero(),), floors=(Fraction(0),))
    um = up_matrix(series, 9, 0)
    res = fredholm_series(um, 2)
    assert res.coeffs[0] == ctx.one()
    assert not res.coeffs[1] and not res.coeffs[2]


def test_fredholm_diagonal_closed_form():
    ctx = padic_context(cyclo_params(3, 1, 1), 8)
    series = SplittingSeries(ctx=ctx, swan=0, coeffs=(ctx.zero(),), floors=(Fraction(0),))
    comps = (np.diag([2, 3]).astype(np.int64), np.zeros((2, 2), dtype=np.int64))
    um = UpMatrix(series=series, size=2, eps=0, unit=1, comps=comps, certified=())
    coeffs = _det_coeffs(um, 2)
    assert coeffs[1] == ctx.integer(-5)
    assert coeffs[2] == ctx.integer(6)


def test_growth_scan_margins_are_tight_and_nonnegative():
    spec = _gauss_spec()
    reduced = reduce_at_infinity(spec.wild)
    series = splitting_series(F3, monomial_witt_levels(F3, reduced), 3 * 19, 10)
    um = up_matrix(series, 20, tame_exponents(spec).get(None, 0))
    scan = growth_scan(um)
    assert all(row["ok"] for row in scan)
    assert min(row["min_margin"] for row in scan) == 0


def test_trace_formula_check_gauss_case():
    report = trace_formula_check(_gauss_spec())
    assert report.precision_achieved == 11
    assert report.np_fredholm.truncate_below(Fraction(1)).slopes() == (Fraction(1, 2),)
    assert report.np_l.slopes() == (Fraction(1, 2),)
    data = report.to_json_dict()
    assert data["lhs_coeffs"] == data["rhs_coeffs"]
    assert len(data["lhs_coeffs"]) == 4


def test_trace_formula_check_quadratic_pole_no_tame():
    spec = CharacterSpec(field=F3, wild=(_rf(F3, (0, 0, 1)),), tame_f=_rf(F3, (1,)), gamma=0, genus=0)
    report = trace_formula_check(spec)
    assert report.np_l.slopes() == (Fraction(0), Fraction(1, 2))
    assert report.np_fredholm.truncate_below(Fraction(1)).slopes() == (Fraction(0), Fraction(1, 2))


def test_trace_formula_check_witt_length_two():
    t = _rf(F3, (0, 1))
    spec = CharacterSpec(field=F3, wild=(t, t), tame_f=t, gamma=1, genus=0)
    report = trace_formula_check(spec)
    want = (Fraction(1, 6), Fraction(1, 2), Fraction(5, 6))
    assert report.np_l.slopes() == want
    assert report.np_fredholm.truncate_below(Fraction(1)).slopes() == want


def test_trace_formula_check_carry_case_needs_wider_truncation():
    spec = _carry_spec()
    with pytest.raises(PrecisionError):
        trace_formula_check(spec)
    report = trace_formula_check(spec, truncation=72, s_degree=7)
    assert report.precision_achieved == 10
    want = (Fraction(1, 6), Fraction(1, 6), Fraction(1, 2), Fraction(1, 2), Fraction(5, 6), Fraction(5, 6))
    assert report.np_fredholm.truncate_below(Fraction(1)).slopes() == want
    assert report.np_l.slopes() == want


def test_trace_formula_check_rejects_unsupported_specs():
    F9 = field_desc(3, 2)
    t9 = _rf(F9, (0, 1))
    with pytest.raises(SpecError):
        trace_formula_check(CharacterSpec(field=F9, wild=(t9,), tame_f=t9, gamma=1, genus=0))
    pole = _rf(F3, (1,), (0, 1))
    with pytest.raises(SpecError):
        trace_formula_check(CharacterSpec(field=F3, wild=(pole,), tame_f=_rf(F3, (1,)), gamma=0, genus=0))
    shifted = _rf(F3, (1, 1))
    with pytest.raises(SpecError):
        trace_formula_check(CharacterSpec(field=F3, wild=(_rf(F3, (0, 1)),), tame_f=shifted, gamma=1, genus=0))
    trivial = CharacterSpec(field=F3, wild=(RatFunc.zero(F3),), tame_f=_rf(F3, (0, 1)), gamma=0, genus=0)
    with pytest.raises(SpecError):
        trace_formula_check(trivial)


def test_trace_formula_check_p5_cases():
    t = _rf(F5, (0, 1))
    for wild, gamma in (((t,), 1), ((_rf(F5, (0, 0, 0, 1)),), 2)):
        spec = CharacterSpec(field=F5, wild=wild, tame_f=t, gamma=gamma, genus=0)
        report = trace_formula_check(spec)
        assert report.precision_achieved == 12
        below = report.np_fredholm.truncate_below(Fraction(1))
        assert below == report.np_l.truncate_below(Fraction(1))
