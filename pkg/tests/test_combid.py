from fractions import Fraction
from math import comb

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from kmnil.combid import (
    beta_integral,
    beta_sum,
    coeff_3_16,
    coeff_alternating_sum,
    coeff_closed_form,
    identity_sweep,
    sl2_string_check,
    vandermonde_check,
    vandermonde_omitted_term,
)


def test_vandermonde_examples():
    rep = vandermonde_check(3, 2, 0, 1)
    assert rep.lhs == 10 == rep.rhs and rep.passed
    # r1 - k0 - 1 = 0: the left side is the single term C(r+1, k+1)
    rep = vandermonde_check(5, 3, 2, 2)
    assert rep.lhs == comb(6, 3) == rep.rhs


def test_vandermonde_below_the_summation_range_misses_one_term():
    # k = 0 < r1 - k0 - 1 = 1: left side is r+1, right side r+2
    rep = vandermonde_check(3, 2, 0, 0)
    assert (rep.lhs, rep.rhs, rep.passed) == (4, 5, False)
    assert rep.extra["omitted_term"] == 1


def test_vandermonde_failures_are_exactly_the_omitted_term():
    for r in range(9):
        for r1 in range(1, r + 1):
            for k0 in range(r1):
                for k in range(r1 + 1):
                    rep = vandermonde_check(r, r1, k0, k)
                    gap = vandermonde_omitted_term(r1, k0, k)
                    assert rep.rhs - rep.lhs == gap
                    assert rep.passed == (gap == 0) == (k >= r1 - k0 - 1)


def test_beta_sum_examples():
    rep = beta_sum(2, 1)
    assert rep.lhs == Fraction(1, 3) == rep.rhs and rep.passed
    for r1 in range(1, 8):
        assert beta_sum(r1, r1 - 1).lhs == Fraction(1, r1 + 1)


def test_beta_sum_sweep_to_twelve():
    for r1 in range(1, 13):
        for k0 in range(r1):
            rep = beta_sum(r1, k0)
            assert rep.passed and rep.lhs > 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 8), st.integers(0, 8))
def test_beta_integral_against_sympy(a, b):
    x = sympy.Symbol("x")
    expected = sympy.integrate((1 - x) ** a * x**b, (x, 0, 1))
    got = beta_integral(a, b)
    assert sympy.Rational(got.numerator, got.denominator) == expected


def test_coeff_examples():
    assert coeff_3_16(2, 1, 0).passed
    assert coeff_3_16(3, 2, 1).passed


def test_coeff_magnitude_and_corrected_sign():
    for r in range(2, 9):
        for r1 in range(1, r):
            for k0 in range(r1):
                lhs = coeff_alternating_sum(r, r1, k0)
                assert lhs != 0
                assert abs(lhs) == abs(coeff_closed_form(r, r1, k0))
                assert lhs == coeff_closed_form(r, r1, k0, k0 + 1)
                assert coeff_3_16(r, r1, k0, corrected_sign=True).passed
                # the printed sign is right exactly when r1 and k0+1 have the same parity
                assert coeff_3_16(r, r1, k0).passed == ((r1 - k0 - 1) % 2 == 0)


def test_coeff_alternating_sum_against_sympy():
    for r, r1, k0 in [(4, 2, 0), (5, 3, 1), (6, 4, 2), (8, 5, 0)]:
        k = sympy.Symbol("k", integer=True)
        expr = sympy.Sum(
            (-1) ** (r1 - k) * sympy.binomial(r + r1 - k0, k + 1) * sympy.binomial(r + r1 - k0 - k - 1, r1 - k)
            * sympy.binomial(k0 + 1, r1 - k) / sympy.binomial(r1, k),
            (k, r1 - k0 - 1, r1),
        ).doit()
        got = coeff_alternating_sum(r, r1, k0)
        assert sympy.Rational(got.numerator, got.denominator) == expr


def test_sl2_examples():
    assert sl2_string_check(5, 0).lhs == 0
    assert sl2_string_check(7, 7).lhs == 7
    rep = sl2_string_check(4, 2)
    assert rep.lhs == 6 and rep.passed


def test_sl2_sweep():
    for r in range(11):
        for k in range(r + 1):
            assert sl2_string_check(r, k).passed


def test_paper_domain_sweep_passes():
    rep = identity_sweep(paper_domain=True)
    assert rep["status"] == "pass"


def test_literal_sweep_failure_counts():
    summary = identity_sweep()["summary"]
    assert summary["beta_sum"]["failures"] == 0
    assert summary["sl2_string"]["failures"] == 0
    assert summary["vandermonde"]["failures"] == 210
    assert summary["coeff_3_16"]["failures"] == 34


def test_report_json_uses_p_over_q():
    assert beta_sum(2, 1).tojson()["lhs"] == "1/3"
