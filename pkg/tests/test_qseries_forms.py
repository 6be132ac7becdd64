"""q-series arithmetic, eta quotients, Eisenstein calibration and the h-basis."""

from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from asdcong.exact_arith import I, SQRT_M2, NumberFieldElem
from asdcong.qseries_forms import (
    CHI,
    CHI_BAR,
    TRIVIAL,
    PrecisionError,
    PuiseuxSeries,
    calibrate_E1_E2,
    eisenstein_E3,
    eta_power,
    eta_product,
    eta_quotient,
    eta_quotients,
    fprime,
    g2,
    h_basis,
    h_form,
    j_invariant,
    j_oracle,
    named_form,
    nth_root,
    series_arith,
    series_csv,
)
from asdcong.qseries_forms import ETA_EXPONENTS

S = PuiseuxSeries


def q(n=20):
    return S.monomial(1, 1, n)


def test_basic_products():
    one = S([1], 0, 20)
    assert (one + q()) * (one - q()) == S([1, 0, -1] + [0] * 17)
    a = S.monomial(1, F(1, 8), 10)
    b = S.monomial(1, F(3, 8), 10)
    assert (a * b).terms() == [(F(1, 2), 1)]
    geo = 1 / S([1, -1] + [0] * 8)
    assert geo.coeffs == [1] * 10
    assert series_arith(geo, S([1, -1] + [0] * 8), "mul") == S([1] + [0] * 9)


def test_precision_is_tracked():
    s = S([1, 2, 3], 0, 1)
    assert s.prec == 3
    with pytest.raises(PrecisionError):
        s.coefficient(3)
    t = S([1, 1], F(1, 2), F(1, 2))
    assert (s + t).prec == F(3, 2)
    assert (s * t).prec == F(3, 2)


def test_eta_examples():
    g = eta_power(4, 6, 20)
    assert [c for _, c in g.terms()] == [1, -6, 9, 10, -30]
    assert [e for e, _ in g.terms()] == [1, 5, 9, 13, 17]
    f3 = eta_quotient({1: 5, 4: 1}, 3)
    assert f3.terms()[:3] == [(F(3, 8), 1), (F(11, 8), -5), (F(19, 8), 5)]
    f1 = eta_quotient({2: 12, 1: -1, 4: -5}, 3)
    assert f1.terms()[:3] == [(F(1, 8), 1), (F(9, 8), 1), (F(17, 8), -10)]


def test_g2_traces():
    s = g2(18)
    assert s.coefficient(13) == 10
    assert s.coefficient(17) == -30


def test_fprime_leading_coefficients():
    s = fprime(2)
    assert s.coefficient(F(1, 8)) == 1
    assert s.coefficient(F(3, 8)) == SQRT_M2 * 2
    assert s.coefficient(F(5, 8)) == 4


@pytest.mark.parametrize("name", ["f1", "f3", "f5", "f7"])
def test_eta_quotients_two_routes(name):
    exps = ETA_EXPONENTS[name]
    assert eta_quotient(exps, 40) == eta_product(exps, 40)


def test_eta_quotients_are_integral():
    for s in eta_quotients(30).values():
        assert all(F(c).denominator == 1 for c in s.coeffs)


def test_eisenstein_examples():
    assert CHI(2) == I
    e = eisenstein_E3(TRIVIAL, CHI, 5)
    assert e.coefficient(1) == 1
    assert e.coefficient(2) == 1 + 4 * I
    assert eisenstein_E3(CHI, TRIVIAL, 5).coefficient(0) == 0
    assert CHI_BAR(2) == -I


def test_j_invariant():
    j = j_invariant(4)
    assert j.terms()[:4] == [(-1, 1), (0, 744), (1, 196884), (2, 21493760)]


def test_calibration():
    E1, E2 = calibrate_E1_E2()
    assert E1.coefficient(0) == 1
    assert E2.val == F(1, 5) and E2.leading_coefficient() == 1
    assert E1.coeffs[:6] == [1, -2, -6, 7, 26, -2]
    assert E2.coeffs[:6] == [1, -7, 19, -23, 1, 47]
    assert len(E1) >= 50
    assert j_oracle(E1, E2, 10).is_zero()


def test_oracle_detects_perturbation():
    E1, E2 = calibrate_E1_E2()
    bumped = E2 + S.monomial(1, F(2, 5), E2.prec)
    assert not j_oracle(E1, bumped, 10).is_zero()


def test_nth_root_examples():
    s = S([1, 2, 1] + [0] * 7)
    assert nth_root(s, 2) == S([1, 1] + [0] * 8)
    r = nth_root(S([0, 0, 1, 1] + [0] * 6), 2)
    assert r.val == 1
    assert r.coeffs[:3] == [1, F(1, 2), F(-1, 8)]
    with pytest.raises(ValueError):
        nth_root(S([2, 1]), 2)


@given(
    st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=5), min_size=1, max_size=14),
    st.integers(1, 5),
    st.sampled_from([1, F(1, 2), F(1, 5)]),
)
def test_nth_root_property(tail, n, step):
    s = S([1] + tail, 0, step)
    assert nth_root(s, n) ** n == s


@given(
    st.lists(st.integers(-20, 20), min_size=2, max_size=12),
    st.lists(st.integers(-20, 20), min_size=2, max_size=12),
)
def test_inverse_property(a, b):
    x = S([1] + a)
    y = S([3] + b)
    assert x * x.inverse() == S([1] + [0] * len(a))
    assert (x / y) * y == x.truncate(min(x.prec, y.prec))


def test_h_basis_leading_terms():
    h1, h2, h3 = h_basis(200)
    assert h1.terms()[0] == (F(1, 20), 1)
    assert h3.terms()[0] == (F(3, 20), 1)
    assert h2.terms()[0] == (F(1, 10), 1)
    assert h1.coefficient(F(5, 20)) == F(-13, 4)


def test_h_identities():
    h1, h2, h3 = h_basis(400)
    assert h1 * h3 == h2 * h2
    E1, E2 = calibrate_E1_E2()
    assert (h1 / h3) ** 2 == (E1 / E2).truncate(((h1 / h3) ** 2).prec)


@pytest.mark.parametrize("j", [1, 2, 3])
def test_h_denominators_and_support(j):
    h = h_form(j, 400)
    seq = h.indexed(20, 399)
    for n, c in enumerate(seq):
        c = F(c)
        if c:
            assert n % 4 == j
            d = c.denominator
            assert d & (d - 1) == 0


def test_named_forms_and_combinations():
    h1, h3 = named_form("h1", 80), named_form("h3", 80)
    assert named_form("h1+ih3", 80) == h1 + h3.scale(I)
    assert named_form("h1-h3", 80) == h1 - h3
    assert named_form("h2", 40) == h_form(2, 80).truncate(4)
    with pytest.raises(KeyError):
        named_form("h4", 10)


def test_series_csv():
    rows = series_csv(named_form("h1", 20), 20).splitlines()
    assert rows[0] == "numerator_index,M,coord0,coord1,coord2,coord3"
    assert rows[1] == "1,20,1,0,0,0"
    assert rows[2] == "5,20,-13/4,0,0,0"


def test_number_field_coefficients():
    s = S([NumberFieldElem(1), I], 0, 1)
    assert (s * s).coeffs == [1, 2 * I]
