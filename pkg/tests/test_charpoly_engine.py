import pytest

from asdcong.charpoly_engine import (
    CharPoly,
    InconsistentTraceError,
    QuadFactor,
    charpoly_from_traces,
    charpoly_report,
    chi_m4,
    det_sign_candidates,
    expand_factors,
    newton_elementary,
    predicted_factorization,
    rho_charpolys,
    self_inversive,
    weil_check,
    wminus_charpoly,
)
from asdcong.exact_arith import I, SQRT_M2, NumberFieldElem


def P(*c, p):
    return CharPoly(tuple(c), p)


def test_newton():
    # (x - 2)(x - 3): s1 = 5, s2 = 13
    assert newton_elementary([5, 13]) == [1, 5, 6]
    with pytest.raises(InconsistentTraceError):
        newton_elementary([1, 2])


def test_from_traces_examples():
    assert charpoly_from_traces({1: 10}, 1, 169, 13) == P(1, -10, 169, p=13)
    assert charpoly_from_traces({1: 0}, 1, -9, 3) == P(1, 0, -9, p=3)
    rho4 = charpoly_from_traces({1: 10, 2: -362, 3: -4070}, 3, 13**6, 13)
    assert rho4.coeffs == (1, -10, 231, -620, 169 * 231, -(13**4) * 10, 13**6)
    assert rho4 == P(1, -10, 169, p=13) * P(1, 0, 62, 0, 13**4, p=13)


def test_from_traces_rejects_inconsistent_data():
    with pytest.raises(InconsistentTraceError):
        charpoly_from_traces({1: 10, 2: 0}, 1, 169, 13)
    with pytest.raises(ValueError):
        charpoly_from_traces({1: 10}, 1, 170, 13)
    with pytest.raises(ValueError):
        charpoly_from_traces({2: 10}, 1, 169, 13)


def test_exact_division():
    a = P(1, 0, -9, p=3)
    b = P(1, 0, -10, 0, 81, p=3)
    assert (a * b).exact_div(a) == b
    with pytest.raises(InconsistentTraceError):
        b.exact_div(P(1, 1, 9, p=3))


def test_weil_examples():
    assert weil_check(P(1, -10, 169, p=13))
    assert weil_check(P(1, 0, -9, p=3))
    assert weil_check(P(1, -26, 169, p=13))
    assert not weil_check(P(1, -30, 169, p=13))
    assert self_inversive(P(1, -10, 169, p=13))


@pytest.mark.parametrize(
    "p,rho2,rho4",
    [
        (3, [(1, 0, -9)], [(1, 0, -9), (1, 0, -10, 0, 81)]),
        (7, [(1, 0, -49)], [(1, 0, -49), (1, 0, 30, 0, 2401)]),
        (13, [(1, -10, 169)], [(1, -10, 169), (1, 0, 62, 0, 13**4)]),
        (17, [(1, 30, 289)], [(1, 30, 289), (1, -10, 289), (1, -10, 289)]),
    ],
)
def test_table_rows(p, rho2, rho4):
    def expand(factors):
        out = P(1, p=p)
        for f in factors:
            out = out * P(*f, p=p)
        return out

    r2, r4, _, _ = rho_charpolys(p)
    assert r2 == expand(rho2)
    assert r4 == expand(rho4)


def test_wminus_examples():
    assert wminus_charpoly(3) == P(1, 0, -10, 0, 81, p=3)
    assert wminus_charpoly(13) == P(1, 0, 62, 0, 28561, p=13)
    w17 = wminus_charpoly(17)
    assert w17 == P(1, -10, 289, p=17) * P(1, -10, 289, p=17)
    assert w17.sqrt() == P(1, -10, 289, p=17)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17, 19, 23, 29, 31])
def test_structural_corollaries(p):
    rho2, rho4, t2, t4 = rho_charpolys(p)
    w = wminus_charpoly(p, rho2, rho4)
    assert rho2.constant == chi_m4(p) * p**2
    assert rho4.constant == chi_m4(p) * p**6
    assert w.constant == p**4
    assert w.mod(2) == (1, 0, 0, 0, 1)
    if p % 4 == 3:
        assert rho2.is_even() and rho4.is_even()
    assert det_sign_candidates(t2, 1, p) == [chi_m4(p)]


def test_predicted_factorizations():
    f3 = predicted_factorization(3, SQRT_M2 * 2)
    assert {f.b for f in f3} == {SQRT_M2 * 2, SQRT_M2 * -2}
    assert expand_factors(f3, 3) == P(1, 0, -10, 0, 81, p=3)
    f13 = predicted_factorization(13, I * -20)
    assert {f.b for f in f13} == {I * 20, I * -20}
    assert all(f.c == -169 for f in f13)
    assert expand_factors(f13, 13) == P(1, 0, 62, 0, 28561, p=13)
    f17 = predicted_factorization(17, NumberFieldElem(10))
    assert expand_factors(f17, 17) == P(1, -10, 289, p=17) * P(1, -10, 289, p=17)
    f5 = predicted_factorization(5, I * -4)
    assert expand_factors(f5, 5) == P(1, 0, -34, 0, 625, p=5)
    f11 = predicted_factorization(11, SQRT_M2 * -10)
    assert expand_factors(f11, 11) == P(1, 0, -42, 0, 14641, p=11)


def test_quad_factor_shape():
    QuadFactor(I * 20, NumberFieldElem(-169)).check_shape(13)
    with pytest.raises(ValueError):
        QuadFactor(I + 1, NumberFieldElem(-169)).check_shape(13)
    with pytest.raises(ValueError):
        QuadFactor(I, NumberFieldElem(-168)).check_shape(13)


def test_report_checks_all_true():
    rec = charpoly_report(13, I * -20)
    assert rec["rho2"] == [1, -10, 169]
    assert all(rec["checks"].values())
