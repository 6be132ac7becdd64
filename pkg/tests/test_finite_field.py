import numpy as np
import pytest
from hypothesis import given, strategies as st

from asdcong.finite_field import (
    MAX_DEGREE,
    closed_point_reps,
    count_exact_degree,
    element_degree,
    is_prime,
    make_field,
    mobius,
    quadratic_character,
)

SMALL_FIELDS = [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 2), (11, 2), (3, 5), (13, 2)]
PRIME_POWERS_729 = [(p, r) for p in range(3, 730) if is_prime(p) for r in range(1, 7) if p**r <= 729]


def test_moduli():
    assert make_field(3, 1).modulus == (0, 1)
    assert make_field(3, 2).modulus == (1, 0, 1)  # x^2 + 1
    assert make_field(5, 2).modulus == (2, 0, 1)  # x^2 + 2


def test_rejects_bad_parameters():
    for args in [(2, 1), (9, 1), (3, 0), (3, MAX_DEGREE + 1)]:
        with pytest.raises(ValueError):
            make_field(*args)


def test_character_examples():
    assert quadratic_character(make_field(3).from_int(-1)) == -1
    assert quadratic_character(make_field(3, 2).from_int(-1)) == 1
    assert quadratic_character(make_field(7).from_int(2)) == 1
    assert quadratic_character(make_field(7).zero()) == 0


def test_degree_examples():
    F9 = make_field(3, 2)
    assert element_degree(F9.from_int(2)) == 1
    assert element_degree(F9.generator) == 2
    assert element_degree(F9.zero()) == 1


@pytest.mark.parametrize("p,r", SMALL_FIELDS)
def test_log_tables_consistent(p, r):
    ctx = make_field(p, r)
    t = ctx.tables
    q = ctx.q
    assert sorted(t.exp.tolist()) == list(range(1, q))
    assert np.all(t.exp[t.log[1:]] == np.arange(1, q))
    g = ctx.generator
    for k in {1, q // 3, q - 2}:
        assert (g**k).encode() == t.exp[k]
    # zech[k] = log(1 + g^k)
    for k in range(0, q - 1, max(1, q // 50)):
        s = ctx.one() + ctx.element(int(t.exp[k]))
        assert t.zech[k] == (q - 1 if s.is_zero() else t.log[s.encode()])


@pytest.mark.parametrize("p,r", SMALL_FIELDS)
def test_generator_is_least_primitive(p, r):
    ctx = make_field(p, r)
    q = ctx.q
    g = ctx.generator
    assert quadratic_character(g) == -1
    for e in range(2, g.encode()):
        x = ctx.element(e)
        assert any(x ** ((q - 1) // l) == ctx.one() for l in {d for d in range(2, q) if (q - 1) % d == 0 and is_prime(d)})


field_and_pair = st.sampled_from(SMALL_FIELDS).flatmap(
    lambda pr: st.tuples(st.just(pr), st.integers(0, pr[0] ** pr[1] - 1), st.integers(0, pr[0] ** pr[1] - 1))
)


@given(field_and_pair)
def test_frobenius_is_a_ring_automorphism(data):
    (p, r), a, b = data
    ctx = make_field(p, r)
    x, y = ctx.element(a), ctx.element(b)
    assert (x + y).frobenius() == x.frobenius() + y.frobenius()
    assert (x * y).frobenius() == x.frobenius() * y.frobenius()
    z = x
    for _ in range(r):
        z = z.frobenius()
    assert z == x


@given(field_and_pair)
def test_character_multiplicative(data):
    (p, r), a, b = data
    ctx = make_field(p, r)
    x, y = ctx.element(a), ctx.element(b)
    assert quadratic_character(x * y) == quadratic_character(x) * quadratic_character(y)


@given(field_and_pair)
def test_field_inverse(data):
    (p, r), a, _ = data
    ctx = make_field(p, r)
    x = ctx.element(a)
    if not x.is_zero():
        assert x * x.inverse() == ctx.one()


@pytest.mark.parametrize("p,r", [(p, r) for p, r in PRIME_POWERS_729 if p**r <= 343 and (r > 1 or p < 60)])
def test_half_of_units_are_squares(p, r):
    ctx = make_field(p, r)
    chis = [quadratic_character(x) for x in ctx.elements()]
    assert chis.count(1) == (ctx.q - 1) // 2
    assert chis.count(-1) == (ctx.q - 1) // 2


@pytest.mark.parametrize("p,r", [(p, r) for p, r in PRIME_POWERS_729 if r > 1 or p < 30])
def test_exact_degree_counts(p, r):
    ctx = make_field(p, r)
    counts = {}
    for x in ctx.elements():
        d = element_degree(x)
        counts[d] = counts.get(d, 0) + 1
    for d in range(1, r + 1):
        if r % d == 0:
            expected = sum(mobius(d // e) * p**e for e in range(1, d + 1) if d % e == 0)
            assert counts.get(d, 0) == expected == count_exact_degree(p, d)


@pytest.mark.parametrize("p,r", [(3, 1), (3, 2), (3, 4), (5, 3), (7, 2), (3, 6)])
def test_closed_point_representatives(p, r):
    ctx = make_field(p, r)
    reps = closed_point_reps(ctx)
    n_exact = count_exact_degree(p, r) - (1 if r == 1 else 0)  # zero is excluded
    assert len(reps) * r == n_exact
    for e in reps[:20]:
        x = ctx.element(int(e))
        orbit = [x]
        for _ in range(r - 1):
            orbit.append(orbit[-1].frobenius())
        assert min(y.encode() for y in orbit) == e
