import cmath
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twistlab.cyclotomic import (
    CyclotomicNumber,
    NoCanonicalRoot,
    as_root_exponent,
    cyclotomic_polynomial,
    mth_root_in_mu,
    parse_cyclotomic,
    root_of_unity,
    root_order,
    totient,
)

conductors = st.sampled_from([1, 2, 3, 4, 5, 8, 9, 12, 15])


@st.composite
def cyc(draw, n=None):
    n = n or draw(conductors)
    seq = draw(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=6), min_size=n, max_size=n))
    return CyclotomicNumber.from_power_sum(n, seq), seq


def numeric(n, seq):
    """Floating-point value of sum seq[k] exp(2 pi i k / n), an independent oracle."""
    return sum(float(c) * cmath.exp(2j * cmath.pi * k / n) for k, c in enumerate(seq))


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(5) == (1, 1, 1, 1, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)
    assert [totient(n) for n in (1, 2, 9, 12, 15)] == [1, 1, 6, 4, 8]


@given(st.data())
def test_power_basis_matches_numeric_value(data):
    n = data.draw(conductors)
    x, sx = data.draw(cyc(n))
    y, sy = data.draw(cyc(n))
    assert abs(complex(x) - numeric(n, sx)) < 1e-9
    assert abs(complex(x + y) - (numeric(n, sx) + numeric(n, sy))) < 1e-9
    assert abs(complex(x * y) - numeric(n, sx) * numeric(n, sy)) < 1e-7


@given(st.data())
def test_field_axioms(data):
    n = data.draw(conductors)
    x, _ = data.draw(cyc(n))
    y, _ = data.draw(cyc(n))
    z, _ = data.draw(cyc(n))
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert x - x == CyclotomicNumber(n)
    if not x.is_zero():
        assert x * x.inverse() == 1


@given(st.integers(1, 12), st.integers(-30, 30), st.integers(-30, 30))
def test_roots_multiply_by_adding_exponents(n, a, b):
    assert root_of_unity(n, a) * root_of_unity(n, b) == root_of_unity(n, a + b)
    assert as_root_exponent(root_of_unity(n, a), n) == a % n


def test_lift_preserves_value():
    z = root_of_unity(3, 1) + Fraction(1, 2)
    w = z.lift(12)
    assert w.conductor == 12 and abs(complex(w) - complex(z)) < 1e-12
    assert w == z
    with pytest.raises(ValueError):
        z.lift(10)


def test_serialize_round_trip():
    z = root_of_unity(5, 2) * Fraction(3, 7) - 1
    assert parse_cyclotomic(z.serialize()) == z
    with pytest.raises(ValueError):
        parse_cyclotomic("cyc(5)[1,2]")


def test_root_order_and_mth_root():
    eps = root_of_unity(5, 1)
    assert root_order(eps) == 5
    assert root_order(-root_of_unity(5, 1)) == 10
    assert root_order(CyclotomicNumber.from_int(2)) is None
    eta = mth_root_in_mu(eps, 3)
    assert eta ** 3 == eps and as_root_exponent(eta, 5) == 2
    with pytest.raises(NoCanonicalRoot):
        mth_root_in_mu(root_of_unity(3, 1), 3)


@given(st.sampled_from([5, 7, 11, 25]), st.integers(1, 24), st.sampled_from([2, 3, 4]))
def test_mth_root_is_unique_in_mu(d, k, m):
    z = root_of_unity(d, k)
    order = root_order(z)
    if order is None or order % m == 0 or any(order % p == 0 and m % p == 0 for p in (2, 3)):
        return
    r = mth_root_in_mu(z, m)
    assert r ** m == z
    # brute force: exactly one m-th root of z among the order-th roots of unity
    roots = [root_of_unity(order, j) for j in range(order) if root_of_unity(order, j) ** m == z]
    assert roots == [r]
