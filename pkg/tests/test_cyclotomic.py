import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from centralam.cyclotomic import (
    E,
    Cyclotomic,
    cyclotomic_polynomial,
    euler_phi,
    magnitude,
    sqrt_enclosure,
)

CONDUCTORS = [1, 2, 3, 4, 5, 7, 8, 9, 12, 15]


@st.composite
def elements(draw, n=None):
    n = n if n is not None else draw(st.sampled_from(CONDUCTORS))
    terms = draw(st.lists(st.tuples(st.integers(0, max(n - 1, 0)), st.integers(-6, 6)), max_size=5))
    den = draw(st.integers(1, 4))
    z = Cyclotomic.rational(0) if n == 1 else Cyclotomic.from_exponents(n, {})
    for e, c in terms:
        z = z + Cyclotomic.zeta(n, e) * Fraction(c, den)
    return z


def approx(z) -> complex:
    return complex(z)


def test_phi_degrees():
    for n in range(1, 40):
        brute = sum(1 for a in range(1, n + 1) if math.gcd(a, n) == 1)
        assert euler_phi(n) == brute
        assert len(cyclotomic_polynomial(n)) - 1 == brute


def test_cyclotomic_polynomial_vanishes_at_root():
    for n in range(1, 25):
        w = cmath.exp(2j * math.pi / n)
        val = sum(c * w**i for i, c in enumerate(cyclotomic_polynomial(n)))
        assert abs(val) < 1e-9


def test_small_identities():
    assert E(4) * E(4) == -1
    assert E(3) + E(3) ** 2 == -1
    assert E(8) ** 2 == E(4)
    assert E(6) == -(E(3) ** 2)
    # sqrt(-3) = 2 E(3) + 1
    s = 2 * E(3) + 1
    assert s * s == -3
    assert E(5).conj() == E(5) ** 4


def test_equality_across_conductors():
    assert E(3).lift(12) == E(3)
    assert hash(E(3).lift(12)) == hash(E(3))
    assert Cyclotomic.zeta(12, 4) == E(3)
    assert E(4) != E(3)
    assert Cyclotomic.rational(Fraction(2, 3)) == Fraction(2, 3)
    assert E(4) != 1


@given(elements(), elements())
def test_ring_ops_match_complex(a, b):
    assert abs(approx(a + b) - (approx(a) + approx(b))) < 1e-9
    assert abs(approx(a * b) - approx(a) * approx(b)) < 1e-8
    assert abs(approx(a - b) - (approx(a) - approx(b))) < 1e-9


@given(elements(n=12), elements(n=12), elements(n=12))
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if not a.is_zero():
        assert a * a.inverse() == 1
        assert (b / a) * a == b


@given(elements(n=15), elements(n=15), st.sampled_from([2, 4, 7, 8, 11, 13, 14]))
def test_galois_is_a_ring_homomorphism(a, b, u):
    assert (a * b).galois(u) == a.galois(u) * b.galois(u)
    assert (a + b).galois(u) == a.galois(u) + b.galois(u)
    assert a.galois(14) == a.conj()


@given(elements())
def test_norm_is_rational_real_and_nonnegative(a):
    w = a * a.conj()
    assert w.galois(-1 % a.conductor if a.conductor > 1 else 1) == w
    assert w.normalized_trace() >= 0


@given(elements())
def test_magnitude_encloses_float(a):
    m = magnitude(a, 20)
    f = abs(approx(a))
    assert float(m.lo) - 1e-9 <= f <= float(m.hi) + 1e-9
    if m.exact is not None:
        assert m.lo == m.hi == m.exact
    else:
        assert m.hi - m.lo <= Fraction(1, 10**20) * m.hi


def test_magnitude_exact_cases():
    assert magnitude(E(7)).exact == 1
    assert magnitude(3 * E(5) ** 2).exact == 3
    # |1 + i| = sqrt 2 is irrational
    m = magnitude(1 + E(4))
    assert m.exact is None
    assert m.lo * m.lo <= 2 <= m.hi * m.hi
    # |2 E(3) + 1| = sqrt 3
    m = magnitude(2 * E(3) + 1)
    assert m.exact is None and m.lo * m.lo <= 3 <= m.hi * m.hi


def test_sqrt_enclosure_tight():
    lo, hi = sqrt_enclosure(Fraction(2), 40)
    assert lo * lo <= 2 <= hi * hi
    assert hi - lo <= Fraction(1, 10**40) * hi
    with pytest.raises(ValueError):
        sqrt_enclosure(Fraction(-1))


@given(elements())
def test_json_round_trip(a):
    assert Cyclotomic.from_json(a.to_json()) == a


def test_rational_detection():
    assert (E(5) + E(5) ** 4 + E(5) ** 2 + E(5) ** 3).as_rational() == -1
    assert E(5).as_rational() is None
    assert (E(4) * Fraction(1, 2)).is_algebraic_integer() is False
    assert (E(8) + E(8) ** 3).is_algebraic_integer()


def test_galois_rejects_noncoprime():
    with pytest.raises(ValueError):
        E(6).galois(2)
