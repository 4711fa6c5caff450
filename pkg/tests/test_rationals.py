from fractions import Fraction
from math import comb

import pytest

from trxy.rationals import (
    Rat,
    bernoulli_half,
    bernoulli_numbers,
    r_factorial,
    rat_from_str,
    rat_to_str,
    s_coefficients,
)


def akiyama_tanigawa(n):
    """Independent Bernoulli oracle (B_1 = -1/2 convention)."""
    a = [Fraction(0)] * (n + 1)
    out = []
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    out[1] = -out[1]
    return out


def bernoulli_poly_at_half(n, bern):
    """B_n(1/2) = sum C(n,k) B_k (1/2)^{n-k}, independent of the table."""
    return sum(Fraction(comb(n, k)) * Fraction(bern[k].numerator, bern[k].denominator) * Fraction(1, 2 ** (n - k)) for k in range(n + 1))


def test_bernoulli_half_examples():
    assert bernoulli_half(0) == 1
    assert bernoulli_half(1) == Rat(-1, 24)
    assert bernoulli_half(2) == Rat(7, 5760)


def test_bernoulli_half_matches_polynomial_identity():
    bern = akiyama_tanigawa(22)
    for g in range(0, 11):
        lhs = Fraction(int(bernoulli_half(g).numerator), int(bernoulli_half(g).denominator))
        fact = 1
        for i in range(1, 2 * g + 1):
            fact *= i
        assert lhs * fact == bernoulli_poly_at_half(2 * g, bern)


def test_s_coefficients():
    s = s_coefficients(6)
    assert s[0] == 1
    assert s[2] == Rat(1, 24)
    assert s[4] == Rat(1, 1920)
    assert all(s[k] == 0 for k in (1, 3, 5))


def test_s_inverse_convolution_is_delta():
    N = 8
    s = s_coefficients(2 * N)
    inv = [bernoulli_half(g) for g in range(N + 1)]
    for m in range(N + 1):
        acc = sum(s[2 * k] * inv[m - k] for k in range(m + 1))
        assert acc == (1 if m == 0 else 0)


def test_bernoulli_numbers():
    b = bernoulli_numbers(8)
    assert b[0] == 1 and b[1] == Rat(-1, 2) and b[2] == Rat(1, 6)
    assert b[3] == 0 and b[4] == Rat(-1, 30) and b[8] == Rat(-1, 30)


def test_r_factorial():
    assert r_factorial(3, 2) == 3
    assert r_factorial(7, 3) == 28
    assert r_factorial(5, 2) == 15
    with pytest.raises(ValueError):
        r_factorial(0, 2)
    with pytest.raises(ValueError):
        r_factorial(3, 0)


def test_exactness_two_route_addition():
    a, b, c, d = Rat(3, 7), Rat(5, 11), Rat(-2, 9), Rat(13, 4)
    direct = a / b + c / d
    common = (a * d + c * b) / (b * d)
    assert direct == common


def test_serialisation_roundtrip():
    for s in ["3/4", "-7/2", "5", "0", "-12"]:
        assert rat_to_str(rat_from_str(s)) == s
    assert rat_to_str(Rat(4, 2)) == "2"
