"""Arbitrary-precision rational arithmetic and the special sequences used everywhere.

The coefficient domain of the whole package is Q, nothing else.  ``Rat`` is
``gmpy2.mpq`` when gmpy2 is importable (an order of magnitude faster on the
series-heavy workloads) and ``fractions.Fraction`` otherwise; both normalise
gcd(num, den) = 1 with den > 0 after every operation.
"""

from __future__ import annotations

import threading
from typing import List, Union

try:
    from gmpy2 import mpq as Rat  # type: ignore
    _BACKEND = "gmpy2"
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as Rat  # type: ignore
    _BACKEND = "fractions"

__all__ = [
    "Rat",
    "RatLike",
    "rat",
    "rat_from_str",
    "rat_to_str",
    "ZERO",
    "ONE",
    "factorial",
    "binomial",
    "double_factorial_odd",
    "r_factorial",
    "bernoulli_numbers",
    "bernoulli_half",
    "s_coefficients",
    "s_coefficient",
]

RatLike = Union[int, str, "Rat"]

ZERO = Rat(0)
ONE = Rat(1)


def rat(p: RatLike, q: int = 1) -> Rat:
    """Build an exact rational; accepts ints, "p/q" strings and Rat values."""
    if isinstance(p, str):
        r = rat_from_str(p)
        return r / q if q != 1 else r
    return Rat(p, q) if q != 1 else Rat(p)


def rat_from_str(s: str) -> Rat:
    s = s.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return Rat(int(num), int(den))
    return Rat(int(s))


def rat_to_str(r) -> str:
    """Serialise as "p/q", or "p" when the denominator is 1 (JSON convention)."""
    num, den = r.numerator, r.denominator
    return f"{num}/{den}" if den != 1 else f"{num}"


_lock = threading.RLock()

_factorials: List[int] = [1]


def factorial(n: int) -> int:
    if n < 0:
        raise ValueError("factorial of negative integer")
    if n >= len(_factorials):
        with _lock:
            while len(_factorials) <= n:
                _factorials.append(_factorials[-1] * len(_factorials))
    return _factorials[n]


def binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return factorial(n) // (factorial(k) * factorial(n - k))


def r_factorial(m: int, r: int) -> Rat:
    """The r-step factorial m!_(r): m * (m-r)!_(r) with m!_(r) = m for 0 < m <= r.

    r = 2 reproduces the double factorial (2k+1)!! used for psi-class weights.
    """
    if m <= 0:
        raise ValueError(f"r_factorial requires m > 0, got m={m}")
    if r <= 0:
        raise ValueError(f"r_factorial requires r > 0, got r={r}")
    out = 1
    while m > r:
        out *= m
        m -= r
    return Rat(out * m)


def double_factorial_odd(k: int) -> Rat:
    """(2k+1)!! as a Rat, k >= 0."""
    return r_factorial(2 * k + 1, 2)


_bernoulli: List[Rat] = []


def bernoulli_numbers(n: int) -> List[Rat]:
    """Bernoulli numbers B_0..B_n (B_1 = -1/2), matching t/(e^t - 1).

    Computed by the triangular Akiyama-Tanigawa recurrence, then sign-adjusted
    at B_1; the table is extended lazily and shared process-wide.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    with _lock:
        if len(_bernoulli) <= n:
            m = n + 8
            a = [ZERO] * (m + 1)
            out: List[Rat] = []
            for i in range(m + 1):
                a[i] = Rat(1, i + 1)
                for j in range(i, 0, -1):
                    a[j - 1] = j * (a[j - 1] - a[j])
                out.append(a[0])
            # Akiyama-Tanigawa yields B_1 = +1/2; the generating function
            # t/(e^t - 1) has B_1 = -1/2.
            out[1] = -out[1]
            _bernoulli.clear()
            _bernoulli.extend(out)
    return _bernoulli[: n + 1]


_s_coeffs: List[Rat] = []
_half_coeffs: List[Rat] = []


def s_coefficients(order: int) -> List[Rat]:
    """Taylor coefficients of S(t) = (e^{t/2} - e^{-t/2})/t through t^order.

    Odd coefficients vanish; [t^{2j}] S = 1 / (4^j (2j+1)!).
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    with _lock:
        while len(_s_coeffs) <= order:
            k = len(_s_coeffs)
            if k % 2:
                _s_coeffs.append(ZERO)
            else:
                j = k // 2
                _s_coeffs.append(Rat(1, (4**j) * factorial(2 * j + 1)))
    return _s_coeffs[: order + 1]


def s_coefficient(k: int) -> Rat:
    return s_coefficients(k)[k]


def bernoulli_half(g: int) -> Rat:
    """[t^{2g}] of 1/S(t) = t/(e^{t/2} - e^{-t/2}), i.e. B_{2g}(1/2)/(2g)!.

    These are the weights of the corrected dual one-point family and the
    asymptotic coefficients of the quantum dilogarithm.  Obtained by exact
    series inversion of S; memoized process-wide.
    """
    if g < 0:
        raise ValueError("g must be >= 0")
    with _lock:
        if len(_half_coeffs) <= g:
            n = g + 4
            s = [Rat(1, (4**j) * factorial(2 * j + 1)) for j in range(n + 1)]
            inv = [ONE] + [ZERO] * n
            for m in range(1, n + 1):
                acc = ZERO
                for k in range(1, m + 1):
                    acc += s[k] * inv[m - k]
                inv[m] = -acc
            _half_coeffs.clear()
            _half_coeffs.extend(inv)
    return _half_coeffs[g]
