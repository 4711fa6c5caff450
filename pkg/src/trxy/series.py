"""Truncated formal power/Laurent series over exact rationals.

Two series types cover every computation in the package:

* ``Series1`` -- univariate Laurent series with an explicit truncation window.
  Every operation tracks how far the result is reliable, so a residue read off
  a ``Series1`` is exact or the access fails loudly.
* ``MultiSeries`` -- sparse multivariate power series with per-variable degree
  caps, used by the duality evaluators (variables hbar, u_i, w_i).

``RationalFunction1`` is the exact univariate rational-function type feeding
local expansions, and ``Jet`` is the canonical comparison form: a truncated
Taylor expansion at rational base points.  Truncation is explicit state;
operations meet the operand windows and never silently extend them.
"""

from __future__ import annotations

import json
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .rationals import ONE, ZERO, Rat, factorial, rat, rat_from_str, rat_to_str

__all__ = [
    "TruncationError",
    "PoleCollisionError",
    "Series1",
    "MultiSeries",
    "RationalFunction1",
    "Jet",
    "jet_expand",
]


class TruncationError(ArithmeticError):
    """A coefficient was requested beyond the reliable window of a series."""


class PoleCollisionError(ZeroDivisionError):
    """A jet base point hit a pole; carries the offending variable name."""

    def __init__(self, variable: str, point) -> None:
        super().__init__(f"base point {rat_to_str(point)} of variable {variable!r} hits a pole")
        self.variable = variable
        self.point = point


# ---------------------------------------------------------------------------
# univariate Laurent series
# ---------------------------------------------------------------------------


class Series1:
    """Sparse univariate Laurent series, reliable through degree ``order``.

    ``c`` maps degree -> nonzero Rat; degrees above ``order`` are unknown,
    absent degrees at or below it are exactly zero.
    """

    __slots__ = ("c", "order")

    def __init__(self, coeffs: Dict[int, Rat], order: int) -> None:
        self.c = {d: v for d, v in coeffs.items() if v != 0 and d <= order}
        self.order = order

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(order: int) -> "Series1":
        return Series1({}, order)

    @staticmethod
    def one(order: int) -> "Series1":
        return Series1({0: ONE}, order)

    @staticmethod
    def t(order: int) -> "Series1":
        return Series1({1: ONE}, order)

    @staticmethod
    def monomial(coeff, deg: int, order: int) -> "Series1":
        return Series1({deg: Rat(coeff)}, order)

    @staticmethod
    def from_list(coeffs: Sequence, order: Optional[int] = None) -> "Series1":
        if order is None:
            order = len(coeffs) - 1
        return Series1({i: Rat(v) for i, v in enumerate(coeffs)}, order)

    # -- inspection ----------------------------------------------------------

    def __getitem__(self, deg: int) -> Rat:
        if deg > self.order:
            raise TruncationError(f"degree {deg} beyond window (order {self.order})")
        return self.c.get(deg, ZERO)

    def is_zero(self) -> bool:
        return not self.c

    def valuation_lower_bound(self) -> int:
        """min degree of a stored term; order+1 if zero through the window."""
        return min(self.c) if self.c else self.order + 1

    def valuation(self) -> int:
        """Exact valuation; fails if the series is zero through its window."""
        if not self.c:
            raise TruncationError("valuation of a series that vanishes through its window")
        return min(self.c)

    def residue(self) -> Rat:
        """Coefficient of degree -1 (zero if absent, which is exact)."""
        return self[-1] if self.order >= -1 else self.c.get(-1, ZERO)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series1):
            return NotImplemented
        o = min(self.order, other.order)
        return {d: v for d, v in self.c.items() if d <= o} == {
            d: v for d, v in other.c.items() if d <= o
        }

    def __hash__(self):  # pragma: no cover
        return hash((self.order, tuple(sorted(self.c.items()))))

    def __repr__(self) -> str:
        terms = " + ".join(f"({rat_to_str(v)})t^{d}" for d, v in sorted(self.c.items()))
        return f"Series1({terms or '0'} + O(t^{self.order + 1}))"

    # -- ring operations -----------------------------------------------------

    def truncate(self, order: int) -> "Series1":
        if order >= self.order:
            return self
        return Series1({d: v for d, v in self.c.items() if d <= order}, order)

    def __neg__(self) -> "Series1":
        return Series1({d: -v for d, v in self.c.items()}, self.order)

    def __add__(self, other: "Series1") -> "Series1":
        order = min(self.order, other.order)
        c = {d: v for d, v in self.c.items() if d <= order}
        for d, v in other.c.items():
            if d <= order:
                nv = c.get(d, ZERO) + v
                if nv == 0:
                    c.pop(d, None)
                else:
                    c[d] = nv
        return Series1(c, order)

    def __sub__(self, other: "Series1") -> "Series1":
        return self + (-other)

    def scale(self, k) -> "Series1":
        k = Rat(k)
        if k == 0:
            return Series1.zero(self.order)
        return Series1({d: k * v for d, v in self.c.items()}, self.order)

    def shift(self, n: int) -> "Series1":
        """Multiply by t^n."""
        return Series1({d + n: v for d, v in self.c.items()}, self.order + n)

    def __mul__(self, other: "Series1") -> "Series1":
        va, vb = self.valuation_lower_bound(), other.valuation_lower_bound()
        order = min(self.order + vb, other.order + va)
        c: Dict[int, Rat] = {}
        for d1, v1 in self.c.items():
            for d2, v2 in other.c.items():
                d = d1 + d2
                if d > order:
                    continue
                nv = c.get(d, ZERO) + v1 * v2
                if nv == 0:
                    c.pop(d, None)
                else:
                    c[d] = nv
        return Series1(c, order)

    def inverse(self) -> "Series1":
        """1/self; the valuation coefficient must be exactly known and nonzero."""
        v = self.valuation()
        lead = self.c[v]
        # self = lead * t^v * (1 + f), f with positive valuation
        fwin = self.order - v
        f = {d - v: val / lead for d, val in self.c.items() if d != v}
        inv: Dict[int, Rat] = {0: ONE}
        for m in range(1, fwin + 1):
            acc = ZERO
            for k, fk in f.items():
                if 0 < k <= m:
                    acc += fk * inv.get(m - k, ZERO)
            if acc != 0:
                inv[m] = -acc
        c = {d - v: val / lead for d, val in inv.items()}
        return Series1(c, fwin - v)

    def __truediv__(self, other: "Series1") -> "Series1":
        return self * other.inverse()

    def pow(self, n: int) -> "Series1":
        if n < 0:
            return self.inverse().pow(-n)
        out = Series1.one(self.order + n * max(self.valuation_lower_bound(), 0))
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    # -- calculus ------------------------------------------------------------

    def derivative(self) -> "Series1":
        return Series1({d - 1: d * v for d, v in self.c.items() if d != 0}, self.order - 1)

    def integrate(self) -> "Series1":
        """Antiderivative with zero constant; rejects a t^{-1} term."""
        if self.c.get(-1, ZERO) != 0:
            raise ValueError("cannot integrate a series with a t^-1 term")
        return Series1({d + 1: v / (d + 1) for d, v in self.c.items()}, self.order + 1)

    def compose(self, inner: "Series1") -> "Series1":
        """self(inner(t)); requires valuation(inner) >= 1."""
        gv = inner.valuation_lower_bound()
        if gv < 1:
            raise ValueError("composition requires inner valuation >= 1")
        if self.c and min(self.c) < 0:
            raise ValueError("composition of a Laurent series with negative degrees")
        order = min((self.order + 1) * gv - 1, inner.order)
        out = Series1.zero(order)
        powers = Series1.one(order)
        maxdeg = max(self.c) if self.c else 0
        for k in range(0, maxdeg + 1):
            v = self.c.get(k, ZERO)
            if v != 0:
                out = out + powers.scale(v)
            if k < maxdeg:
                powers = powers * inner
        return out

    def exp(self) -> "Series1":
        """exp of a series with zero constant term and valuation >= 1."""
        if self.valuation_lower_bound() < 1:
            raise ValueError("exp requires positive valuation (zero constant term)")
        order = self.order
        out = Series1.one(order)
        term = Series1.one(order)
        for k in range(1, order + 1):
            term = (term * self).scale(Rat(1, k))
            if term.is_zero():
                break
            out = out + term
        return out

    def log1p(self) -> "Series1":
        """log(1 + self) for self with positive valuation."""
        if self.valuation_lower_bound() < 1:
            raise ValueError("log1p requires positive valuation")
        order = self.order
        out = Series1.zero(order)
        term = Series1.one(order)
        for k in range(1, order + 1):
            term = term * self
            if term.is_zero():
                break
            out = out + term.scale(Rat((-1) ** (k + 1), k))
        return out

    def log(self) -> "Series1":
        """log of a series with constant term 1."""
        if self[0] != 1:
            raise ValueError("log requires constant term 1")
        return (self - Series1.one(self.order)).log1p()

    def sqrt(self) -> "Series1":
        """Square root of a series with constant term 1 (binomial series)."""
        if self[0] != 1:
            raise ValueError("sqrt requires constant term 1")
        f = self - Series1.one(self.order)
        out = Series1.one(self.order)
        term = Series1.one(self.order)
        coeff = ONE
        for k in range(1, self.order + 1):
            term = term * f
            if term.is_zero():
                break
            coeff = coeff * (Rat(1, 2) - (k - 1)) / k
            out = out + term.scale(coeff)
        return out

    def reversion(self) -> "Series1":
        """Compositional inverse b with self(b(t)) = t through the window.

        Requires valuation exactly 1.
        """
        if self.valuation() != 1:
            raise ValueError("reversion requires valuation 1")
        a1 = self.c[1]
        order = self.order
        b: Dict[int, Rat] = {1: ONE / a1}
        for m in range(2, order + 1):
            partial = Series1(b, m)
            comp = self.truncate(m).compose(partial)
            err = comp.c.get(m, ZERO)
            if err != 0:
                b[m] = -err / a1
        return Series1(b, order)


# ---------------------------------------------------------------------------
# exact univariate rational functions
# ---------------------------------------------------------------------------

Poly = List[Rat]


def _poly_trim(p: Poly) -> Poly:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_add(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return _poly_trim([(a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO) for i in range(n)])


def _poly_mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _poly_trim(out)


def _poly_scale(a: Poly, k) -> Poly:
    k = Rat(k)
    return _poly_trim([k * x for x in a])


def _poly_deriv(a: Poly) -> Poly:
    return _poly_trim([i * a[i] for i in range(1, len(a))])


def _poly_eval(a: Poly, x) -> Rat:
    acc = ZERO
    for coeff in reversed(a):
        acc = acc * x + coeff
    return acc


def _poly_divmod(a: Poly, b: Poly) -> Tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [ZERO] * max(0, len(a) - len(b) + 1)
    r = list(a)
    while len(r) >= len(b) and r:
        f = r[-1] / b[-1]
        d = len(r) - len(b)
        q[d] = f
        for i, c in enumerate(b):
            r[i + d] -= f * c
        _poly_trim(r)
    return _poly_trim(q), r


def _poly_gcd(a: Poly, b: Poly) -> Poly:
    a, b = list(a), list(b)
    while b:
        a, b = b, _poly_divmod(a, b)[1]
    if a:
        lead = a[-1]
        a = [x / lead for x in a]
    return a


def _poly_series_at(a: Poly, p, order: int) -> Series1:
    """Taylor expansion of the polynomial at z = p + t (exact, finite)."""
    # Horner in (p + t) over truncated series.
    out = Series1.zero(order)
    t = Series1({0: Rat(p), 1: ONE}, order)
    for coeff in reversed(a):
        out = out * t + Series1.monomial(coeff, 0, order)
    return out


class RationalFunction1:
    """num(z)/den(z) with dense exact coefficient lists, den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: Iterable, den: Iterable = (1,)) -> None:
        n = _poly_trim([Rat(v) for v in num])
        d = _poly_trim([Rat(v) for v in den])
        if not d:
            raise ZeroDivisionError("zero denominator polynomial")
        if n and len(d) > 1:
            g = _poly_gcd(n, d)
            if len(g) > 1:
                n = _poly_divmod(n, g)[0]
                d = _poly_divmod(d, g)[0]
        lead = d[-1]
        if lead != 1:
            d = [x / lead for x in d]
            n = [x / lead for x in n]
        self.num: Poly = n
        self.den: Poly = d

    @staticmethod
    def const(v) -> "RationalFunction1":
        return RationalFunction1([Rat(v)])

    @staticmethod
    def z() -> "RationalFunction1":
        return RationalFunction1([0, 1])

    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction1):
            return NotImplemented
        return _poly_mul(self.num, other.den) == _poly_mul(other.num, self.den)

    def __hash__(self):  # pragma: no cover
        return hash((tuple(self.num), tuple(self.den)))

    def __add__(self, other: "RationalFunction1") -> "RationalFunction1":
        return RationalFunction1(
            _poly_add(_poly_mul(self.num, other.den), _poly_mul(other.num, self.den)),
            _poly_mul(self.den, other.den),
        )

    def __neg__(self) -> "RationalFunction1":
        return RationalFunction1(_poly_scale(self.num, -1), self.den)

    def __sub__(self, other: "RationalFunction1") -> "RationalFunction1":
        return self + (-other)

    def __mul__(self, other: "RationalFunction1") -> "RationalFunction1":
        return RationalFunction1(_poly_mul(self.num, other.num), _poly_mul(self.den, other.den))

    def __truediv__(self, other: "RationalFunction1") -> "RationalFunction1":
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction1(_poly_mul(self.num, other.den), _poly_mul(self.den, other.num))

    def scale(self, k) -> "RationalFunction1":
        return RationalFunction1(_poly_scale(self.num, k), self.den)

    def derivative(self) -> "RationalFunction1":
        return RationalFunction1(
            _poly_add(
                _poly_mul(_poly_deriv(self.num), self.den),
                _poly_scale(_poly_mul(self.num, _poly_deriv(self.den)), -1),
            ),
            _poly_mul(self.den, self.den),
        )

    def eval(self, p) -> Rat:
        p = Rat(p)
        d = _poly_eval(self.den, p)
        if d == 0:
            raise ZeroDivisionError(f"pole at {rat_to_str(p)}")
        return _poly_eval(self.num, p) / d

    def has_pole_at(self, p) -> bool:
        p = Rat(p)
        if _poly_eval(self.den, p) != 0:
            return False
        if self.is_zero():
            return False
        # common (z-p) factors are possible since gcds are never cancelled
        w = len(self.den) + len(self.num) + 1
        vnum = _poly_series_at(self.num, p, w).valuation_lower_bound()
        vden = _poly_series_at(self.den, p, w).valuation_lower_bound()
        return vnum < vden

    def series_at(self, p, order: int) -> Series1:
        """Laurent expansion in t = z - p, reliable through t^order."""
        p = Rat(p)
        vden_guess = len(self.den) + 2
        den_s = _poly_series_at(self.den, p, order + vden_guess)
        if den_s.is_zero():
            raise ZeroDivisionError("denominator identically zero in window")
        vd = den_s.valuation()
        num_s = _poly_series_at(self.num, p, order + vd)
        return num_s * den_s.inverse()

    def to_json(self) -> dict:
        return {
            "num": [rat_to_str(v) for v in self.num],
            "den": [rat_to_str(v) for v in self.den],
        }

    def __repr__(self) -> str:  # pragma: no cover
        return f"RationalFunction1({[rat_to_str(v) for v in self.num]}, {[rat_to_str(v) for v in self.den]})"


# ---------------------------------------------------------------------------
# sparse multivariate truncated power series
# ---------------------------------------------------------------------------


class MultiSeries:
    """Sparse multivariate power series with per-variable inclusive degree caps.

    Variables are a fixed ordered tuple of names.  Exponents are non-negative;
    the duality evaluators clear denominators (the 1/(hbar u) prefactors)
    before building these, so Laurent bookkeeping reduces to index shifts.
    """

    __slots__ = ("vars", "trunc", "c")

    def __init__(self, variables: Tuple[str, ...], trunc: Tuple[int, ...], coeffs=None) -> None:
        self.vars = variables
        self.trunc = trunc
        self.c: Dict[Tuple[int, ...], Rat] = {}
        if coeffs:
            for e, v in coeffs.items():
                if v != 0 and all(ei <= ti for ei, ti in zip(e, trunc)):
                    self.c[e] = v

    # -- constructors --------------------------------------------------------

    @classmethod
    def zeros(cls, variables, trunc) -> "MultiSeries":
        return cls(tuple(variables), tuple(trunc))

    @classmethod
    def const(cls, variables, trunc, v) -> "MultiSeries":
        out = cls(tuple(variables), tuple(trunc))
        v = Rat(v)
        if v != 0:
            out.c[(0,) * len(out.vars)] = v
        return out

    def clone_zero(self) -> "MultiSeries":
        return MultiSeries(self.vars, self.trunc)

    def monomial(self, v, **exps) -> "MultiSeries":
        """A single term v * prod var^e in this series' variable frame."""
        out = self.clone_zero()
        e = tuple(exps.get(name, 0) for name in self.vars)
        v = Rat(v)
        if v != 0 and all(ei <= ti for ei, ti in zip(e, self.trunc)):
            out.c[e] = v
        return out

    # -- inspection ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.c

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return self.vars == other.vars and self.c == other.c

    def __hash__(self):  # pragma: no cover
        return hash((self.vars, tuple(sorted(self.c.items()))))

    def coefficient(self, **exps) -> Rat:
        e = tuple(exps.get(name, 0) for name in self.vars)
        return self.c.get(e, ZERO)

    def __repr__(self) -> str:  # pragma: no cover
        parts = []
        for e, v in sorted(self.c.items()):
            mono = "*".join(f"{n}^{k}" for n, k in zip(self.vars, e) if k)
            parts.append(f"({rat_to_str(v)}){'*' + mono if mono else ''}")
        return f"MultiSeries[{','.join(self.vars)}]({' + '.join(parts) or '0'})"

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "MultiSeries") -> "MultiSeries":
        assert self.vars == other.vars
        out = MultiSeries(self.vars, tuple(min(a, b) for a, b in zip(self.trunc, other.trunc)))
        tr = out.trunc
        for src in (self.c, other.c):
            for e, v in src.items():
                if all(ei <= ti for ei, ti in zip(e, tr)):
                    nv = out.c.get(e, ZERO) + v
                    if nv == 0:
                        out.c.pop(e, None)
                    else:
                        out.c[e] = nv
        return out

    def __neg__(self) -> "MultiSeries":
        out = MultiSeries(self.vars, self.trunc)
        out.c = {e: -v for e, v in self.c.items()}
        return out

    def __sub__(self, other: "MultiSeries") -> "MultiSeries":
        return self + (-other)

    def scale(self, k) -> "MultiSeries":
        k = Rat(k)
        out = MultiSeries(self.vars, self.trunc)
        if k != 0:
            out.c = {e: k * v for e, v in self.c.items()}
        return out

    def __mul__(self, other: "MultiSeries") -> "MultiSeries":
        assert self.vars == other.vars
        tr = tuple(min(a, b) for a, b in zip(self.trunc, other.trunc))
        out = MultiSeries(self.vars, tr)
        if not self.c or not other.c:
            return out
        a, b = (self.c, other.c) if len(self.c) <= len(other.c) else (other.c, self.c)
        oc = out.c
        for e1, v1 in a.items():
            for e2, v2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                ok = True
                for ei, ti in zip(e, tr):
                    if ei > ti:
                        ok = False
                        break
                if not ok:
                    continue
                nv = oc.get(e, ZERO) + v1 * v2
                if nv == 0:
                    oc.pop(e, None)
                else:
                    oc[e] = nv
        return out

    def mul_monomial(self, v, **exps) -> "MultiSeries":
        v = Rat(v)
        out = MultiSeries(self.vars, self.trunc)
        if v == 0:
            return out
        shift = tuple(exps.get(name, 0) for name in self.vars)
        tr = self.trunc
        for e, coeff in self.c.items():
            ne = tuple(x + y for x, y in zip(e, shift))
            if all(ei <= ti for ei, ti in zip(ne, tr)):
                out.c[ne] = coeff * v
        return out

    def exp(self) -> "MultiSeries":
        """exp of a series with zero constant term (nilpotent within truncation)."""
        zero_exp = (0,) * len(self.vars)
        if zero_exp in self.c:
            raise ValueError("exp requires zero constant term")
        out = MultiSeries.const(self.vars, self.trunc, 1)
        term = MultiSeries.const(self.vars, self.trunc, 1)
        k = 0
        while True:
            k += 1
            term = (term * self).scale(Rat(1, k))
            if term.is_zero():
                break
            out = out + term
            if k > sum(self.trunc) + 1:  # safety: cannot happen with positive valuation
                raise TruncationError("exp did not terminate within truncation bounds")
        return out

    def log(self) -> "MultiSeries":
        """log of a series with constant term 1."""
        zero_exp = (0,) * len(self.vars)
        if self.c.get(zero_exp, ZERO) != 1:
            raise ValueError("log requires constant term 1")
        f = self - MultiSeries.const(self.vars, self.trunc, 1)
        out = f.clone_zero()
        term = MultiSeries.const(self.vars, self.trunc, 1)
        k = 0
        while True:
            k += 1
            term = term * f
            if term.is_zero():
                break
            out = out + term.scale(Rat((-1) ** (k + 1), k))
            if k > sum(self.trunc) + 1:
                raise TruncationError("log did not terminate within truncation bounds")
        return out

    def inverse(self) -> "MultiSeries":
        """1/self for nonzero constant term."""
        zero_exp = (0,) * len(self.vars)
        c0 = self.c.get(zero_exp, ZERO)
        if c0 == 0:
            raise ZeroDivisionError("inverse requires a nonzero constant term")
        f = (self - MultiSeries.const(self.vars, self.trunc, c0)).scale(ONE / c0)
        out = MultiSeries.const(self.vars, self.trunc, 1)
        term = MultiSeries.const(self.vars, self.trunc, 1)
        k = 0
        while True:
            k += 1
            term = term * f
            if term.is_zero():
                break
            out = out + term.scale(Rat((-1) ** k))
            if k > sum(self.trunc) + 1:
                raise TruncationError("inverse did not terminate within truncation bounds")
        return out.scale(ONE / c0)

    # -- per-variable structure ---------------------------------------------

    def _vi(self, name: str) -> int:
        return self.vars.index(name)

    def coeff_of(self, name: str, power: int) -> "MultiSeries":
        """Extract the coefficient of name^power (result no longer involves name)."""
        i = self._vi(name)
        out = MultiSeries(self.vars, self.trunc)
        for e, v in self.c.items():
            if e[i] == power:
                ne = e[:i] + (0,) + e[i + 1:]
                out.c[ne] = out.c.get(ne, ZERO) + v
        out.c = {e: v for e, v in out.c.items() if v != 0}
        return out

    def max_power(self, name: str) -> int:
        i = self._vi(name)
        return max((e[i] for e in self.c), default=0)

    def diff(self, name: str) -> "MultiSeries":
        i = self._vi(name)
        out = MultiSeries(self.vars, self.trunc)
        for e, v in self.c.items():
            if e[i] > 0:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                out.c[ne] = out.c.get(ne, ZERO) + e[i] * v
        out.c = {e: v for e, v in out.c.items() if v != 0}
        return out

    def truncate_var(self, name: str, order: int) -> "MultiSeries":
        i = self._vi(name)
        tr = list(self.trunc)
        tr[i] = min(tr[i], order)
        out = MultiSeries(self.vars, tuple(tr))
        out.c = {e: v for e, v in self.c.items() if e[i] <= order}
        return out

    def truncate_total(self, names: Sequence[str], order: int) -> "MultiSeries":
        idx = [self._vi(n) for n in names]
        out = MultiSeries(self.vars, self.trunc)
        out.c = {e: v for e, v in self.c.items() if sum(e[i] for i in idx) <= order}
        return out

    def inject_series1(self, name: str, s: Series1) -> "MultiSeries":
        """Multiply by a univariate Taylor series in ``name`` (non-negative degrees)."""
        i = self._vi(name)
        tr = self.trunc[i]
        if s.valuation_lower_bound() < 0:
            raise ValueError("inject_series1 requires a Taylor series")
        if s.order < tr:
            raise TruncationError(
                f"series window {s.order} too small for variable {name} truncated at {tr}"
            )
        out = MultiSeries(self.vars, self.trunc)
        for e, v in self.c.items():
            for d, sv in s.c.items():
                ne = e[:i] + (e[i] + d,) + e[i + 1:]
                if ne[i] > tr:
                    continue
                nv = out.c.get(ne, ZERO) + v * sv
                if nv == 0:
                    out.c.pop(ne, None)
                else:
                    out.c[ne] = nv
        return out

    def project(self, variables: Sequence[str]) -> "MultiSeries":
        """Restrict to a sub-frame; remaining variables must not occur."""
        keep = tuple(variables)
        idx = [self._vi(n) for n in keep]
        drop = [i for i in range(len(self.vars)) if self.vars[i] not in keep]
        out = MultiSeries(keep, tuple(self.trunc[i] for i in idx))
        for e, v in self.c.items():
            if any(e[i] for i in drop):
                raise ValueError("project: dropped variable still occurs")
            out.c[tuple(e[i] for i in idx)] = v
        return out


# ---------------------------------------------------------------------------
# jets (canonical comparison form)
# ---------------------------------------------------------------------------


class Jet:
    """Truncated Taylor expansion at rational base points.

    ``coeffs`` maps exponent vectors (over the declared variables, in order)
    to exact rationals, with total degree <= order.  Two mathematically equal
    expressions expanded at the same base points yield identical Jets, and a
    single differing coefficient certifies inequality.
    """

    __slots__ = ("variables", "base", "order", "coeffs")

    def __init__(self, variables: Sequence[str], base: Sequence, order: int, coeffs: Dict[Tuple[int, ...], Rat]) -> None:
        self.variables = tuple(variables)
        self.base = tuple(Rat(b) for b in base)
        self.order = order
        self.coeffs = {
            e: v for e, v in coeffs.items() if v != 0 and sum(e) <= order
        }

    @staticmethod
    def from_multiseries(ms: MultiSeries, variables: Sequence[str], base: Sequence, order: int) -> "Jet":
        sub = ms.project(tuple(variables))
        coeffs = {e: v for e, v in sub.c.items() if sum(e) <= order}
        return Jet(variables, base, order, coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, Jet):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.base == other.base
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def __hash__(self):  # pragma: no cover
        return hash((self.variables, self.base, self.order, tuple(sorted(self.coeffs.items()))))

    def value(self) -> Rat:
        return self.coeffs.get((0,) * len(self.variables), ZERO)

    def __sub__(self, other: "Jet") -> "Jet":
        assert self.variables == other.variables and self.base == other.base
        order = min(self.order, other.order)
        c = {e: v for e, v in self.coeffs.items() if sum(e) <= order}
        for e, v in other.coeffs.items():
            if sum(e) <= order:
                nv = c.get(e, ZERO) - v
                if nv == 0:
                    c.pop(e, None)
                else:
                    c[e] = nv
        return Jet(self.variables, self.base, order, c)

    def scale(self, k) -> "Jet":
        k = Rat(k)
        return Jet(self.variables, self.base, self.order, {e: k * v for e, v in self.coeffs.items()})

    def to_json(self) -> dict:
        return {
            "base": {n: rat_to_str(b) for n, b in zip(self.variables, self.base)},
            "order": self.order,
            "coeffs": [
                {"exp": list(e), "val": rat_to_str(v)}
                for e, v in sorted(self.coeffs.items())
            ],
        }

    @staticmethod
    def from_json(d: dict) -> "Jet":
        variables = tuple(d["base"].keys())
        base = [rat_from_str(v) for v in d["base"].values()]
        coeffs = {tuple(item["exp"]): rat_from_str(item["val"]) for item in d["coeffs"]}
        return Jet(variables, base, d["order"], coeffs)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self) -> str:  # pragma: no cover
        return f"Jet({self.to_json()})"


def jet_expand(factors: Dict[str, "RationalFunction1"], base: Dict[str, "Rat"], order: int) -> Jet:
    """Jet of a product of one-variable rational functions at rational points.

    ``factors`` maps variable name -> rational function of that variable; the
    result is deterministic and two equal products yield identical Jets.
    Base points on poles raise PoleCollisionError naming the variable.
    """
    names = sorted(base)
    pts = [Rat(base[v]) for v in names]
    series = []
    for v, p in zip(names, pts):
        f = factors.get(v)
        if f is None:
            series.append(Series1.one(order))
            continue
        try:
            s = f.series_at(p, order)
        except ZeroDivisionError:
            raise PoleCollisionError(v, p) from None
        if s.valuation_lower_bound() < 0:
            raise PoleCollisionError(v, p)
        series.append(s)
    coeffs: Dict[Tuple[int, ...], Rat] = {}

    def rec(i: int, exps: Tuple[int, ...], val: Rat, left: int) -> None:
        if val == 0:
            return
        if i == len(series):
            coeffs[exps] = coeffs.get(exps, ZERO) + val
            return
        for d, v in series[i].c.items():
            if 0 <= d <= left:
                rec(i + 1, exps + (d,), val * v, left - d)

    rec(0, (), Rat(1), order)
    return Jet(names, pts, order, coeffs)
