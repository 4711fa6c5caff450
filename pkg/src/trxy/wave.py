"""Wave functions and order-by-order quantum-curve functional relations.

The log of a wave function is an hbar-Laurent series whose coefficients are
rational functions plus a rational multiple of one log symbol (log x, or
log(1+w) on the exponential chart).  Functional relations of the shift type

    log Psi(x + hbar) - log Psi(x) - log(rhs(x, hbar)) = const

close over this ring order by order, because only differences of the
dilogarithm/x log x primitives ever appear.  Constant terms (log 2 pi,
log hbar, i pi) are dropped throughout and the checks accordingly assert
that every residual coefficient is x-independent, i.e. has zero derivative.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .curves import SpectralCurve
from .rationals import ONE, ZERO, Rat, bernoulli_half, factorial, rat_to_str
from .series import RationalFunction1

__all__ = [
    "WaveFunctionSeries",
    "stirling_phi",
    "dilog_phi",
    "wave_function",
    "quantum_curve_check",
]


RF = RationalFunction1


def stirling_phi(g: int) -> RationalFunction1:
    """Phi_{g,1} of the factorial wave function for g >= 1.

    [hbar^{2g-1}] log Gamma(x/hbar + 1/2) = B_{2g}(1/2)/(2g(2g-1)) x^{1-2g},
    i.e. bernoulli_half(g) (2g-2)! x^{1-2g}.
    """
    if g < 1:
        raise ValueError("closed Stirling coefficients start at g = 1")
    c = bernoulli_half(g) * factorial(2 * g - 2)
    return RF([c], [0] * (2 * g - 1) + [1])


def dilog_phi(g: int) -> RationalFunction1:
    """Phi_{g,1} of the quantum-dilogarithm family for g >= 1, in w = e^x.

    The primitive is Phi_0 with d Phi_0/dx = log(1+w); applying the Bernoulli
    weights gives bernoulli_half(g) (w d/dw)^{2g-2} [w/(1+w)].
    """
    if g < 1:
        raise ValueError("closed dilogarithm coefficients start at g = 1")
    f = RF([0, 1], [1, 1])  # w/(1+w) = D^2 Phi_0
    w = RF([0, 1])
    for _ in range(2 * g - 2):
        f = w * f.derivative()
    return f.scale(bernoulli_half(g))


class WaveFunctionSeries:
    """log Psi as a truncated hbar-Laurent series of closed-form coefficients.

    ``phi``            -- map hbar power -> rational coefficient function;
    ``log_coeff``      -- map hbar power -> rational function multiplying the
                          chart's log symbol;
    ``primitive_note`` -- how the non-rational hbar^{-1} primitive reads.
    """

    __slots__ = ("curve_name", "chart", "gmax", "phi", "log_coeff", "primitive_note")

    def __init__(self, curve_name: str, chart: str, gmax: int) -> None:
        self.curve_name = curve_name
        self.chart = chart
        self.gmax = gmax
        self.phi: Dict[int, RationalFunction1] = {}
        self.log_coeff: Dict[int, RationalFunction1] = {}
        self.primitive_note = ""

    def coefficient(self, hpow: int) -> Tuple[RationalFunction1, RationalFunction1]:
        return (
            self.phi.get(hpow, RF.const(0)),
            self.log_coeff.get(hpow, RF.const(0)),
        )

    def to_json(self) -> dict:
        return {
            "curve": self.curve_name,
            "chart": self.chart,
            "gmax": self.gmax,
            "primitive": self.primitive_note,
            "coefficients": {
                str(k): {
                    "rational": self.phi[k].to_json() if k in self.phi else None,
                    "log": self.log_coeff[k].to_json() if k in self.log_coeff else None,
                }
                for k in sorted(set(self.phi) | set(self.log_coeff))
            },
        }


def wave_function(curve: SpectralCurve, g_max: int) -> WaveFunctionSeries:
    """Assemble log Psi for the presets with closed diagonal primitives.

    Integration constants are set to zero.  The (0,2) diagonal contributes
    -log x'(z)/2 per the regularised primitive; for the factorial curve it
    vanishes, for the quantum-dilogarithm curve it is the x/2 term (kept as
    primitive note since x = log w on that chart).
    """
    name = curve.name.split("*")[0]
    if name == "gamma":
        out = WaveFunctionSeries("gamma", "x", g_max)
        out.primitive_note = "hbar^-1: x log x - x (log Gamma(x/hbar + 1/2) plus x/hbar log hbar - log sqrt(2 pi))"
        out.phi[-1] = RF([0, -1])
        out.log_coeff[-1] = RF([0, 1])
        for g in range(1, g_max + 1):
            out.phi[2 * g - 1] = stirling_phi(g)
        return out
    if name == "lambert-exp":
        # dual-side wave function: exp(y^2/2hbar) sqrt(2pi) / (Gamma(y/hbar+1/2) hbar^{y/hbar})
        out = WaveFunctionSeries("lambert-exp", "y", g_max)
        out.primitive_note = "hbar^-1: y^2/2 - (y log y - y); (0,2) diagonal: -(1/2) log(1 - 1/y)"
        out.phi[-1] = RF([0, 1]) + RF([0, 0, Rat(1, 2)])
        out.log_coeff[-1] = RF([0, -1])
        out.phi[0] = RF.const(0)  # -(1/2)log(1-1/y) tracked in the note
        for g in range(1, g_max + 1):
            out.phi[2 * g - 1] = stirling_phi(g).scale(-1)
        return out
    if name == "dilog":
        out = WaveFunctionSeries("dilog", "w", g_max)
        out.primitive_note = "hbar^-1: -Li2(-e^x); hbar^0: x/2 from the (0,2) diagonal; constants dropped"
        for g in range(1, g_max + 1):
            out.phi[2 * g - 1] = dilog_phi(g)
        return out
    raise ValueError(f"no closed diagonal primitives for curve {curve.name!r}")


# ---------------------------------------------------------------------------
# hbar series with rational-function coefficients
# ---------------------------------------------------------------------------


class _HSeries:
    """Polynomial in hbar with RationalFunction1 coefficients."""

    __slots__ = ("c", "order")

    def __init__(self, order: int, coeffs: Optional[Dict[int, RationalFunction1]] = None) -> None:
        self.order = order
        self.c: Dict[int, RationalFunction1] = {}
        if coeffs:
            for k, v in coeffs.items():
                if k <= order and not v.is_zero():
                    self.c[k] = v

    @staticmethod
    def zero(order: int) -> "_HSeries":
        return _HSeries(order)

    def __add__(self, other: "_HSeries") -> "_HSeries":
        order = min(self.order, other.order)
        out = _HSeries(order)
        for src in (self.c, other.c):
            for k, v in src.items():
                if k <= order:
                    cur = out.c.get(k)
                    nv = v if cur is None else cur + v
                    if nv.is_zero():
                        out.c.pop(k, None)
                    else:
                        out.c[k] = nv
        return out

    def __sub__(self, other: "_HSeries") -> "_HSeries":
        return self + other.scale(-1)

    def scale(self, k) -> "_HSeries":
        out = _HSeries(self.order)
        if Rat(k) != 0:
            out.c = {p: v.scale(k) for p, v in self.c.items()}
        return out

    def __mul__(self, other: "_HSeries") -> "_HSeries":
        order = min(self.order, other.order)
        out = _HSeries(order)
        for k1, v1 in self.c.items():
            for k2, v2 in other.c.items():
                k = k1 + k2
                if k > order:
                    continue
                cur = out.c.get(k)
                nv = v1 * v2 if cur is None else cur + v1 * v2
                if nv.is_zero():
                    out.c.pop(k, None)
                else:
                    out.c[k] = nv
        return out

    def log1p(self) -> "_HSeries":
        """log(1 + self) for a series with zero hbar-constant term."""
        if 0 in self.c:
            raise ValueError("log1p needs vanishing constant term")
        out = _HSeries.zero(self.order)
        term = _HSeries(self.order, {0: RF.const(1)})
        for k in range(1, self.order + 1):
            term = term * self
            if not term.c:
                break
            out = out + term.scale(Rat((-1) ** (k + 1), k))
        return out


def _apply_d(f: RationalFunction1, mode: str) -> RationalFunction1:
    """The chart derivation: d/dx, realised as w d/dw on the exponential chart."""
    return f.derivative() if mode == "additive" else RF([0, 1]) * f.derivative()


def _taylor_shift(f: RationalFunction1, rate: Rat, order: int, mode: str) -> _HSeries:
    """f(x + rate*hbar) as an hbar series: sum_k (rate h)^k D^k f / k!.

    On the exponential chart x = log w the same identity reads f(w e^{rate h})
    with D = w d/dw.
    """
    out = _HSeries(order)
    der = f
    p = ONE
    for k in range(order + 1):
        if not der.is_zero():
            out.c[k] = der.scale(p / factorial(k))
        der = _apply_d(der, mode)
        p = p * rate
    out.c = {k: v for k, v in out.c.items() if not v.is_zero()}
    return out


def _difference_of_primitive(order: int, d2: RationalFunction1, rate: Rat, mode: str) -> Tuple[_HSeries, Rat]:
    """(Phi_0(shifted) - Phi_0) where D Phi_0 = log symbol, D^2 Phi_0 = d2.

    Returns the rational part as an hbar series together with the constant
    log-symbol coefficient (the k = 1 term contributes rate * hbar * L ...;
    in the shift relations only the full-shift rate 1 appears at hbar^1).
    """
    out = _HSeries.zero(order)
    # k = 1 term: rate * hbar * D Phi_0 = rate * hbar * L  (log part returned)
    der = d2
    fact = 2
    if mode == "additive":
        for k in range(2, order + 1):
            out.c[k] = der.scale(Rat(rate**k) / fact)
            der = der.derivative()
            fact *= k + 1
    else:
        w = RF([0, 1])
        # D = w d/dw; D^k Phi_0 for k >= 2 from d2 by repeated D
        ders = [d2]
        for _ in range(order):
            ders.append(w * ders[-1].derivative())
        # Phi_0(w e^{rh}) - Phi_0(w) = sum_{k>=1} (r h)^k / k! D^k Phi_0
        for k in range(2, order + 1):
            out.c[k] = ders[k - 2].scale(Rat(rate**k) / factorial(k))
    out.c = {k: v for k, v in out.c.items() if not v.is_zero()}
    return out, Rat(rate)


def quantum_curve_check(curve: SpectralCurve, order: int) -> Dict[str, object]:
    """Verify the shift functional relation order by order in hbar.

    Returns a report with per-order residual derivatives (all must vanish;
    residuals are x-independent constants by design since additive constants
    in the primitives are dropped).  Order 0 records the semiclassical
    defining relation certificate.
    """
    name = curve.name.split("*")[0]
    if name not in ("gamma", "dilog", "lambert-exp"):
        raise ValueError("functional-relation checks exist for gamma, dilog, lambert-exp")
    residual = _HSeries.zero(order)
    log_resid = ZERO

    def family_difference(phis: Dict[int, RationalFunction1], mode: str) -> _HSeries:
        """sum over the closed family of hbar^{p} [Phi(shifted) - Phi]."""
        acc = _HSeries.zero(order)
        for p, f in phis.items():
            sh = _taylor_shift(f, ONE, order + max(0, -p) + 1, "additive" if mode == "additive" else "multiplicative")
            sh.c.pop(0, None)  # the difference drops the unshifted term
            acc = acc + _shift_down(sh, -p)
        return acc

    if name == "gamma":
        # log Psi = h^{-1}(x L - x) + sum_g h^{2g-1} stirling_phi(g)
        # relation: log Psi(x+h) - log Psi(x) - log(x + h/2) = const
        diff, lrate = _difference_of_primitive(order + 1, RF([1], [0, 1]), ONE, "additive")
        residual = residual + _shift_down(diff, 1)
        log_resid += lrate
        residual = residual + family_difference(
            {2 * g - 1: stirling_phi(g) for g in range(1, order // 2 + 2)}, "additive"
        )
        rhs = _HSeries(order, {k: RF([Rat((-1) ** (k + 1), k * 2**k)], [0] * k + [1]) for k in range(1, order + 1)})
        residual = residual - rhs
        log_resid -= ONE
        semiclassical = "exp(y) = x on the curve (defining relation)"
    elif name == "lambert-exp":
        # log Psi = y^2/(2h) - h^{-1}(y L - y) - sum_g h^{2g-1} stirling_phi(g)
        # relation: log Psi(y+h) - log Psi(y) - (y + h/2) + log(y + h/2) = const
        residual = _HSeries(order, {0: RF([0, 1]), 1: RF.const(Rat(1, 2))})
        diff, lrate = _difference_of_primitive(order + 1, RF([1], [0, 1]), ONE, "additive")
        residual = residual - _shift_down(diff, 1)
        log_resid -= lrate
        residual = residual + family_difference(
            {2 * g - 1: stirling_phi(g).scale(-1) for g in range(1, order // 2 + 2)}, "additive"
        )
        residual = residual - _HSeries(order, {0: RF([0, 1]), 1: RF.const(Rat(1, 2))})
        rhs = _HSeries(order, {k: RF([Rat((-1) ** (k + 1), k * 2**k)], [0] * k + [1]) for k in range(1, order + 1)})
        residual = residual + rhs
        log_resid += ONE
        semiclassical = "exp(x) = e^y / y on the curve (defining relation)"
    else:  # dilog, chart w = e^y with x = log(1+w) up to the dropped constant
        # log Psi = x/2 + h^{-1} Phi_0 + sum_g h^{2g-1} dilog_phi(g), D Phi_0 = log(1+w)
        # relation: log Psi(x+h) - log Psi(x) - h/2 - log(1 + w e^{h/2}) = const;
        # the x/2 difference cancels the h/2 and the log symbols cancel exactly.
        diff, lrate = _difference_of_primitive(order + 1, RF([0, 1], [1, 1]), ONE, "multiplicative")
        residual = residual + _shift_down(diff, 1)
        log_resid += lrate
        residual = residual + family_difference(
            {2 * g - 1: dilog_phi(g) for g in range(1, order // 2 + 2)}, "multiplicative"
        )
        emh = _HSeries(order, {k: RF([0, Rat(1, 2**k * factorial(k))], [1, 1]) for k in range(1, order + 1)})
        residual = residual - emh.log1p()
        log_resid -= ONE
        semiclassical = "1 + e^x + e^y = 0 on the curve (defining relation, i*pi dropped)"

    report: Dict[str, object] = {"curve": name, "order": order, "semiclassical": semiclassical}
    rows: List[dict] = []
    ok = True
    if log_resid != 0:
        ok = False
    for k in range(0, order + 1):
        coeff = residual.c.get(k, RF.const(0))
        dk = coeff.derivative()
        zero = dk.is_zero()
        ok &= zero
        rows.append({"hbar_power": k, "residual_derivative_zero": zero})
    report["log_symbol_cancels"] = log_resid == 0
    report["rows"] = rows
    report["passed"] = ok
    return report


def _shift_down(s: _HSeries, down: int) -> _HSeries:
    """Multiply by hbar^{-down} keeping only non-negative displayed orders."""
    out = _HSeries(s.order)
    for k, v in s.c.items():
        nk = k - down
        if 0 <= nk <= s.order:
            out.c[nk] = v
    return out
