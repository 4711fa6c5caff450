"""Spectral-curve data model, preset catalogue and ramification analysis.

Every curve lives on a genus-zero chart with global rational coordinate z and
bidifferential B = dz1 dz2 / (z1 - z2)^2.  Coordinate functions x(z), y(z) are
rational functions plus rational-coefficient log terms; their derivatives are
exact rational functions, which is all the engines ever consume (absolute log
constants cancel in every difference the algorithms form).
"""

from __future__ import annotations

import hashlib
import json
from typing import Dict, List, Optional, Sequence, Tuple

from .rationals import ONE, ZERO, Rat, rat_from_str, rat_to_str
from .series import RationalFunction1, Series1, _poly_eval, _poly_series_at

__all__ = [
    "UnsupportedCurveError",
    "LogRationalFunction",
    "SpectralCurve",
    "RamificationData",
    "make_preset",
    "preset_names",
    "ramification",
    "swap_xy",
    "load_curve_file",
    "curve_from_dict",
]


class UnsupportedCurveError(ValueError):
    """Curve outside the supported class (irrational or non-simple ramification...)."""


class LogRationalFunction:
    """rational_part(z) + sum_k c_k * log r_k(z), all data exact over Q."""

    __slots__ = ("rational_part", "log_terms")

    def __init__(self, rational_part: RationalFunction1, log_terms: Sequence[Tuple[Rat, RationalFunction1]] = ()) -> None:
        self.rational_part = rational_part
        merged: List[Tuple[Rat, RationalFunction1]] = []
        for c, r in log_terms:
            c = Rat(c)
            if c == 0:
                continue
            for i, (c0, r0) in enumerate(merged):
                if r0 == r:
                    merged[i] = (c0 + c, r0)
                    break
            else:
                merged.append((c, r))
        self.log_terms = [(c, r) for c, r in merged if c != 0]

    @staticmethod
    def rational(num, den=(1,)) -> "LogRationalFunction":
        return LogRationalFunction(RationalFunction1(num, den))

    def has_logs(self) -> bool:
        return bool(self.log_terms)

    def derivative(self) -> RationalFunction1:
        """d/dz; a pure rational function by construction."""
        out = self.rational_part.derivative()
        for c, r in self.log_terms:
            out = out + (r.derivative() / r).scale(c)
        return out

    def __add__(self, other: "LogRationalFunction") -> "LogRationalFunction":
        return LogRationalFunction(
            self.rational_part + other.rational_part, list(self.log_terms) + list(other.log_terms)
        )

    def __sub__(self, other: "LogRationalFunction") -> "LogRationalFunction":
        return self + other.scale(-1)

    def scale(self, k) -> "LogRationalFunction":
        return LogRationalFunction(
            self.rational_part.scale(k), [(Rat(k) * c, r) for c, r in self.log_terms]
        )

    def diff_series_at(self, p, order: int) -> Series1:
        """Series of f(p+t) - f(p) in t; log constants drop out exactly.

        Requires every log argument to be finite and nonzero at p.
        """
        p = Rat(p)
        out = self.rational_part.series_at(p, order)
        out = out - Series1.monomial(out[0], 0, order) if out.order >= 0 else out
        for c, r in self.log_terms:
            rs = r.series_at(p, order)
            r0 = rs[0]
            if r0 == 0 or rs.valuation_lower_bound() < 0:
                raise UnsupportedCurveError(
                    f"log argument vanishes or blows up at {rat_to_str(p)}"
                )
            rel = (rs - Series1.monomial(r0, 0, order)).scale(ONE / r0)
            out = out + rel.log1p().scale(c)
        return out

    def is_log_free(self) -> bool:
        return not self.log_terms

    def is_pure_log(self) -> bool:
        """Constant rational part and integer log coefficients (e^f rational)."""
        return (
            bool(self.log_terms)
            and self.rational_part.is_constant()
            and all(c.denominator == 1 for c, _ in self.log_terms)
        )

    def log_coefficient_of_z(self) -> Rat:
        """Coefficient of log(z) if f = c*log(z) + const; None-like ZERO otherwise."""
        if len(self.log_terms) == 1 and self.rational_part.is_constant():
            c, r = self.log_terms[0]
            if r == RationalFunction1([0, 1]):
                return c
        return ZERO

    def to_json(self) -> dict:
        return {
            "rational": self.rational_part.to_json(),
            "logs": [[rat_to_str(c), r.to_json()] for c, r in self.log_terms],
        }

    def __repr__(self) -> str:  # pragma: no cover
        return f"LogRationalFunction({self.to_json()})"


def _classify_form(x: LogRationalFunction, y: LogRationalFunction) -> str:
    """Form tag heuristic reproducing the preset catalogue.

    A +-combination of x and y killing all log terms means the logs are an
    artifact of a symplectic shift and the curve behaves algebraically.
    """
    if x.is_log_free() and y.is_log_free():
        return "algebraic"
    for sign in (1, -1):
        if (x + y.scale(sign)).is_log_free():
            return "algebraic"
    if y.is_pure_log():
        return "exp-exp"
    if y.is_log_free():
        return "exp-mixed"
    return "exp-exp"


class SpectralCurve:
    """Genus-zero spectral curve (x(z), y(z)) with B = dz1 dz2/(z1-z2)^2.

    ``pair_structure`` records which inverse-difference kernel the duality
    evaluators must use: "linear" when y is (affine in) the chart coordinate,
    "exp" when e^y is proportional to z^{+-1}, None otherwise.
    ``bernoulli_corrected`` marks curves of the exponential class whose dual
    one-point family carries the Bernoulli-weighted derivative corrections.
    """

    __slots__ = (
        "name",
        "x",
        "y",
        "form",
        "params",
        "pair_structure",
        "bernoulli_corrected",
        "exp_x_coefficient",
        "certificate",
        "_xp",
        "_yp",
        "_dyx_cache",
        "_hash",
    )

    def __init__(
        self,
        name: str,
        x: LogRationalFunction,
        y: LogRationalFunction,
        form: Optional[str] = None,
        params: Optional[Dict[str, Rat]] = None,
        bernoulli_corrected: Optional[bool] = None,
        certificate: str = "",
    ) -> None:
        self.name = name
        self.x = x
        self.y = y
        self.params = dict(params or {})
        self.form = form or _classify_form(x, y)
        self._xp = x.derivative()
        self._yp = y.derivative()
        if self._xp.is_zero():
            raise UnsupportedCurveError("dx/dz is identically zero")
        if self._yp.is_zero():
            raise UnsupportedCurveError("dy/dz is identically zero")
        self.pair_structure = self._detect_pair_structure()
        if bernoulli_corrected is None:
            bernoulli_corrected = False
        self.bernoulli_corrected = bernoulli_corrected
        # coefficient a in the exponential-class relation e^{a x} = F(y) e^{b y};
        # scales the corrected dual family weights by a^{2g}
        self.exp_x_coefficient = ONE
        self.certificate = certificate
        self._dyx_cache: List[RationalFunction1] = []
        self._hash: Optional[str] = None

    # -- structure -----------------------------------------------------------

    def _detect_pair_structure(self) -> Optional[str]:
        y = self.y
        if y.is_log_free():
            # affine in z is enough for the linear inverse-difference kernel
            num, den = y.rational_part.num, y.rational_part.den
            if len(den) == 1 and len(num) <= 2:
                return "linear"
            return None
        if y.log_coefficient_of_z() != 0:
            return "exp"
        return None

    def log_slope(self) -> Rat:
        """c in y = c log z + const; zero when y is not of that shape."""
        return self.y.log_coefficient_of_z()

    def xp(self) -> RationalFunction1:
        return self._xp

    def yp(self) -> RationalFunction1:
        return self._yp

    def dy_dx(self) -> RationalFunction1:
        return self._yp / self._xp

    def d_y_of_x(self, k: int) -> RationalFunction1:
        """k-th derivative of x with respect to y, as an exact rational function.

        d/dy = (1/y'(z)) d/dz in the chart; k = 0 is not represented here (x may
        carry logs), so k >= 1.
        """
        if k < 1:
            raise ValueError("d_y_of_x needs k >= 1")
        cache = self._dyx_cache
        if not cache:
            cache.append(self._xp / self._yp)
        while len(cache) < k:
            cache.append(cache[-1].derivative() / self._yp)
        return cache[k - 1]

    def content_hash(self) -> str:
        if self._hash is None:
            payload = json.dumps(
                {
                    "name": self.name,
                    "x": self.x.to_json(),
                    "y": self.y.to_json(),
                    "form": self.form,
                    "params": {k: rat_to_str(v) for k, v in sorted(self.params.items())},
                },
                sort_keys=True,
            )
            self._hash = hashlib.sha256(payload.encode()).hexdigest()[:16]
        return self._hash

    def validate_base_point(self, p, variable: str = "z") -> None:
        """Reject base points on chart poles of the coordinate data."""
        from .series import PoleCollisionError

        p = Rat(p)
        try:
            if self._xp.eval(p) == 0:  # ramification point
                raise PoleCollisionError(variable, p)
            self._yp.eval(p)
        except ZeroDivisionError:
            raise PoleCollisionError(variable, p) from None
        for _, r in list(self.x.log_terms) + list(self.y.log_terms):
            try:
                if r.eval(p) == 0:
                    raise PoleCollisionError(variable, p)
            except ZeroDivisionError:
                raise PoleCollisionError(variable, p) from None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "form": self.form,
            "x": self.x.to_json(),
            "y": self.y.to_json(),
            "params": {k: rat_to_str(v) for k, v in sorted(self.params.items())},
        }

    def __repr__(self) -> str:  # pragma: no cover
        return f"SpectralCurve({self.name!r}, form={self.form!r}, params={ {k: rat_to_str(v) for k, v in self.params.items()} })"


class RamificationData:
    """Simple rational ramification points with local deck involutions."""

    __slots__ = ("points", "involutions", "multiplicity_checks")

    def __init__(self, points: List[Rat], involutions: Dict[Rat, Series1], checks: Dict[Rat, str]) -> None:
        self.points = points
        self.involutions = involutions
        self.multiplicity_checks = checks


# -- rational root finding ---------------------------------------------------


def _rational_roots(poly: Sequence[Rat]) -> List[Tuple[Rat, int]]:
    """All rational roots (with multiplicity) of a nonzero polynomial over Q.

    Errors if a nonconstant factor without rational roots remains: callers
    need *every* zero exactly.
    """
    coeffs = [Rat(c) for c in poly]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise ValueError("zero polynomial")
    # strip z = 0 roots
    roots: List[Tuple[Rat, int]] = []
    zmult = 0
    while coeffs[0] == 0:
        zmult += 1
        coeffs = coeffs[1:]
    if zmult:
        roots.append((ZERO, zmult))
    if len(coeffs) == 1:
        return roots
    # clear denominators to integers
    denlcm = 1
    for c in coeffs:
        d = int(c.denominator)
        g = _gcd(denlcm, d)
        denlcm = denlcm // g * d
    ic = [int(c * denlcm) for c in coeffs]
    a0, an = abs(ic[0]), abs(ic[-1])
    cands = set()
    for p in _divisors(a0):
        for q in _divisors(an):
            cands.add(Rat(p, q))
            cands.add(Rat(-p, q))
    work = coeffs
    for cand in sorted(cands, key=lambda r: (abs(r), r)):
        mult = 0
        while len(work) > 1 and _poly_eval(work, cand) == 0:
            work = _deflate(work, cand)
            mult += 1
        if mult:
            roots.append((cand, mult))
        if len(work) == 1:
            break
    if len(work) > 1:
        raise UnsupportedCurveError(
            "ramification locus has irrational points; curve unsupported"
        )
    return roots


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _divisors(n: int) -> List[int]:
    n = abs(n)
    if n == 0:
        return [1]
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


def _deflate(poly: List[Rat], root: Rat) -> List[Rat]:
    """Synthetic division by (z - root); the remainder must vanish."""
    n = len(poly) - 1
    out = [ZERO] * n
    acc = poly[n]
    for i in range(n - 1, -1, -1):
        out[i] = acc
        acc = poly[i] + root * acc
    return out


def ramification(curve: SpectralCurve, inv_order: int = 12) -> RamificationData:
    """Exact ramification points of x (zeros of dx/dz) with involution series.

    Every zero must be simple and rational; the involution sigma(t) = -t + ...
    satisfies x(beta + sigma(t)) = x(beta + t) through inv_order and is found
    by series reversion of the normalised local square root of x - x(beta).
    """
    xp = curve.xp()
    roots = _rational_roots(xp.num)
    points: List[Rat] = []
    invs: Dict[Rat, Series1] = {}
    checks: Dict[Rat, str] = {}
    for beta, mult in roots:
        if _poly_eval(xp.den, beta) == 0:
            continue  # cancels against a pole of the reduced derivative
        if mult != 1:
            raise UnsupportedCurveError(
                f"higher-order ramification at z={rat_to_str(beta)} unsupported"
            )
        order = inv_order + 2
        xloc = curve.x.diff_series_at(beta, order + 2)
        if xloc.valuation_lower_bound() != 2:
            raise UnsupportedCurveError(
                f"ramification at z={rat_to_str(beta)} is not a simple double point"
            )
        a2 = xloc[2]
        norm = xloc.scale(ONE / a2)  # t^2 (1 + ...)
        hsq = Series1({d - 2: v for d, v in norm.c.items()}, norm.order - 2)
        psi = hsq.sqrt().shift(1)  # t * sqrt(1 + ...)
        sigma = psi.reversion().compose(-psi)
        # certificate: x(beta+sigma(t)) - x(beta+t) = 0 through inv_order
        resid = xloc.compose(sigma) - xloc
        bad = [d for d, v in resid.c.items() if d <= inv_order and v != 0]
        if bad:
            raise UnsupportedCurveError(
                f"involution residual nonzero at orders {sorted(bad)} (z={rat_to_str(beta)})"
            )
        points.append(beta)
        invs[beta] = sigma.truncate(inv_order)
        checks[beta] = f"x''({rat_to_str(beta)})/2 = {rat_to_str(a2)} != 0"
    points.sort()
    return RamificationData(points, invs, checks)


def swap_xy(curve: SpectralCurve) -> SpectralCurve:
    """The dual curve with x and y exchanged; form tag recomputed."""
    return SpectralCurve(
        name=f"{curve.name}-swapped" if not curve.name.endswith("-swapped") else curve.name[: -len("-swapped")],
        x=curve.y,
        y=curve.x,
        params=curve.params,
    )


def rescale_y(curve: SpectralCurve, k) -> SpectralCurve:
    """The curve (x, k*y); correlators scale by k^{2-2g-n} (homogeneity)."""
    k = Rat(k)
    if k == 0:
        raise ValueError("rescale factor must be nonzero")
    out = SpectralCurve(
        name=f"{curve.name}*y{rat_to_str(k)}",
        x=curve.x,
        y=curve.y.scale(k),
        params=curve.params,
        bernoulli_corrected=curve.bernoulli_corrected,
    )
    out.exp_x_coefficient = curve.exp_x_coefficient
    return out


# -- preset catalogue --------------------------------------------------------


def _require_param(params: Dict[str, Rat], key: str, default=None) -> Rat:
    if key in params:
        return Rat(params[key])
    if default is None:
        raise ValueError(f"preset parameter {key!r} is required")
    return Rat(default)


def make_preset(name: str, params: Optional[Dict[str, object]] = None) -> SpectralCurve:
    """Build a catalogue curve.  Unknown names and invalid parameters raise."""
    p: Dict[str, Rat] = {}
    for k, v in (params or {}).items():
        p[k] = rat_from_str(v) if isinstance(v, str) else Rat(v)
    z = RationalFunction1([0, 1])
    lrf = LogRationalFunction

    if name == "airy":
        return SpectralCurve(
            "airy",
            x=lrf.rational([0, 0, 1]),
            y=lrf.rational([0, 1]),
            certificate="x = z^2, y = z",
        )
    if name == "rspin":
        r = _require_param(p, "r")
        if r.denominator != 1 or int(r) < 2:
            raise ValueError("rspin needs integer parameter r >= 2")
        r = int(r)
        return SpectralCurve(
            "rspin",
            x=lrf.rational([0] * r + [1]),
            y=lrf.rational([0, 1]),
            params={"r": Rat(r)},
            certificate=f"x = z^{r}, y = z",
        )
    if name == "gamma":
        return SpectralCurve(
            "gamma",
            x=lrf.rational([0, 1]),
            y=lrf(RationalFunction1.const(0), [(ONE, z)]),
            certificate="exp(y) = z = x",
        )
    if name == "dilog":
        # chart z = e^y; x = log(1+z) up to the dropped additive constant i*pi
        return SpectralCurve(
            "dilog",
            x=lrf(RationalFunction1.const(0), [(ONE, RationalFunction1([1, 1]))]),
            y=lrf(RationalFunction1.const(0), [(ONE, z)]),
            bernoulli_corrected=True,
            certificate="exp(x) = -(1+z), exp(y) = z; e^x + e^y + 1 = 0 up to the dropped i*pi",
        )
    if name == "vertex":
        f = _require_param(p, "f")
        if f == 0 or f == -1:
            raise ValueError("vertex framing f must avoid 0 and -1 (ramification degenerates)")
        return SpectralCurve(
            "vertex",
            x=lrf(RationalFunction1.const(0), [(-f, z), (-ONE, RationalFunction1([1, -1]))]),
            y=lrf(RationalFunction1.const(0), [(-ONE, z)]),
            params={"f": f},
            bernoulli_corrected=True,
            certificate="exp(x) = z^-f/(1-z), exp(y) = 1/z; e^x = e^{fy}/(1-e^{-y})",
        )
    if name == "gw-p1":
        t = _require_param(p, "t", default=1)
        return SpectralCurve(
            "gw-p1",
            x=lrf(RationalFunction1([t * t, 0, 1], [0, 1])),
            y=lrf(RationalFunction1.const(0), [(ONE, z)]),
            params={"t": t},
            certificate="x = z + t^2/z = e^y + t^2 e^{-y}, exp(y) = z",
        )
    if name == "lambert-shifted":
        return SpectralCurve(
            "lambert-shifted",
            x=lrf(z, [(-ONE, z)]),
            y=lrf(RationalFunction1.const(0), [(ONE, z)]),
            certificate="x = z - log z, y = log z; x = e^y - y",
        )
    if name == "lambert-exp":
        return SpectralCurve(
            "lambert-exp",
            x=lrf(z, [(-ONE, z)]),
            y=lrf(z),
            bernoulli_corrected=True,
            certificate="x = z - log z, y = z; e^x = e^y/y",
        )
    if name == "orbifold":
        a = _require_param(p, "a")
        if a == 0:
            raise ValueError("orbifold parameter a must be nonzero")
        c = SpectralCurve(
            "orbifold",
            x=lrf(-z, [(ONE / a, z)]),
            y=lrf(z),
            params={"a": a},
            bernoulli_corrected=True,
            certificate="x = (1/a) log z - z, y = z; e^{ax} = y e^{-ay}",
        )
        c.exp_x_coefficient = a
        return c
    if name == "cubic":
        # both x and y ramified; exercises the general dual-correlator route
        return SpectralCurve(
            "cubic",
            x=lrf.rational([0, 0, 1]),
            y=lrf(RationalFunction1([0, -1, 0, Rat(1, 3)])),
            certificate="x = z^2, y = z^3/3 - z",
        )
    raise ValueError(f"unknown preset {name!r}")


def preset_names() -> List[str]:
    return [
        "airy",
        "rspin",
        "gamma",
        "dilog",
        "vertex",
        "gw-p1",
        "lambert-shifted",
        "lambert-exp",
        "orbifold",
        "cubic",
    ]


# -- custom curve files ------------------------------------------------------


def _rf_from_spec(spec) -> RationalFunction1:
    if isinstance(spec, dict):
        return RationalFunction1(
            [rat_from_str(str(v)) for v in spec["num"]],
            [rat_from_str(str(v)) for v in spec.get("den", ["1"])],
        )
    return RationalFunction1([rat_from_str(str(v)) for v in spec])


def _lrf_from_spec(spec: dict) -> LogRationalFunction:
    rat_part = _rf_from_spec(spec.get("rational", ["0"]))
    logs = [(rat_from_str(str(c)), _rf_from_spec(r)) for c, r in spec.get("logs", [])]
    return LogRationalFunction(rat_part, logs)


def curve_from_dict(doc: dict) -> SpectralCurve:
    params = {k: rat_from_str(str(v)) for k, v in doc.get("params", {}).items()}
    return SpectralCurve(
        name=doc.get("name", "custom"),
        x=_lrf_from_spec(doc["x"]),
        y=_lrf_from_spec(doc["y"]),
        form=doc.get("form"),
        params=params,
        bernoulli_corrected=bool(doc.get("bernoulli_corrected", False)),
    )


def load_curve_file(path: str) -> SpectralCurve:
    """Load a custom curve from a JSON or TOML document."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if path.endswith(".toml"):
        try:
            import tomllib  # type: ignore
        except ImportError:  # pragma: no cover - py3.10
            import tomli as tomllib  # type: ignore
        doc = tomllib.loads(raw.decode())
    else:
        doc = json.loads(raw.decode())
    return curve_from_dict(doc)
