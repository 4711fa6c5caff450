"""Reference Eynard-Orantin recursion producing exact correlator tensors.

A correlator omega_{g,n} on a genus-zero curve with simple rational
ramification is a finite sum of products of one-variable pole factors
1/(z_i - beta)^k with rational coefficients; the recursion closes on this
class because new poles only ever appear at ramification points.  Residues
are taken as exact Laurent expansions in the local coordinate t = q - beta,
with an overshoot check that the expansion window covered the residue with
margin (hard error otherwise).

The recursion kernel is normalised as

    K(z, q) = [1/(z-q) - 1/(z-sigma(q))] dz / [(y(sigma(q)) - y(q)) dx(q)],

the orientation being fixed by the Airy seeds omega_{0,3} = prod dz_i/z_i^2
and omega_{1,1} = dz/(8 z^4), which are the normalisations under which the
psi-class dictionary <tau_0^3> = 1, <tau_1> = 1/24 holds.
"""

from __future__ import annotations

import os
import threading
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .curves import RamificationData, SpectralCurve, UnsupportedCurveError, ramification
from .rationals import ONE, ZERO, Rat, rat_from_str, rat_to_str
from .series import Series1, TruncationError

__all__ = [
    "PoleBasisFactor",
    "CorrelatorTensor",
    "omega",
    "recursion_kernel",
    "normalize",
    "partial_fractions",
    "clear_memo",
    "tensor_to_json",
    "tensor_from_json",
]

# factor (variable index, pole location, order) encodes 1/(z_var - pole)^order
PoleBasisFactor = Tuple[int, Rat, int]
Term = Tuple[Rat, Tuple[PoleBasisFactor, ...]]


class CorrelatorTensor:
    """Exact omega_{g,n} = sum_terms c * prod_i (z_i - beta_i)^{-k_i} * prod dz_i."""

    __slots__ = ("g", "n", "terms", "curve_hash")

    def __init__(self, g: int, n: int, terms: Sequence[Term], curve_hash: str = "") -> None:
        self.g = g
        self.n = n
        self.terms: List[Term] = list(terms)
        self.curve_hash = curve_hash

    def is_zero(self) -> bool:
        return not self.terms

    def max_pole_order(self) -> int:
        return max((f[2] for _, fs in self.terms for f in fs), default=0)

    def scale(self, k) -> "CorrelatorTensor":
        k = Rat(k)
        return CorrelatorTensor(self.g, self.n, [(k * c, fs) for c, fs in self.terms], self.curve_hash)

    def permute(self, perm: Sequence[int]) -> "CorrelatorTensor":
        """Relabel variables: new var perm[i] receives old var i's factors."""
        terms = []
        for c, fs in self.terms:
            terms.append((c, tuple(sorted((perm[v], b, k) for v, b, k in fs))))
        return normalize(CorrelatorTensor(self.g, self.n, terms, self.curve_hash))

    def eval_at(self, points: Sequence) -> Rat:
        pts = [Rat(p) for p in points]
        acc = ZERO
        for c, fs in self.terms:
            v = c
            for var, beta, k in fs:
                v = v / (pts[var] - beta) ** k
            acc += v
        return acc

    def w_series_at(self, curve: SpectralCurve, points: Sequence, order: int) -> "object":
        """Jet data of W = omega / prod dx_i at rational base points.

        Returns a dict exponent-tuple -> Rat over local variables w_i = z_i - p_i.
        """
        pts = [Rat(p) for p in points]
        invxp = []
        for p in pts:
            curve.validate_base_point(p)
            s = curve.xp().series_at(p, order)
            invxp.append(s.inverse())
        out: Dict[Tuple[int, ...], Rat] = {}
        for c, fs in self.terms:
            per_var = [Series1.monomial(1, 0, order) for _ in range(self.n)]
            for var, beta, k in fs:
                base = Series1({0: pts[var] - beta, 1: ONE}, order)
                per_var[var] = per_var[var] * base.pow(k).inverse()
            for var in range(self.n):
                per_var[var] = per_var[var] * invxp[var]
            _accumulate_product(out, per_var, c, order)
        return {e: v for e, v in out.items() if v != 0}

    def __repr__(self) -> str:  # pragma: no cover
        return f"CorrelatorTensor(g={self.g}, n={self.n}, {len(self.terms)} terms)"


def _accumulate_product(out: Dict[Tuple[int, ...], Rat], per_var: List[Series1], coeff: Rat, order: int) -> None:
    """out += coeff * prod_i per_var[i], truncated at total degree <= order."""
    n = len(per_var)

    def rec(i: int, exps: Tuple[int, ...], val: Rat, left: int) -> None:
        if val == 0:
            return
        if i == n:
            out[exps] = out.get(exps, ZERO) + val
            return
        for d, v in per_var[i].c.items():
            if 0 <= d <= left:
                rec(i + 1, exps + (d,), val * v, left - d)

    rec(0, (), coeff, order)


def normalize(tensor: CorrelatorTensor) -> CorrelatorTensor:
    """Merge identical signatures, re-expand same-variable pole products, sort.

    Idempotent; the canonical term order is by factor signature.
    """
    expanded: List[Term] = []
    for c, fs in tensor.terms:
        expanded.extend(_expand_per_variable(c, fs))
    merged: Dict[Tuple[PoleBasisFactor, ...], Rat] = {}
    for c, fs in expanded:
        key = tuple(sorted(fs))
        nv = merged.get(key, ZERO) + c
        if nv == 0:
            merged.pop(key, None)
        else:
            merged[key] = nv
    terms = sorted(
        ((v, k) for k, v in merged.items()),
        key=lambda t: tuple((var, rat_to_str(b), o) for var, b, o in t[1]),
    )
    return CorrelatorTensor(tensor.g, tensor.n, terms, tensor.curve_hash)


def _expand_per_variable(coeff: Rat, fs: Tuple[PoleBasisFactor, ...]) -> List[Term]:
    """Partial-fraction any variable carrying more than one distinct pole."""
    by_var: Dict[int, List[Tuple[Rat, int]]] = {}
    for var, beta, k in fs:
        by_var.setdefault(var, []).append((beta, k))
    out: List[Term] = [(coeff, ())]
    for var, poles in sorted(by_var.items()):
        merged: Dict[Rat, int] = {}
        for beta, k in poles:
            merged[beta] = merged.get(beta, 0) + k
        pieces = partial_fractions(sorted(merged.items(), key=lambda x: rat_to_str(x[0])))
        new_out: List[Term] = []
        for c0, fs0 in out:
            for pc, beta, k in pieces:
                new_out.append((c0 * pc, fs0 + ((var, beta, k),)))
        out = new_out
    return out


def partial_fractions(poles: Sequence[Tuple[Rat, int]]) -> List[Tuple[Rat, Rat, int]]:
    """Exact partial fractions of prod_j (z - beta_j)^{-k_j} with distinct beta_j.

    Returns a list of (coefficient, beta, order) meaning coeff/(z-beta)^order.
    """
    poles = [(Rat(b), int(k)) for b, k in poles if k > 0]
    if not poles:
        return [(ONE, ZERO, 0)]  # the empty product: constant 1, order 0 sentinel
    if len(poles) == 1:
        b, k = poles[0]
        return [(ONE, b, k)]

    def reduce_pair(a: Rat, p: int, b: Rat, q: int) -> List[Tuple[Rat, Rat, int]]:
        # 1/((z-a)^p (z-b)^q) with a != b
        if p == 0:
            return [(ONE, b, q)]
        if q == 0:
            return [(ONE, a, p)]
        inv = ONE / (a - b)
        out: Dict[Tuple[Rat, int], Rat] = {}
        for c, beta, k in reduce_pair(a, p, b, q - 1):
            out[(beta, k)] = out.get((beta, k), ZERO) + c * inv
        for c, beta, k in reduce_pair(a, p - 1, b, q):
            out[(beta, k)] = out.get((beta, k), ZERO) - c * inv
        return [(c, beta, k) for (beta, k), c in out.items() if c != 0]

    acc: List[Tuple[Rat, Rat, int]] = [(ONE, poles[0][0], poles[0][1])]
    for b, q in poles[1:]:
        nxt: Dict[Tuple[Rat, int], Rat] = {}
        for c, a, p in acc:
            if a == b:
                pieces = [(ONE, a, p + q)]
            else:
                pieces = reduce_pair(a, p, b, q)
            for c2, beta, k in pieces:
                key = (beta, k)
                nxt[key] = nxt.get(key, ZERO) + c * c2
        acc = [(c, beta, k) for (beta, k), c in nxt.items() if c != 0]
    return acc


# ---------------------------------------------------------------------------
# recursion internals
# ---------------------------------------------------------------------------

_MEMO: Dict[Tuple[str, int, int], CorrelatorTensor] = {}
_RAM_MEMO: Dict[Tuple[str, int], RamificationData] = {}
_MEMO_LOCK = threading.RLock()


def clear_memo() -> None:
    with _MEMO_LOCK:
        _MEMO.clear()
        _RAM_MEMO.clear()


def _memo_budget_entries() -> int:
    mb = os.environ.get("TRXY_MEMO_MB")
    if not mb:
        return 1 << 30
    try:
        # crude: a tensor term costs ~200 bytes
        return int(float(mb) * 1e6 / 200)
    except ValueError:
        return 1 << 30


def _memo_size() -> int:
    return sum(len(t.terms) for t in _MEMO.values())


def _ram(curve: SpectralCurve, order: int) -> RamificationData:
    key = (curve.content_hash(), order)
    with _MEMO_LOCK:
        got = _RAM_MEMO.get(key)
    if got is not None:
        return got
    data = ramification(curve, order)
    with _MEMO_LOCK:
        _RAM_MEMO[key] = data
    return data


def _pole_series(const: Rat, tser: Optional[Series1], k: int, order: int) -> Series1:
    """Series of 1/(const + tau(t))^k, tau = t or sigma(t) (or 0)."""
    base = Series1.monomial(const, 0, order) if tser is None else (
        Series1.monomial(const, 0, min(order, tser.order)) + tser
    )
    return base.pow(k).inverse()


class _Bracket:
    """Sum of (pole-monomial over spectator vars) x (Laurent series in t)."""

    __slots__ = ("data",)

    def __init__(self) -> None:
        self.data: Dict[Tuple[PoleBasisFactor, ...], Series1] = {}

    def add(self, mono: Tuple[PoleBasisFactor, ...], ser: Series1) -> None:
        key = tuple(sorted(mono))
        if key in self.data:
            self.data[key] = self.data[key] + ser
        else:
            self.data[key] = ser

    def items(self):
        return self.data.items()


def _tensor_pole_order_at(T: CorrelatorTensor, beta: Rat, vars_: Sequence[int]) -> int:
    best = 0
    for _, fs in T.terms:
        tot = sum(k for var, b, k in fs if var in vars_ and b == beta)
        best = max(best, tot)
    return best


def _substitute(
    T: CorrelatorTensor,
    var_map: Dict[int, int],
    slot_vars: Dict[int, Optional[Series1]],
    beta: Rat,
    order: int,
) -> List[Tuple[Tuple[PoleBasisFactor, ...], Series1]]:
    """Evaluate tensor with some variables mapped to parent indices and the
    rest substituted at beta + tau(t) (tau = None means tau = t)."""
    out: List[Tuple[Tuple[PoleBasisFactor, ...], Series1]] = []
    for c, fs in T.terms:
        mono: List[PoleBasisFactor] = []
        ser = Series1.monomial(c, 0, order)
        for var, b, k in fs:
            if var in var_map:
                mono.append((var_map[var], b, k))
            else:
                tser = slot_vars[var]
                ser = ser * _pole_series(beta - b, tser if tser is not None else Series1.t(order), k, order)
        out.append((tuple(mono), ser))
    return out


def _b_expansion(parent_var: int, beta: Rat, tpow: List[Series1], order: int) -> List[Tuple[Tuple[PoleBasisFactor, ...], Series1]]:
    """omega_{0,2}(z_j, beta + tau(t)) = sum_m (m+1) tau^m / (z_j - beta)^{m+2}.

    ``tpow`` caches powers of tau.
    """
    out = []
    for m in range(0, order + 1):
        ser = tpow[m].scale(m + 1)
        if not ser.is_zero():
            out.append((((parent_var, beta, m + 2),), ser))
    return out


def omega(curve: SpectralCurve, g: int, n: int, _depth: int = 0) -> CorrelatorTensor:
    """Exact correlator tensor for 2g + n - 2 >= 1.

    (0,1) and (0,2) are the recursion seeds and never materialise as tensors;
    unramified x yields the zero tensor.
    """
    if g < 0 or n < 1:
        raise ValueError("need g >= 0, n >= 1")
    if 2 * g + n - 2 < 1:
        raise ValueError("omega tensors exist for 2g+n-2 >= 1; (0,1), (0,2) are closed-form seeds")
    key = (curve.content_hash(), g, n)
    with _MEMO_LOCK:
        got = _MEMO.get(key)
    if got is not None:
        return got

    ram = _ram(curve, 8)
    if not ram.points:
        result = CorrelatorTensor(g, n, [], curve.content_hash())
        with _MEMO_LOCK:
            _MEMO[key] = result
        return result

    # spectator variables 1..n-1 carry pole factors from sub-tensors
    spect = list(range(1, n))
    collected: List[Term] = []

    for beta in ram.points:
        # ------------------------------------------------------ pole bound B
        B = 0
        if g >= 1:
            if (g - 1, n + 1) == (0, 2):
                B = max(B, 2)
            else:
                Ta = omega(curve, g - 1, n + 1, _depth + 1)
                B = max(B, _tensor_pole_order_at(Ta, beta, [n - 1, n]))
        for g1 in range(g + 1):
            g2 = g - g1
            for mask in range(1 << len(spect)):
                I1 = [spect[i] for i in range(len(spect)) if mask >> i & 1]
                I2 = [v for v in spect if v not in I1]
                if (g1 == 0 and not I1) or (g2 == 0 and not I2):
                    continue
                o1 = 0 if (g1, len(I1) + 1) == (0, 2) else _tensor_pole_order_at(
                    omega(curve, g1, len(I1) + 1, _depth + 1), beta, [len(I1)]
                )
                o2 = 0 if (g2, len(I2) + 1) == (0, 2) else _tensor_pole_order_at(
                    omega(curve, g2, len(I2) + 1, _depth + 1), beta, [len(I2)]
                )
                B = max(B, o1 + o2)
        E = B + 4  # expansion order with overshoot margin

        sig = ram.involutions[beta]
        if sig.order < E:
            sig = ramification(curve, E + 2).involutions[beta]
        sig = sig.truncate(E)
        sigp = sig.derivative()
        tpow_t = [Series1.one(E)]
        tpow_s = [Series1.one(E)]
        for _ in range(E + 1):
            tpow_t.append(tpow_t[-1] * Series1.t(E))
            tpow_s.append(tpow_s[-1] * sig)

        # ------------------------------------------------------------ kernel
        ydiff = curve.y.diff_series_at(beta, E + 2)
        delta_y = ydiff.compose(sig) - ydiff  # y(sigma(q)) - y(q)
        xp_loc = curve.xp().series_at(beta, E + 2)
        D = delta_y * xp_loc
        if D.valuation() != 2:
            raise UnsupportedCurveError(
                f"kernel denominator at z={rat_to_str(beta)} has valuation {D.valuation()} != 2"
            )
        Dinv = D.inverse()

        # ----------------------------------------------------------- bracket
        bracket = _Bracket()

        def add_products(lhs, rhs):
            for m1, s1 in lhs:
                for m2, s2 in rhs:
                    bracket.add(m1 + m2, s1 * s2)

        if g >= 1:
            if (g - 1, n + 1) == (0, 2):
                # omega_{0,2}(q, sigma(q)) = sigma'(t) dt^2 / (t - sigma(t))^2
                diff = Series1.t(E) - sig
                bracket.add((), sigp * (diff * diff).inverse())
            else:
                Ta = omega(curve, g - 1, n + 1, _depth + 1)
                var_map = {i: i + 1 for i in range(n - 1)}
                for mono, ser in _substitute(Ta, var_map, {n - 1: None, n: sig}, beta, E):
                    bracket.add(mono, ser * sigp)
        for g1 in range(g + 1):
            g2 = g - g1
            for mask in range(1 << len(spect)):
                I1 = [spect[i] for i in range(len(spect)) if mask >> i & 1]
                I2 = [v for v in spect if v not in I1]
                if (g1 == 0 and not I1) or (g2 == 0 and not I2):
                    continue
                lhs = (
                    _b_expansion(I1[0], beta, tpow_t, E)
                    if (g1, len(I1) + 1) == (0, 2)
                    else _substitute(
                        omega(curve, g1, len(I1) + 1, _depth + 1),
                        {i: I1[i] for i in range(len(I1))},
                        {len(I1): None},
                        beta,
                        E,
                    )
                )
                rhs_raw = (
                    _b_expansion(I2[0], beta, tpow_s, E)
                    if (g2, len(I2) + 1) == (0, 2)
                    else _substitute(
                        omega(curve, g2, len(I2) + 1, _depth + 1),
                        {i: I2[i] for i in range(len(I2))},
                        {len(I2): sig},
                        beta,
                        E,
                    )
                )
                rhs = [(m, s * sigp) for m, s in rhs_raw]
                add_products(lhs, rhs)

        # ---------------------------------------------------------- residues
        for mono, bser in bracket.items():
            if bser.is_zero():
                continue
            val = bser.valuation_lower_bound()
            # kernel term m contributes K_m ~ t^{m-2}; overlap with t^{-1}
            mmax = 1 - val + 2
            acc_by_m: Dict[int, Rat] = {}
            integrand_window = None
            for m in range(1, mmax + 1):
                num = tpow_t[m] - tpow_s[m] if m <= E else None
                if num is None:
                    raise TruncationError("kernel power window exceeded")
                Km = num * Dinv
                prod = Km * bser
                if integrand_window is None or prod.order < integrand_window:
                    integrand_window = prod.order
                if prod.order < 1:
                    raise TruncationError(
                        f"residue overshoot check failed at beta={rat_to_str(beta)} (window {prod.order})"
                    )
                r = prod.residue()
                if r != 0:
                    acc_by_m[m] = r
            for m, r in acc_by_m.items():
                collected.append((r, mono + ((0, beta, m + 1),)))

    result = normalize(CorrelatorTensor(g, n, collected, curve.content_hash()))
    cap = 6 * g - 4 + 2 * n
    if result.max_pole_order() > cap:
        raise TruncationError(
            f"pole order {result.max_pole_order()} exceeds bound {cap} for (g,n)=({g},{n})"
        )
    with _MEMO_LOCK:
        if _memo_size() + len(result.terms) <= _memo_budget_entries():
            _MEMO[key] = result
    return result


def recursion_kernel(curve: SpectralCurve, beta, spectator_order: int, local_order: int):
    """Expansion data of K(z, q) at q = beta + t.

    Returns (denominator series (y(sigma)-y) x'(q), list of (m, series) where
    the m-th numerator t^m - sigma^m attaches the pole 1/(z-beta)^{m+1}).
    """
    beta = Rat(beta)
    ram = _ram(curve, max(local_order + 4, 8))
    if beta not in ram.involutions:
        raise ValueError(f"{rat_to_str(beta)} is not a ramification point")
    E = local_order + 2
    sig = ram.involutions[beta]
    if sig.order < E:
        sig = ramification(curve, E + 2).involutions[beta]
    sig = sig.truncate(E)
    ydiff = curve.y.diff_series_at(beta, E + 2)
    D = (ydiff.compose(sig) - ydiff) * curve.xp().series_at(beta, E + 2)
    Dinv = D.inverse()
    terms = []
    tp = Series1.t(E)
    tm, sm = Series1.one(E), Series1.one(E)
    for m in range(1, spectator_order + 1):
        tm = tm * tp
        sm = sm * sig
        terms.append((m, (tm - sm) * Dinv))
    return D, terms


# ---------------------------------------------------------------------------
# JSON serialisation
# ---------------------------------------------------------------------------


def tensor_to_json(t: CorrelatorTensor) -> dict:
    return {
        "g": t.g,
        "n": t.n,
        "terms": [
            {
                "coeff": rat_to_str(c),
                "factors": [[var + 1, rat_to_str(b), k] for var, b, k in fs],
            }
            for c, fs in t.terms
        ],
    }


def tensor_from_json(d: dict) -> CorrelatorTensor:
    terms = [
        (
            rat_from_str(item["coeff"]),
            tuple((var - 1, rat_from_str(b), int(k)) for var, b, k in item["factors"]),
        )
        for item in d["terms"]
    ]
    return CorrelatorTensor(d["g"], d["n"], terms)
