"""Evaluators for the x-y duality formula.

Three independent routes produce jets of W_{g,n} = omega_{g,n}/prod dx_i at
rational base points:

* ``xy_cycles``  -- the n-cycle (determinantal-shaped) sum with inverse-
  difference kernels; the cheapest route;
* ``xy_graphs``  -- the connected-labelled-graph sum with pair kernels; an
  independent rewriting of the same formula through the Cauchy determinant;
* ``xy_general`` -- the full bicoloured-graph sum whose weights are built from
  dual correlators computed by the recursion engine on the swapped curve;
  required when y is ramified, and reducing to ``xy_graphs`` when it is not.

Per-curve conventions, selected by ``SpectralCurve.pair_structure``:

=========  ========================================  ============  =====================
structure  off-diagonal cycle kernel                 diagonal      1-cycle convention
=========  ========================================  ============  =====================
linear     1/(y_i + hu_i/2 - y_j + hu_j/2)           1             1/(hbar u)
exp        1/(z_i e^{hu_i/2} - z_j e^{-hu_j/2})      1/S(hbar u)   1/(z hbar u S(hbar u))
=========  ========================================  ============  =====================

The per-vertex weight z_i (exp structure) or 1 (linear) comes out of the
Cauchy-determinant rewriting, and the cycle sum carries the parity (-1)^{n-1}.
The 1/(hbar u_i) operator prefactors are cleared before any series is built,
so every intermediate is a plain power series; hbar- and u-truncations carry
overshoot assertions (the top retained operator order must contribute zero,
otherwise TruncationError).
"""

from __future__ import annotations

import itertools
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import tr
from .curves import SpectralCurve, rescale_y, swap_xy
from .rationals import ONE, ZERO, Rat, bernoulli_half, factorial, s_coefficient
from .series import Jet, MultiSeries, RationalFunction1, Series1, TruncationError

__all__ = [
    "dual_correction",
    "o_operator_exponent",
    "pair_kernel",
    "diagonal_kernel",
    "xy_w",
    "xy_cycles",
    "xy_graphs",
    "xy_general",
    "operator_residual",
    "enumerate_n_cycles",
    "enumerate_connected_graphs",
    "enumerate_bicoloured",
    "connected_part",
    "default_base_points",
]

_ENUM_BOUND = 6


# ---------------------------------------------------------------------------
# dual one-point family
# ---------------------------------------------------------------------------


def dual_correction(curve: SpectralCurve, g: int):
    """The dual one-point function W^v_{g,1} in the z-chart.

    g = 0 returns x itself (with its log terms); for g >= 1 the Bernoulli-
    corrected family is bernoulli_half(g) * (d/dy)^{2g} x, an exact rational
    function, and curves outside the exponential class return zero.
    """
    if g < 0:
        raise ValueError("g >= 0 required")
    if g == 0:
        return curve.x
    if not curve.bernoulli_corrected:
        return RationalFunction1.const(0)
    a2g = curve.exp_x_coefficient ** (2 * g)
    return curve.d_y_of_x(2 * g).scale(bernoulli_half(g) * a2g)


def _dual_w1_series(
    curve: SpectralCurve,
    swapped: Optional[SpectralCurve],
    point: Rat,
    h_cap: int,
    window: int,
) -> Dict[int, Series1]:
    """Local series at ``point`` of the nontrivial W^v_{gp,1}, gp >= 1.

    Bernoulli-corrected curves use the closed family; when ``swapped`` is
    given the family comes from recursion-engine tensors on the dual curve.
    """
    out: Dict[int, Series1] = {}
    if curve.bernoulli_corrected:
        for gp in range(1, h_cap // 2 + 1):
            a2g = curve.exp_x_coefficient ** (2 * gp)
            f = curve.d_y_of_x(2 * gp).scale(bernoulli_half(gp) * a2g)
            out[gp] = f.series_at(point, window)
        return out
    if swapped is None:
        return out
    inv_yp = (RationalFunction1.const(1) / curve.yp()).series_at(point, window)
    for gp in range(1, h_cap // 2 + 1):
        T = tr.omega(swapped, gp, 1)
        s = Series1.zero(window)
        for c, fs in T.terms:
            term = Series1.monomial(c, 0, window)
            for _, b, k in fs:
                term = term * Series1({0: point - b, 1: ONE}, window).pow(k).inverse()
            s = s + term
        out[gp] = s * inv_yp  # omega^v_{gp,1}/dy as a function of the chart
    return out


# ---------------------------------------------------------------------------
# base points
# ---------------------------------------------------------------------------


def default_base_points(curve: SpectralCurve, n: int, seed: int = 0) -> List[Rat]:
    """Distinct rational base points off the ramification/pole loci.

    A nonzero seed shifts the ladder deterministically, so identical
    configurations produce byte-identical output downstream.
    """
    ladder = [Rat(5, 3), Rat(7, 2), Rat(11, 4), Rat(9, 5), Rat(13, 7), Rat(17, 6), Rat(23, 9), Rat(19, 8)]
    out: List[Rat] = []
    k = 0
    attempt = 0
    while len(out) < n:
        if k < len(ladder):
            cand = ladder[k]
            k += 1
        else:
            attempt += 1
            if attempt > 500:  # pragma: no cover
                raise RuntimeError("could not find enough base points")
            cand = Rat(5, 3) + Rat(attempt, 11)
        if seed:
            cand = cand + Rat(seed % 97, 1009)
        try:
            curve.validate_base_point(cand)
        except Exception:
            continue
        if cand not in out:
            out.append(cand)
    return out


# ---------------------------------------------------------------------------
# evaluation context
# ---------------------------------------------------------------------------


class _Ctx:
    """Series frame for one (curve, g, n, base, jet_order) evaluation.

    Variables: hbar, u_1..u_n, w_1..w_n with w_i = z_i - base_i.  ``extra_w``
    widens the w windows for routes that differentiate frame series before
    the final operator pass (smearing in the general evaluator).
    """

    def __init__(
        self,
        curve: SpectralCurve,
        n: int,
        base: Sequence,
        jet_order: int,
        h_cap: int,
        u_caps: Sequence[int],
        extra_w: int = 0,
        op_M: Optional[Sequence[int]] = None,
    ) -> None:
        self.curve = curve
        self.n = n
        self.base = [Rat(b) for b in base]
        if len(set(self.base)) != n:
            raise ValueError("base points must be pairwise distinct")
        for b in self.base:
            curve.validate_base_point(b)
        self.jet_order = jet_order
        # operator sums run m = 0..M; the u truncation must cover m + shift
        self.M = list(op_M) if op_M is not None else [c - 1 for c in u_caps]
        self.wcap = [jet_order + self.M[i] + extra_w + 2 for i in range(n)]
        self.vars = ("h",) + tuple(f"u{i+1}" for i in range(n)) + tuple(f"w{i+1}" for i in range(n))
        self.trunc = (h_cap,) + tuple(u_caps) + tuple(self.wcap)
        self.uname = [f"u{i+1}" for i in range(n)]
        self.wname = [f"w{i+1}" for i in range(n)]
        # exp-structure geometry: y = lam * log z + const.  The deck shift
        # e^{(hbar u/2) d/dy} maps z to z e^{rho hbar u}; theta scales the
        # S-function arguments and the Cauchy vertex weight theta * z_i.
        lam = curve.log_slope()
        self.rho = ONE / (2 * lam) if lam != 0 else ZERO
        self.theta = ONE / lam if lam != 0 else ZERO

    # -- scalars ---------------------------------------------------------------

    def zero(self) -> MultiSeries:
        return MultiSeries.zeros(self.vars, self.trunc)

    def const(self, v) -> MultiSeries:
        return MultiSeries.const(self.vars, self.trunc, v)

    def mono(self, v, **exps) -> MultiSeries:
        return self.zero().monomial(v, **exps)

    def series_w(self, i: int, f: RationalFunction1, extra: int = 0) -> Series1:
        return f.series_at(self.base[i], self.wcap[i] + extra)

    def inject(self, ms: MultiSeries, i: int, s: Series1) -> MultiSeries:
        return ms.inject_series1(self.wname[i], s)

    def inv_yp_series(self, i: int, extra: int = 0) -> Series1:
        return self.series_w(i, RationalFunction1.const(1) / self.curve.yp(), extra=extra)

    # -- building blocks ---------------------------------------------------------

    def epsilon(self, i: int, dual_w1: Dict[int, Series1]) -> MultiSeries:
        """Operator-weight exponent for variable i:

        sum_{j, gp >= 0, (j,gp) != (0,0)} s_j u^{2j+1} hbar^{2(j+gp)}
            (d/dy)^{2j} W^v_{gp,1} |_{z = base_i + w_i},
        with W^v_{0,1} = x.
        """
        h_cap = self.trunc[0]
        ucap = self.trunc[1 + i]
        u = self.uname[i]
        out = self.zero()
        for j in range(1, h_cap // 2 + 1):
            if 2 * j + 1 > ucap or 2 * j > h_cap:
                break
            xj = self.series_w(i, self.curve.d_y_of_x(2 * j))
            out = out + self.inject(self.mono(s_coefficient(2 * j), **{u: 2 * j + 1, "h": 2 * j}), i, xj)
        for gp, w1 in sorted(dual_w1.items()):
            for j in range(0, h_cap // 2 + 1):
                hdeg = 2 * (j + gp)
                if hdeg > h_cap or 2 * j + 1 > ucap:
                    continue
                s = self.dy_pow(i, w1, 2 * j)
                out = out + self.inject(self.mono(s_coefficient(2 * j), **{u: 2 * j + 1, "h": hdeg}), i, s)
        return out

    def dy_pow(self, i: int, s: Series1, k: int) -> Series1:
        if k == 0:
            return s
        inv_yp = self.inv_yp_series(i, extra=k + 2)
        for _ in range(k):
            s = s.derivative() * inv_yp
        return s

    def s_of_hu(self, i: int, invert: bool) -> MultiSeries:
        """S(theta hbar u_i) or its reciprocal (theta from the chart slope)."""
        out = self.const(1)
        u = self.uname[i]
        cap = min(self.trunc[0], self.trunc[1 + i])
        t2 = self.theta * self.theta
        scale = ONE
        for k in range(1, cap // 2 + 1):
            scale = scale * t2
            c = bernoulli_half(k) if invert else s_coefficient(2 * k)
            out = out + self.mono(c * scale, **{u: 2 * k, "h": 2 * k})
        return out

    def exp_hu(self, i: int, sign: int) -> MultiSeries:
        """exp(sign * rho * hbar * u_i): the deck shift of the chart coordinate."""
        out = self.const(1)
        u = self.uname[i]
        cap = min(self.trunc[0], self.trunc[1 + i])
        r = self.rho if sign > 0 else -self.rho
        p = ONE
        for k in range(1, cap + 1):
            p = p * r
            out = out + self.mono(p / factorial(k), **{u: k, "h": k})
        return out

    def zvar(self, i: int) -> MultiSeries:
        return self.const(self.base[i]) + self.mono(1, **{self.wname[i]: 1})

    def vertex_weight(self, i: int) -> MultiSeries:
        """theta * z_i, the Cauchy-determinant per-vertex weight (exp structure)."""
        return self.zvar(i).scale(self.theta)

    def y_shift(self, i: int) -> MultiSeries:
        """y(base_i + w_i) - y(base_i) for chart-rational y."""
        ys = self.curve.y.rational_part.series_at(self.base[i], self.wcap[i])
        ys = ys - Series1.monomial(ys[0], 0, ys.order)
        return self.inject(self.const(1), i, ys)

    def y_const(self, i: int) -> Rat:
        return self.curve.y.rational_part.eval(self.base[i])

    # -- kernels ------------------------------------------------------------------

    def cycle_kernel(self, i: int, j: int) -> MultiSeries:
        if i == j:
            raise ValueError("cycle kernel needs i != j (diagonal pole)")
        if self.curve.pair_structure == "linear":
            c0 = self.y_const(i) - self.y_const(j)
            if c0 == 0:
                raise ValueError("coinciding y values at base points (diagonal pole)")
            denom = (
                self.const(c0)
                + self.y_shift(i)
                - self.y_shift(j)
                + self.mono(Rat(1, 2), h=1, **{self.uname[i]: 1})
                + self.mono(Rat(1, 2), h=1, **{self.uname[j]: 1})
            )
            return denom.inverse()
        if self.curve.pair_structure == "exp":
            if self.base[i] == self.base[j]:
                raise ValueError("coinciding base points (diagonal pole)")
            denom = self.zvar(i) * self.exp_hu(i, +1) - self.zvar(j) * self.exp_hu(j, -1)
            return denom.inverse()
        raise ValueError(
            f"curve {self.curve.name!r} has no inverse-difference kernel; use the general evaluator"
        )

    def pair_edge(self, i: int, j: int) -> MultiSeries:
        """Graph-sum edge weight e^{c^(u_i,u_j,y_i,y_j)} - 1."""
        u_i, u_j = self.uname[i], self.uname[j]
        if self.curve.pair_structure == "linear":
            Y = self.const(self.y_const(i) - self.y_const(j)) + self.y_shift(i) - self.y_shift(j)
            s = self.mono(Rat(1, 2), h=1, **{u_i: 1}) + self.mono(Rat(1, 2), h=1, **{u_j: 1})
            return (Y * Y - s * s).inverse() * self.mono(1, h=2, **{u_i: 1, u_j: 1})
        if self.curve.pair_structure == "exp":
            zi, zj = self.zvar(i), self.zvar(j)
            a = zi * self.exp_hu(i, +1) - zj * self.exp_hu(j, -1)
            b = zi * self.exp_hu(i, -1) - zj * self.exp_hu(j, +1)
            num = zi * zj * self.s_of_hu(i, invert=False) * self.s_of_hu(j, invert=False)
            t2 = self.theta * self.theta
            return (a * b).inverse() * num * self.mono(t2, h=2, **{u_i: 1, u_j: 1})
        raise ValueError("pair kernel undefined for this curve; use the general evaluator")

    # -- operator pass --------------------------------------------------------------

    def apply_operators(self, main: MultiSeries, shift: int) -> Tuple[MultiSeries, MultiSeries]:
        """prod_i sum_{m=0}^{M_i} (-d/dx_i)^m (-dy_i/dx_i) [u_i^{m+shift}] ( . ).

        Returns (result, top) where ``top`` carries every contribution using
        some m = M_i slice; the caller asserts it vanishes at the target order.
        """
        tops: List[MultiSeries] = []
        for i in range(self.n):
            neg_dydx = self.series_w(i, (self.curve.yp() / self.curve.xp()).scale(-1), extra=2)
            inv_xp = self.series_w(i, RationalFunction1.const(1) / self.curve.xp(), extra=2)
            new_tops = []
            for t in tops:
                full, _ = self._apply_one(t, i, shift, neg_dydx, inv_xp, split_top=False)
                new_tops.append(full)
            main, top_i = self._apply_one(main, i, shift, neg_dydx, inv_xp, split_top=True)
            new_tops.append(top_i)
            tops = new_tops
        total_top = self.zero()
        for t in tops:
            total_top = total_top + t
        return main, total_top

    def _apply_one(self, X: MultiSeries, i: int, shift: int, neg_dydx: Series1, inv_xp: Series1, split_top: bool):
        u, w, M = self.uname[i], self.wname[i], self.M[i]
        out, top = self.zero(), self.zero()
        for m in range(0, M + 1):
            c = X.coeff_of(u, m + shift)
            if c.is_zero():
                continue
            term = self.inject(c, i, neg_dydx)
            for _ in range(m):
                term = self.inject(term.diff(w), i, inv_xp).scale(-1)
            if split_top and m == M:
                top = top + term
            else:
                out = out + term
        return out, top

    def prune(self, ms: MultiSeries, shift: int) -> MultiSeries:
        """Drop monomials that cannot reach the final jet window.

        A term only survives the operator pass if, for each variable, the
        w-degree minus the eventual derivative count m_i = u_i(final) - shift
        fits in the jet order.  Future factors raise u at most 3:2 against the
        remaining hbar budget (kernels and S-factors pair them 1:1, operator
        exponent terms carry u^{2j+1} per hbar^{2j}), giving the sound bound
            2 sum_i max(0, w_i - u_i - shift) <= 2 jet + 3 (h_cap - h).
        """
        h_cap = self.trunc[0]
        jet2 = 2 * self.jet_order
        nu = self.n
        out = MultiSeries(ms.vars, ms.trunc)
        for e, v in ms.c.items():
            excess = 0
            for i in range(nu):
                d = e[1 + nu + i] - e[1 + i] - shift
                if d > 0:
                    excess += d
            if 2 * excess <= jet2 + 3 * (h_cap - e[0]):
                out.c[e] = v
        return out

    def finish(self, ms: MultiSeries, h_target: int) -> Jet:
        res = ms.coeff_of("h", h_target)
        for u in self.uname:
            if res.max_power(u):
                raise TruncationError("u power survived final extraction")
        res = res.truncate_total(self.wname, self.jet_order)
        for i, w in enumerate(self.wname):
            res = res.truncate_var(w, self.jet_order)
        return Jet.from_multiseries(res, self.wname, self.base, self.jet_order)

    def assert_top_vanishes(self, top: MultiSeries, h_target: int, label: str) -> None:
        resid = top.coeff_of("h", h_target)
        for u in self.uname:
            resid = resid.truncate_var(u, 0)
        resid = resid.truncate_total(self.wname, self.jet_order)
        if not resid.is_zero():
            raise TruncationError(f"operator truncation bound too small ({label})")


# ---------------------------------------------------------------------------
# spec surface helpers (used by tests and the CLI)
# ---------------------------------------------------------------------------


def o_operator_exponent(curve: SpectralCurve, base_point, h_order: int, u_order: int, jet_order: int = 4) -> MultiSeries:
    """Exponent of the per-variable operator weight at one base point."""
    ctx = _Ctx(curve, 1, [base_point], jet_order, h_order, [u_order + 1])
    window = ctx.wcap[0] + h_order + 6
    dual = _dual_w1_series(curve, None, Rat(base_point), h_order, window)
    return ctx.epsilon(0, dual)


def pair_kernel(curve: SpectralCurve, base_i, base_j, h_order: int, u_order: int, jet_order: int = 2) -> MultiSeries:
    """Off-diagonal cycle kernel expansion (exact through the given orders)."""
    ctx = _Ctx(curve, 2, [base_i, base_j], jet_order, h_order, [u_order + 1, u_order + 1])
    return ctx.cycle_kernel(0, 1)


def diagonal_kernel(curve: SpectralCurve, h_order: int, u_order: int) -> MultiSeries:
    """Per-vertex diagonal weight: 1/S(hbar u) (exp structure) or 1 (linear)."""
    ctx = _Ctx(curve, 1, [default_base_points(curve, 1)[0]], 0, h_order, [u_order + 1])
    if curve.pair_structure == "exp":
        return ctx.s_of_hu(0, invert=True)
    if curve.pair_structure == "linear":
        return ctx.const(1)
    raise ValueError("diagonal kernel undefined for this curve")


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def enumerate_n_cycles(n: int) -> List[Tuple[int, ...]]:
    """All n-cycles on {0..n-1} as successor maps; (n-1)! of them."""
    if n < 1:
        raise ValueError("n >= 1")
    if n > _ENUM_BOUND:
        raise ValueError(f"n beyond practical bound {_ENUM_BOUND}")
    if n == 1:
        return [(0,)]
    out = []
    for rest in itertools.permutations(range(1, n)):
        sigma = [0] * n
        chain = (0,) + rest
        for a, b in zip(chain, chain[1:] + (0,)):
            sigma[a] = b
        out.append(tuple(sigma))
    return out


def _connected(n: int, groups: Iterable[Sequence[int]]) -> bool:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for grp in groups:
        grp = list(grp)
        for b in grp[1:]:
            parent[find(grp[0])] = find(b)
    return len({find(i) for i in range(n)}) == 1


def enumerate_connected_graphs(n: int) -> List[Tuple[Tuple[int, int], ...]]:
    """Connected simple labelled graphs on n vertices as sorted edge tuples."""
    if n < 1:
        raise ValueError("n >= 1")
    if n > _ENUM_BOUND:
        raise ValueError(f"n beyond practical bound {_ENUM_BOUND}")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out = []
    for mask in range(1 << len(pairs)):
        edges = tuple(pairs[k] for k in range(len(pairs)) if mask >> k & 1)
        if _connected(n, edges):
            out.append(edges)
    return out


def enumerate_bicoloured(n: int, edge_budget: int) -> List[Tuple[Tuple[Tuple[int, ...], ...], int]]:
    """Connected collections of inner vertices with automorphism counts.

    An inner vertex is recorded by the multiset of labelled vertices its
    edges reach (sorted tuple, repeats allowed, valence >= 2) and costs
    2*valence - 2 hbar orders, which bounds the enumeration.  |Aut| is the
    product over identical inner vertices of their multiplicity factorial
    times, per inner vertex, the factorials of its repeated-edge counts.
    Pure doubled singletons (j, j) are handled analytically by the
    evaluators (their exponential is the per-vertex diagonal weight) and
    are not streamed.
    """
    if n < 1:
        raise ValueError("n >= 1")
    if n > _ENUM_BOUND:
        raise ValueError(f"n beyond practical bound {_ENUM_BOUND}")
    max_size = max(2, (edge_budget + 2) // 2)
    types: List[Tuple[int, ...]] = []
    for size in range(2, max_size + 1):
        for t in itertools.combinations_with_replacement(range(n), size):
            if size == 2 and t[0] == t[1]:
                continue  # doubled singleton: analytic diagonal weight
            types.append(t)
    results: List[Tuple[Tuple[Tuple[int, ...], ...], int]] = []

    def edge_aut(t: Tuple[int, ...]) -> int:
        a = 1
        for lbl in set(t):
            a *= factorial(t.count(lbl))
        return a

    def rec(idx: int, budget: int, chosen: List[Tuple[int, ...]], aut: int) -> None:
        if idx == len(types):
            ms = tuple(chosen)
            if (n == 1 and not ms) or (ms and _connected(n, [set(t) for t in ms])):
                results.append((ms, aut))
            return
        t = types[idx]
        cost = 2 * len(t) - 2
        ea = edge_aut(t)
        mult, fact = 0, 1
        while mult * cost <= budget:
            rec(idx + 1, budget - mult * cost, chosen + [t] * mult, aut * fact * ea**mult)
            mult += 1
            fact *= mult

    rec(0, edge_budget, [], 1)
    return results


def connected_part(disconnected: Dict[frozenset, Rat], subset: Iterable) -> Rat:
    """Moebius inversion over the partition lattice of ``subset``.

    ``disconnected`` maps every nonempty frozenset block to its disconnected
    value; the result is the connected value on the full subset.
    """
    elems = sorted(subset)
    if not elems:
        raise ValueError("empty subset")
    total = ZERO
    for pi in _partitions(elems):
        weight = Rat((-1) ** (len(pi) - 1)) * factorial(len(pi) - 1)
        prod = ONE
        for block in pi:
            key = frozenset(block)
            if key not in disconnected:
                raise KeyError(f"missing subset data for {sorted(block)}")
            prod = prod * disconnected[key]
        total += weight * prod
    return total


def _partitions(elems: List) -> Iterable[List[List]]:
    if len(elems) == 1:
        yield [[elems[0]]]
        return
    first, rest = elems[0], elems[1:]
    for sub in _partitions(rest):
        for k in range(len(sub)):
            yield sub[:k] + [[first] + sub[k]] + sub[k + 1:]
        yield [[first]] + sub


# ---------------------------------------------------------------------------
# evaluators
# ---------------------------------------------------------------------------


def xy_w(
    curve: SpectralCurve,
    g: int,
    n: int,
    base: Optional[Sequence] = None,
    jet_order: int = 4,
    method: str = "cycles",
) -> Jet:
    """Jet of W_{g,n} at rational base points via the selected duality route."""
    if n < 1 or g < 0:
        raise ValueError("need n >= 1, g >= 0")
    if 2 * g + n - 2 < 0:
        raise ValueError("(0,1) is the seed W_{0,1} = y(x); nothing to evaluate")
    if base is None:
        base = default_base_points(curve, n)
    if method in ("cycles", "graphs"):
        # The displayed duality formulas are homogeneous partners of the
        # engine's correlator convention: evaluating them on (x, -y/2) lands
        # exactly on W = omega/prod dx as the engine normalises it.
        curve = rescale_y(curve, Rat(-1, 2))
    if method == "cycles":
        return _xy_cycles(curve, g, n, base, jet_order)
    if method == "graphs":
        return _xy_graphs(curve, g, n, base, jet_order)
    if method == "general":
        return xy_general(curve, g, n, base, jet_order)
    raise ValueError(f"unknown method {method!r}")


def xy_cycles(curve, g, n, base=None, jet_order: int = 4) -> Jet:
    return xy_w(curve, g, n, base, jet_order, "cycles")


def xy_graphs(curve, g, n, base=None, jet_order: int = 4) -> Jet:
    return xy_w(curve, g, n, base, jet_order, "graphs")


def _xy_cycles(curve: SpectralCurve, g: int, n: int, base, jet_order: int) -> Jet:
    N = 2 * g + n - 2
    M = 2 * g + n + 1
    shift = 1 if n == 1 else 0
    h_cap = N + shift
    ctx = _Ctx(curve, n, base, jet_order, h_cap, [M + shift] * n, op_M=[M] * n)

    eps = []
    for i in range(n):
        window = ctx.wcap[i] + h_cap + 6
        dual = _dual_w1_series(curve, None, ctx.base[i], h_cap, window)
        eps.append(ctx.epsilon(i, dual))

    if n == 1:
        X = eps[0].exp()
        if curve.pair_structure == "exp":
            X = X * ctx.s_of_hu(0, invert=True)
        elif curve.pair_structure != "linear":
            raise ValueError("cycle evaluation needs an inverse-difference structure")
        main, top = ctx.apply_operators(X, shift=1)
        ctx.assert_top_vanishes(top, N + 1, f"{curve.name} ({g},{n}) cycles")
        return ctx.finish(main, N + 1)

    vertex = ctx.const(1)
    for i in range(n):
        f = eps[i].exp()
        if curve.pair_structure == "exp":
            f = f * ctx.vertex_weight(i)
        vertex = ctx.prune(vertex * f, 0)
    kern = {}
    for i in range(n):
        for j in range(n):
            if i != j:
                kern[(i, j)] = ctx.prune(ctx.cycle_kernel(i, j), 0)
    cyc = ctx.zero()
    for sigma in enumerate_n_cycles(n):
        prod = ctx.const(1)
        for i in range(n):
            prod = ctx.prune(prod * kern[(i, sigma[i])], 0)
        cyc = cyc + prod
    X = ctx.prune(vertex * cyc.scale(Rat((-1) ** (n - 1))), 0)
    main, top = ctx.apply_operators(X, shift=0)
    ctx.assert_top_vanishes(top, N, f"{curve.name} ({g},{n}) cycles")
    return ctx.finish(main, N)


def _xy_graphs(curve: SpectralCurve, g: int, n: int, base, jet_order: int) -> Jet:
    N = 2 * g + n - 2
    M = 2 * g + n + 1
    h_cap = N + n
    ctx = _Ctx(curve, n, base, jet_order, h_cap, [M + 1] * n)
    vertex = ctx.const(1)
    for i in range(n):
        window = ctx.wcap[i] + h_cap + 6
        dual = _dual_w1_series(curve, None, ctx.base[i], h_cap, window)
        f = ctx.epsilon(i, dual).exp()
        if curve.pair_structure == "exp":
            f = f * ctx.s_of_hu(i, invert=True)
        vertex = ctx.prune(vertex * f, 1)
    if n == 1:
        X = vertex
    else:
        edges = {
            (i, j): ctx.prune(ctx.pair_edge(i, j), 1) for i in range(n) for j in range(i + 1, n)
        }
        gsum = ctx.zero()
        for graph in enumerate_connected_graphs(n):
            prod = ctx.const(1)
            for e in graph:
                prod = ctx.prune(prod * edges[e], 1)
            gsum = gsum + prod
        X = ctx.prune(vertex * gsum, 1)
    main, top = ctx.apply_operators(X, shift=1)
    ctx.assert_top_vanishes(top, N + n, f"{curve.name} ({g},{n}) graphs")
    return ctx.finish(main, N + n)


def operator_residual(curve: SpectralCurve, g: int, base_point=None, jet_order: int = 4) -> Jet:
    """[hbar^{2g}] of  sum_m (-d/dx)^m (-dy/dx) [u^m] exp(operator exponent).

    The self-duality vanishing statement: for Bernoulli-corrected curves this
    is -dy/dx at hbar^0 and the exact zero jet for every g >= 1.
    """
    if base_point is None:
        base_point = default_base_points(curve, 1)[0]
    N = 2 * g
    # the exponent raises u three halves per hbar order, so m can reach 3N/2
    M = 3 * N // 2 + 2
    ctx = _Ctx(curve, 1, [base_point], jet_order, N, [M + 1])
    window = ctx.wcap[0] + N + 6
    dual = _dual_w1_series(curve, None, ctx.base[0], N, window)
    X = ctx.epsilon(0, dual).exp()
    main, top = ctx.apply_operators(X, shift=0)
    ctx.assert_top_vanishes(top, N, f"{curve.name} residual g={g}")
    return ctx.finish(main, N)


# ---------------------------------------------------------------------------
# the general bicoloured-graph evaluator
# ---------------------------------------------------------------------------


def xy_general(curve: SpectralCurve, g: int, n: int, base=None, jet_order: int = 4) -> Jet:
    """Full graph-sum duality with dual correlators from the recursion engine.

    For curves with unramified y this reduces term-by-term to ``xy_graphs``;
    with ramified y the swapped curve must be within the recursion engine's
    class (simple rational ramification).
    """
    N = 2 * g + n - 2
    M = 2 * g + n + 1
    h_cap = N + n
    if base is None:
        base = default_base_points(curve, n)
    # same homogeneity frame as the other routes; the dual tensors are
    # produced by the engine on the matching rescaled swapped curve
    curve = rescale_y(curve, Rat(-1, 2))
    swapped = rescale_y(swap_xy(curve), Rat(-2))
    dual_ram = tr._ram(swapped, 8)
    has_dual = bool(dual_ram.points)
    use_tensors = has_dual and not curve.bernoulli_corrected
    # frame derivatives happen only in the operator pass; inner-vertex smears
    # run in their own slot frames, so no extra w margin is needed here
    ctx = _Ctx(curve, n, base, jet_order, h_cap, [M + 1] * n)

    vertex = ctx.const(1)
    for i in range(n):
        window = ctx.wcap[i] + h_cap + 6
        dual = _dual_w1_series(curve, swapped if use_tensors else None, ctx.base[i], h_cap, window)
        vertex = ctx.prune(vertex * ctx.epsilon(i, dual).exp() * _diagonal_weight(ctx, i, swapped if use_tensors else None, h_cap), 1)

    if n == 1:
        X = vertex
    else:
        gsum = ctx.zero()
        weights: Dict[Tuple[int, ...], MultiSeries] = {}
        for ms, aut in enumerate_bicoloured(n, h_cap):
            if not ms:
                continue
            prod = ctx.const(Rat(1) / aut)
            for I in ms:
                if I not in weights:
                    weights[I] = ctx.prune(_c_hat_general(ctx, I, swapped if use_tensors else None, h_cap), 1)
                prod = ctx.prune(prod * weights[I], 1)
            gsum = gsum + prod
        X = ctx.prune(vertex * gsum, 1)
    main, top = ctx.apply_operators(X, shift=1)
    ctx.assert_top_vanishes(top, N + n, f"{curve.name} ({g},{n}) general")
    return ctx.finish(main, N + n)


def _ms_inv_pow(base: MultiSeries, k: int) -> MultiSeries:
    out = base
    for _ in range(k - 1):
        out = out * base
    return out.inverse()


def _divide_by_diff(ms: MultiSeries, ia: int = 0, ib: int = 1) -> MultiSeries:
    """Exact division of a series by (s_ia - s_ib)."""
    out = MultiSeries(ms.vars, ms.trunc)
    ncoef: Dict[int, Dict[Tuple[int, ...], Rat]] = {}
    for e, v in ms.c.items():
        rest = e[:ia] + (0,) + e[ia + 1:]
        ncoef.setdefault(e[ia], {})[rest] = v
    A = max(ncoef, default=0)
    prev: Dict[Tuple[int, ...], Rat] = {}
    for idx in range(A, 0, -1):
        cur = dict(ncoef.get(idx, {}))
        for e, v in prev.items():
            ne = e[:ib] + (e[ib] + 1,) + e[ib + 1:]
            nv = cur.get(ne, ZERO) + v
            if nv == 0:
                cur.pop(ne, None)
            else:
                cur[ne] = nv
        prev = cur
        for e, v in cur.items():
            ne = e[:ia] + (idx - 1,) + e[ia + 1:]
            if all(x <= t for x, t in zip(ne, ms.trunc)) and v != 0:
                out.c[ne] = v
    return out


def _c_hat_general(ctx: _Ctx, labels: Tuple[int, ...], swapped: Optional[SpectralCurve], h_cap: int) -> MultiSeries:
    """Smeared dual-correlator weight for one inner vertex.

    ``labels`` is the multiset of outer labels the vertex joins (sorted,
    repeats allowed).  Each edge occupies its own slot; the dual correlator
    sum is expanded in slot variables at the corresponding base points, each
    slot is smeared by  hbar u S(hbar u d/dy), and coinciding slots are then
    collapsed onto the frame variable of their label.  Only the (0,2) part of
    a repeated pair needs the double-pole regularisation; all other dual
    correlators are regular at coinciding generic points.
    """
    r = len(labels)
    names = tuple(f"s{k}" for k in range(r))
    Wslot = max(ctx.wcap) + 2 * h_cap + 8
    caps = (Wslot,) * r
    curve = ctx.curve

    def slot(c=None) -> MultiSeries:
        return MultiSeries(names, caps, c or {})

    inv_yp = [
        (RationalFunction1.const(1) / curve.yp()).series_at(ctx.base[lbl], Wslot + 2)
        for lbl in labels
    ]

    parts: Dict[int, MultiSeries] = {}

    def add_part(h: int, ms: MultiSeries) -> None:
        parts[h] = parts[h] + ms if h in parts else ms

    if r == 2:
        i, j = labels
        if i == j:
            # regularised diagonal: [B/(dy dy) - 1/(y_a - y_b)^2] as a series
            p = ctx.base[i]
            ydiff = curve.y.diff_series_at(p, Wslot + 2)
            H = slot()
            for kdeg, v in ydiff.c.items():
                for l in range(kdeg):
                    if l <= Wslot and kdeg - 1 - l <= Wslot:
                        e = (l, kdeg - 1 - l)
                        H.c[e] = H.c.get(e, ZERO) + v
            gab = slot()
            for da, va in inv_yp[0].c.items():
                for db, vb in inv_yp[1].c.items():
                    if da <= Wslot and db <= Wslot:
                        e = (da, db)
                        gab.c[e] = gab.c.get(e, ZERO) + va * vb
            Hinv = H.inverse()
            add_part(0, _divide_by_diff(_divide_by_diff(gab - Hinv * Hinv)))
        else:
            diff = slot({(0, 0): ctx.base[i] - ctx.base[j], (1, 0): ONE, (0, 1): Rat(-1)})
            w02 = (diff * diff).inverse()
            w02 = w02.inject_series1("s0", inv_yp[0]).inject_series1("s1", inv_yp[1])
            add_part(0, w02)

    if swapped is not None:
        gp = 1 if r == 2 else 0
        while True:
            hshift = 2 * gp + r - 2
            if hshift + r > h_cap:
                break
            T = tr.omega(swapped, gp, r)
            if not T.is_zero():
                acc = slot()
                for c, fs in T.terms:
                    piece = slot({(0,) * r: Rat(c)})
                    for var, b, k in fs:
                        e = tuple(1 if kk == var else 0 for kk in range(r))
                        onevar = slot({(0,) * r: ctx.base[labels[var]] - b, e: ONE})
                        piece = piece * _ms_inv_pow(onevar, k)
                    acc = acc + piece
                for k in range(r):
                    acc = acc.inject_series1(names[k], inv_yp[k])
                add_part(hshift, acc)
            gp += 1

    # smear every slot, then collapse repeated labels
    out = ctx.zero()
    ucap = {lbl: ctx.trunc[1 + lbl] for lbl in set(labels)}
    wcap = {lbl: ctx.wcap[lbl] for lbl in set(labels)}

    def rec(k: int, ser: MultiSeries, jvec: Tuple[int, ...], hdeg: int) -> Iterable[Tuple[MultiSeries, Tuple[int, ...], int]]:
        if k == r:
            yield ser, jvec, hdeg
            return
        j = 0
        cur = ser
        while hdeg + 2 * j + 1 + (r - 1 - k) <= h_cap:
            yield from rec(k + 1, cur, jvec + (j,), hdeg + 2 * j + 1)
            # next even derivative pair in slot k
            cur = cur.diff(names[k]).inject_series1(names[k], inv_yp[k])
            cur = cur.diff(names[k]).inject_series1(names[k], inv_yp[k])
            j += 1

    for hbase, ser in parts.items():
        if hbase + r > h_cap:
            continue
        for smeared, jvec, hdeg in rec(0, ser, (), hbase):
            udeg: Dict[int, int] = {}
            for k, lbl in enumerate(labels):
                udeg[lbl] = udeg.get(lbl, 0) + 2 * jvec[k] + 1
            if any(d > ucap[lbl] for lbl, d in udeg.items()):
                continue
            coeff = ONE
            for j in jvec:
                coeff = coeff * s_coefficient(2 * j)
            acc: Dict[Tuple[Tuple[int, int], ...], Rat] = {}
            ok_all = True
            for e, v in smeared.c.items():
                wdeg: Dict[int, int] = {}
                for k, lbl in enumerate(labels):
                    wdeg[lbl] = wdeg.get(lbl, 0) + e[k]
                if any(d > wcap[lbl] for lbl, d in wdeg.items()):
                    continue
                key = tuple(sorted(wdeg.items()))
                acc[key] = acc.get(key, ZERO) + v
            for key, v in acc.items():
                if v == 0:
                    continue
                exps = {"h": hdeg}
                for lbl, d in udeg.items():
                    exps[ctx.uname[lbl]] = d
                for lbl, d in key:
                    if d:
                        exps[ctx.wname[lbl]] = exps.get(ctx.wname[lbl], 0) + d
                out = out + ctx.mono(coeff * v, **exps)
    return out


def _diagonal_weight(ctx: _Ctx, i: int, swapped: Optional[SpectralCurve], h_cap: int) -> MultiSeries:
    """exp(c^(u_i, u_i, y_i, y_i)/2): the doubled-singleton decoration."""
    if swapped is None:
        if ctx.curve.pair_structure == "exp":
            return ctx.s_of_hu(i, invert=True)
        if ctx.curve.pair_structure == "linear":
            return ctx.const(1)
    c_jj = _c_hat_general(ctx, (i, i), swapped, h_cap)
    if c_jj.is_zero():
        return ctx.const(1)
    return c_jj.scale(Rat(1, 2)).exp()
