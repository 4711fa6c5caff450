"""Acceptance gate: one test per criterion, one printed pass/fail line each.

Every tolerance is exact (zero tolerance): all comparisons are equalities of
exact rational jets, tensors or numbers.  Run with

    pytest tests/test_acceptance.py -v -s
"""

import time

import pytest

from trxy import invariants, tr, wave, xy
from trxy.curves import make_preset
from trxy.rationals import Rat, bernoulli_half, factorial, s_coefficient
from trxy.series import Jet, RationalFunction1, Series1


def tr_jet(curve, g, n, base, order):
    T = tr.omega(curve, g, n)
    return Jet([f"w{i+1}" for i in range(n)], base, order, T.w_series_at(curve, base, order))


def report(num, label, ok):
    print(f"[criterion {num}] {'PASS' if ok else 'FAIL'}: {label}")
    assert ok, f"criterion {num} failed: {label}"


ORACLE_CURVES = [
    ("lambert-exp", {}),
    ("vertex", {"f": 1}),
    ("vertex", {"f": 2}),
    ("vertex", {"f": 3}),
    ("gw-p1", {"t": 1}),
    ("gw-p1", {"t": 2}),
]

# all (g, n) with 2g + n - 2 <= 4 and n <= 3; the (0,1) and (0,2) cases are
# the common seeds of both constructions ((0,2) is still compared, (0,1) is
# definitional on both sides)
ORACLE_TARGETS = [(0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 1), (2, 2)]


def test_criterion_1_oracle_equivalence():
    t0 = time.time()
    ok = True
    for name, params in ORACLE_CURVES:
        curve = make_preset(name, params)
        for (g, n) in ORACLE_TARGETS:
            base = xy.default_base_points(curve, n)
            jx = xy.xy_cycles(curve, g, n, base, 4)
            if 2 * g + n - 2 >= 1:
                jt = tr_jet(curve, g, n, base, 4)
            else:
                # the (0,2) seed: B/(dx dx) with the double pole, in closed form
                jt = _seed_w02_jet(curve, base, 4)
            same = jx == jt
            ok &= same
            if not same:
                print(f"    mismatch: {name}{params} ({g},{n})")
    report(1, f"duality == engine on 6 curves x {len(ORACLE_TARGETS)} sectors, order-4 jets ({time.time()-t0:.0f}s)", ok)


def _seed_w02_jet(curve, base, order):
    """W_{0,2} = 1/((z1 - z2)^2 x'(z1) x'(z2)) in closed form, as a jet."""
    from trxy.series import MultiSeries

    xp = curve.xp()
    s1 = (RationalFunction1.const(1) / xp).series_at(base[0], order)
    s2 = (RationalFunction1.const(1) / xp).series_at(base[1], order)
    ms = MultiSeries(("w1", "w2"), (order, order))
    ms.c[(0, 0)] = base[0] - base[1]
    ms.c[(1, 0)] = Rat(1)
    ms.c[(0, 1)] = Rat(-1)
    inv = (ms * ms).inverse()
    inv = inv.inject_series1("w1", s1).inject_series1("w2", s2)
    return Jet(["w1", "w2"], base, order, {e: v for e, v in inv.c.items() if sum(e) <= order})


def test_criterion_2_method_agreement():
    t0 = time.time()
    ok = True
    for name, params in ORACLE_CURVES:
        curve = make_preset(name, params)
        for (g, n) in [(1, 1), (1, 2), (2, 2), (1, 3)]:
            order = 4 if n <= 2 else 2
            base = xy.default_base_points(curve, n)
            same = xy.xy_cycles(curve, g, n, base, order) == xy.xy_graphs(curve, g, n, base, order)
            ok &= same
            if not same:
                print(f"    cycles != graphs: {name}{params} ({g},{n})")
    cubic = make_preset("cubic")
    for (g, n) in [(0, 3), (1, 1), (1, 2)]:
        base = xy.default_base_points(cubic, n)
        same = xy.xy_general(cubic, g, n, base, 2) == tr_jet(cubic, g, n, base, 2)
        ok &= same
        if not same:
            print(f"    general != engine: cubic ({g},{n})")
    report(2, f"cycle == graph routes and general == engine on the test curve ({time.time()-t0:.0f}s)", ok)


def test_criterion_3_quantum_dilog_vanishing():
    t0 = time.time()
    curve = make_preset("dilog")
    ok = True
    for g in range(1, 6):
        z = xy.operator_residual(curve, g, Rat(5, 3), 4).is_zero()
        ok &= z
        if not z:
            print(f"    nonzero residual at genus {g}")
    report(3, f"self-duality residuals vanish identically for g = 1..5 ({time.time()-t0:.0f}s)", ok)


def test_criterion_4_gamma_reproduction():
    t0 = time.time()
    curve = make_preset("gamma")
    base = xy.default_base_points(curve, 1)
    ok = True
    for g in range(1, 6):
        jet = xy.xy_cycles(curve, g, 1, base, 4)
        # Bernoulli-weighted derivative pattern of the factorial wave function,
        # transported to the engine frame by the exact homogeneity factor
        closed = wave.stirling_phi(g).derivative().scale(Rat(-2) ** (2 * g - 1))
        ser = closed.series_at(base[0], 4)
        same = all(jet.coeffs.get((d,), Rat(0)) == ser[d] for d in range(5))
        ok &= same
        if not same:
            print(f"    one-point mismatch at genus {g}")
    for (g, n) in [(0, 3), (1, 2), (2, 2), (1, 3), (2, 3)]:
        if n == 3 and g == 2:
            order = 1  # heaviest vanishing sector; exactness is order-independent
        else:
            order = 2
        z = xy.xy_cycles(curve, g, n, xy.default_base_points(curve, n), order).is_zero()
        ok &= z
        if not z:
            print(f"    nonvanishing at ({g},{n})")
    qcc = wave.quantum_curve_check(curve, 5)["passed"]
    ok &= qcc
    report(4, f"factorial-curve one-point family matches the Stirling pattern (g <= 5) and higher sectors vanish ({time.time()-t0:.0f}s)", ok)


def test_criterion_5_intersection_table():
    t0 = time.time()
    ok = True
    for method in ("tr", "xy"):
        ok &= invariants.extract_psi(0, (0, 0, 0), method).value == 1
        ok &= invariants.extract_psi(1, (1,), method).value == Rat(1, 24)
        ok &= invariants.extract_psi(2, (4,), method).value == Rat(1, 1152)
    report(5, f"<tau_0^3> = 1, <tau_1> = 1/24, <tau_4>_2 = 1/1152 via both pipelines ({time.time()-t0:.0f}s)", ok)


def _compositions(total, n):
    if n == 1:
        return [(total,)]
    out = []
    for first in range(total + 1):
        for rest in _compositions(total - first, n - 1):
            out.append((first,) + rest)
    return out


def test_criterion_6_gw_p1_closed_forms():
    t0 = time.time()
    ok = True
    # degree-1 closed form prod [mu^{b_i+1}] (e^{mu/2} - e^{-mu/2}) for all
    # admissible b with n <= 3, g <= 2; includes 1/1920 at b = (4) and 1/576
    # at b = (2,2)
    for g in range(0, 3):
        total = 2 * g
        for n in range(1, 4):
            for bs in _compositions(total, n):
                got = invariants.extract_gw_p1(g, bs, "xy").value
                want = invariants.gw_p1_degree_one_closed(bs)
                if got != want:
                    ok = False
                    print(f"    degree-1 mismatch at g={g}, b={bs}")
    ok &= invariants.extract_gw_p1(2, (4,), "xy").value == Rat(1, 1920)
    ok &= invariants.extract_gw_p1(2, (2, 2), "xy").value == Rat(1, 576)
    # one-point series for d <= 2, g <= 2 against the independent S-power oracle
    for g in range(0, 3):
        for d in (1, 2):
            b = 2 * g - 2 + 2 * d
            if b < 0:
                continue
            s = Series1.from_list([s_coefficient(i) for i in range(2 * g + 1)], 2 * g)
            oracle = s.pow(2 * d - 1)[2 * g] / Rat(factorial(d)) ** 2
            if invariants.extract_gw_p1(g, (b,), "xy").value != oracle:
                ok = False
                print(f"    one-point series mismatch at g={g}, d={d}")
    report(6, f"degree-1 product formula (n <= 3, g <= 2, incl. 1/1920, 1/576) and one-point series d <= 2 ({time.time()-t0:.0f}s)", ok)


def test_criterion_7_t_continuity():
    t0 = time.time()
    gw0 = make_preset("gw-p1", {"t": 0})
    gamma = make_preset("gamma")
    base = xy.default_base_points(gamma, 1)
    ok = True
    for g in range(1, 4):
        same = xy.xy_cycles(gw0, g, 1, base, 4) == xy.xy_cycles(gamma, g, 1, base, 4)
        ok &= same
        if not same:
            print(f"    t->0 mismatch at genus {g}")
    report(7, f"t -> 0 coefficients coincide with the factorial curve for (g,1), g <= 3 ({time.time()-t0:.0f}s)", ok)


def test_criterion_8_property_suites():
    t0 = time.time()
    from trxy.cli import build_suite

    ok = True
    for label, fn in build_suite("cauchy", 0, 0):
        ok &= bool(fn())
    # exp/log/reversion round trips on a deterministic sample
    import random

    rng = random.Random(11)
    for _ in range(25):
        c = {rng.randint(1, 8): Rat(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(rng.randint(1, 12))}
        f = Series1(c, 8)
        one = Series1.one(8)
        ok &= (one + f).log().exp() == one + f
        a = Series1.t(8) + Series1({d + 1: v for d, v in c.items() if d + 1 <= 8}, 8)
        ok &= a.reversion().reversion() == a
        lau = Series1({rng.randint(-4, 6): Rat(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(6)}, 6)
        ok &= lau.derivative().residue() == 0
    # symmetry and homogeneity of computed tensors
    from trxy.curves import rescale_y

    for name, params in [("vertex", {"f": 1}), ("gw-p1", {"t": 1})]:
        c = make_preset(name, params)
        base = [Rat(5, 3), Rat(7, 2)]
        j12 = tr_jet(c, 1, 2, base, 2)
        j21 = tr_jet(c, 1, 2, list(reversed(base)), 2)
        ok &= {(b, a): v for (a, b), v in j21.coeffs.items()} == j12.coeffs
        c2 = rescale_y(c, 2)
        for (g, n) in [(1, 1), (1, 2)]:
            a = tr.omega(c, g, n)
            b = tr.omega(c2, g, n)
            ok &= tr.normalize(a.scale(Rat(2) ** (2 - 2 * g - n))).terms == b.terms
    report(8, f"Cauchy identity, series round trips, residue/symmetry/homogeneity properties ({time.time()-t0:.0f}s)", ok)
