import pytest

from trxy.curves import make_preset
from trxy.rationals import Rat, bernoulli_half, factorial
from trxy.series import Jet, RationalFunction1
from trxy.tr import omega
from trxy.xy import (
    connected_part,
    default_base_points,
    diagonal_kernel,
    dual_correction,
    enumerate_bicoloured,
    enumerate_connected_graphs,
    enumerate_n_cycles,
    o_operator_exponent,
    operator_residual,
    pair_kernel,
    xy_cycles,
    xy_general,
    xy_graphs,
)


def tr_jet(curve, g, n, base, order):
    T = omega(curve, g, n)
    return Jet([f"w{i+1}" for i in range(n)], base, order, T.w_series_at(curve, base, order))


# -- dual one-point family ----------------------------------------------------


def test_dual_correction_vertex():
    c = make_preset("vertex", {"f": 1})
    assert dual_correction(c, 0) is c.x
    w1 = dual_correction(c, 1)
    assert w1 == RationalFunction1([0, -1], [24, -48, 24])  # -z/(24(1-z)^2)


def test_dual_correction_lambert_exp():
    c = make_preset("lambert-exp")
    # -1/24 d^2/dy^2 (y - log y) = -1/(24 y^2)
    assert dual_correction(c, 1) == RationalFunction1([-1], [0, 0, 24])


def test_dual_correction_trivial_for_algebraic():
    assert dual_correction(make_preset("airy"), 1).is_zero()
    assert dual_correction(make_preset("gw-p1", {"t": 1}), 2).is_zero()


# -- operator and kernels ------------------------------------------------------


def test_operator_exponent_airy_pattern():
    # hbar u S(hbar u d/dy) y^2 - x u = hbar^2 u^3 / 12 for x = z^2, y = z
    c = make_preset("airy")
    eps = o_operator_exponent(c, Rat(5, 3), 2, 4)
    assert eps.coefficient(h=2, u1=3) == Rat(1, 12)
    assert sum(1 for _ in eps.c) == 1


def test_operator_exponent_kills_constants():
    # (S(u h d)/S(h d) - 1) u applied to a constant x gives zero
    from trxy.curves import curve_from_dict

    c = curve_from_dict(
        {
            "name": "affine",
            "x": {"rational": {"num": ["0", "1"]}},
            "y": {"rational": {"num": ["0", "1"]}},
        }
    )
    eps = o_operator_exponent(c, Rat(5, 3), 4, 5)
    assert eps.is_zero()  # d^2 x/dy^2 = 0 for x = y


def test_pair_kernel_exp_at_zero_hbar():
    c = make_preset("vertex", {"f": 1})
    k = pair_kernel(c, Rat(5, 3), Rat(7, 2), 2, 2)
    assert k.coefficient() == Rat(1) / (Rat(5, 3) - Rat(7, 2))


def test_pair_kernel_rejects_diagonal():
    c = make_preset("vertex", {"f": 1})
    with pytest.raises(ValueError):
        pair_kernel(c, Rat(5, 3), Rat(5, 3), 2, 2)


def test_diagonal_kernel_forms():
    v = diagonal_kernel(make_preset("vertex", {"f": 1}), 4, 4)
    assert v.coefficient() == 1 and v.coefficient(h=2, u1=2) == Rat(-1, 24)
    lam = diagonal_kernel(make_preset("lambert-exp"), 4, 4)
    assert lam.c == {(0, 0, 0): Rat(1)}


# -- enumeration ----------------------------------------------------------------


def test_enumeration_counts():
    assert len(enumerate_n_cycles(1)) == 1
    assert len(enumerate_n_cycles(3)) == 2
    assert len(enumerate_n_cycles(4)) == 6
    assert len(enumerate_connected_graphs(2)) == 1
    assert len(enumerate_connected_graphs(3)) == 4
    assert len(enumerate_connected_graphs(4)) == 38
    with pytest.raises(ValueError):
        enumerate_n_cycles(7)
    with pytest.raises(ValueError):
        enumerate_connected_graphs(9)


def test_bicoloured_stream_includes_repeated_adjacency():
    ms = enumerate_bicoloured(2, 4)
    types = {t for graph, aut in ms for t in graph}
    assert (0, 1) in types
    assert (0, 0, 1) in types  # repeated-edge inner vertex
    auts = {graph: aut for graph, aut in ms}
    assert auts[((0, 1), (0, 1))] == 2  # two identical inner vertices
    assert auts[((0, 0, 1),)] == 2  # repeated edges to the same vertex


def test_connected_part_moebius():
    one = frozenset([1])
    two = frozenset([2])
    both = frozenset([1, 2])
    dis = {one: Rat(1), two: Rat(1), both: Rat(2)}
    assert connected_part(dis, both) == Rat(1)  # W2 = W2dis - W1 W1
    dis3 = {
        frozenset([i]): Rat(1) for i in (1, 2, 3)
    }
    dis3.update({frozenset(p): Rat(2) for p in ([1, 2], [1, 3], [2, 3])})
    dis3[frozenset([1, 2, 3])] = Rat(10)
    # partition-lattice oracle: 10 - 3*2 + 2 = 6
    assert connected_part(dis3, frozenset([1, 2, 3])) == Rat(6)


# -- evaluator oracles -----------------------------------------------------------


def test_airy_w03_value():
    base = [Rat(1), Rat(2), Rat(3)]
    jet = xy_cycles(make_preset("airy"), 0, 3, base, 0)
    assert jet.value() == Rat(1, 1728)


def test_cycles_match_engine_spot():
    for name, params, g, n in [("airy", {}, 1, 1), ("airy", {}, 2, 1), ("vertex", {"f": 1}, 1, 1), ("lambert-shifted", {}, 1, 1)]:
        c = make_preset(name, params)
        base = default_base_points(c, n)
        assert xy_cycles(c, g, n, base, 4) == tr_jet(c, g, n, base, 4), name


def test_orbifold_matches_engine():
    # exp-mixed corrected family with a parameter; ramification at 1/a
    for a in (Rat(2), Rat(1, 2)):
        c = make_preset("orbifold", {"a": a})
        for (g, n) in [(1, 1), (1, 2)]:
            base = default_base_points(c, n)
            assert xy_cycles(c, g, n, base, 3) == tr_jet(c, g, n, base, 3), a


def test_seeded_base_points_stay_exact():
    c = make_preset("vertex", {"f": 1})
    base = default_base_points(c, 2, seed=5)
    assert len(set(base)) == 2
    assert xy_cycles(c, 1, 2, base, 2) == tr_jet(c, 1, 2, base, 2)


def test_graphs_equal_cycles():
    for name, params, g, n in [("airy", {}, 1, 2), ("vertex", {"f": 1}, 1, 1), ("lambert-exp", {}, 1, 2)]:
        c = make_preset(name, params)
        base = default_base_points(c, n)
        assert xy_cycles(c, g, n, base, 2) == xy_graphs(c, g, n, base, 2), name


def test_general_reduces_when_y_unramified():
    c = make_preset("airy")
    base = default_base_points(c, 1)
    assert xy_general(c, 1, 1, base, 3) == xy_cycles(c, 1, 1, base, 3)


def test_general_on_doubly_ramified_curve():
    c = make_preset("cubic")
    for (g, n) in [(1, 1), (1, 2)]:
        base = default_base_points(c, n)
        assert xy_general(c, g, n, base, 2) == tr_jet(c, g, n, base, 2)


def test_gamma_one_point_closed_form():
    # engine frame: W_{g,1} = (-2)^{2g-1} * d/dx of the Stirling primitive
    c = make_preset("gamma")
    base = default_base_points(c, 1)
    for g in (1, 2):
        jet = xy_cycles(c, g, 1, base, 4)
        coeff = bernoulli_half(g) * factorial(2 * g - 2)
        closed = RationalFunction1([coeff], [0] * (2 * g - 1) + [1]).derivative().scale(Rat(-2) ** (2 * g - 1))
        ser = closed.series_at(base[0], 4)
        assert all(jet.coeffs.get((d,), Rat(0)) == ser[d] for d in range(5))


def test_gamma_vanishing_family():
    c = make_preset("gamma")
    for (g, n) in [(0, 3), (1, 2)]:
        assert xy_cycles(c, g, n, default_base_points(c, n), 2).is_zero()


def test_dilog_one_point_closed_form():
    # engine frame: -2 * (1+z)/(24 z^2)
    c = make_preset("dilog")
    base = default_base_points(c, 1)
    jet = xy_cycles(c, 1, 1, base, 4)
    ser = RationalFunction1([-2, -2], [0, 0, 24]).series_at(base[0], 4)
    assert all(jet.coeffs.get((d,), Rat(0)) == ser[d] for d in range(5))


def test_dilog_self_duality_vanishing_low_genus():
    c = make_preset("dilog")
    for g in (1, 2):
        assert operator_residual(c, g, Rat(5, 3), 4).is_zero()


def test_diagonal_pole_cancellation():
    # base points close together: no (z1 - z2) pole survives for 2g+n-2 > 0
    c = make_preset("vertex", {"f": 1})
    base = [Rat(5, 3), Rat(5, 3) + Rat(1, 7)]
    jet = xy_cycles(c, 1, 2, base, 2)
    assert jet == tr_jet(c, 1, 2, base, 2)  # engine side is manifestly regular there


def test_t_continuity_through_the_evaluator():
    gw0 = make_preset("gw-p1", {"t": 0})
    gamma = make_preset("gamma")
    base = default_base_points(gamma, 1)
    for g in (1, 2):
        assert xy_cycles(gw0, g, 1, base, 3) == xy_cycles(gamma, g, 1, base, 3)


def test_base_points_validated():
    c = make_preset("vertex", {"f": 1})
    with pytest.raises(Exception):
        xy_cycles(c, 1, 1, [Rat(1, 2)], 2)  # ramification point
    with pytest.raises(ValueError):
        xy_cycles(c, 1, 2, [Rat(5, 3), Rat(5, 3)], 2)  # coinciding
