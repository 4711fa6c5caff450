import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trxy.rationals import Rat
from trxy.series import (
    Jet,
    MultiSeries,
    PoleCollisionError,
    RationalFunction1,
    Series1,
    TruncationError,
)

ORDER = 8


def rat_strategy():
    return st.builds(Rat, st.integers(-12, 12), st.integers(1, 7))


def sparse_series(min_deg=1, terms=12, order=ORDER):
    return st.dictionaries(st.integers(min_deg, order), rat_strategy(), max_size=terms).map(
        lambda c: Series1(c, order)
    )


def test_series_arith_examples():
    t = Series1.t(4)
    one = Series1.one(4)
    assert (one + t) * (one - t) == Series1({0: Rat(1), 2: Rat(-1)}, 4)
    # 1/S(t) through t^2 is 1 - t^2/24
    S = Series1({0: Rat(1), 2: Rat(1, 24)}, 2)
    inv = S.inverse()
    assert inv[0] == 1 and inv[2] == Rat(-1, 24)


def test_multiseries_laurent_bookkeeping():
    # (1/h)*(h^2 u) -> h u realised as exponent shifts on cleared denominators
    ms = MultiSeries(("h", "u"), (4, 4))
    ms.c[(2, 1)] = Rat(1)
    shifted = ms.coeff_of("h", 2)  # h^2 coefficient is u
    assert shifted.c == {(0, 1): Rat(1)}


def test_exp_log_examples():
    ms = MultiSeries(("t",), (3,))
    assert ms.clone_zero().exp().c == {(0,): Rat(1)}
    f = MultiSeries(("t",), (3,), {(1,): Rat(1)})
    lg = (MultiSeries.const(("t",), (3,), 1) + f).log()
    assert lg.c == {(1,): Rat(1), (2,): Rat(-1, 2), (3,): Rat(1, 3)}
    # exp(h u - h^2 u^2/2) has zero h^2 u^2 coefficient
    g = MultiSeries(("h", "u"), (2, 2), {(1, 1): Rat(1), (2, 2): Rat(-1, 2)})
    assert g.exp().coefficient(h=2, u=2) == 0


@settings(max_examples=40, deadline=None)
@given(sparse_series())
def test_exp_log_roundtrip(f):
    one = Series1.one(ORDER)
    assert (one + f).log().exp() == one + f
    assert f.exp().log() == f


def test_reversion_examples():
    t = Series1.t(6)
    assert t.reversion() == t
    a = t - t * t
    rev = a.reversion()
    assert [rev[k] for k in range(1, 5)] == [Rat(1), Rat(1), Rat(2), Rat(5)]
    assert a.compose(rev) == t
    assert Series1({1: Rat(2)}, 6).reversion()[1] == Rat(1, 2)


@settings(max_examples=25, deadline=None)
@given(sparse_series(min_deg=2, terms=6, order=6))
def test_reversion_involution(tail):
    a = Series1.t(6) + tail
    assert a.reversion().reversion() == a


def test_residue():
    s = Series1({-1: Rat(1), 0: Rat(3), 1: Rat(1)}, 2)
    assert s.residue() == 1
    assert Series1({-2: Rat(1)}, 2).residue() == 0
    prod = Series1({-1: Rat(1)}, 4) * (Series1.one(4) + Series1.t(4)).pow(2)
    assert prod.residue() == 1


@settings(max_examples=30, deadline=None)
@given(sparse_series(min_deg=-4, terms=8, order=6))
def test_residue_kills_derivatives(f):
    assert f.derivative().residue() == 0


@settings(max_examples=20, deadline=None)
@given(sparse_series(0, 6), sparse_series(0, 6), sparse_series(0, 6))
def test_ring_axioms(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


def test_jet_examples():
    f = RationalFunction1([1], [-1, 1])  # 1/(z-1)
    s = f.series_at(Rat(3), 1)
    assert s[0] == Rat(1, 2) and s[1] == Rat(-1, 4)
    # 1/(z1 - z2)^2 at (3, 1/2): direct value 4/25
    val = (Rat(3) - Rat(1, 2)) ** (-2)
    assert val == Rat(4, 25)
    # the triple-pole evaluation used by the correlator examples
    prod = Rat(1)
    for p in (1, 2, 3):
        prod /= Rat(p) ** 2
    assert prod == Rat(1, 36)


def test_jet_json_roundtrip():
    j = Jet(["w1", "w2"], [Rat(5, 3), Rat(7, 2)], 2, {(0, 0): Rat(1, 3), (1, 1): Rat(-2)})
    assert Jet.from_json(j.to_json()) == j


def test_pole_collision_error_names_variable():
    from trxy.curves import make_preset

    c = make_preset("lambert-exp")
    with pytest.raises(PoleCollisionError) as err:
        c.validate_base_point(Rat(1))  # ramification point
    assert err.value.variable == "z"


def test_truncation_is_explicit_state():
    s = Series1({0: Rat(1)}, 2)
    with pytest.raises(TruncationError):
        _ = s[3]
    t = Series1.t(5)
    assert (s * t).order == 3  # meet of windows, never silently extended
