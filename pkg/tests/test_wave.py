import pytest

from trxy.curves import make_preset
from trxy.rationals import Rat, bernoulli_half, factorial
from trxy.series import RationalFunction1
from trxy.wave import dilog_phi, quantum_curve_check, stirling_phi, wave_function


def test_stirling_coefficients():
    # [hbar^{2g-1}] log Gamma(x/hbar + 1/2) = B_{2g}(1/2)/(2g(2g-1)) x^{1-2g}
    assert stirling_phi(1) == RationalFunction1([-1], [0, 24])
    assert stirling_phi(2) == RationalFunction1([Rat(7, 5760) * 2], [0, 0, 0, 1])


def test_dilog_coefficients():
    assert dilog_phi(1) == RationalFunction1([0, -1], [24, 24])  # -w/(24(1+w))
    # next order from (w d/dw)^2 of w/(1+w), weighted by 7/5760
    w = RationalFunction1([0, 1])
    f = RationalFunction1([0, 1], [1, 1])
    for _ in range(2):
        f = w * f.derivative()
    assert dilog_phi(2) == f.scale(Rat(7, 5760))


def test_wave_function_gamma_structure():
    wf = wave_function(make_preset("gamma"), 3)
    assert sorted(wf.phi.keys()) == [-1, 1, 3, 5]
    assert wf.phi[1] == stirling_phi(1)
    assert wf.log_coeff[-1] == RationalFunction1([0, 1])  # x log x part


def test_wave_function_gmax_zero():
    wf = wave_function(make_preset("gamma"), 0)
    assert sorted(wf.phi.keys()) == [-1]


def test_wave_function_lambert_dual():
    wf = wave_function(make_preset("lambert-exp"), 2)
    assert wf.phi[-1] == RationalFunction1([0, 1, Rat(1, 2)])  # y + y^2/2
    assert wf.phi[1] == stirling_phi(1).scale(-1)


def test_wave_function_unsupported():
    with pytest.raises(ValueError):
        wave_function(make_preset("airy"), 2)


def test_quantum_curve_gamma():
    rep = quantum_curve_check(make_preset("gamma"), 3)
    assert rep["passed"] and rep["log_symbol_cancels"]
    assert all(r["residual_derivative_zero"] for r in rep["rows"])


def test_quantum_curve_dilog_through_order_six():
    rep = quantum_curve_check(make_preset("dilog"), 6)
    assert rep["passed"]


def test_quantum_curve_lambert():
    rep = quantum_curve_check(make_preset("lambert-exp"), 5)
    assert rep["passed"]


def test_quantum_curve_semiclassical_notes():
    assert "defining relation" in quantum_curve_check(make_preset("gamma"), 0)["semiclassical"]


def test_quantum_curve_unsupported():
    with pytest.raises(ValueError):
        quantum_curve_check(make_preset("airy"), 2)


def test_wave_json():
    doc = wave_function(make_preset("dilog"), 2).to_json()
    assert doc["curve"] == "dilog" and "1" in doc["coefficients"]
