import json

import pytest

from trxy.curves import (
    UnsupportedCurveError,
    curve_from_dict,
    load_curve_file,
    make_preset,
    preset_names,
    ramification,
    rescale_y,
    swap_xy,
)
from trxy.rationals import Rat, rat_to_str

ALL_PRESETS = [
    ("airy", {}),
    ("rspin", {"r": 2}),
    ("gamma", {}),
    ("dilog", {}),
    ("vertex", {"f": 1}),
    ("vertex", {"f": 2}),
    ("gw-p1", {"t": 1}),
    ("gw-p1", {"t": 2}),
    ("lambert-shifted", {}),
    ("lambert-exp", {}),
    ("orbifold", {"a": 2}),
    ("cubic", {}),
]


def test_form_tags_match_catalogue():
    expected = {
        "airy": "algebraic",
        "rspin": "algebraic",
        "lambert-shifted": "algebraic",
        "cubic": "algebraic",
        "gamma": "exp-exp",
        "dilog": "exp-exp",
        "vertex": "exp-exp",
        "gw-p1": "exp-exp",
        "lambert-exp": "exp-mixed",
        "orbifold": "exp-mixed",
    }
    for name, params in ALL_PRESETS:
        c = make_preset(name, params)
        assert c.form == expected[name], name


def test_preset_examples():
    airy = make_preset("airy")
    assert airy.x.rational_part.num == [Rat(0), Rat(0), Rat(1)]
    v = make_preset("vertex", {"f": 1})
    assert v.form == "exp-exp"
    gw = make_preset("gw-p1", {"t": 0})
    gamma = make_preset("gamma")
    # t = 0 coincides with the factorial curve up to chart data
    assert gw.x.rational_part == gamma.x.rational_part
    assert gw.y.to_json() == gamma.y.to_json()


def test_unknown_preset_and_bad_params():
    with pytest.raises(ValueError):
        make_preset("nope")
    with pytest.raises(ValueError):
        make_preset("vertex", {"f": 0})
    with pytest.raises(ValueError):
        make_preset("rspin", {"r": 1})
    with pytest.raises(ValueError):
        make_preset("orbifold", {"a": 0})


def test_ramification_locations():
    assert ramification(make_preset("airy")).points == [Rat(0)]
    assert ramification(make_preset("vertex", {"f": 1})).points == [Rat(1, 2)]
    assert ramification(make_preset("vertex", {"f": 2})).points == [Rat(2, 3)]
    assert ramification(make_preset("gw-p1", {"t": 1})).points == [Rat(-1), Rat(1)]
    assert ramification(make_preset("lambert-exp")).points == [Rat(1)]
    assert ramification(make_preset("gamma")).points == []


def test_airy_involution_is_exact_negation():
    ram = ramification(make_preset("airy"), 10)
    sigma = ram.involutions[Rat(0)]
    assert sigma.c == {1: Rat(-1)}


def test_involution_identity_all_presets():
    for name, params in ALL_PRESETS:
        c = make_preset(name, params)
        ram = ramification(c, 10)
        for beta, sigma in ram.involutions.items():
            assert sigma[1] == -1
            xloc = c.x.diff_series_at(beta, 12)
            resid = xloc.compose(sigma) - xloc
            assert all(v == 0 for d, v in resid.c.items() if d <= 10), (name, beta)


def test_higher_order_ramification_rejected():
    with pytest.raises(UnsupportedCurveError):
        ramification(make_preset("rspin", {"r": 3}))


def test_irrational_ramification_rejected():
    c = curve_from_dict(
        {"name": "bad", "x": {"rational": {"num": ["0", "0", "0", "1", "0", "1"]}}, "y": {"rational": {"num": ["0", "1"]}}}
    )  # dx/dz = 3z^2 + 5z^4: z^2(3 + 5 z^2): irrational nonzero roots
    with pytest.raises(UnsupportedCurveError):
        ramification(c)


def test_derivative_matches_series_finite_difference():
    for name, params in [("vertex", {"f": 2}), ("lambert-exp", {}), ("dilog", {})]:
        c = make_preset(name, params)
        p = Rat(5, 3)
        d = c.x.derivative().series_at(p, 6)
        diff = c.x.diff_series_at(p, 8)
        assert d == diff.derivative().truncate(6), name


def test_swap_is_involution():
    for name, params in ALL_PRESETS:
        c = make_preset(name, params)
        back = swap_xy(swap_xy(c))
        assert back.x.to_json() == c.x.to_json()
        assert back.y.to_json() == c.y.to_json()
        assert back.name == c.name
    sw = swap_xy(make_preset("airy"))
    assert sw.x.rational_part.num == [Rat(0), Rat(1)]
    lsw = swap_xy(make_preset("lambert-shifted"))
    assert lsw.x.log_terms and lsw.y.rational_part.num == [Rat(0), Rat(1)]


def test_exp_form_certificates_hold():
    # exp-exp means the derivative relation of exp(x) = F(exp(y)) is rational:
    # equivalently x'(z) is rational (always true here) and e^y ~ z^{+-1}
    for name, params in ALL_PRESETS:
        c = make_preset(name, params)
        if c.form == "exp-exp":
            assert c.log_slope() in (Rat(1), Rat(-1)), name
            assert c.certificate


def test_rescale_homogeneity_data():
    c = make_preset("airy")
    r = rescale_y(c, Rat(-1, 2))
    assert r.y.rational_part.num == [Rat(0), Rat(-1, 2)]
    assert r.pair_structure == "linear"


def test_custom_curve_file_roundtrip(tmp_path):
    doc = {
        "name": "custom-test",
        "x": {"rational": {"num": ["0", "0", "1"]}},
        "y": {"rational": {"num": ["0", "1"]}, "logs": []},
        "params": {"q": "3/2"},
    }
    p = tmp_path / "curve.json"
    p.write_text(json.dumps(doc))
    c = load_curve_file(str(p))
    assert c.name == "custom-test"
    assert c.params["q"] == Rat(3, 2)
    assert ramification(c).points == [Rat(0)]
    toml_doc = 'name = "toml-test"\n[x]\nrational = { num = ["0", "0", "1"] }\n[y]\nrational = { num = ["0", "1"] }\n'
    tp = tmp_path / "curve.toml"
    tp.write_text(toml_doc)
    c2 = load_curve_file(str(tp))
    assert c2.name == "toml-test"


def test_content_hash_distinguishes_params():
    a = make_preset("vertex", {"f": 1})
    b = make_preset("vertex", {"f": 2})
    assert a.content_hash() != b.content_hash()
    assert a.content_hash() == make_preset("vertex", {"f": 1}).content_hash()


def test_preset_names_cover_catalogue():
    assert set(preset_names()) >= {
        "airy", "rspin", "gamma", "dilog", "vertex", "gw-p1",
        "lambert-shifted", "lambert-exp", "orbifold",
    }
