import numpy as np
import pytest

from lv4.lvmap import EcoParams, compile
from lv4.scenarios import PRESETS, UnknownPresetError, get_preset, list_presets
from lv4.stability import fixed_point

NAMES = [f"fig1{c}" for c in "abcdef"] + [f"fig3{c}" for c in "abcdef"] \
    + [f"fig4{c}" for c in "abcd"] + [f"fig5{c}" for c in "abcde"]


def test_census():
    assert [name for name, _ in list_presets()] == NAMES
    assert len(NAMES) == 21


@pytest.mark.parametrize("name", NAMES)
def test_round_trip_and_validates(name):
    preset = get_preset(name)
    assert preset.name == name
    assert get_preset(name) == preset
    assert EcoParams.from_dict(preset.eco.to_dict()) == preset.eco


def test_unknown():
    with pytest.raises(UnknownPresetError):
        get_preset("fig2a")


def test_fig1a_values():
    p = get_preset("fig1a")
    assert p.eco.r == (1.5, 1.5)
    assert p.eco.K == (1e4, 1e4)
    assert p.eco.s == (0.01, 0.01)
    assert p.eco.p == (0.3, 0.3)
    assert p.eco.Q == ((0.02, 0.02), (0.02, 0.02))
    assert p.eco.E == ((0.3, 0.3), (0.2, 0.5))
    assert p.init == (100.0, 100.0, 100.0, 100.0)


def test_fig1_initial_states():
    assert get_preset("fig1e").init == (700.0, 2000.0, 2300.0, 3000.0)
    assert get_preset("fig1f").init == (10.0, 100.0, 200.0, 2500.0)


def test_fig4a_values():
    e = get_preset("fig4a").eco
    assert e.D == ((0.4, 1.5), (1.5, 0.4))
    assert e.s == e.p == (0.02, 0.02)
    assert e.Q == ((0.01, 0.01), (0.01, 0.01))


def test_fig5b_values():
    e = get_preset("fig5b").eco
    assert e.p == (0.05, 0.01)
    assert e.r == (1.5, 1.5)
    assert e.K == (1e5, 1e5)
    assert e.s == (0.01, 0.01)
    assert np.all(np.array(e.Q) == 0.01)


def test_fig3e_conversion_ratio():
    Q = get_preset("fig3e").eco.Q
    assert Q[0][0] == Q[1][0] == 0.013


@pytest.mark.parametrize("name", [n for n in NAMES if PRESETS[n].expected_fixed_point])
def test_expected_fixed_points(name):
    preset = get_preset(name)
    np.testing.assert_allclose(fixed_point(compile(preset.eco)).point, preset.expected_fixed_point, rtol=1e-3)


def test_presets_are_immutable():
    with pytest.raises(AttributeError):
        get_preset("fig1a").eco.r = (1.0, 1.0)
