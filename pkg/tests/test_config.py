import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerr_spectroscopy.config import (
    PAIRS,
    ConfigError,
    RunConfig,
    from_internal,
    parse_config,
    to_internal,
)
from kerr_spectroscopy.cli import read_config_text
from kerr_spectroscopy.hamiltonian import ParameterError
from kerr_spectroscopy.lindblad import SolverConfig

FIG3_TEXT = read_config_text("fig3")


def _edit(text, old, new):
    assert old in text
    return text.replace(old, new, 1)


def test_fig3_caption_parameters(fig3_config):
    p = fig3_config.system_params()
    to_mhz = 1 / (2 * math.pi)
    np.testing.assert_allclose(p.omega * to_mhz, [5000, 5013, 4983, 5030])
    assert p.g * to_mhz == pytest.approx(5.0)
    assert p.lambda_rabi * to_mhz == pytest.approx(1.0)
    assert p.lambda_probe * to_mhz == pytest.approx(0.01)
    assert p.gamma * to_mhz == pytest.approx(0.25)
    expected = dict(J12=-0.10, J13=-0.42, J14=-0.16, J23=-0.40, J24=-0.40, J34=-0.61)
    for (i, j), k in zip([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], PAIRS):
        assert p.J[i, j] * to_mhz == pytest.approx(expected[k])
    plan = fig3_config.sweep_plan()
    assert plan.n_points == 601 and plan.T == 30.0
    assert plan.delta_min * to_mhz == pytest.approx(-8) and plan.delta_max * to_mhz == pytest.approx(8)
    assert plan.initial_occupations == (0, 0, 0, 0) and plan.observable_mode == 4


def test_fig4_caption_parameters():
    cfg = parse_config(read_config_text("fig4.cfg"))
    p = cfg.system_params()
    to_mhz = 1 / (2 * math.pi)
    assert p.g * to_mhz == pytest.approx(0.05)
    assert p.lambda_rabi * to_mhz == pytest.approx(0.090)
    assert p.lambda_probe * to_mhz == pytest.approx(0.0075)
    assert p.gamma * to_mhz == pytest.approx(0.0060)
    plan = cfg.sweep_plan()
    assert plan.n_points == 801 and plan.T == 1000.0
    assert cfg.solver.method == "rk45"
    # grid spacing stays below gamma / 3
    assert plan.spacing <= p.gamma / 3


def test_peak_settings_default_to_gamma(fig3_config):
    prominence, radius, tol = fig3_config.peak_settings()
    assert prominence == 0.02
    assert radius == pytest.approx(2 * math.pi * 0.25) and tol == radius


def test_rad_per_us_units():
    text = _edit(FIG3_TEXT, "units = MHz-ordinary", "units = rad/us")
    cfg = parse_config(text)
    assert cfg.system_params().g == pytest.approx(5.0)


def test_roundtrip_bundled(fig3_config):
    assert parse_config(fig3_config.to_text()) == fig3_config
    assert fig3_config.digest() == parse_config(fig3_config.to_text()).digest()


def test_frame_violation_names_constraint_and_sums():
    text = _edit(FIG3_TEXT, "omega = 5000.0, 5013.0, 4983.0, 5030.0", "omega = 5000.0, 5013.0, 4983.0, 5031.0\nomega_rot = 5000, 5013, 4983, 5030")
    with pytest.raises(ParameterError) as info:
        parse_config(text)
    assert info.value.constraint == "shifted-frequency-sum"
    msg = str(info.value)
    assert "omega_1 + omega_2" in msg and "omega_3 + omega_4" in msg


def test_rotating_frame_violation():
    text = _edit(FIG3_TEXT, "omega = 5000.0, 5013.0, 4983.0, 5030.0",
                 "omega = 5000.0, 5013.0, 4983.0, 5030.0\nomega_rot = 5000, 5000, 5000, 5001")
    with pytest.raises(ParameterError) as info:
        parse_config(text)
    assert info.value.constraint == "rotating-frame-sum"


def test_unknown_key_is_named():
    text = _edit(FIG3_TEXT, "g = 5.0", "g = 5.0\ngee = 1.0")
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert "'gee'" in str(info.value)
    assert info.value.line == text.splitlines().index("gee = 1.0") + 1


def test_unknown_section():
    with pytest.raises(ConfigError, match=r"\[extras\]"):
        parse_config(FIG3_TEXT + "\n[extras]\nx = 1\n")


def test_units_tag_is_mandatory():
    with pytest.raises(ConfigError, match="units"):
        parse_config(_edit(FIG3_TEXT, "units = MHz-ordinary\n", ""))
    with pytest.raises(ConfigError, match="GHz"):
        parse_config(_edit(FIG3_TEXT, "units = MHz-ordinary", "units = GHz"))


def test_syntax_error_has_position():
    text = _edit(FIG3_TEXT, "[drive]", "[drive]\nthis line has no separator")
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == text.splitlines().index("this line has no separator") + 1
    with pytest.raises(ConfigError) as info:
        parse_config("g = 1\n" + FIG3_TEXT)
    assert info.value.line == 1


def test_bad_value_has_position():
    text = _edit(FIG3_TEXT, "lambda = 1.0", "lambda = one")
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == text.splitlines().index("lambda = one") + 1
    with pytest.raises(ConfigError, match="4 values"):
        parse_config(_edit(FIG3_TEXT, "5000.0, 5013.0, 4983.0, 5030.0", "5000.0, 5013.0"))


def test_duplicate_key():
    with pytest.raises(ConfigError) as info:
        parse_config(_edit(FIG3_TEXT, "g = 5.0", "g = 5.0\ng = 6.0"))
    assert info.value.line is not None


def test_missing_required():
    with pytest.raises(ConfigError, match="gamma"):
        parse_config(_edit(FIG3_TEXT, "gamma = 0.25", ""))
    with pytest.raises(ConfigError, match="solver"):
        parse_config(_edit(FIG3_TEXT, "method = rk4", "method = euler"))
    with pytest.raises(ConfigError, match="sweep"):
        parse_config(_edit(FIG3_TEXT, "n_points = 601", "n_points = 1"))


def test_unit_conversion_roundtrip():
    for x in (1e-6, 0.0075, 5030.0, -17.3):
        assert from_internal(to_internal(x, "MHz-ordinary"), "MHz-ordinary") == pytest.approx(x, rel=1e-12)


def _base_config(**kw):
    fields = dict(
        omega=(5000.0, 5013.0, 4983.0, 5030.0),
        g=5.0,
        J={k: 0.0 for k in PAIRS},
        lambda_rabi=1.0,
        lambda_probe=0.01,
        gamma=0.25,
        delta_min=-1.0,
        delta_max=1.0,
        n_points=11,
        T=1.0,
    )
    fields.update(kw)
    return RunConfig(**fields)


finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(
    g=finite,
    js=st.lists(st.floats(-1, 1), min_size=6, max_size=6),
    lam=st.floats(0, 5),
    gamma=st.floats(0, 2),
    n=st.integers(2, 2000),
    method=st.sampled_from(["rk4", "rk45"]),
    rtol=st.floats(1e-12, 1e-3),
    radius=st.one_of(st.none(), st.floats(1e-3, 1.0)),
    flags=st.tuples(st.booleans(), st.booleans(), st.booleans(), st.booleans()),
    units=st.sampled_from(["MHz-ordinary", "rad/us"]),
)
def test_roundtrip_property(g, js, lam, gamma, n, method, rtol, radius, flags, units):
    cfg = _base_config(
        g=g,
        J=dict(zip(PAIRS, js)),
        lambda_rabi=lam,
        gamma=gamma,
        n_points=n,
        units=units,
        merge_radius=radius,
        solver=SolverConfig(method=method, rel_tol=rtol),
        write_csv=flags[0],
        write_svg=flags[1],
        write_transitions=flags[2],
        write_peaks=flags[3],
    )
    assert parse_config(cfg.to_text()) == cfg


def test_runconfig_rejects_bad_fields():
    with pytest.raises(ConfigError):
        _base_config(units="Hz")
    with pytest.raises(ConfigError):
        _base_config(initial_state="0120")
    with pytest.raises(ConfigError):
        _base_config(workers=0)
    with pytest.raises(ConfigError):
        _base_config(J={"J12": 0.0})
