import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rfcool.config import (
    SHIPPED_CONFIGS,
    from_sections,
    load_config,
    parse_config,
    render_config,
    shipped_config_text,
)
from rfcool.coupling import coupling_report
from rfcool.errors import ConfigError, ConfigParseError, UnknownParameterPathError

BASE = """
[cantilever]
hc_m = 1.5e-3
h_m = 0.5e-3
t_m = 20e-6
w_m = 400e-6
d0_m = 10e-6
youngs_modulus_pa = 1.07e11
density_kg_m3 = 2.33e3
tau_c_s = 5
temperature_k = 300

[circuit]
f_rf_hz = 50e6
c0_f = 10e-12
q_rf = 400
v_max_v = 20
detuning = below
"""


def test_shipped_example1_reproduces_reference_values():
    rep = coupling_report(*_specs(load_config("example1-silicon")))
    assert rep.kappa == pytest.approx(0.0302, rel=2e-2)
    assert rep.gamma_ratio == pytest.approx(558, rel=2e-2)
    assert rep.teff_ratio == pytest.approx(4.30e-3, rel=3e-2)


def _specs(cfg):
    return cfg.cantilever, cfg.circuit


def test_minimal_config_and_defaults():
    cfg = parse_config(BASE)
    assert cfg.circuit.temperature == 300
    assert cfg.simulation is None
    assert cfg.get("circuit.q_rf") == 400


def test_both_capacitance_keys_rejected():
    with pytest.raises(ConfigError) as exc:
        parse_config(BASE.replace("c0_f = 10e-12", "c0_f = 10e-12\nstripline_z0_ohm = 50"))
    message = str(exc.value)
    assert "c0_f" in message and "stripline_z0_ohm" in message


def test_zero_gap_must_be_positive():
    with pytest.raises(ConfigError) as exc:
        parse_config(BASE.replace("d0_m = 10e-6", "d0_m = 0"))
    assert any("cantilever.d0_m" in e and "must be positive" in e for e in exc.value.errors)


def test_all_errors_reported():
    text = BASE.replace("d0_m = 10e-6", "d0_m = 0").replace("q_rf = 400", "q_rf = -1")
    text += "bogus_key = 3\n"
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    paths = " ".join(exc.value.errors)
    for key in ("cantilever.d0_m", "circuit.q_rf", "circuit.bogus_key"):
        assert key in paths


def test_missing_sections_and_keys():
    with pytest.raises(ConfigError) as exc:
        parse_config("[cantilever]\nhc_m = 1\n")
    text = " ".join(exc.value.errors)
    assert "circuit: missing required section" in text
    assert "cantilever.t_m: missing required key" in text


def test_unknown_section_rejected():
    with pytest.raises(ConfigError):
        parse_config(BASE + "\n[extras]\nfoo = 1\n")


def test_parse_error_has_line_number():
    with pytest.raises(ConfigParseError) as exc:
        parse_config(BASE + "\nthis line is nonsense\n")
    assert exc.value.lineno is not None and exc.value.lineno > 10
    with pytest.raises(ConfigParseError) as exc:
        parse_config("hc_m = 1\n")
    assert exc.value.lineno == 1


def test_inline_comments_and_bad_values():
    cfg = parse_config(BASE.replace("q_rf = 400", "q_rf = 400   # loaded Q"))
    assert cfg.get("circuit.q_rf") == 400
    with pytest.raises(ConfigError) as exc:
        parse_config(BASE.replace("detuning = below", "detuning = sideways"))
    assert "circuit.detuning" in str(exc.value)


def test_plate_longer_than_beam():
    with pytest.raises(ConfigError) as exc:
        parse_config(BASE.replace("h_m = 0.5e-3", "h_m = 5e-3"))
    assert "cantilever" in str(exc.value)


@pytest.mark.parametrize("name", SHIPPED_CONFIGS)
def test_shipped_round_trip(name):
    cfg = parse_config(shipped_config_text(name))
    again = parse_config(render_config(cfg))
    assert again == cfg


@given(v=st.floats(min_value=1e-3, max_value=1e3, allow_nan=False),
       q=st.floats(min_value=1.0, max_value=1e6),
       seed=st.integers(min_value=0, max_value=2**63))
@settings(max_examples=50, deadline=None)
def test_round_trip_property(v, q, seed):
    cfg = parse_config(BASE).with_value("circuit.v_max_v", v).with_value("circuit.q_rf", q)
    cfg = from_sections({**cfg.sections, "simulation": {"dt_s": 1e-6, "duration_s": 1.0, "seed": seed}})
    assert parse_config(render_config(cfg)) == cfg


def test_with_value_unknown_path():
    cfg = parse_config(BASE)
    with pytest.raises(UnknownParameterPathError):
        cfg.with_value("circuit.nope", 1)
    with pytest.raises(UnknownParameterPathError):
        cfg.get("nowhere.q_rf")


def test_load_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/file.ini")
