import json

import pytest

from oracles import halfpower_damping
from rfcool.config import from_sections, load_config
from rfcool.runner import STATIC_FLAG, run_envelope, run_fullscale


@pytest.fixture(scope="module")
def scaled_summary():
    return run_fullscale(load_config("scaled-fullscale"))


def _quiet_config(**sim):
    cfg = load_config("example1-silicon")
    sections = dict(cfg.sections)
    sections["simulation"] = {"dt_s": 1e-6, "duration_s": 1e-2, "include_thermal_noise": False,
                              "include_rf_noise": False, **sim}
    return from_sections(sections)


def test_static_trajectory_flag():
    summary = run_envelope(_quiet_config())
    assert STATIC_FLAG in summary["flags"]
    assert "ringdown" not in summary


def test_envelope_ringdown_summary():
    summary = run_envelope(_quiet_config(initial_x_m=1e-8, duration_s=0.04))
    assert summary["flags"] == []
    assert abs(summary["ringdown"]["relative_deviation"]) < 0.05


def test_multi_seed_files_and_pooling(tmp_path):
    cfg = load_config("example1-silicon")
    cfg = cfg.with_value("simulation.duration_s", 0.3)
    out = tmp_path / "run.csv"
    summary = run_envelope(cfg, seed=100, n_seeds=3, out=out, workers=2)
    assert summary["seeds"] == [100, 101, 102]
    for s in (100, 101, 102):
        assert (tmp_path / f"run-seed{s}.csv").exists()
        meta = json.loads((tmp_path / f"run-seed{s}.csv.json").read_text())
        assert meta["seed"] == s
    temp = summary["temperature"]
    assert temp["teff_k"] > 0 and temp["teff_error_k"] > 0
    assert "relative_deviation" in temp


def test_fullscale_summary_reports_deviation(scaled_summary):
    ring = scaled_summary["ringdown"]
    assert ring["relative_deviation"] == pytest.approx(
        ring["rate_s"] / scaled_summary["analytic"]["total_damping_s"] - 1, rel=1e-12)
    assert ring["n_peaks"] >= 20


def test_fullscale_ringdown_matches_resonator_theory(scaled, scaled_summary):
    c, t, r = scaled.cant, scaled.tank, scaled.report
    expected = halfpower_damping(t.cc, t.c0, t.spec.v_max, c.spec.d0, t.q_rf, t.omega0, c.m_eff,
                                 r.omega_eff, c.gamma)
    assert scaled_summary["ringdown"]["rate_s"] == pytest.approx(expected, rel=0.05)


@pytest.mark.xfail(strict=True, reason="single-lag damping with tau_RF = Q/Omega0 underestimates the "
                                       "resonator's delay by a factor of two")
def test_fullscale_summary_within_fifteen_percent(scaled_summary):
    assert abs(scaled_summary["ringdown"]["relative_deviation"]) <= 0.15
