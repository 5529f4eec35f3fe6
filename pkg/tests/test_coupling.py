import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import Case
from oracles import EX1, EX2, example
from rfcool.coupling import (
    FLAG_LARGE_DEFLECTION,
    FLAG_RESOLVED_SIDEBAND,
    coupling_report,
    derive_pair,
    effective_temperature_ratio,
    gamma_prime,
    kappa,
    mean_rf_force,
    report_from_derived,
    rf_force_psd,
    stability_boundary_vmax,
    static_deflection,
)
from rfcool.errors import InvalidSpecError, UnstableSystemError
from rfcool.tank import Detuning, derive_tank, lag_angle

_EX1 = Case("example1-silicon")


def _with_tank(case, **changes):
    spec = replace(case.config.circuit, **changes)
    return case.cant, derive_tank(spec, case.tank.cc)


@pytest.mark.parametrize("name", ["ex1", "ex2"])
def test_report_matches_independent_oracle(name, request):
    case = request.getfixturevalue(name)
    ref = example(**(EX1 if name == "ex1" else EX2))
    rep = case.report
    for key, got in (("phi", rep.phi), ("kappa", rep.kappa), ("gamma_prime", rep.gamma_prime),
                     ("sf_cant", rep.sf_cant), ("sf_rf", rep.sf_rf), ("teff_ratio", rep.teff_ratio),
                     ("deflection", rep.deflection_ratio), ("cc", rep.cc), ("c0", rep.c0),
                     ("omega_c", rep.omega_c), ("m", rep.m_eff), ("tau", rep.tau_rf)):
        assert got == pytest.approx(ref[key], rel=1e-12), key


def test_example1_reference_values(ex1):
    rep = ex1.report
    assert rep.kappa == pytest.approx(0.0302, rel=2e-2)
    assert rep.gamma_ratio == pytest.approx(558, rel=2e-2)
    assert rep.gamma_prime == pytest.approx(111.5, rel=2e-3)
    assert rep.noise_ratio == pytest.approx(1.40, rel=3e-2)
    assert rep.teff_ratio == pytest.approx(4.30e-3, rel=3e-2)
    assert rep.deflection_ratio == pytest.approx(3.39e-3, rel=2e-2)
    assert rep.stable and rep.assumption_flags == ()


def test_example2_reference_values(ex2):
    rep = ex2.report
    assert rep.kappa == pytest.approx(0.123, rel=2e-2)
    assert rep.gamma_ratio == pytest.approx(972, rel=2e-2)
    assert rep.noise_ratio == pytest.approx(2.09, rel=3e-2)
    assert rep.teff_ratio == pytest.approx(3.18e-3, rel=3e-2)
    assert rep.deflection_ratio == pytest.approx(8.78e-3, rel=2e-2)
    assert rep.omega_c * ex2.tank.tau_rf == pytest.approx(0.27, rel=2e-2)
    assert FLAG_RESOLVED_SIDEBAND not in rep.assumption_flags


def test_mean_force_and_deflection(ex1):
    f = mean_rf_force(ex1.tank.cc, math.sqrt(200.0), ex1.cant.spec.d0)
    assert f == pytest.approx(8.86e-7, rel=5e-3)
    assert mean_rf_force(ex1.tank.cc, 0.0, 1e-5) == 0.0
    assert mean_rf_force(1e-12, 2.0, 1e-5) == pytest.approx(4 * mean_rf_force(1e-12, 1.0, 1e-5), rel=1e-15)
    cant, tank = _with_tank(ex1, v_max=0.0)
    assert static_deflection(cant, tank) == 0.0


def test_kappa_bracket_collapses_at_quarter_turn(ex1):
    bare = ex1.tank.cc * ex1.tank.spec.v_max**2 / (4 * ex1.cant.k_spring * ex1.cant.spec.d0**2)
    for d in Detuning:
        assert kappa(ex1.cant, ex1.tank, math.pi / 2, d) == pytest.approx(bare, rel=1e-15)


def test_gamma_prime_zero_without_lag(ex1):
    assert gamma_prime(ex1.cant, ex1.tank, 0.0) == 0.0


def test_gamma_prime_maximal_at_quarter_pi(ex1):
    phis = np.linspace(0, math.pi / 2, 2001)
    values = [gamma_prime(ex1.cant, ex1.tank, p) for p in phis]
    assert phis[int(np.argmax(values))] == pytest.approx(math.pi / 4, abs=1e-3)


@pytest.mark.parametrize("name", ["ex1", "ex2"])
def test_detuning_antisymmetry(name, request):
    case = request.getfixturevalue(name)
    below = report_from_derived(*_with_tank(case, detuning=Detuning.BELOW))
    above = report_from_derived(*_with_tank(case, detuning=Detuning.ABOVE))
    assert above.gamma_prime == -below.gamma_prime


@given(scale=st.floats(min_value=0.01, max_value=3.0))
@settings(max_examples=40, deadline=None)
def test_quadratic_vmax_law(scale):
    case = _EX1
    base = report_from_derived(case.cant, case.tank)
    cant, tank = _with_tank(case, v_max=case.tank.spec.v_max * scale)
    rep = report_from_derived(cant, tank)
    assert rep.gamma_prime == pytest.approx(base.gamma_prime * scale**2, rel=1e-9)
    # only the prefactor of kappa scales; the bracket is V-independent
    assert rep.kappa == pytest.approx(base.kappa * scale**2, rel=1e-9)


def test_teff_is_one_without_drive(ex1, ex2):
    for case in (ex1, ex2):
        rep = report_from_derived(*_with_tank(case, v_max=0.0))
        assert rep.teff_ratio == 1.0
        assert rep.gamma_prime == 0.0
        assert rep.sf_rf == 0.0


def test_teff_tends_to_one(ex1):
    rep = report_from_derived(*_with_tank(ex1, v_max=1e-4))
    assert rep.teff_ratio == pytest.approx(1.0, abs=1e-6)


def test_effective_temperature_ratio_errors():
    assert effective_temperature_ratio(1.0, 0.0, 1.0, 0.0) == 1.0
    with pytest.raises(UnstableSystemError):
        effective_temperature_ratio(1.0, -1.0, 1.0, 0.0)


def test_rf_force_psd_zero_without_drive(ex1):
    cant, tank = _with_tank(ex1, v_max=0.0)
    assert rf_force_psd(cant, tank) == 0.0


def test_separate_circuit_temperature(ex1):
    cold = report_from_derived(*_with_tank(ex1, temperature=150.0))
    assert cold.sf_rf == pytest.approx(ex1.report.sf_rf / 2, rel=1e-14)
    assert cold.sf_cant == ex1.report.sf_cant


def test_stability_boundary(ex1):
    cant, tank = _with_tank(ex1, detuning=Detuning.ABOVE)
    vb = stability_boundary_vmax(cant, tank)
    assert vb == pytest.approx(20 / math.sqrt(558), rel=1e-2)
    ref = example(**{**EX1, "below": False, "vmax": 1.0})
    assert vb == pytest.approx(math.sqrt(ref["gamma"] / -ref["gamma_prime"]), rel=1e-12)
    at = report_from_derived(*_with_tank(ex1, detuning=Detuning.ABOVE, v_max=vb))
    assert at.total_damping == pytest.approx(0.0, abs=1e-12)
    above = report_from_derived(*_with_tank(ex1, detuning=Detuning.ABOVE, v_max=1.01 * vb))
    below_b = report_from_derived(*_with_tank(ex1, detuning=Detuning.ABOVE, v_max=0.99 * vb))
    assert not above.stable and above.teff_ratio is None
    assert below_b.stable
    with pytest.raises(InvalidSpecError):
        stability_boundary_vmax(ex1.cant, ex1.tank)


def test_stability_boundary_scales_with_sqrt_gamma(ex1):
    spec = ex1.config.cantilever
    tank_spec = replace(ex1.config.circuit, detuning=Detuning.ABOVE)
    vb = stability_boundary_vmax(*derive_pair(spec, tank_spec))
    vb4 = stability_boundary_vmax(*derive_pair(replace(spec, tau_c=spec.tau_c / 4), tank_spec))
    assert vb4 == pytest.approx(2 * vb, rel=1e-12)
    vb_small = stability_boundary_vmax(*derive_pair(replace(spec, tau_c=1e12), tank_spec))
    assert vb_small < 1e-5


def test_example1_above_resonance_unstable(ex1):
    rep = report_from_derived(*_with_tank(ex1, detuning=Detuning.ABOVE))
    assert rep.gamma_prime < 0 and not rep.stable


def test_stable_flag_rule(ex1):
    for v in (0.1, 0.5, 1.0, 5.0, 20.0):
        for d in Detuning:
            rep = report_from_derived(*_with_tank(ex1, v_max=v, detuning=d))
            if not rep.stable:
                assert d is Detuning.ABOVE and abs(rep.gamma_prime) >= rep.gamma
            if d is Detuning.BELOW:
                assert 0 < rep.teff_ratio <= 1


def test_report_is_composition(ex1):
    cant, tank = ex1.cant, ex1.tank
    rep = coupling_report(ex1.config.cantilever, ex1.config.circuit)
    phi = lag_angle(cant.omega_c, tank.tau_rf)
    assert rep.phi == phi
    assert rep.kappa == kappa(cant, tank, phi)
    assert rep.gamma_prime == gamma_prime(cant, tank, phi)
    assert rep.sf_rf == rf_force_psd(cant, tank)
    assert rep.deflection_ratio == static_deflection(cant, tank)
    assert rep.teff_ratio == effective_temperature_ratio(cant.gamma, rep.gamma_prime, cant.sf_cant, rep.sf_rf)


def test_assumption_flags(ex1):
    rep = report_from_derived(*_with_tank(ex1, v_max=200.0))
    assert FLAG_LARGE_DEFLECTION in rep.assumption_flags
    rep = report_from_derived(*_with_tank(ex1, q_rf=2e5))
    assert FLAG_RESOLVED_SIDEBAND in rep.assumption_flags


def test_occupation_numbers(ex1, ex2):
    assert ex1.report.n_classical > 1e6
    assert ex1.report.n_classical == pytest.approx(2.8e6, rel=2e-2)
    assert ex2.report.n_classical < 1 and ex2.report.n_bose < 1

