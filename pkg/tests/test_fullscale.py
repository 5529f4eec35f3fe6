import math
from dataclasses import replace

import numpy as np
import pytest

from rfcool.coupling import derive_pair
from rfcool.dynamics.demod import extract_envelope
from rfcool.dynamics.fullscale import (
    FullScaleConfig,
    capacitor_voltage,
    mechanical_trajectory,
    phasor_steady_amplitude,
    simulate_fullscale,
    state_at,
    total_energy,
)
from rfcool.dynamics.trajectory import Trajectory
from rfcool.errors import GapClosureError, InvalidSpecError, NumericalError, StepTooLargeError

DT = 3.125e-9


def test_energy_conserved_without_loss(scaled):
    cant = replace(scaled.cant, gamma=0.0)
    cfg = FullScaleConfig(dt=DT, duration=1e4 / 5e6, drive_amplitude=0.0, initial_circuit="rest",
                          initial_q=1e-11, initial_x=1e-8, resistance_scale=0.0, preload=False)
    traj = simulate_fullscale(cant, scaled.tank, cfg)
    e = total_energy(traj, cant, scaled.tank)
    assert np.max(np.abs(e - e[0])) / e[0] < 1e-6


def test_steady_start_holds_amplitude(scaled):
    cfg = FullScaleConfig(dt=DT, duration=2e-5, freeze_mechanics=True)
    traj = simulate_fullscale(scaled.cant, scaled.tank, cfg)
    env = extract_envelope(traj.t, capacitor_voltage(traj, scaled.cant, scaled.tank),
                           traj.metadata["drive_omega_rad_s"])
    core = env.amplitude[1000:-1000]
    expected = phasor_steady_amplitude(scaled.cant, scaled.tank, cfg)
    assert np.allclose(core, expected, rtol=2e-3)
    # half-power point of an on-resonance V_max
    assert expected == pytest.approx(scaled.tank.spec.v_max / math.sqrt(2), rel=5e-3)
    assert np.all(traj.x == 0)


def test_deterministic(scaled):
    cfg = FullScaleConfig(dt=DT, duration=2e-6, initial_x=1e-8)
    a = simulate_fullscale(scaled.cant, scaled.tank, cfg)
    b = simulate_fullscale(scaled.cant, scaled.tank, cfg)
    assert np.array_equal(a.data, b.data)
    s = state_at(a, 10)
    assert (s.q, s.i, s.x, s.v) == tuple(a.data[10])
    assert a.columns == ("q_C", "i_A", "x_m", "v_m_s")
    assert len(a) == round(2e-6 / DT) + 1


def test_guards(scaled, ex1):
    with pytest.raises(StepTooLargeError):
        simulate_fullscale(scaled.cant, scaled.tank, FullScaleConfig(dt=1e-8, duration=1e-6))
    slow = derive_pair(replace(ex1.config.cantilever, hc=5 * ex1.config.cantilever.hc), ex1.config.circuit)
    assert ex1.tank.omega0 / slow[0].omega_c > 1e5
    with pytest.raises(NumericalError):
        simulate_fullscale(*slow, FullScaleConfig(dt=1e-10, duration=1e-8))
    with pytest.raises(InvalidSpecError):
        FullScaleConfig(dt=1e-9, duration=1e-9)
    with pytest.raises(InvalidSpecError):
        FullScaleConfig(dt=1e-9, duration=1e-6, initial_circuit="warm")


def test_gap_closure(scaled):
    cfg = FullScaleConfig(dt=DT, duration=1e-5, initial_x=-0.9 * scaled.cant.spec.d0, initial_v=-50.0)
    with pytest.raises(GapClosureError):
        simulate_fullscale(scaled.cant, scaled.tank, cfg)


def test_mechanical_trajectory_removes_ripple():
    dt = 1e-8
    t = np.arange(400000) * dt
    x = np.cos(2 * math.pi * 1e4 * t) + 0.05 * np.cos(2 * math.pi * 1e7 * t)
    data = np.column_stack([np.zeros_like(t), np.zeros_like(t), x, np.zeros_like(t)])
    traj = Trajectory(0.0, dt, data, ("q_C", "i_A", "x_m", "v_m_s"))
    mech = mechanical_trajectory(traj, 2 * math.pi * 1e4)
    inner = mech.x[200:-200]
    assert np.max(np.abs(inner - np.cos(2 * math.pi * 1e4 * mech.t[200:-200]))) < 1e-3
    assert mech.dt == pytest.approx(1e-6, rel=0.02)


def test_trajectory_csv_round_trip(tmp_path, scaled):
    traj = simulate_fullscale(scaled.cant, scaled.tank, FullScaleConfig(dt=DT, duration=1e-7))
    csv_path, meta_path = traj.write(tmp_path / "fs.csv")
    assert csv_path.read_text().splitlines()[0] == "t_s,q_C,i_A,x_m,v_m_s"
    back = Trajectory.read(csv_path)
    assert np.allclose(back.data, traj.data, rtol=1e-9, atol=0)
    assert back.columns == traj.columns
    assert meta_path.exists()
