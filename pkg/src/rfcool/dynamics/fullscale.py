"""RF-timescale co-simulation of the tank circuit and the cantilever.

The tank is integrated as its series equivalent driven by a voltage source:

    L0 di/dt = v_drive(t) - r i - q / C(x),   dq/dt = i,
    m x'' = -m Gamma x' - m omega_c^2 x + q^2/(2 C^2) dC/dx - F_preload,

with C(x) = C0 + eps0 w h / (d0 - x). Nothing is averaged, so this serves as
an independent check of the envelope model. No noise is injected.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import signal

from rfcool.errors import GapClosureError, InvalidSpecError, NumericalError, StepTooLargeError
from rfcool.mechanics import EPS0, CantileverDerived
from rfcool.tank import TankDerived
from rfcool.dynamics import _kernels
from rfcool.dynamics.demod import extract_envelope, modulation_phase
from rfcool.dynamics.trajectory import FULLSCALE_COLUMNS, Trajectory, config_hash

STEPS_PER_RF_PERIOD_MIN = 50
MAX_TIMESCALE_RATIO = 1e5
MAX_ITER = 60
STAGE_TOL = 1e-14


@dataclass(frozen=True)
class FullScaleConfig:
    """Settings for :func:`simulate_fullscale`.

    ``drive_amplitude`` defaults to V_max / Q (which puts V_max across the
    capacitor on resonance); ``drive_omega`` defaults to the half-power point
    on the tank's detuning side. ``initial_circuit`` is ``"steady"`` (driven
    steady state at ``initial_x``) or ``"rest"``.
    """

    dt: float
    duration: float
    drive_amplitude: float | None = None
    drive_omega: float | None = None
    drive_off_time: float = math.inf
    freeze_mechanics: bool = False
    initial_x: float = 0.0
    initial_v: float = 0.0
    initial_circuit: str = "steady"
    initial_q: float = 0.0
    initial_i: float = 0.0
    preload: bool = True
    resistance_scale: float = 1.0

    def __post_init__(self):
        problems = []
        if not self.dt > 0:
            problems.append("dt must be positive")
        elif not self.duration >= 10 * self.dt:
            problems.append("duration must be at least 10 dt")
        if self.initial_circuit not in ("steady", "rest"):
            problems.append("initial_circuit must be 'steady' or 'rest'")
        if self.resistance_scale < 0:
            problems.append("resistance_scale must be non-negative")
        if problems:
            raise InvalidSpecError("; ".join(problems))

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))


@dataclass(frozen=True)
class FullScaleState:
    q: float
    i: float
    x: float
    v: float


@dataclass(frozen=True)
class _Circuit:
    l0: float
    r: float
    c0: float
    ewh: float
    d0: float
    vd: float
    omega_d: float

    def capacitance(self, x):
        return self.c0 + self.ewh / (self.d0 - x)

    def phasor_charge(self, x) -> complex:
        """Steady-state complex charge amplitude for a cos(omega_d t) drive."""
        z = self.r + 1j * self.omega_d * self.l0 + 1.0 / (1j * self.omega_d * self.capacitance(x))
        return self.vd / z / (1j * self.omega_d)


def _circuit(cant: CantileverDerived, tank: TankDerived, config: FullScaleConfig) -> _Circuit:
    vd = config.drive_amplitude if config.drive_amplitude is not None else tank.spec.v_max / tank.q_rf
    omega_d = config.drive_omega if config.drive_omega is not None else tank.omega_rf_halfpower
    return _Circuit(l0=tank.l0, r=tank.r * config.resistance_scale, c0=tank.c0,
                    ewh=EPS0 * cant.spec.w * cant.spec.h, d0=cant.spec.d0, vd=vd, omega_d=omega_d)


def preload_force(cant: CantileverDerived, tank: TankDerived, config: FullScaleConfig) -> float:
    """Cycle-averaged capacitor force at x = 0 in the driven steady state."""
    c = _circuit(cant, tank, config)
    v_amp = abs(c.phasor_charge(0.0)) / c.capacitance(0.0)
    return 0.25 * v_amp**2 * c.ewh / c.d0**2


def simulate_fullscale(cant: CantileverDerived, tank: TankDerived, config: FullScaleConfig) -> Trajectory:
    """Integrate circuit and beam together at RF resolution.

    Raises:
        StepTooLargeError: fewer than 50 steps per RF period.
        NumericalError: RF/mechanical timescale ratio above 1e5, or a
            non-finite state.
        GapClosureError: the cantilever reaches the plate.
    """
    c = _circuit(cant, tank, config)
    omega_fast = max(c.omega_d, tank.omega0)
    if config.dt > 2 * math.pi / (omega_fast * STEPS_PER_RF_PERIOD_MIN):
        raise StepTooLargeError(
            f"dt = {config.dt:.6g} s gives fewer than {STEPS_PER_RF_PERIOD_MIN} steps per RF period")
    if omega_fast / cant.omega_c > MAX_TIMESCALE_RATIO:
        raise NumericalError(
            f"RF/mechanical frequency ratio {omega_fast / cant.omega_c:.3g} exceeds {MAX_TIMESCALE_RATIO:.0e}")

    if config.initial_circuit == "steady":
        qhat = c.phasor_charge(config.initial_x)
        q0, i0 = qhat.real, (1j * c.omega_d * qhat).real
    else:
        q0, i0 = config.initial_q, config.initial_i
    preload = 0.0
    if config.preload and not config.freeze_mechanics:
        preload = preload_force(cant, tank, config)

    params = np.array([
        c.l0, c.r, c.c0, c.ewh, c.d0, cant.m_eff, cant.gamma, cant.omega_c**2,
        c.vd, c.omega_d, config.drive_off_time, 1.0 if config.freeze_mechanics else 0.0, preload,
    ])
    state = np.array([q0, i0, config.initial_x, config.initial_v], dtype=float)
    n = config.n_steps
    out = np.empty((n + 1, 4))
    out[0] = state
    status, steps, worst = _kernels.fullscale_run(state, 0.0, config.dt, params, n, out[1:],
                                                  MAX_ITER, STAGE_TOL)
    if status == _kernels.GAP_CLOSED:
        raise GapClosureError(f"gap closed at t = {steps * config.dt:.6g} s")
    if status != _kernels.OK:
        raise NumericalError(f"non-finite state at t = {steps * config.dt:.6g} s")

    echo = asdict(config)
    metadata = {
        "model": "fullscale",
        "integrator": "gauss-legendre-2 (fixed step, fixed-point stages)",
        "config": echo,
        "config_hash": config_hash({"sim": echo, "cantilever": asdict(cant.spec),
                                    "circuit": asdict(tank.spec)}),
        "drive_amplitude_v": c.vd,
        "drive_omega_rad_s": c.omega_d,
        "preload_n": preload,
        "l0_h": c.l0,
        "r_ohm": c.r,
        "worst_stage_residual": worst,
    }
    return Trajectory(t0=0.0, dt=config.dt, data=out, columns=FULLSCALE_COLUMNS, metadata=metadata)


def state_at(traj: Trajectory, k: int) -> FullScaleState:
    q, i, x, v = traj.data[k]
    return FullScaleState(q=float(q), i=float(i), x=float(x), v=float(v))


def capacitor_voltage(traj: Trajectory, cant: CantileverDerived, tank: TankDerived) -> np.ndarray:
    ewh = EPS0 * cant.spec.w * cant.spec.h
    return traj.q / (tank.c0 + ewh / (cant.spec.d0 - traj.x))


def total_energy(traj: Trajectory, cant: CantileverDerived, tank: TankDerived) -> np.ndarray:
    """Inductor + capacitor (incl. beam interaction) + kinetic + elastic + preload energy."""
    ewh = EPS0 * cant.spec.w * cant.spec.h
    l0 = traj.metadata.get("l0_h", tank.l0)
    x = traj.x
    cap = tank.c0 + ewh / (cant.spec.d0 - x)
    preload = traj.metadata.get("preload_n", 0.0)
    return (0.5 * l0 * traj.i**2 + 0.5 * traj.q**2 / cap + 0.5 * cant.m_eff * traj.v**2
            + 0.5 * cant.k_spring * x**2 + preload * x)


def phasor_steady_amplitude(cant: CantileverDerived, tank: TankDerived, config: FullScaleConfig,
                            x: float = 0.0) -> float:
    """Exact steady-state capacitor voltage amplitude of the series circuit at fixed ``x``."""
    c = _circuit(cant, tank, config)
    return abs(c.phasor_charge(x)) / c.capacitance(x)


def mechanical_trajectory(traj: Trajectory, omega_c: float, samples_per_period: int = 100) -> Trajectory:
    """Low-pass and decimate x, v to the mechanical timescale.

    Removes the force ripple at twice the RF frequency, which otherwise
    creates spurious local extrema for peak-based estimators.
    """
    fs = 1.0 / traj.dt
    stride = max(1, int(2 * math.pi / omega_c / traj.dt / samples_per_period))
    cutoff_hz = min(10 * omega_c / (2 * math.pi), 0.4 * fs / stride)
    sos = signal.butter(4, cutoff_hz, fs=fs, output="sos")
    xv = signal.sosfiltfilt(sos, traj.data[:, 2:4], axis=0)[::stride]
    meta = dict(traj.metadata, decimation=stride, lowpass_hz=cutoff_hz)
    return Trajectory(t0=traj.t0, dt=traj.dt * stride, data=np.ascontiguousarray(xv),
                      columns=("x_m", "v_m_s"), metadata=meta)


def envelope_lag(traj: Trajectory, cant: CantileverDerived, tank: TankDerived, omega: float,
                 edge_periods: float = 1.0) -> float:
    """Phase (rad) by which the stored RF power lags the beam displacement.

    The capacitor voltage is demodulated at the drive frequency; its squared
    amplitude is compared with x(t) at ``omega`` (the beam's oscillation
    frequency, normally omega_eff) over a whole number of
    mechanical periods, skipping ``edge_periods`` at the start for filter
    settling.
    """
    omega_d = traj.metadata["drive_omega_rad_s"]
    env = extract_envelope(traj.t, capacitor_voltage(traj, cant, tank), omega_d)
    period = 2 * math.pi / omega
    t = traj.t
    start = t[0] + edge_periods * period
    n_periods = int((t[-1] - start) / period) - 1
    if n_periods < 1:
        raise NumericalError("record too short to measure the envelope lag")
    sel = (t >= start) & (t < start + n_periods * period)
    # above resonance the power falls as x grows
    sign = tank.spec.detuning.sign
    return modulation_phase(t[sel], sign * traj.x[sel], env.amplitude[sel] ** 2, omega)
