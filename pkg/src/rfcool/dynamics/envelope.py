"""Stochastic simulation of the cantilever on the slow (mechanical) timescale.

Two force models:

``analytic``
    Linear oscillator with damping Gamma + Gamma' and stiffness
    m omega_c^2 (1 - kappa) taken from the closed-form report.
``lagged``
    The nonlinear capacitor force C_c(x) u / (4 d(x)) where the stored RF
    power ``u`` relaxes toward its steady-state Lorentzian value with the
    tank time constant, tau u' = u_ss(x) - u. The mean force at x = 0 is
    cancelled by a constant preload so that x = 0 remains the equilibrium.

Thermal and RF force noise are white with one-sided PSDs from the closed-form
budget; a step of length dt receives a force of variance S_F / (2 dt).
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from rfcool.coupling import report_from_derived
from rfcool.errors import GapClosureError, InvalidSpecError, NumericalError, UnstableSystemError
from rfcool.mechanics import EPS0, CantileverDerived
from rfcool.tank import TankDerived, response_ratio
from rfcool.dynamics import _kernels
from rfcool.dynamics.trajectory import (
    ENVELOPE_COLUMNS,
    LAGGED_COLUMNS,
    RNG_ALGORITHM,
    Trajectory,
    config_hash,
)

STEPS_PER_PERIOD_MIN = 100
CHUNK_STEPS = 1 << 17


class ForceMode(str, enum.Enum):
    ANALYTIC = "analytic"
    LAGGED = "lagged"


@dataclass(frozen=True)
class EnvelopeSimConfig:
    dt: float
    duration: float
    seed: int = 0
    force_mode: ForceMode = ForceMode.LAGGED
    include_thermal_noise: bool = True
    include_rf_noise: bool = True
    drive_force_amp: float = 0.0
    drive_omega: float | None = None
    initial_x: float = 0.0
    initial_v: float = 0.0
    allow_unstable: bool = False

    def __post_init__(self):
        object.__setattr__(self, "force_mode", ForceMode(self.force_mode))
        problems = []
        if not (self.dt > 0):
            problems.append(f"dt must be positive (got {self.dt!r})")
        elif not (self.duration >= 10 * self.dt):
            problems.append(f"duration must be at least 10 dt (got {self.duration!r})")
        if not (0 <= int(self.seed) < 2**64):
            problems.append("seed must be a 64-bit unsigned integer")
        if self.drive_omega is not None and not self.drive_omega > 0:
            problems.append("drive_omega must be positive")
        if problems:
            raise InvalidSpecError("; ".join(problems))

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))


def _steady_power(x, cant: CantileverDerived, tank: TankDerived) -> float:
    ewh = EPS0 * cant.spec.w * cant.spec.h
    d0 = cant.spec.d0
    omega0_x = tank.omega0 * math.sqrt((tank.c0 + ewh / d0) / (tank.c0 + ewh / (d0 - x)))
    return tank.spec.v_max**2 * response_ratio(tank.omega_rf_halfpower, omega0_x, tank.q_rf)


def _pack_params(cant: CantileverDerived, tank: TankDerived, config: EnvelopeSimConfig, report) -> np.ndarray:
    m = cant.m_eff
    ewh = EPS0 * cant.spec.w * cant.spec.h
    d0 = cant.spec.d0
    preload = ewh * _steady_power(0.0, cant, tank) / (4.0 * d0**2)
    drive_omega = config.drive_omega if config.drive_omega is not None else report.omega_eff
    return np.array([
        cant.omega_c**2,
        cant.gamma,
        config.drive_force_amp / m,
        drive_omega,
        report.total_damping,
        cant.omega_c**2 * (1.0 - report.kappa),
        ewh / (4.0 * m),
        d0,
        tank.spec.v_max**2,
        tank.q_rf,
        tank.omega0,
        tank.c0,
        ewh,
        tank.omega_rf_halfpower,
        tank.tau_rf,
        preload / m,
    ])


def simulate_envelope(cant: CantileverDerived, tank: TankDerived, config: EnvelopeSimConfig) -> Trajectory:
    """Integrate the slow-timescale Langevin dynamics.

    Deterministic for a given ``(seed, config)``.

    Raises:
        InvalidSpecError: if dt does not resolve the mechanical period.
        UnstableSystemError: analytic mode with non-positive net damping,
            unless ``config.allow_unstable``.
        GapClosureError: if the cantilever reaches the fixed plate.
    """
    dt_max = 2 * math.pi / (cant.omega_c * STEPS_PER_PERIOD_MIN)
    if config.dt > dt_max:
        raise InvalidSpecError(f"dt = {config.dt:.6g} s exceeds 2 pi/(100 omega_c) = {dt_max:.6g} s")
    report = report_from_derived(cant, tank)
    lagged = config.force_mode is ForceMode.LAGGED
    if not lagged and not report.stable and not config.allow_unstable:
        raise UnstableSystemError(
            f"net damping Gamma + Gamma' = {report.total_damping:.6g} 1/s is not positive")

    params = _pack_params(cant, tank, config, report)
    mode = _kernels.MODE_LAGGED if lagged else _kernels.MODE_ANALYTIC
    psd = (report.sf_cant if config.include_thermal_noise else 0.0) + (
        report.sf_rf if config.include_rf_noise else 0.0)
    half_kick = math.sqrt(psd * config.dt / 4.0) / cant.m_eff

    n = config.n_steps
    columns = LAGGED_COLUMNS if lagged else ENVELOPE_COLUMNS
    out = np.empty((n + 1, 3))
    u0 = _steady_power(config.initial_x, cant, tank) if lagged else 0.0
    state = np.array([config.initial_x, config.initial_v, u0], dtype=float)
    out[0] = state
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(config.seed))))

    done = 0
    while done < n:
        chunk = min(CHUNK_STEPS, n - done)
        if half_kick > 0:
            kicks = rng.standard_normal((chunk, 2))
            kicks *= half_kick
        else:
            kicks = np.zeros((chunk, 2))
        status, steps = _kernels.envelope_run(mode, state, done * config.dt, config.dt, params, kicks,
                                              out[done + 1:done + 1 + chunk])
        if status == _kernels.GAP_CLOSED:
            raise GapClosureError(f"gap closed at t = {(done + steps) * config.dt:.6g} s")
        if status != _kernels.OK:
            raise NumericalError(f"non-finite state at t = {(done + steps) * config.dt:.6g} s")
        done += chunk

    echo = asdict(config)
    echo["force_mode"] = config.force_mode.value
    metadata = {
        "model": f"envelope-{config.force_mode.value}",
        "integrator": "rk4 with split white-noise kicks",
        "seed": int(config.seed),
        "rng": RNG_ALGORITHM,
        "config": echo,
        "config_hash": config_hash({"sim": echo, "cantilever": asdict(cant.spec),
                                    "circuit": asdict(tank.spec)}),
        "noise_psd_n2_hz": psd,
    }
    data = out if lagged else out[:, :2]
    return Trajectory(t0=0.0, dt=config.dt, data=np.ascontiguousarray(data), columns=columns,
                      metadata=metadata)
