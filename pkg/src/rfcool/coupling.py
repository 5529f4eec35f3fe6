"""Closed-form cooling predictions for a cantilever loading a driven RF tank.

The RF force on the cantilever is the time-averaged capacitor attraction.
Its position dependence has an instantaneous part (gap change) and a part
that follows the tank's stored power through a first-order lag, which gives
a spring shift ``kappa`` and a velocity-proportional damping ``gamma_prime``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from rfcool.errors import InvalidSpecError, UnstableSystemError
from rfcool.mechanics import (
    K_B,
    CantileverDerived,
    CantileverSpec,
    derive_cantilever,
    thermal_occupation,
)
from rfcool.tank import (
    Detuning,
    TankDerived,
    TankSpec,
    capacitor_noise_psd,
    derive_tank,
    lag_angle,
    plate_capacitance,
)

# Thresholds for the "much less than one" assumptions behind the formulas.
MODULATION_INDEX_LIMIT = 0.1
DEFLECTION_LIMIT = 0.1

FLAG_RESOLVED_SIDEBAND = "resolved-sideband"
FLAG_FM_EXCEEDS_BANDWIDTH = "fm-exceeds-bandwidth"
FLAG_LARGE_MODULATION_INDEX = "large-modulation-index"
FLAG_LARGE_DEFLECTION = "large-static-deflection"

FLAG_DESCRIPTIONS = {
    FLAG_RESOLVED_SIDEBAND: "omega_c >= omega0/Q_RF: resolved-sideband regime, envelope model invalid",
    FLAG_FM_EXCEEDS_BANDWIDTH: "thermal motion sweeps the tank resonance by more than its bandwidth",
    FLAG_LARGE_MODULATION_INDEX: "RF modulation index from thermal motion is not small",
    FLAG_LARGE_DEFLECTION: "static deflection is not small against the gap",
}


@dataclass(frozen=True)
class CouplingReport:
    phi: float
    kappa: float
    gamma_prime: float
    sf_cant: float
    sf_rf: float
    teff_ratio: float | None
    deflection_ratio: float
    n_classical: float | None
    n_bose: float | None
    stable: bool
    assumption_flags: tuple[str, ...]
    # Context needed to read the numbers above.
    gamma: float
    omega_c: float
    m_eff: float
    cc: float
    c0: float
    tau_rf: float
    mean_force: float
    temperature: float
    warnings: tuple[str, ...] = field(default=())

    @property
    def gamma_ratio(self) -> float:
        return self.gamma_prime / self.gamma

    @property
    def noise_ratio(self) -> float:
        return self.sf_rf / self.sf_cant if self.sf_cant > 0 else math.inf

    @property
    def omega_eff(self) -> float:
        return self.omega_c * math.sqrt(1.0 - self.kappa)

    @property
    def total_damping(self) -> float:
        return self.gamma + self.gamma_prime


def mean_rf_force(cc: float, v_rf_amp: float, d: float) -> float:
    """Cycle-averaged attraction C_c V^2 / (4 d) for a sinusoid of amplitude ``v_rf_amp``."""
    if cc <= 0 or d <= 0:
        raise InvalidSpecError("mean_rf_force needs positive cc and d")
    return cc * v_rf_amp**2 / (4.0 * d)


def static_deflection(cant: CantileverDerived, tank: TankDerived) -> float:
    """Deflection from the mean RF force relative to the gap, Delta x / d0."""
    d0 = cant.spec.d0
    return mean_rf_force(tank.cc, tank.v_rf, d0) / (cant.k_spring * d0)


def _prefactor(cant: CantileverDerived, tank: TankDerived) -> float:
    # C_c V_max^2 / (4 d0^2): gradient of the mean force from the gap alone.
    return tank.cc * tank.spec.v_max**2 / (4.0 * cant.spec.d0**2)


def _participation(tank: TankDerived) -> float:
    # Q C_c / (2 (C_c + C_0)): relative strength of the tank-detuning term.
    return tank.q_rf * tank.cc / (2.0 * (tank.cc + tank.c0))


def kappa(cant: CantileverDerived, tank: TankDerived, phi: float,
          detuning: Detuning | str | None = None) -> float:
    """Fractional reduction of the spring constant by the RF force gradient."""
    sign = Detuning(detuning or tank.spec.detuning).sign
    bracket = 1.0 + sign * math.cos(phi) ** 2 * _participation(tank)
    return _prefactor(cant, tank) * bracket / cant.k_spring


def gamma_prime(cant: CantileverDerived, tank: TankDerived, phi: float,
                detuning: Detuning | str | None = None) -> float:
    """Extra damping rate from the lagged force; negative above resonance."""
    sign = Detuning(detuning or tank.spec.detuning).sign
    # Lagged gradient A*B*cos(phi)*exp(-i phi); its quadrature part opposes velocity.
    return (sign * _prefactor(cant, tank) * _participation(tank) * math.sin(2.0 * phi)
            / (2.0 * cant.m_eff * cant.omega_c))


def rf_force_psd(cant: CantileverDerived, tank: TankDerived, temperature: float | None = None) -> float:
    """Force noise on the cantilever from tank Johnson noise beating with the drive.

    ``temperature`` is the circuit temperature and defaults to the tank spec's.
    """
    if temperature is None:
        temperature = tank.spec.temperature
    s_vn = capacitor_noise_psd(tank, temperature)
    return 0.5 * (tank.cc * tank.v_rf / cant.spec.d0) ** 2 * s_vn


def effective_temperature_ratio(gamma: float, gamma_prime: float, sf_cant: float, sf_rf: float) -> float:
    """T_eff / T from the damping and force-noise budget.

    Raises:
        UnstableSystemError: if the net damping is not positive.
    """
    total = gamma + gamma_prime
    if total <= 0:
        raise UnstableSystemError(f"net damping {total:.6g} 1/s is not positive")
    return gamma / total * (sf_rf + sf_cant) / sf_cant


def stability_boundary_vmax(cant: CantileverDerived, tank: TankDerived) -> float:
    """V_max at which the anti-damping of an above-resonance drive cancels Gamma."""
    if tank.spec.detuning is not Detuning.ABOVE:
        raise InvalidSpecError("a self-oscillation boundary exists only for detuning = above")
    phi = lag_angle(cant.omega_c, tank.tau_rf)
    # gamma_prime is exactly quadratic in V_max; evaluate the coefficient at 1 V.
    unit = derive_tank(replace(tank.spec, v_max=1.0), tank.cc)
    per_volt2 = -gamma_prime(cant, unit, phi)
    if per_volt2 <= 0:
        return math.inf
    return math.sqrt(cant.gamma / per_volt2)


def assumption_flags(cant: CantileverDerived, tank: TankDerived, deflection_ratio: float) -> tuple[str, ...]:
    flags = []
    if cant.omega_c >= tank.bandwidth:
        flags.append(FLAG_RESOLVED_SIDEBAND)
    d0 = cant.spec.d0
    x_rms = math.sqrt(K_B * cant.spec.temperature / cant.k_spring)
    freq_dev = tank.omega0 * tank.cc * x_rms / (2.0 * (tank.c0 + tank.cc) * d0)
    if freq_dev >= tank.bandwidth:
        flags.append(FLAG_FM_EXCEEDS_BANDWIDTH)
    if freq_dev / cant.omega_c >= MODULATION_INDEX_LIMIT:
        flags.append(FLAG_LARGE_MODULATION_INDEX)
    if deflection_ratio >= DEFLECTION_LIMIT:
        flags.append(FLAG_LARGE_DEFLECTION)
    return tuple(flags)


def derive_pair(cant_spec: CantileverSpec, tank_spec: TankSpec) -> tuple[CantileverDerived, TankDerived]:
    cant = derive_cantilever(cant_spec)
    cc = plate_capacitance(cant_spec.w, cant_spec.h, cant_spec.d0)
    return cant, derive_tank(tank_spec, cc)


def report_from_derived(cant: CantileverDerived, tank: TankDerived) -> CouplingReport:
    phi = lag_angle(cant.omega_c, tank.tau_rf)
    kap = kappa(cant, tank, phi)
    gp = gamma_prime(cant, tank, phi)
    sf_rf = rf_force_psd(cant, tank)
    deflection = static_deflection(cant, tank)
    stable = cant.gamma + gp > 0
    temperature = cant.spec.temperature
    if stable:
        teff_ratio = effective_temperature_ratio(cant.gamma, gp, cant.sf_cant, sf_rf)
        omega_eff = cant.omega_c * math.sqrt(max(1.0 - kap, 0.0))
        if omega_eff > 0:
            n_classical, n_bose = thermal_occupation(temperature * teff_ratio, omega_eff)
        else:
            n_classical = n_bose = None
    else:
        teff_ratio = n_classical = n_bose = None
    return CouplingReport(
        phi=phi,
        kappa=kap,
        gamma_prime=gp,
        sf_cant=cant.sf_cant,
        sf_rf=sf_rf,
        teff_ratio=teff_ratio,
        deflection_ratio=deflection,
        n_classical=n_classical,
        n_bose=n_bose,
        stable=stable,
        assumption_flags=assumption_flags(cant, tank, deflection),
        gamma=cant.gamma,
        omega_c=cant.omega_c,
        m_eff=cant.m_eff,
        cc=tank.cc,
        c0=tank.c0,
        tau_rf=tank.tau_rf,
        mean_force=mean_rf_force(tank.cc, tank.v_rf, cant.spec.d0),
        temperature=temperature,
        warnings=tuple(cant.spec.warnings() + tank.spec.warnings()),
    )


def coupling_report(cant_spec: CantileverSpec, tank_spec: TankSpec) -> CouplingReport:
    return report_from_derived(*derive_pair(cant_spec, tank_spec))
