"""Lowest-order bending mode of a clamped rectangular beam and its bath.

Physical constants used anywhere in the package live here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from rfcool.errors import InvalidSpecError

# CODATA 2018 exact / recommended values.
K_B = 1.380649e-23  # J/K
EPS0 = 8.8541878128e-12  # F/m
HBAR = 1.054571817e-34  # J s

# First clamped-free eigenvalue factor (beta_1 L)^2.
BENDING_MODE_FACTOR = 3.516

# Ratio above which a "much less than" geometric assumption is reported.
SMALL_RATIO = 0.1


@dataclass(frozen=True)
class CantileverSpec:
    """Beam geometry, material and bath. All values SI.

    Attributes:
        hc: Beam length (m).
        h: Height of the plate overlap at the free end (m).
        t: Thickness (m).
        w: Width (m).
        d0: Equilibrium gap to the fixed plate (m).
        youngs_modulus: Young's modulus (Pa).
        density: Mass density (kg/m^3).
        tau_c: Mechanical energy decay time (s).
        temperature: Bath temperature (K).
    """

    hc: float
    h: float
    t: float
    w: float
    d0: float
    youngs_modulus: float
    density: float
    tau_c: float
    temperature: float

    def __post_init__(self):
        problems = self.validation_errors()
        if problems:
            raise InvalidSpecError("; ".join(problems))

    def validation_errors(self) -> list[str]:
        problems = []
        for f in fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                problems.append(f"{f.name} must be positive (got {value!r})")
        if not problems and self.h > self.hc:
            problems.append(f"h ({self.h}) must not exceed hc ({self.hc})")
        return problems

    def warnings(self) -> list[str]:
        """Parallel-plate approximation caveats; these never block a run."""
        out = []
        if self.h / self.hc > SMALL_RATIO:
            out.append(f"h/hc = {self.h / self.hc:.3g}: plate not small against beam length, "
                       "bending curvature across the plate is neglected")
        if self.d0 / self.w > SMALL_RATIO:
            out.append(f"d0/w = {self.d0 / self.w:.3g}: gap not small against plate width")
        if self.d0 / self.h > SMALL_RATIO:
            out.append(f"d0/h = {self.d0 / self.h:.3g}: gap not small against plate height")
        return out


@dataclass(frozen=True)
class CantileverDerived:
    spec: CantileverSpec
    omega_c: float
    m_eff: float
    k_spring: float
    gamma: float
    sf_cant: float


def bending_frequency(spec: CantileverSpec) -> float:
    """Angular frequency (rad/s) of the fundamental clamped-free bending mode."""
    return BENDING_MODE_FACTOR * spec.t / spec.hc**2 * math.sqrt(
        spec.youngs_modulus / (12.0 * spec.density))


def effective_mass(spec: CantileverSpec) -> float:
    """Modal mass referred to the free-end displacement, a quarter of the beam mass."""
    return spec.density * spec.w * spec.hc * spec.t / 4.0


def damping_rate(spec: CantileverSpec) -> float:
    return 1.0 / spec.tau_c


def spring_constant(derived: CantileverDerived) -> float:
    return derived.m_eff * derived.omega_c**2


def _force_psd(m_eff: float, tau_c: float, temperature: float) -> float:
    if temperature < 0:
        raise InvalidSpecError(f"temperature must be non-negative (got {temperature})")
    return 4.0 * K_B * temperature * m_eff / tau_c


def thermal_force_psd(derived: CantileverDerived, temperature: float) -> float:
    """One-sided thermal force PSD (N^2/Hz) of the isolated cantilever at ``temperature``."""
    return _force_psd(derived.m_eff, derived.spec.tau_c, temperature)


def thermal_occupation(temperature: float, omega: float) -> tuple[float, float]:
    """Mean phonon number of a mode at ``omega``.

    Returns:
        ``(n_classical, n_bose)`` where ``n_classical = k_B T / (hbar omega)``
        and ``n_bose`` is the Bose-Einstein occupation. Both are 0 at T = 0.
    """
    if temperature < 0:
        raise InvalidSpecError(f"temperature must be non-negative (got {temperature})")
    if omega <= 0:
        raise InvalidSpecError(f"omega must be positive (got {omega})")
    if temperature == 0:
        return 0.0, 0.0
    ratio = HBAR * omega / (K_B * temperature)
    return 1.0 / ratio, 1.0 / math.expm1(ratio)


def derive_cantilever(spec: CantileverSpec) -> CantileverDerived:
    omega_c = bending_frequency(spec)
    m_eff = effective_mass(spec)
    return CantileverDerived(
        spec=spec,
        omega_c=omega_c,
        m_eff=m_eff,
        k_spring=m_eff * omega_c**2,
        gamma=damping_rate(spec),
        sf_cant=_force_psd(m_eff, spec.tau_c, spec.temperature),
    )
