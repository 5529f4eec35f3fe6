"""Parallel LC tank loaded by the cantilever capacitance.

The tank resonance is identified with the drive frequency for every derived
quantity; the drive is taken to sit at one of the half-power points. Losses
are lumped into a resistance ``r`` in series with the inductor.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from rfcool.errors import InvalidSpecError
from rfcool.mechanics import EPS0, K_B

LOW_Q_WARNING = 10.0


class Detuning(str, enum.Enum):
    """Side of the tank resonance the drive sits on (at the half-power point)."""

    BELOW = "below"
    ABOVE = "above"

    @property
    def sign(self) -> int:
        """+1 for a drive below resonance, where the lagged force damps."""
        return 1 if self is Detuning.BELOW else -1

    @property
    def normalized_offset(self) -> float:
        """Value of 2Q(omega_rf - omega0)/omega0 at the operating point."""
        return -1.0 if self is Detuning.BELOW else 1.0


@dataclass(frozen=True)
class TankSpec:
    """RF circuit parameters.

    Exactly one of ``c0`` and ``stripline_z0`` is given; with a quarter-wave
    stripline the lumped capacitance is derived from its impedance.
    """

    f_drive: float
    q_rf: float
    v_max: float
    detuning: Detuning = Detuning.BELOW
    temperature: float = 300.0
    c0: float | None = None
    stripline_z0: float | None = None

    def __post_init__(self):
        if not isinstance(self.detuning, Detuning):
            try:
                object.__setattr__(self, "detuning", Detuning(self.detuning))
            except ValueError:
                raise InvalidSpecError(
                    f"detuning must be 'below' or 'above' (got {self.detuning!r})") from None
        problems = []
        for name in ("f_drive", "q_rf", "temperature"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                problems.append(f"{name} must be positive (got {value!r})")
        if not (math.isfinite(self.v_max) and self.v_max >= 0):
            problems.append(f"v_max must be non-negative (got {self.v_max!r})")
        if (self.c0 is None) == (self.stripline_z0 is None):
            problems.append("exactly one of c0 and stripline_z0 must be given")
        for name in ("c0", "stripline_z0"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                problems.append(f"{name} must be positive (got {value!r})")
        if problems:
            raise InvalidSpecError("; ".join(problems))

    @property
    def omega_drive(self) -> float:
        return 2.0 * math.pi * self.f_drive

    def warnings(self) -> list[str]:
        if self.q_rf < LOW_Q_WARNING:
            return [f"q_rf = {self.q_rf:.3g}: high-Q approximations are poor"]
        return []


@dataclass(frozen=True)
class TankDerived:
    spec: TankSpec
    omega0: float
    c0: float
    l0: float
    r: float
    tau_rf: float
    cc: float
    bandwidth: float

    @property
    def q_rf(self) -> float:
        return self.spec.q_rf

    @property
    def omega_rf_halfpower(self) -> float:
        """Drive frequency that sits exactly on the chosen half-power point."""
        return self.omega0 * (1.0 + self.spec.detuning.normalized_offset / (2.0 * self.q_rf))

    @property
    def v_rf(self) -> float:
        """Operating RF amplitude across the capacitor, V_max / sqrt(2)."""
        return self.spec.v_max / math.sqrt(2.0)


def _require_positive(**values):
    bad = [f"{k} must be positive (got {v!r})" for k, v in values.items()
           if not (math.isfinite(v) and v > 0)]
    if bad:
        raise InvalidSpecError("; ".join(bad))


def plate_capacitance(w: float, h: float, d: float) -> float:
    """Parallel-plate capacitance eps0 w h / d (F)."""
    _require_positive(w=w, h=h, d=d)
    return EPS0 * w * h / d


def stripline_c0(omega0: float, z0: float) -> float:
    """Lumped capacitance of a quarter-wave line near its resonance."""
    _require_positive(omega0=omega0, z0=z0)
    return math.pi / (4.0 * omega0 * z0)


def derive_tank(spec: TankSpec, cc: float) -> TankDerived:
    _require_positive(cc=cc)
    omega0 = spec.omega_drive
    c0 = spec.c0 if spec.c0 is not None else stripline_c0(omega0, spec.stripline_z0)
    l0 = 1.0 / (omega0**2 * (c0 + cc))
    return TankDerived(
        spec=spec,
        omega0=omega0,
        c0=c0,
        l0=l0,
        r=omega0 * l0 / spec.q_rf,
        tau_rf=spec.q_rf / omega0,
        cc=cc,
        bandwidth=omega0 / spec.q_rf,
    )


def response_ratio(omega_rf: float, omega0: float, q: float) -> float:
    """Stored RF voltage squared relative to its on-resonance maximum (Lorentzian)."""
    x = 2.0 * q * (omega_rf - omega0) / omega0
    return 1.0 / (1.0 + x * x)


def response_slope_halfpower(omega0: float, q: float, detuning: Detuning = Detuning.BELOW) -> float:
    """Slope of :func:`response_ratio` with respect to the drive detuning.

    Evaluated at the half-power point on the ``detuning`` side: +q/omega0 below
    resonance (moving the drive toward resonance raises the stored power) and
    -q/omega0 above. Moving the resonance has the opposite effect of moving the
    drive, which the chain rule in the coupling module accounts for.
    """
    return Detuning(detuning).sign * q / omega0


def lag_angle(omega: float, tau_rf: float) -> float:
    """Phase lag arctan(omega tau) of the RF envelope behind the motion."""
    if omega < 0 or tau_rf < 0:
        raise InvalidSpecError("lag_angle needs non-negative omega and tau_rf")
    return math.atan(omega * tau_rf)


def johnson_noise_psd(r: float, temperature: float) -> float:
    """One-sided Johnson voltage noise 4 k_B T r (V^2/Hz)."""
    if r < 0 or temperature < 0:
        raise InvalidSpecError("johnson_noise_psd needs non-negative r and temperature")
    return 4.0 * K_B * temperature * r


def capacitor_noise_psd(tank: TankDerived, temperature: float, omega_rf: float | None = None) -> float:
    """Johnson noise of ``r`` seen across the cantilever capacitor near the drive.

    The series loss is resonantly enhanced by Q^2 and filtered by the tank
    Lorentzian at the drive detuning; both mechanical sidebands are taken at
    the drive value. ``omega_rf`` defaults to the half-power drive frequency.
    """
    if omega_rf is None:
        omega_rf = tank.omega_rf_halfpower
    q = tank.q_rf
    return johnson_noise_psd(tank.r, temperature) * q * q * response_ratio(omega_rf, tank.omega0, q)
