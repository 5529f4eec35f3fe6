"""Readouts from trajectories: ringdown rate, equipartition temperature, PSD."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, signal

from rfcool.errors import NonDecayingSignalError, TooShortTrajectoryError
from rfcool.mechanics import K_B
from rfcool.dynamics.trajectory import Trajectory


@dataclass(frozen=True)
class RingdownFit:
    rate: float  # energy damping rate, 1/s
    residual: float  # rms of log-amplitude residuals
    n_peaks: int


@dataclass(frozen=True)
class TemperatureEstimate:
    from_position: float
    from_velocity: float
    position_error: float
    velocity_error: float

    @property
    def combined_error(self) -> float:
        return math.hypot(self.position_error, self.velocity_error)


@dataclass(frozen=True)
class PsdEstimate:
    freqs: np.ndarray  # Hz
    psd: np.ndarray  # one-sided, units^2/Hz
    resolution: float  # Hz

    def integral(self) -> float:
        return float(np.sum(self.psd) * self.resolution)

    def peak_frequency(self) -> float:
        return float(self.freqs[np.argmax(self.psd)])


def _refined_extrema(t: np.ndarray, y: np.ndarray, kind: str) -> tuple[np.ndarray, np.ndarray]:
    s = y if kind == "max" else -y
    idx = np.flatnonzero((s[1:-1] > s[:-2]) & (s[1:-1] >= s[2:])) + 1
    y0, y1, y2 = s[idx - 1], s[idx], s[idx + 1]
    denom = y0 - 2 * y1 + y2
    with np.errstate(divide="ignore", invalid="ignore"):
        offset = np.where(denom != 0, 0.5 * (y0 - y2) / denom, 0.0)
    peak = y1 - 0.25 * (y0 - y2) * offset
    dt = t[1] - t[0]
    return t[idx] + offset * dt, peak if kind == "max" else -peak


def peak_amplitudes(t: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Half peak-to-trough amplitude at each (parabolically refined) maximum.

    Using the troughs on either side removes any static offset of ``y``.
    """
    t_max, y_max = _refined_extrema(t, y, "max")
    t_min, y_min = _refined_extrema(t, y, "min")
    if len(t_min) < 2 or len(t_max) == 0:
        return np.empty(0), np.empty(0)
    inside = (t_max > t_min[0]) & (t_max < t_min[-1])
    t_max, y_max = t_max[inside], y_max[inside]
    trough = np.interp(t_max, t_min, y_min)
    return t_max, 0.5 * (y_max - trough)


def ringdown_damping(traj: Trajectory, quantity: str = "x_m", t_start: float = 0.0) -> RingdownFit:
    """Energy damping rate from a noise-free free decay.

    Fits a straight line to log peak amplitude against time and returns twice
    the amplitude decay rate.

    Raises:
        NonDecayingSignalError: fewer than three peaks, or no decay.
    """
    t = traj.t
    y = traj.column(quantity)
    keep = t >= t_start
    tp, amp = peak_amplitudes(t[keep], y[keep])
    good = amp > 0
    tp, amp = tp[good], amp[good]
    if len(tp) < 3:
        raise NonDecayingSignalError(f"only {len(tp)} usable peaks in {quantity}")
    slope, intercept = np.polyfit(tp, np.log(amp), 1)
    if slope >= 0:
        raise NonDecayingSignalError(f"amplitude grows at {slope:.6g} 1/s")
    resid = np.log(amp) - (slope * tp + intercept)
    return RingdownFit(rate=-2.0 * slope, residual=float(np.sqrt(np.mean(resid**2))), n_peaks=len(tp))


def _block_mean_error(samples: np.ndarray, n_blocks: int) -> float:
    usable = len(samples) // n_blocks * n_blocks
    blocks = samples[:usable].reshape(n_blocks, -1).mean(axis=1)
    return float(blocks.std(ddof=1) / math.sqrt(n_blocks))


def estimate_effective_temperature(traj: Trajectory, m_eff: float, omega_eff: float,
                                   total_damping: float, n_blocks: int = 20) -> TemperatureEstimate:
    """Mode temperature from equipartition in each quadrature.

    The first 5/total_damping seconds are discarded as transient. Errors are
    standard errors of block means.

    Raises:
        TooShortTrajectoryError: if the trajectory spans less than
            20/total_damping.
    """
    span = traj.dt * (len(traj) - 1)
    if total_damping <= 0 or span < 20.0 / total_damping:
        raise TooShortTrajectoryError(
            f"trajectory of {span:.6g} s is shorter than 20/(Gamma+Gamma') = "
            f"{20.0 / total_damping if total_damping > 0 else math.inf:.6g} s")
    start = int(math.ceil(5.0 / total_damping / traj.dt))
    x = traj.x[start:]
    v = traj.v[start:]
    x = x - x.mean()
    kx = m_eff * omega_eff**2 / K_B
    kv = m_eff / K_B
    return TemperatureEstimate(
        from_position=float(kx * np.mean(x * x)),
        from_velocity=float(kv * np.mean(v * v)),
        position_error=kx * _block_mean_error(x * x, n_blocks),
        velocity_error=kv * _block_mean_error(v * v, n_blocks),
    )


def psd_estimate(traj: Trajectory, quantity: str = "x_m", nperseg: int | None = None,
                 resolution: float | None = None) -> PsdEstimate:
    """Averaged periodogram: Hann-windowed segments with 50 % overlap.

    Give either ``nperseg`` or a target ``resolution`` in Hz; by default the
    record is split into 8 segments.

    Raises:
        TooShortTrajectoryError: if fewer than two segments fit.
    """
    y = traj.column(quantity)
    fs = 1.0 / traj.dt
    if nperseg is None:
        nperseg = int(round(fs / resolution)) if resolution else len(y) // 4
    if nperseg < 8 or len(y) < 2 * nperseg:
        raise TooShortTrajectoryError(f"{len(y)} samples cannot hold two segments of {nperseg}")
    freqs, psd = signal.welch(y - y.mean(), fs=fs, window="hann", nperseg=nperseg,
                              noverlap=nperseg // 2, scaling="density", detrend=False)
    return PsdEstimate(freqs=freqs, psd=psd, resolution=fs / nperseg)


def _oscillator_psd(f, scale, f0, width):
    return scale / ((f0**2 - f**2) ** 2 + (f * width) ** 2)


def fit_lorentzian(est: PsdEstimate, window: float = 20.0) -> tuple[float, float]:
    """Fit a damped-oscillator line shape around the PSD peak.

    Returns ``(center_hz, fwhm_hz)``; the energy damping rate is 2 pi fwhm.
    ``window`` sets the fitted span in multiples of a first-guess width.
    """
    i0 = int(np.argmax(est.psd))
    f0 = est.freqs[i0]
    half = est.psd[i0] / 2
    above = np.flatnonzero(est.psd >= half)
    guess = max((above.max() - above.min()) * est.resolution, est.resolution)
    sel = np.abs(est.freqs - f0) <= window * guess
    f, p = est.freqs[sel], est.psd[sel]
    p0 = [est.psd[i0] * (f0 * guess) ** 2, f0, guess]
    popt, _ = optimize.curve_fit(_oscillator_psd, f, p, p0=p0, sigma=p, maxfev=20000)
    return float(popt[1]), float(abs(popt[2]))
