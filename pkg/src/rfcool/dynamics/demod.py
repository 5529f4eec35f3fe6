"""Quadrature demodulation of an RF waveform to amplitude and phase."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from rfcool.errors import UndersampledInputError

MIN_SAMPLES_PER_CYCLE = 10
LOWPASS_ORDER = 4


@dataclass(frozen=True)
class Envelope:
    t: np.ndarray
    amplitude: np.ndarray
    phase: np.ndarray


def extract_envelope(t: np.ndarray, y: np.ndarray, omega_rf: float,
                     cutoff: float | None = None) -> Envelope:
    """Demodulate ``y`` at ``omega_rf``.

    The I/Q products are low-passed with a zero-phase Butterworth filter at
    ``cutoff`` (rad/s, default omega_rf/10). Expect filter edge effects over
    roughly ten cutoff periods at each end of the record.

    Raises:
        UndersampledInputError: fewer than 10 samples per RF cycle.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    dt = t[1] - t[0]
    if dt > 2 * math.pi / (MIN_SAMPLES_PER_CYCLE * omega_rf):
        raise UndersampledInputError(
            f"{2 * math.pi / (omega_rf * dt):.3g} samples per RF cycle, need {MIN_SAMPLES_PER_CYCLE}")
    if cutoff is None:
        cutoff = omega_rf / 10.0
    fs = 1.0 / dt
    sos = signal.butter(LOWPASS_ORDER, cutoff / (2 * math.pi), fs=fs, output="sos")
    carrier = omega_rf * t
    i_part = signal.sosfiltfilt(sos, 2.0 * y * np.cos(carrier))
    q_part = signal.sosfiltfilt(sos, -2.0 * y * np.sin(carrier))
    return Envelope(t=t, amplitude=np.hypot(i_part, q_part), phase=np.arctan2(q_part, i_part))


def modulation_phase(t: np.ndarray, reference: np.ndarray, signal_: np.ndarray, omega: float) -> float:
    """Phase (rad) by which ``signal_`` lags ``reference`` at angular frequency ``omega``.

    Both are projected onto cos/sin at ``omega`` after removing their means.
    """
    c = np.cos(omega * t)
    s = np.sin(omega * t)
    ref = reference - reference.mean()
    sig = signal_ - signal_.mean()
    ref_ph = math.atan2(-np.dot(ref, s), np.dot(ref, c))
    sig_ph = math.atan2(-np.dot(sig, s), np.dot(sig, c))
    return (ref_ph - sig_ph + math.pi) % (2 * math.pi) - math.pi
