"""Time-domain models and the estimators that read them out."""

from rfcool.dynamics.demod import extract_envelope
from rfcool.dynamics.envelope import EnvelopeSimConfig, ForceMode, simulate_envelope
from rfcool.dynamics.estimators import (
    estimate_effective_temperature,
    fit_lorentzian,
    psd_estimate,
    ringdown_damping,
)
from rfcool.dynamics.fullscale import FullScaleConfig, FullScaleState, simulate_fullscale
from rfcool.dynamics.trajectory import Trajectory

__all__ = [
    "EnvelopeSimConfig", "ForceMode", "FullScaleConfig", "FullScaleState", "Trajectory",
    "estimate_effective_temperature", "extract_envelope", "fit_lorentzian", "psd_estimate",
    "ringdown_damping", "simulate_envelope", "simulate_fullscale",
]
