"""Closed-form design and time-domain simulation of RF cold damping of a cantilever."""

from rfcool.config import RunConfig, load_config, parse_config, render_config
from rfcool.coupling import CouplingReport, coupling_report, derive_pair, report_from_derived
from rfcool.mechanics import CantileverSpec, derive_cantilever
from rfcool.sweep import SweepGrid, SweepResult, run_sweep
from rfcool.tank import Detuning, TankSpec, derive_tank

__all__ = [
    "CantileverSpec", "CouplingReport", "Detuning", "RunConfig", "SweepGrid", "SweepResult",
    "TankSpec", "coupling_report", "derive_cantilever", "derive_pair", "derive_tank",
    "load_config", "parse_config", "render_config", "report_from_derived", "run_sweep",
]
