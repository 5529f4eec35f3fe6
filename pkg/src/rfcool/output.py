"""Text, CSV and JSON renderings of design reports and summaries."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable

from rfcool.coupling import CouplingReport, derive_pair, report_from_derived
from rfcool.config import RunConfig

FORMATS = ("text", "csv", "json")

# (record key, label, unit)
DESIGN_FIELDS = (
    ("f_c_hz", "omega_c/2pi", "Hz"),
    ("m_eff_kg", "effective mass", "kg"),
    ("k_spring_n_m", "spring constant", "N/m"),
    ("gamma_s", "Gamma", "1/s"),
    ("cc_f", "C_c", "F"),
    ("c0_f", "C_0", "F"),
    ("l0_h", "L_0", "H"),
    ("r_ohm", "r", "ohm"),
    ("tau_rf_s", "tau_RF", "s"),
    ("phi_rad", "lag angle phi", "rad"),
    ("kappa", "kappa", ""),
    ("gamma_prime_s", "Gamma'", "1/s"),
    ("gamma_ratio", "Gamma'/Gamma", ""),
    ("sf_cant_n2_hz", "S_F(CANT)", "N^2/Hz"),
    ("sf_rf_n2_hz", "S_F(RF)", "N^2/Hz"),
    ("noise_ratio", "S_F(RF)/S_F(CANT)", ""),
    ("teff_ratio", "T_eff/T", ""),
    ("teff_k", "T_eff", "K"),
    ("deflection_ratio", "Delta x/d0", ""),
    ("n_classical", "<n> classical", ""),
    ("n_bose", "<n> Bose-Einstein", ""),
    ("stable", "stable", ""),
    ("assumption_flags", "assumption flags", ""),
)


def fmt(value: Any) -> str:
    """Six significant digits for numbers; other values as-is."""
    if isinstance(value, bool) or value is None:
        return {True: "true", False: "false", None: "n/a"}[value]
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value) or "none"
    return str(value)


def round6(value: Any) -> Any:
    if isinstance(value, float):
        return float(f"{value:.6g}") if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: round6(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round6(v) for v in value]
    return value


def report_record(config: RunConfig) -> dict[str, Any]:
    """Flat record of every design quantity for one configuration."""
    cant, tank = derive_pair(config.cantilever, config.circuit)
    rep = report_from_derived(cant, tank)
    return _record(rep, cant, tank)


def _record(rep: CouplingReport, cant, tank) -> dict[str, Any]:
    return {
        "f_c_hz": rep.omega_c / (2 * math.pi),
        "m_eff_kg": rep.m_eff,
        "k_spring_n_m": cant.k_spring,
        "gamma_s": rep.gamma,
        "cc_f": rep.cc,
        "c0_f": rep.c0,
        "l0_h": tank.l0,
        "r_ohm": tank.r,
        "tau_rf_s": rep.tau_rf,
        "phi_rad": rep.phi,
        "kappa": rep.kappa,
        "gamma_prime_s": rep.gamma_prime,
        "gamma_ratio": rep.gamma_ratio,
        "sf_cant_n2_hz": rep.sf_cant,
        "sf_rf_n2_hz": rep.sf_rf,
        "noise_ratio": rep.noise_ratio,
        "teff_ratio": rep.teff_ratio,
        "teff_k": None if rep.teff_ratio is None else rep.teff_ratio * rep.temperature,
        "deflection_ratio": rep.deflection_ratio,
        "n_classical": rep.n_classical,
        "n_bose": rep.n_bose,
        "stable": rep.stable,
        "assumption_flags": list(rep.assumption_flags),
        "warnings": list(rep.warnings),
    }


def render_design(record: dict[str, Any], fmt_name: str = "text") -> str:
    if fmt_name == "json":
        return json.dumps(round6(record), indent=2) + "\n"
    if fmt_name == "csv":
        return render_csv([record])
    width = max(len(label) for _, label, _ in DESIGN_FIELDS)
    lines = [f"{label:<{width}}  {fmt(record[key])} {unit}".rstrip()
             for key, label, unit in DESIGN_FIELDS]
    for warning in record.get("warnings", []):
        lines.append(f"warning: {warning}")
    return "\n".join(lines) + "\n"


def render_csv(records: Iterable[dict[str, Any]]) -> str:
    records = list(records)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow({k: fmt(v) for k, v in rec.items()})
    return buf.getvalue()


def render_summary(summary: dict[str, Any], fmt_name: str = "text") -> str:
    if fmt_name == "json":
        return json.dumps(round6(summary), indent=2) + "\n"
    flat = _flatten(summary)
    if fmt_name == "csv":
        return render_csv([flat])
    width = max(len(k) for k in flat)
    return "\n".join(f"{k:<{width}}  {fmt(v)}" for k, v in flat.items()) + "\n"


def _flatten(d: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    out: dict[str, Any] = {}
    for k, v in d.items():
        if isinstance(v, dict):
            out.update(_flatten(v, f"{prefix}{k}."))
        else:
            out[f"{prefix}{k}"] = v
    return out
