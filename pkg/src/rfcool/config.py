"""INI-style run configuration with SI units baked into the key names.

::

    [cantilever]
    hc_m = 1.5e-3
    ...
    [circuit]
    f_rf_hz = 50e6
    c0_f = 10e-12        # or stripline_z0_ohm = 50
    ...
    [simulation]         # optional, used by ``simulate envelope``
    [fullscale]          # optional, used by ``simulate fullscale``

Unknown sections and keys are rejected, and validation reports every problem
it finds rather than stopping at the first.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable

from rfcool.errors import ConfigError, ConfigParseError, InvalidSpecError, UnknownParameterPathError
from rfcool.mechanics import CantileverSpec
from rfcool.tank import Detuning, TankSpec

SHIPPED_CONFIGS = ("example1-silicon", "example2-stripline", "scaled-fullscale")


def _to_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("must be finite")
    return value


def _to_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError("must be true or false")


def _to_int(text: str) -> int:
    value = int(text, 0)
    if value < 0:
        raise ValueError("must be non-negative")
    return value


def _choice(*options: str) -> Callable[[str], str]:
    def convert(text: str) -> str:
        text = text.strip().lower()
        if text not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return text
    return convert


@dataclass(frozen=True)
class _Key:
    convert: Callable[[str], Any]
    required: bool = False
    positive: bool = False


_SCHEMA: dict[str, dict[str, _Key]] = {
    "cantilever": {
        "hc_m": _Key(_to_float, True, True),
        "h_m": _Key(_to_float, True, True),
        "t_m": _Key(_to_float, True, True),
        "w_m": _Key(_to_float, True, True),
        "d0_m": _Key(_to_float, True, True),
        "youngs_modulus_pa": _Key(_to_float, True, True),
        "density_kg_m3": _Key(_to_float, True, True),
        "tau_c_s": _Key(_to_float, True, True),
        "temperature_k": _Key(_to_float, True, True),
    },
    "circuit": {
        "f_rf_hz": _Key(_to_float, True, True),
        "c0_f": _Key(_to_float, False, True),
        "stripline_z0_ohm": _Key(_to_float, False, True),
        "q_rf": _Key(_to_float, True, True),
        "v_max_v": _Key(_to_float, True),
        "detuning": _Key(_choice("below", "above"), True),
        "temperature_k": _Key(_to_float, False, True),
    },
    "simulation": {
        "dt_s": _Key(_to_float, True, True),
        "duration_s": _Key(_to_float, True, True),
        "seed": _Key(_to_int),
        "n_seeds": _Key(_to_int),
        "force_mode": _Key(_choice("analytic", "lagged")),
        "include_thermal_noise": _Key(_to_bool),
        "include_rf_noise": _Key(_to_bool),
        "drive_force_n": _Key(_to_float),
        "drive_omega_rad_s": _Key(_to_float, False, True),
        "initial_x_m": _Key(_to_float),
        "initial_v_m_s": _Key(_to_float),
    },
    "fullscale": {
        "dt_s": _Key(_to_float, True, True),
        "duration_s": _Key(_to_float, True, True),
        "initial_x_m": _Key(_to_float),
        "initial_v_m_s": _Key(_to_float),
        "freeze_mechanics": _Key(_to_bool),
        "drive_off_s": _Key(_to_float, False, True),
        "drive_amplitude_v": _Key(_to_float),
        "drive_frequency_hz": _Key(_to_float, False, True),
    },
}
_REQUIRED_SECTIONS = ("cantilever", "circuit")

SIMULATION_DEFAULTS = {
    "seed": 0,
    "n_seeds": 1,
    "force_mode": "lagged",
    "include_thermal_noise": True,
    "include_rf_noise": True,
    "drive_force_n": 0.0,
    "initial_x_m": 0.0,
    "initial_v_m_s": 0.0,
}
FULLSCALE_DEFAULTS = {
    "initial_x_m": 0.0,
    "initial_v_m_s": 0.0,
    "freeze_mechanics": False,
}


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration; ``sections`` holds typed values keyed as in the file."""

    sections: dict[str, dict[str, Any]] = field(default_factory=dict)

    @property
    def cantilever(self) -> CantileverSpec:
        return _cantilever_spec(self.sections["cantilever"])

    @property
    def circuit(self) -> TankSpec:
        return _tank_spec(self.sections["circuit"], self.sections["cantilever"])

    @property
    def simulation(self) -> dict[str, Any] | None:
        sim = self.sections.get("simulation")
        return None if sim is None else {**SIMULATION_DEFAULTS, **sim}

    @property
    def fullscale(self) -> dict[str, Any] | None:
        fs = self.sections.get("fullscale")
        return None if fs is None else {**FULLSCALE_DEFAULTS, **fs}

    def get(self, path: str) -> Any:
        section, key = _split_path(path)
        return self.sections.get(section, {}).get(key)

    def with_value(self, path: str, value: Any) -> RunConfig:
        """Copy with one ``section.key`` replaced, revalidated."""
        section, key = _split_path(path)
        sections = {name: dict(values) for name, values in self.sections.items()}
        sections.setdefault(section, {})[key] = value
        return from_sections(sections)


def _split_path(path: str) -> tuple[str, str]:
    section, _, key = path.partition(".")
    if section not in _SCHEMA or key not in _SCHEMA[section]:
        raise UnknownParameterPathError(f"unknown parameter path {path!r}")
    return section, key


def _cantilever_spec(c: dict[str, Any]) -> CantileverSpec:
    return CantileverSpec(
        hc=c["hc_m"], h=c["h_m"], t=c["t_m"], w=c["w_m"], d0=c["d0_m"],
        youngs_modulus=c["youngs_modulus_pa"], density=c["density_kg_m3"],
        tau_c=c["tau_c_s"], temperature=c["temperature_k"])


def _tank_spec(r: dict[str, Any], c: dict[str, Any]) -> TankSpec:
    return TankSpec(
        f_drive=r["f_rf_hz"], q_rf=r["q_rf"], v_max=r["v_max_v"], detuning=Detuning(r["detuning"]),
        temperature=r.get("temperature_k", c["temperature_k"]),
        c0=r.get("c0_f"), stripline_z0=r.get("stripline_z0_ohm"))


def _convert(section: str, key: str, raw: Any, errors: list[str]) -> Any:
    spec = _SCHEMA[section][key]
    if isinstance(raw, str):
        try:
            value = spec.convert(raw)
        except ValueError as exc:
            errors.append(f"{section}.{key}: {raw!r} {exc}")
            return None
    else:
        value = raw
    if spec.positive and isinstance(value, (int, float)) and not value > 0:
        errors.append(f"{section}.{key}: must be positive (got {value!r})")
    return value


def from_sections(raw: dict[str, dict[str, Any]]) -> RunConfig:
    """Validate section/key values (strings or already-typed) into a RunConfig.

    Raises:
        ConfigError: listing every problem found.
    """
    errors: list[str] = []
    sections: dict[str, dict[str, Any]] = {}
    for name, values in raw.items():
        if name not in _SCHEMA:
            errors.append(f"{name}: unknown section")
            continue
        typed = {}
        for key, value in values.items():
            if key not in _SCHEMA[name]:
                errors.append(f"{name}.{key}: unknown key")
                continue
            typed[key] = _convert(name, key, value, errors)
        for key, spec in _SCHEMA[name].items():
            if spec.required and key not in values:
                errors.append(f"{name}.{key}: missing required key")
        sections[name] = typed
    for name in _REQUIRED_SECTIONS:
        if name not in raw:
            errors.append(f"{name}: missing required section")
    circuit = raw.get("circuit", {})
    if "c0_f" in circuit and "stripline_z0_ohm" in circuit:
        errors.append("circuit.c0_f, circuit.stripline_z0_ohm: give exactly one, not both")
    elif "circuit" in raw and "c0_f" not in circuit and "stripline_z0_ohm" not in circuit:
        errors.append("circuit.c0_f, circuit.stripline_z0_ohm: one of them is required")
    if errors:
        raise ConfigError(errors)

    config = RunConfig(sections)
    for label, build in (("cantilever", lambda: config.cantilever), ("circuit", lambda: config.circuit)):
        try:
            build()
        except InvalidSpecError as exc:
            errors.append(f"{label}: {exc}")
    if errors:
        raise ConfigError(errors)
    return config


def parse_config(text: str) -> RunConfig:
    """Parse configuration text.

    Raises:
        ConfigParseError: malformed syntax, with the offending line number.
        ConfigError: validation problems, each prefixed by its key path.
    """
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",),
                                       comment_prefixes=("#", ";"), inline_comment_prefixes=("#",),
                                       strict=True, empty_lines_in_values=False,
                                       default_section="\0no-default")
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigParseError("content before the first [section] header", exc.lineno) from None
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
        raise ConfigParseError(exc.message.split(": ", 1)[-1], exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigParseError(f"cannot parse {line.strip()!r}", lineno) from None
    raw = {name: dict(parser.items(name)) for name in parser.sections()}
    return from_sections(raw)


def load_config(path_or_name: str | Path) -> RunConfig:
    """Read a config file, or a shipped example by name (e.g. ``example1-silicon``)."""
    path = Path(path_or_name)
    if path.exists():
        text = path.read_text(encoding="utf-8")
    elif str(path_or_name) in SHIPPED_CONFIGS:
        text = shipped_config_text(str(path_or_name))
    else:
        raise ConfigError(f"config file not found: {path_or_name}")
    return parse_config(text)


def shipped_config_text(name: str) -> str:
    return resources.files("rfcool.configs").joinpath(f"{name}.ini").read_text(encoding="utf-8")


def _render_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_config(config: RunConfig) -> str:
    """Inverse of :func:`parse_config`; floats are written with full precision."""
    lines = []
    for name in _SCHEMA:
        if name not in config.sections:
            continue
        lines.append(f"[{name}]")
        for key in _SCHEMA[name]:
            if key in config.sections[name]:
                lines.append(f"{key} = {_render_value(config.sections[name][key])}")
        lines.append("")
    return "\n".join(lines)
