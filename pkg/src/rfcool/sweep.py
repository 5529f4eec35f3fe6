"""One-parameter sweeps of the closed-form design report."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np

from rfcool.config import RunConfig, _split_path
from rfcool.coupling import CouplingReport, coupling_report
from rfcool.errors import ConfigError
from rfcool.output import report_record

WORKERS_ENV = "RFCOOL_WORKERS"


@dataclass(frozen=True)
class SweepGrid:
    """Grid over one ``section.key`` path.

    Either ``start``/``stop``/``steps``/``scale`` or an explicit ``values``
    list (needed for non-numeric keys such as ``circuit.detuning``).
    """

    path: str
    start: float | None = None
    stop: float | None = None
    steps: int = 2
    scale: str = "linear"
    values: tuple[Any, ...] | None = None

    def __post_init__(self):
        _split_path(self.path)
        if self.values is not None:
            if len(self.values) < 1:
                raise ConfigError("sweep needs at least one value")
            return
        problems = []
        if self.start is None or self.stop is None:
            problems.append("sweep needs start and stop (or explicit values)")
        elif self.start == self.stop:
            problems.append("sweep start and stop must differ")
        if self.steps < 2:
            problems.append("sweep steps must be at least 2")
        if self.scale not in ("linear", "log"):
            problems.append("sweep scale must be linear or log")
        elif self.scale == "log" and self.start is not None and self.stop is not None \
                and not (self.start > 0 and self.stop > 0):
            problems.append("log sweep needs positive endpoints")
        if problems:
            raise ConfigError(problems)

    def grid(self) -> list[Any]:
        if self.values is not None:
            return list(self.values)
        if self.scale == "log":
            return list(np.geomspace(self.start, self.stop, self.steps))
        return list(np.linspace(self.start, self.stop, self.steps))


@dataclass(frozen=True)
class SweepResult:
    path: str
    values: list[Any]
    reports: list[CouplingReport]
    records: list[dict[str, Any]]

    def __len__(self) -> int:
        return len(self.values)

    def rows(self) -> list[dict[str, Any]]:
        return [{self.path: value, **rec} for value, rec in zip(self.values, self.records)]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.reports], dtype=float)


def _evaluate(config: RunConfig) -> tuple[CouplingReport, dict[str, Any]]:
    return coupling_report(config.cantilever, config.circuit), report_record(config)


def worker_count(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, default)))
    except ValueError:
        return default


def run_sweep(config: RunConfig, grid: SweepGrid, workers: int | None = None) -> SweepResult:
    """Evaluate the design report at every grid point, in grid order."""
    values = [v.item() if isinstance(v, np.generic) else v for v in grid.grid()]
    configs = [config.with_value(grid.path, v) for v in values]
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate, configs))
    else:
        results = [_evaluate(c) for c in configs]
    return SweepResult(path=grid.path, values=values, reports=[r for r, _ in results],
                       records=[rec for _, rec in results])
