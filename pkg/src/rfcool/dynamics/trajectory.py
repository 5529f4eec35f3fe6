"""Uniformly sampled simulation output and its CSV + JSON sidecar format."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

ENVELOPE_COLUMNS = ("x_m", "v_m_s")
LAGGED_COLUMNS = ("x_m", "v_m_s", "u_V2")
FULLSCALE_COLUMNS = ("q_C", "i_A", "x_m", "v_m_s")

RNG_ALGORITHM = "numpy.random.Philox(4x64-10)+SeedSequence"


def config_hash(obj) -> str:
    """SHA-256 of the canonical JSON form of ``obj``."""
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class Trajectory:
    """State samples at ``t0 + k*dt``; one column per entry of ``columns``."""

    t0: float
    dt: float
    data: np.ndarray
    columns: tuple[str, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.shape[1] != len(self.columns):
            raise ValueError("data must be (n_samples, n_columns)")

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self))

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    @property
    def x(self) -> np.ndarray:
        return self.column("x_m")

    @property
    def v(self) -> np.ndarray:
        return self.column("v_m_s")

    @property
    def u(self) -> np.ndarray:
        return self.column("u_V2")

    @property
    def q(self) -> np.ndarray:
        return self.column("q_C")

    @property
    def i(self) -> np.ndarray:
        return self.column("i_A")

    def write(self, path: str | Path) -> tuple[Path, Path]:
        """Write ``path`` as CSV and ``path`` + ``.json`` as the metadata sidecar."""
        path = Path(path)
        table = np.column_stack([self.t, self.data])
        header = ",".join(("t_s",) + self.columns)
        np.savetxt(path, table, delimiter=",", header=header, comments="", fmt="%.10e")
        meta_path = path.with_name(path.name + ".json")
        meta = dict(self.metadata, t0=self.t0, dt=self.dt, n_samples=len(self),
                    columns=["t_s", *self.columns])
        meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")
        return path, meta_path

    @classmethod
    def read(cls, path: str | Path) -> Trajectory:
        path = Path(path)
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        with open(path) as fh:
            header = fh.readline().strip().split(",")
        meta_path = path.with_name(path.name + ".json")
        metadata = json.loads(meta_path.read_text()) if meta_path.exists() else {}
        dt = metadata.get("dt", float(table[1, 0] - table[0, 0]) if len(table) > 1 else 0.0)
        for key in ("t0", "dt", "n_samples", "columns"):
            metadata.pop(key, None)
        return cls(t0=float(table[0, 0]), dt=dt, data=table[:, 1:], columns=tuple(header[1:]),
                   metadata=metadata)
