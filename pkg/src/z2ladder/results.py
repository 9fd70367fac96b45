"""Result containers and the delimited on-disk format.

Trajectory-like experiments (quantum ensembles, stroboscopic runs, classical
walkers) all share one CSV schema: one row per requested time with the mean
square displacement, its standard error, and the full density profile.
Metadata ('#'-prefixed header lines) records everything needed to re-run the
file: schema version, experiment kind, parameter JSON and master seed. The
CSV content is a pure function of (parameters, seed); volatile information
(wall time, worker count, timestamps) lives in the sidecar written by the
runner, never in the CSV.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

SCHEMA_VERSION = 1


def _fmt(x: float) -> str:
    """Shortest round-trip decimal representation."""
    return repr(float(x))


@dataclass
class TrajectoryResult:
    """Ensemble-averaged observables of a single-particle trajectory."""

    times: np.ndarray            # (T,), units 1/hopping
    profiles: np.ndarray         # (T, L) mean density |psi(x, t)|^2
    msd: np.ndarray              # (T,) mean square displacement from origin
    msd_stderr: np.ndarray       # (T,) standard error over realizations
    n_realizations: int
    seed: int
    params: dict = field(default_factory=dict)
    n_failed: int = 0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.profiles = np.asarray(self.profiles, dtype=float)
        self.msd = np.asarray(self.msd, dtype=float)
        self.msd_stderr = np.asarray(self.msd_stderr, dtype=float)
        T, L = self.profiles.shape
        if not (len(self.times) == len(self.msd) == len(self.msd_stderr) == T):
            raise ParameterError("inconsistent trajectory result lengths")

    @property
    def length(self) -> int:
        return self.profiles.shape[1]

    def header_columns(self) -> list[str]:
        return ["time", "msd", "msd_stderr"] + [
            f"site_{s}" for s in range(self.length)]

    def to_csv(self, path, experiment: str = "trajectory"):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# schema_version: {SCHEMA_VERSION}\n")
            fh.write(f"# experiment: {experiment}\n")
            fh.write(f"# params: {json.dumps(self.params, sort_keys=True)}\n")
            fh.write(f"# seed: {self.seed}\n")
            fh.write(f"# n_realizations: {self.n_realizations}\n")
            fh.write(f"# n_failed: {self.n_failed}\n")
            fh.write(",".join(self.header_columns()) + "\n")
            for i, t in enumerate(self.times):
                row = [_fmt(t), _fmt(self.msd[i]), _fmt(self.msd_stderr[i])]
                row += [_fmt(v) for v in self.profiles[i]]
                fh.write(",".join(row) + "\n")


def _parse_cell(v: str):
    try:
        return float(v)
    except ValueError:
        return v


def read_csv(path):
    """Read any package CSV into (metadata dict, column names, row list).

    Cells parse to float where possible, otherwise stay strings (e.g. the
    sector column of spectra tables).
    """
    meta = {}
    header = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                meta[key.strip()] = value.strip()
            elif header is None:
                header = line.split(",")
            else:
                rows.append([_parse_cell(v) for v in line.split(",")])
    if header is None:
        raise ParameterError(f"{path}: no header row found")
    if "params" in meta:
        meta["params"] = json.loads(meta["params"])
    return meta, header, rows


def write_table(path, columns: list[str], rows, experiment: str,
                params: dict, seed=None, extra_meta: dict | None = None):
    """Generic CSV writer for non-trajectory tables (spectra, coupling maps)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# schema_version: {SCHEMA_VERSION}\n")
        fh.write(f"# experiment: {experiment}\n")
        fh.write(f"# params: {json.dumps(params, sort_keys=True)}\n")
        if seed is not None:
            fh.write(f"# seed: {seed}\n")
        for key, value in (extra_meta or {}).items():
            fh.write(f"# {key}: {value}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(
                _fmt(v) if isinstance(v, (int, float, np.floating)) else str(v)
                for v in row) + "\n")
