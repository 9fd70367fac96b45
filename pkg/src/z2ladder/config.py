"""Experiment configuration: schema-versioned JSON, strict validation.

A config is a flat JSON object with an ``experiment`` kind, a
``schema_version`` and the experiment's parameters. Unknown keys are
rejected so that typos fail loudly instead of silently running defaults.
Defaults reproduce the headline runs: L = 25 chain, unit hopping,
dephasing 0.5, vison density 0.5, times {1, 100}, and the published
ensemble sizes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields

from .errors import ConfigError

SCHEMA_VERSION = 1

EXPERIMENT_KINDS = (
    "base-dynamics",
    "disorder-sweep",
    "classical-rw",
    "strobo",
    "spectra",
    "coupling-map",
    "analytic",
    "dwave-feasibility",
)


def _positive(name, value, strict=True):
    if value <= 0 if strict else value < 0:
        raise ConfigError(f"{name} must be {'> 0' if strict else '>= 0'}, got {value}")


@dataclass
class ExperimentConfig:
    """Validated parameters for one experiment run."""

    experiment: str
    schema_version: int = SCHEMA_VERSION
    seed: int = 2024
    # chain / ensemble parameters (trajectory experiments)
    length: int = 25
    hopping: float = 1.0
    dephasing: float = 0.5
    rho_v: float = 0.5
    times: list = field(default_factory=lambda: [1.0, 100.0])
    n_realizations: int = 10240
    sigma0: float = 0.0
    sigma1: float = 0.0
    # disorder sweep
    sigma_grid: list = field(default_factory=lambda: [0.0, 0.2, 0.5, 1.0, 2.0, 5.0])
    disorder_kind: str = "diagonal"  # or "offdiagonal"
    # classical walker
    temperature: float = 1.0
    sigma: float = 0.0
    t_max: int = 100
    # stroboscopic vison dynamics
    delta_t: float = 1.0
    # star spectra / coupling maps
    model: str = "cgs"  # or "z2"
    coupling_j: float = 1.0
    gamma0: float = 0.6
    lam: float = 1.0
    hop_half: float = 0.1525
    k_coupling: float | None = None
    parity: str = "both"
    k_levels: int = 8
    gamma0_grid: list = field(default_factory=lambda: [round(0.1 * i, 2) for i in range(1, 17)])
    gap_reference: str = "vison_matched"
    # analytic tables
    cutoff: int = 60
    # feasibility
    j_physical_ghz: float = 0.46
    temperature_ghz: float = 0.27
    protocol_window_ns: float = 1000.0
    # execution
    workers: int = 1
    output: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_KINDS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; "
                f"choose from {', '.join(EXPERIMENT_KINDS)}")
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(
                f"schema_version {self.schema_version} unsupported "
                f"(this build reads {SCHEMA_VERSION})")
        if self.length < 2:
            raise ConfigError(f"length must be >= 2, got {self.length}")
        if not 0.0 <= self.rho_v <= 1.0:
            raise ConfigError(f"rho_v must be in [0, 1], got {self.rho_v}")
        if self.dephasing < 0:
            raise ConfigError(f"dephasing must be >= 0, got {self.dephasing}")
        if self.sigma0 < 0 or self.sigma1 < 0 or self.sigma < 0:
            raise ConfigError("disorder strengths must be >= 0")
        if any(s < 0 for s in self.sigma_grid):
            raise ConfigError("sigma_grid entries must be >= 0")
        if self.disorder_kind not in ("diagonal", "offdiagonal"):
            raise ConfigError(
                f"disorder_kind must be 'diagonal' or 'offdiagonal', got {self.disorder_kind!r}")
        if self.n_realizations < 1:
            raise ConfigError(f"n_realizations must be >= 1, got {self.n_realizations}")
        if not self.times or sorted(self.times) != list(self.times) or self.times[0] < 0:
            raise ConfigError("times must be a non-empty ascending list of >= 0 values")
        _positive("temperature", self.temperature)
        _positive("delta_t", self.delta_t)
        _positive("t_max", self.t_max)
        _positive("coupling_j", self.coupling_j)
        _positive("lam", self.lam)
        if self.model not in ("cgs", "z2"):
            raise ConfigError(f"model must be 'cgs' or 'z2', got {self.model!r}")
        if self.parity not in ("even", "odd", "both"):
            raise ConfigError(f"parity must be even/odd/both, got {self.parity!r}")
        if self.gap_reference not in ("vison_matched", "ground"):
            raise ConfigError(
                f"gap_reference must be 'vison_matched' or 'ground', got {self.gap_reference!r}")
        if self.k_levels < 1:
            raise ConfigError(f"k_levels must be >= 1, got {self.k_levels}")
        if not self.gamma0_grid or sorted(self.gamma0_grid) != list(self.gamma0_grid):
            raise ConfigError("gamma0_grid must be a non-empty ascending list")
        if self.cutoff < 1:
            raise ConfigError(f"cutoff must be >= 1, got {self.cutoff}")
        _positive("j_physical_ghz", self.j_physical_ghz)
        _positive("temperature_ghz", self.temperature_ghz)
        _positive("protocol_window_ns", self.protocol_window_ns)
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            out[f.name] = getattr(self, f.name)
        return out

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if "experiment" not in data:
            raise ConfigError("config is missing the 'experiment' key")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


# Template parameter subsets: only the keys a user plausibly edits per kind.
_TEMPLATE_KEYS = {
    "base-dynamics": ["seed", "length", "hopping", "dephasing", "rho_v",
                      "times", "n_realizations", "sigma0", "sigma1", "workers"],
    "disorder-sweep": ["seed", "length", "hopping", "dephasing", "rho_v",
                       "times", "n_realizations", "sigma_grid",
                       "disorder_kind", "workers"],
    "classical-rw": ["seed", "length", "sigma", "temperature", "t_max",
                     "times", "n_realizations", "workers"],
    "strobo": ["seed", "length", "hopping", "dephasing", "rho_v", "delta_t",
               "times", "n_realizations", "workers"],
    "spectra": ["model", "coupling_j", "gamma0", "lam", "hop_half",
                "k_coupling", "parity", "k_levels"],
    "coupling-map": ["coupling_j", "gamma0_grid", "k_coupling", "k_levels",
                     "gap_reference", "workers"],
    "analytic": ["length", "hopping", "dephasing", "times", "cutoff"],
    "dwave-feasibility": ["hop_half", "lam", "j_physical_ghz",
                          "temperature_ghz", "protocol_window_ns"],
}

_TEMPLATE_OVERRIDES = {
    "disorder-sweep": {"n_realizations": 1024},
    "strobo": {"n_realizations": 1024},
    "classical-rw": {"n_realizations": 10000},
    "dwave-feasibility": {"hop_half": 0.31, "lam": 0.67},
    "spectra": {"hop_half": 0.1525},
}


def config_template(kind: str) -> dict:
    """Editable default config for one experiment kind."""
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(
            f"unknown experiment {kind!r}; choose from {', '.join(EXPERIMENT_KINDS)}")
    base = ExperimentConfig(experiment=kind).to_dict()
    keys = ["experiment", "schema_version"] + _TEMPLATE_KEYS[kind]
    out = {k: base[k] for k in keys}
    out.update(_TEMPLATE_OVERRIDES.get(kind, {}))
    return out
