"""Classical random walk on a pinned energy landscape.

The incoherent straw man for the quantum chain: a particle starts at the
center of an open chain with Gaussian onsite pinning energies and performs
Metropolis dynamics at temperature T. One unit of Monte Carlo time is one
attempted move: pick left/right with probability 1/2, accept with
min(1, exp(-dE/T)), and reject moves past the chain ends (reflecting
boundaries). Detailed balance w.r.t. the Boltzmann distribution holds by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .results import TrajectoryResult


@dataclass(frozen=True)
class PinningLandscape:
    """Gaussian onsite energies (mean 0, std sigma) at temperature T."""

    energies: np.ndarray
    temperature: float = 1.0

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        e.flags.writeable = False
        object.__setattr__(self, "energies", e)
        if self.temperature <= 0:
            raise ParameterError(f"temperature must be > 0, got {self.temperature}")
        if e.ndim != 1 or len(e) < 2:
            raise ParameterError("landscape needs at least two sites")

    @property
    def length(self) -> int:
        return len(self.energies)

    def boltzmann_weights(self) -> np.ndarray:
        w = np.exp(-self.energies / self.temperature)
        return w / w.sum()


def sample_landscape(L: int, sigma: float, rng: np.random.Generator,
                     temperature: float = 1.0) -> PinningLandscape:
    if sigma < 0:
        raise ParameterError(f"sigma must be >= 0, got {sigma}")
    return PinningLandscape(sigma * rng.standard_normal(L), temperature)


def walk_positions(landscape: PinningLandscape, steps: int,
                   rng: np.random.Generator, start: int | None = None) -> np.ndarray:
    """Single-walker trajectory; returns positions after 0..steps moves."""
    L = landscape.length
    pos = (L - 1) // 2 if start is None else start
    if not 0 <= pos < L:
        raise ParameterError(f"start {pos} outside chain of length {L}")
    E = landscape.energies
    T = landscape.temperature
    directions = rng.integers(0, 2, size=steps) * 2 - 1
    uniforms = rng.random(steps)
    out = np.empty(steps + 1, dtype=np.int64)
    out[0] = pos
    for i in range(steps):
        nxt = pos + directions[i]
        if 0 <= nxt < L:
            dE = E[nxt] - E[pos]
            if dE <= 0 or uniforms[i] < np.exp(-dE / T):
                pos = nxt
        out[i + 1] = pos
    return out


def run_rw_ensemble(L: int, sigma: float, temperature: float, t_max: int,
                    n_histories: int, seed: int, times=None) -> TrajectoryResult:
    """Occupation histogram and <x^2> at the requested integer times.

    Each history draws its own landscape and its own (seed, index)
    substream; this mirrors the disorder averaging of the quantum runs.
    """
    if n_histories < 1:
        raise ParameterError("need at least one history")
    if t_max < 0:
        raise ParameterError(f"t_max must be >= 0, got {t_max}")
    if times is None:
        times = np.arange(t_max + 1)
    times = np.asarray(times, dtype=float)
    steps_at = np.round(times).astype(int)
    if np.any(steps_at < 0) or np.any(steps_at > t_max) or np.any(np.diff(steps_at) < 0):
        raise ParameterError("times must be ascending integers within [0, t_max]")

    origin = (L - 1) // 2
    T_out = len(times)
    counts = np.zeros((T_out, L))
    sum_msd = np.zeros(T_out)
    sum_msd_sq = np.zeros(T_out)
    for i in range(n_histories):
        rng = np.random.default_rng([seed, i])
        landscape = sample_landscape(L, sigma, rng, temperature)
        traj = walk_positions(landscape, t_max, rng)
        snap = traj[steps_at]
        counts[np.arange(T_out), snap] += 1.0
        sq = (snap - origin).astype(float) ** 2
        sum_msd += sq
        sum_msd_sq += sq * sq

    mean_msd = sum_msd / n_histories
    if n_histories > 1:
        var = np.maximum(sum_msd_sq - n_histories * mean_msd ** 2, 0.0)
        stderr = np.sqrt(var / (n_histories - 1) / n_histories)
    else:
        stderr = np.zeros_like(mean_msd)
    params = {"L": L, "sigma": sigma, "temperature": temperature,
              "t_max": int(t_max), "n_histories": n_histories}
    return TrajectoryResult(times=times, profiles=counts / n_histories,
                            msd=mean_msd, msd_stderr=stderr,
                            n_realizations=n_histories, seed=seed, params=params)
