"""Stroboscopic vison dynamics: quantum spinon evolution interleaved with
Poisson-timed stochastic single-site vison updates.

Each update flips the occupation of the two bonds adjacent to a uniformly
drawn site (one bond at the chain ends), which covers both vison hopping
and pair creation/annihilation. Updates are always accepted: the vison
energy scale is negligible, so the configurations are at infinite
temperature. The spinon density matrix is untouched at an update; only the
Hamiltonian changes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ParameterError
from .integrate import AdaptiveStepper
from .lattice import ChainSpec, VisonConfig, sample_vison_config
from .lindblad import (
    _lindblad_rhs,
    build_hamiltonian,
    density_profile,
    finalize_ensemble,
    initial_density_matrix,
)


@dataclass(frozen=True)
class StroboSchedule:
    """Poisson event times on [0, t_max] with mean inter-event gap delta_t."""

    delta_t: float
    t_max: float
    events: np.ndarray

    def __post_init__(self):
        events = np.asarray(self.events, dtype=float)
        events.flags.writeable = False
        object.__setattr__(self, "events", events)
        if events.size and (np.any(np.diff(events) <= 0) or events[0] < 0
                            or events[-1] > self.t_max):
            raise ParameterError("event times must be strictly ascending in [0, t_max]")

    @property
    def n_events(self) -> int:
        return len(self.events)


def poisson_event_times(delta_t: float, t_max: float,
                        rng: np.random.Generator) -> StroboSchedule:
    """Exponential inter-arrival gaps with mean delta_t."""
    if delta_t <= 0 or t_max <= 0:
        raise ParameterError(
            f"delta_t and t_max must be positive, got ({delta_t}, {t_max})")
    events = []
    t = rng.exponential(delta_t)
    while t <= t_max:
        events.append(t)
        t += rng.exponential(delta_t)
    return StroboSchedule(delta_t, t_max, np.array(events))


def apply_site_update(config: VisonConfig, site: int) -> VisonConfig:
    """Flip the bonds adjacent to ``site`` (single bond at the chain ends).

    Both bonds empty -> pair creation; both occupied -> pair annihilation;
    exactly one occupied -> the vison hops across the site.
    """
    L = config.length
    if not 0 <= site < L:
        raise ParameterError(f"site {site} outside chain of length {L}")
    bonds = list(config.bonds)
    if site > 0:
        bonds[site - 1] = not bonds[site - 1]
    if site < L - 1:
        bonds[site] = not bonds[site]
    return VisonConfig(tuple(bonds), config.density)


def _strobo_history(spec: ChainSpec, rho_v: float, delta_t: float,
                    times: np.ndarray, rng: np.random.Generator):
    """One stochastic history: alternate quantum evolution and vison updates.

    The Hamiltonian array is mutated in place at each event (a site update
    touches at most two bonds), and the stepper just refreshes its cached
    stage; this keeps the per-event cost flat even at ~1e4 events.
    """
    L = spec.length
    config = sample_vison_config(L, rho_v, rng)
    schedule = poisson_event_times(delta_t, float(times[-1]), rng)
    sites = rng.integers(0, L, size=schedule.n_events)

    bonds = np.array(config.bonds, dtype=bool)
    H = build_hamiltonian(spec, config).astype(complex)
    stepper = AdaptiveStepper(
        _lindblad_rhs(H, spec.dephasing),
        0.0, initial_density_matrix(L, spec.origin).reshape(-1))

    def flip_bond(b: int):
        bonds[b] = not bonds[b]
        amp = 0.0 if bonds[b] else -spec.hopping
        H[b, b + 1] = amp
        H[b + 1, b] = amp

    profiles = np.empty((len(times), L))
    msd = np.empty(len(times))
    x2 = (np.arange(L) - spec.origin) ** 2

    i_event = 0
    for i_t, t in enumerate(times):
        while i_event < schedule.n_events and schedule.events[i_event] <= t:
            stepper.advance(schedule.events[i_event])
            site = int(sites[i_event])
            if site > 0:
                flip_bond(site - 1)
            if site < L - 1:
                flip_bond(site)
            stepper.refresh()
            i_event += 1
        y = stepper.advance(t) if t > stepper.t else stepper.y
        p = density_profile(y.reshape(L, L))
        profiles[i_t] = p
        msd[i_t] = float(np.sum(x2 * p))
    return profiles, msd


def run_history_chunk(spec: ChainSpec, rho_v: float, delta_t: float,
                      times: np.ndarray, seed: int, start: int, stop: int):
    """Histories [start, stop), each on its own (seed, index) substream."""
    T, L = len(times), spec.length
    sum_prof = np.zeros((T, L))
    sum_msd = np.zeros(T)
    sum_msd_sq = np.zeros(T)
    n_ok = 0
    n_failed = 0
    for i in range(start, stop):
        rng = np.random.default_rng([seed, i])
        try:
            profiles, msd = _strobo_history(spec, rho_v, delta_t, times, rng)
        except NumericalError:
            n_failed += 1
            continue
        sum_prof += profiles
        sum_msd += msd
        sum_msd_sq += msd * msd
        n_ok += 1
    return n_ok, n_failed, sum_prof, sum_msd, sum_msd_sq


def evolve_strobo(spec: ChainSpec, delta_t: float, times, n_histories: int,
                  seed: int, rho_v: float = 0.5):
    """Ensemble of stroboscopic histories, averaged like run_base_ensemble."""
    if n_histories < 1:
        raise ParameterError("need at least one history")
    times = np.asarray(times, dtype=float)
    if times.size == 0 or times[-1] <= 0:
        raise ParameterError("need a positive final time")
    chunk = run_history_chunk(spec, rho_v, delta_t, times, seed, 0, n_histories)
    params = {"L": spec.length, "hopping": spec.hopping,
              "dephasing": spec.dephasing, "origin": spec.origin,
              "rho_v": rho_v, "delta_t": delta_t, "n_histories": n_histories}
    return finalize_ensemble(spec, times, seed, [chunk], params)
