"""Open-system spinon dynamics in a vison background.

The spinon is a single tight-binding particle on an open chain whose density
matrix obeys

    drho/dt = -i [H, rho] - gamma * (1 - delta_ss') * rho_ss' ,

i.e. coherent hopping plus uniform dephasing of site-basis coherences. A
vison on bond (s, s+1) zeroes the hopping matrix element across it; static
disorder perturbs onsite energies and bond amplitudes additively. The
density matrix is vectorized and integrated with the adaptive Runge-Kutta
stepper from :mod:`.integrate`.

Because the clean Hamiltonian is block diagonal over vison-free segments,
ensemble runs without bond disorder evolve only the segment containing the
origin, which reduces the superoperator dimension from L^2 to (l + r + 1)^2.
"""

from __future__ import annotations

import numpy as np

from .disorder import DisorderRealization, sample_disorder
from .errors import NumericalError, ParameterError
from .integrate import DEFAULT_ATOL, DEFAULT_RTOL, solve_at_times
from .lattice import ChainSpec, VisonConfig, sample_vison_config, segment_containing
from .results import TrajectoryResult

# Fraction of realizations allowed to fail (integrator non-convergence)
# before the whole ensemble run is aborted.
MAX_FAILED_FRACTION = 1e-3


def build_hamiltonian(spec: ChainSpec, visons: VisonConfig | None = None,
                      disorder: DisorderRealization | None = None) -> np.ndarray:
    """Single-particle hopping matrix, L x L real symmetric.

    Bond (s, s+1) carries -hopping where no vison sits and 0 where one does;
    bond disorder adds w_o on top (and can bridge vison cuts). Diagonal
    entries are the onsite disorder energies.
    """
    L = spec.length
    if visons is not None and visons.length != L:
        raise ParameterError(
            f"vison config for {visons.length} sites does not match chain of {L}")
    if disorder is not None and disorder.length != L:
        raise ParameterError(
            f"disorder for {disorder.length} sites does not match chain of {L}")
    H = np.zeros((L, L))
    cut = np.zeros(L - 1, dtype=bool) if visons is None else np.asarray(visons.bonds)
    amp = -spec.hopping * (~cut).astype(float)
    if disorder is not None:
        amp = amp + disorder.bond
        H[np.diag_indices(L)] = disorder.onsite
    idx = np.arange(L - 1)
    H[idx, idx + 1] = amp
    H[idx + 1, idx] = amp
    return H


def initial_density_matrix(L: int, site: int) -> np.ndarray:
    """Spinon localized on one site."""
    if not 0 <= site < L:
        raise ParameterError(f"site {site} outside chain of length {L}")
    rho = np.zeros((L, L), dtype=complex)
    rho[site, site] = 1.0
    return rho


def _lindblad_rhs(H: np.ndarray, gamma: float):
    # asarray keeps the caller's array when already complex, so in-place
    # Hamiltonian updates (stroboscopic runs) propagate into the closure
    Hc = np.asarray(H, dtype=complex)
    L = Hc.shape[0]
    diag = np.diag_indices(L)

    def rhs(t, y):
        rho = y.reshape(L, L)
        drho = Hc @ rho
        drho -= rho @ Hc
        drho *= -1j
        if gamma != 0.0:
            drho -= gamma * rho
            drho[diag] += gamma * rho[diag]
        return drho.reshape(-1)

    return rhs


def evolve(H: np.ndarray, gamma: float, rho0: np.ndarray, times,
           rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> np.ndarray:
    """Density-matrix snapshots at the requested (ascending) times."""
    H = np.asarray(H, dtype=float)
    L = H.shape[0]
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (L, L):
        raise ParameterError(f"rho0 shape {rho0.shape} does not match H {H.shape}")
    if gamma < 0:
        raise ParameterError(f"dephasing must be >= 0, got {gamma}")
    out = solve_at_times(_lindblad_rhs(H, gamma), rho0.reshape(-1), times,
                         rtol=rtol, atol=atol)
    return out.reshape(len(out), L, L)


def density_profile(rho: np.ndarray) -> np.ndarray:
    """|psi(x)|^2, the diagonal of the density matrix."""
    return np.real(np.diag(rho))


def mean_square_displacement(rho: np.ndarray, origin: int) -> float:
    """<x^2> in lattice units, measured from the origin site."""
    profile = density_profile(rho)
    x = np.arange(len(profile)) - origin
    return float(np.sum(x * x * profile))


def check_density_matrix(rho: np.ndarray, herm_tol=1e-12, trace_tol=1e-10,
                         psd_tol=1e-9):
    """Raise if rho is not Hermitian/unit-trace/PSD within tolerance."""
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise NumericalError("density matrix not Hermitian",
                             diagnostics={"deviation": herm})
    tr = abs(np.trace(rho).real - 1.0)
    if tr > trace_tol or abs(np.trace(rho).imag) > trace_tol:
        raise NumericalError("density matrix trace differs from 1",
                             diagnostics={"deviation": tr})
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lo < -psd_tol:
        raise NumericalError("density matrix not positive semidefinite",
                             diagnostics={"lowest_eigenvalue": lo})


def _segment_observables(spec: ChainSpec, visons: VisonConfig,
                         onsite: np.ndarray | None, times: np.ndarray):
    """Evolve only the origin's segment (exact when no bond disorder).

    Returns (profiles, msd) on the full chain, zero outside the segment.
    """
    seg = segment_containing(visons, spec.origin)
    L, T = spec.length, len(times)
    profiles = np.zeros((T, L))
    if seg.n_sites == 1:
        profiles[:, spec.origin] = 1.0
        return profiles, np.zeros(T)
    n = seg.n_sites
    sub = ChainSpec(n, hopping=spec.hopping, dephasing=spec.dephasing,
                    origin=spec.origin - seg.left)
    H = build_hamiltonian(sub)
    if onsite is not None:
        H = H + np.diag(onsite[seg.left:seg.right + 1])
    rho0 = initial_density_matrix(n, sub.origin)
    rhos = evolve(H, spec.dephasing, rho0, times)
    msd = np.empty(T)
    for i in range(T):
        p = density_profile(rhos[i])
        profiles[i, seg.left:seg.right + 1] = p
        x = np.arange(n) - sub.origin
        msd[i] = float(np.sum(x * x * p))
    return profiles, msd


def _full_chain_observables(spec: ChainSpec, H: np.ndarray, times: np.ndarray):
    rho0 = initial_density_matrix(spec.length, spec.origin)
    rhos = evolve(H, spec.dephasing, rho0, times)
    profiles = np.empty((len(times), spec.length))
    msd = np.empty(len(times))
    for i in range(len(times)):
        profiles[i] = density_profile(rhos[i])
        msd[i] = mean_square_displacement(rhos[i], spec.origin)
    return profiles, msd


def single_realization(spec: ChainSpec, rho_v: float, rng: np.random.Generator,
                       times: np.ndarray, disorder_params=None, cache=None):
    """One vison (and optionally disorder) draw and its time evolution.

    With no bond disorder the evolution is restricted to the origin's
    segment, which is exact (block diagonality). A clean run depends on the
    vison draw only through the segment shape (l, r), so identical shapes
    are served from ``cache`` bit-identically.
    """
    visons = sample_vison_config(spec.length, rho_v, rng)
    realization = None
    if disorder_params is not None:
        sigma0, sigma1 = disorder_params
        realization = sample_disorder(spec.length, sigma0, sigma1, rng)
    if realization is None:
        seg = segment_containing(visons, spec.origin)
        key = seg.distances(spec.origin)
        if cache is not None and key in cache:
            return cache[key]
        out = _segment_observables(spec, visons, None, times)
        if cache is not None:
            cache[key] = out
        return out
    if realization.has_bond_disorder:
        H = build_hamiltonian(spec, visons, realization)
        return _full_chain_observables(spec, H, times)
    return _segment_observables(spec, visons, realization.onsite, times)


def aggregate_trajectories(chunks):
    """Combine per-chunk partial sums in a fixed order.

    Each chunk is (n_ok, n_failed, sum_profiles, sum_msd, sum_msd_sq);
    summing chunk partials in chunk order keeps results byte-identical for
    any worker count.
    """
    n_ok = 0
    n_failed = 0
    sum_prof = None
    sum_msd = None
    sum_msd_sq = None
    for ok, failed, prof, msd, msd_sq in chunks:
        n_ok += ok
        n_failed += failed
        if sum_prof is None:
            sum_prof, sum_msd, sum_msd_sq = prof.copy(), msd.copy(), msd_sq.copy()
        else:
            sum_prof += prof
            sum_msd += msd
            sum_msd_sq += msd_sq
    return n_ok, n_failed, sum_prof, sum_msd, sum_msd_sq


def run_realization_chunk(spec: ChainSpec, rho_v: float, times: np.ndarray,
                          seed: int, start: int, stop: int,
                          disorder_params=None, cache=None):
    """Realizations [start, stop) with per-index substreams of the master seed."""
    T, L = len(times), spec.length
    sum_prof = np.zeros((T, L))
    sum_msd = np.zeros(T)
    sum_msd_sq = np.zeros(T)
    n_ok = 0
    n_failed = 0
    for i in range(start, stop):
        rng = np.random.default_rng([seed, i])
        try:
            profiles, msd = single_realization(
                spec, rho_v, rng, times, disorder_params, cache)
        except NumericalError:
            n_failed += 1
            continue
        sum_prof += profiles
        sum_msd += msd
        sum_msd_sq += msd * msd
        n_ok += 1
    return n_ok, n_failed, sum_prof, sum_msd, sum_msd_sq


def finalize_ensemble(spec: ChainSpec, times, seed, chunks, params) -> TrajectoryResult:
    n_ok, n_failed, sum_prof, sum_msd, sum_msd_sq = aggregate_trajectories(chunks)
    n_total = n_ok + n_failed
    if n_total and n_failed > MAX_FAILED_FRACTION * n_total:
        raise NumericalError(
            f"{n_failed}/{n_total} realizations failed to integrate",
            diagnostics={"n_failed": n_failed, "n_total": n_total})
    if n_ok == 0:
        raise NumericalError("no realization succeeded")
    times = np.asarray(times, dtype=float)
    mean_msd = sum_msd / n_ok
    if n_ok > 1:
        var = np.maximum(sum_msd_sq - n_ok * mean_msd ** 2, 0.0) / (n_ok - 1)
        stderr = np.sqrt(var / n_ok)
    else:
        stderr = np.zeros_like(mean_msd)
    return TrajectoryResult(
        times=times, profiles=sum_prof / n_ok, msd=mean_msd, msd_stderr=stderr,
        n_realizations=n_ok, seed=seed, params=params, n_failed=n_failed)


def run_base_ensemble(spec: ChainSpec, rho_v: float, n_realizations: int,
                      times, seed: int, disorder_params=None) -> TrajectoryResult:
    """Average profiles and <x^2> over sampled vison backgrounds.

    With ``disorder_params = (sigma0, sigma1)`` each realization also draws a
    fresh disorder realization (visons are resampled alongside). Results are
    a pure function of (spec, rho_v, n, times, seed).
    """
    if n_realizations < 1:
        raise ParameterError("need at least one realization")
    times = np.asarray(times, dtype=float)
    cache = {} if disorder_params is None else None
    chunk = run_realization_chunk(spec, rho_v, times, seed, 0, n_realizations,
                                  disorder_params, cache)
    params = {"L": spec.length, "hopping": spec.hopping,
              "dephasing": spec.dephasing, "origin": spec.origin,
              "rho_v": rho_v, "n_realizations": n_realizations}
    if disorder_params is not None:
        params["sigma0"], params["sigma1"] = disorder_params
    return finalize_ensemble(spec, times, seed, [chunk], params)
