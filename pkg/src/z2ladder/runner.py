"""Experiment orchestration: dispatch, parallel ensembles, persistence.

Trajectory ensembles are split into fixed-size chunks of realizations;
chunks may run on a multiprocessing pool, but partial sums are always
reduced in chunk order, so the output is byte-identical for any worker
count. Every run writes the delimited result plus a JSON sidecar with the
full config, seed, library version and wall time; volatile data stays out
of the CSV.
"""

from __future__ import annotations

import json
import multiprocessing
import os
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .dwave import dwave_feasibility
from .errors import ConfigError
from .lattice import ChainSpec
from .lindblad import finalize_ensemble, run_realization_chunk
from .randomwalk import run_rw_ensemble
from .results import write_table
from .segment_stats import density_table, semi_analytic_msd
from .stars import (
    coupling_map,
    extract_couplings,
    two_star_assembly,
    two_star_spectrum,
    z2_two_star_spectrum,
)
from .strobo import run_history_chunk

CHUNK_SIZE = 64
WORKERS_ENV = "Z2LADDER_WORKERS"
OUTDIR_ENV = "Z2LADDER_OUTDIR"


def _worker_count(config: ExperimentConfig) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from exc
        if n < 1:
            raise ConfigError(f"{WORKERS_ENV} must be >= 1, got {n}")
        return n
    return config.workers


def _chunk_ranges(n: int):
    return [(start, min(start + CHUNK_SIZE, n)) for start in range(0, n, CHUNK_SIZE)]


def _quantum_chunk(args):
    kind, params, start, stop = args
    spec = ChainSpec(params["length"], hopping=params["hopping"],
                     dephasing=params["dephasing"])
    times = np.asarray(params["times"], dtype=float)
    if kind == "base":
        return run_realization_chunk(
            spec, params["rho_v"], times, params["seed"], start, stop,
            disorder_params=params.get("disorder_params"),
            cache={} if params.get("disorder_params") is None else None)
    if kind == "strobo":
        return run_history_chunk(
            spec, params["rho_v"], params["delta_t"], times, params["seed"],
            start, stop)
    raise ConfigError(f"unknown chunk kind {kind!r}")


def run_chunked_ensemble(kind: str, params: dict, n: int, workers: int):
    """Execute realization chunks, serially or on a pool; reduce in order."""
    jobs = [(kind, params, start, stop) for start, stop in _chunk_ranges(n)]
    if workers <= 1 or len(jobs) == 1:
        chunks = [_quantum_chunk(job) for job in jobs]
    else:
        with multiprocessing.Pool(processes=min(workers, len(jobs))) as pool:
            chunks = pool.map(_quantum_chunk, jobs)
    return chunks


def _run_base(config: ExperimentConfig, workers: int):
    spec = ChainSpec(config.length, hopping=config.hopping,
                     dephasing=config.dephasing)
    disorder = None
    if config.sigma0 > 0 or config.sigma1 > 0:
        disorder = (config.sigma0, config.sigma1)
    params = {"length": config.length, "hopping": config.hopping,
              "dephasing": config.dephasing, "rho_v": config.rho_v,
              "times": list(config.times), "seed": config.seed,
              "disorder_params": disorder}
    chunks = run_chunked_ensemble("base", params, config.n_realizations, workers)
    meta = {"L": config.length, "hopping": config.hopping,
            "dephasing": config.dephasing, "origin": spec.origin,
            "rho_v": config.rho_v, "sigma0": config.sigma0,
            "sigma1": config.sigma1, "n_realizations": config.n_realizations}
    return finalize_ensemble(spec, config.times, config.seed, chunks, meta)


def _run_strobo(config: ExperimentConfig, workers: int):
    spec = ChainSpec(config.length, hopping=config.hopping,
                     dephasing=config.dephasing)
    params = {"length": config.length, "hopping": config.hopping,
              "dephasing": config.dephasing, "rho_v": config.rho_v,
              "delta_t": config.delta_t, "times": list(config.times),
              "seed": config.seed}
    chunks = run_chunked_ensemble("strobo", params, config.n_realizations, workers)
    meta = {"L": config.length, "hopping": config.hopping,
            "dephasing": config.dephasing, "origin": spec.origin,
            "rho_v": config.rho_v, "delta_t": config.delta_t,
            "n_histories": config.n_realizations}
    return finalize_ensemble(spec, config.times, config.seed, chunks, meta)


def _spectra_rows(config: ExperimentConfig):
    parities = ("even", "odd") if config.parity == "both" else (config.parity,)
    rows = []
    for parity in parities:
        if config.model == "z2":
            spec = z2_two_star_spectrum(config.lam, config.hop_half,
                                        1 if parity == "even" else -1)
        else:
            assembly = two_star_assembly(config.coupling_j, config.gamma0, parity,
                                         k_coupling=config.k_coupling)
            spec = two_star_spectrum(assembly, k=min(config.k_levels,
                                                     assembly.dimension))
        for i, e in enumerate(spec.energies):
            gp = "" if spec.gp is None else int(spec.gp[i])
            rows.append((parity, i, float(e), gp))
    return rows


def run_experiment(config: ExperimentConfig, output_dir=None):
    """Dispatch one experiment; returns a dict describing written files.

    ``output_dir`` (or the environment override) locates the results; the
    primary file name derives from the experiment kind unless the config
    names one explicitly.
    """
    outdir = Path(os.environ.get(OUTDIR_ENV) or output_dir or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    stem = config.output or config.experiment
    workers = _worker_count(config)
    t0 = time.perf_counter()
    written = []
    kind = config.experiment

    if kind in ("base-dynamics", "strobo", "classical-rw"):
        if kind == "base-dynamics":
            result = _run_base(config, workers)
        elif kind == "strobo":
            result = _run_strobo(config, workers)
        else:
            result = run_rw_ensemble(config.length, config.sigma,
                                     config.temperature, config.t_max,
                                     config.n_realizations, config.seed,
                                     times=config.times)
        path = outdir / f"{stem}.csv"
        result.to_csv(path, experiment=kind)
        written.append(path)

    elif kind == "disorder-sweep":
        rows = []
        L = config.length
        columns = ["sigma0", "sigma1", "visons", "time", "msd", "msd_stderr"]
        columns += [f"site_{s}" for s in range(L)]
        for sigma in config.sigma_grid:
            s0, s1 = (sigma, 0.0) if config.disorder_kind == "diagonal" else (0.0, sigma)
            for rho_v in (config.rho_v, 0.0):
                sub = ExperimentConfig(
                    experiment="base-dynamics", seed=config.seed,
                    length=L, hopping=config.hopping,
                    dephasing=config.dephasing, rho_v=rho_v,
                    times=list(config.times),
                    n_realizations=config.n_realizations,
                    sigma0=s0, sigma1=s1)
                res = _run_base(sub, workers)
                for i, t in enumerate(res.times):
                    rows.append((s0, s1, int(rho_v > 0), float(t),
                                 res.msd[i], res.msd_stderr[i],
                                 *res.profiles[i]))
        path = outdir / f"{stem}.csv"
        write_table(path, columns, rows, kind, _public_params(config),
                    seed=config.seed)
        written.append(path)

    elif kind == "spectra":
        path = outdir / f"{stem}.csv"
        write_table(path, ["sector", "level", "energy", "gp"],
                    _spectra_rows(config), kind, _public_params(config))
        written.append(path)

    elif kind == "coupling-map":
        rows, crossing = coupling_map(
            config.coupling_j, config.gamma0_grid,
            k_coupling=config.k_coupling, k_levels=config.k_levels,
            gap_reference=config.gap_reference)
        path = outdir / f"{stem}.csv"
        table = [(r["gamma0"], r["lam"], r["hop_half"], r["delta_s"],
                  r["delta_h"], r["note"]) for r in rows]
        extra = {"crossing_gamma0": "" if crossing is None else repr(crossing)}
        write_table(path, ["gamma0", "lam", "hop_half", "delta_s", "delta_h", "note"],
                    table, kind, _public_params(config), extra_meta=extra)
        written.append(path)

    elif kind == "analytic":
        xs, dens = density_table(config.cutoff, x_max=config.length // 2)
        dens_path = outdir / f"{stem}_density.csv"
        write_table(dens_path, ["x", "density"], list(zip(xs, dens)),
                    kind, _public_params(config))
        msd = semi_analytic_msd(config.times, L=config.length,
                                gamma=config.dephasing, hopping=config.hopping)
        msd_path = outdir / f"{stem}_msd.csv"
        write_table(msd_path, ["time", "msd"],
                    list(zip(config.times, msd)), kind, _public_params(config))
        written += [dens_path, msd_path]

    elif kind == "dwave-feasibility":
        even = z2_two_star_spectrum(config.lam, config.hop_half, 1)
        odd = z2_two_star_spectrum(config.lam, config.hop_half, -1)
        coupling = extract_couplings(even, odd)
        report = dwave_feasibility(
            coupling, config.j_physical_ghz, config.temperature_ghz,
            config.protocol_window_ns)
        path = outdir / f"{stem}.json"
        path.write_text(report.to_json() + "\n", encoding="utf-8")
        written.append(path)

    else:  # pragma: no cover - kinds are validated by the config
        raise ConfigError(f"unhandled experiment {kind!r}")

    wall = time.perf_counter() - t0
    sidecar = outdir / f"{stem}.meta.json"
    sidecar.write_text(json.dumps({
        "config": config.to_dict(),
        "seed": config.seed,
        "library_version": __version__,
        "wall_time_s": wall,
        "workers": workers,
        "outputs": [p.name for p in written],
    }, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return {"outputs": written, "sidecar": sidecar, "wall_time_s": wall}


def _public_params(config: ExperimentConfig) -> dict:
    """Config dict without execution-only keys (kept in the sidecar)."""
    out = config.to_dict()
    for key in ("workers", "output"):
        out.pop(key, None)
    return out
