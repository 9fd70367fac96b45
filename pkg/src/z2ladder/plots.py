"""Figure rendering for result files.

Every figure is rendered from an already-written CSV (never from in-memory
state), so plots can be regenerated from archived results alone. Files are
written next to the delimited output with a suffix per panel.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .results import read_csv

_FIGSIZE = (5.2, 3.4)
_DPI = 150


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return Path(path)


def _site_columns(header):
    return [i for i, name in enumerate(header) if name.startswith("site_")]


def render_trajectory(csv_path) -> list[Path]:
    """MSD vs time (with stderr band) and the final-time density profile."""
    meta, header, rows = read_csv(csv_path)
    data = np.asarray(rows, dtype=float)
    t = data[:, header.index("time")]
    msd = data[:, header.index("msd")]
    err = data[:, header.index("msd_stderr")]
    stem = Path(csv_path).with_suffix("")
    out = []

    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(t, msd, "o-", lw=1.2, ms=3)
    ax.fill_between(t, msd - 3 * err, msd + 3 * err, alpha=0.25, lw=0)
    if np.all(t[t > 0] > 0) and len(t) > 2:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel(r"$t\,\Gamma$")
    ax.set_ylabel(r"$\langle x^2 \rangle$")
    ax.grid(alpha=0.3)
    out.append(_save(fig, f"{stem}_msd.png"))

    sites = _site_columns(header)
    if sites:
        profile = data[-1, sites]
        x = np.arange(len(sites))
        fig, ax = plt.subplots(figsize=_FIGSIZE)
        ax.bar(x, profile, width=0.9)
        ax.set_xlabel("site")
        ax.set_ylabel(r"$|\Psi(x)|^2$")
        ax.set_title(f"t = {t[-1]:g}")
        out.append(_save(fig, f"{stem}_profile.png"))
    return out


def render_disorder_sweep(csv_path) -> list[Path]:
    """MSD vs time per disorder strength, with and without visons."""
    meta, header, rows = read_csv(csv_path)
    data = np.asarray([r[:6] for r in rows], dtype=float)
    s0, s1, vison, t, msd = data[:, 0], data[:, 1], data[:, 2], data[:, 3], data[:, 4]
    sigma = np.where(s0 > 0, s0, s1)
    stem = Path(csv_path).with_suffix("")
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for s in np.unique(sigma):
        for v, style in ((0, "--"), (1, "-")):
            mask = (sigma == s) & (vison == v)
            if mask.any():
                label = f"sigma={s:g}" + (" visons" if v else "")
                ax.plot(t[mask], msd[mask], style, marker="o", ms=3, label=label)
    ax.set_xlabel(r"$t\,\Gamma$")
    ax.set_ylabel(r"$\langle x^2 \rangle$")
    ax.legend(fontsize=7)
    ax.grid(alpha=0.3)
    return [_save(fig, f"{stem}_sweep.png")]


def render_spectra(csv_path) -> list[Path]:
    """Level diagram per pinning sector, annotated with G_p labels."""
    meta, header, rows = read_csv(csv_path)
    stem = Path(csv_path).with_suffix("")
    sectors = sorted({r[0] for r in rows})
    fig, axes = plt.subplots(1, len(sectors), figsize=_FIGSIZE, sharey=True)
    axes = np.atleast_1d(axes)
    for ax, sector in zip(axes, sectors):
        for r in rows:
            if r[0] != sector:
                continue
            energy = r[2]
            gp = r[3] if len(r) > 3 else ""
            color = "tab:blue"
            if isinstance(gp, float):
                color = "tab:red" if gp < 0 else "tab:blue"
            ax.hlines(energy, 0.2, 0.8, color=color, lw=1.6)
        ax.set_title(sector)
        ax.set_xticks([])
    axes[0].set_ylabel("energy / J")
    return [_save(fig, f"{stem}_levels.png")]


def render_coupling_map(csv_path) -> list[Path]:
    meta, header, rows = read_csv(csv_path)
    stem = Path(csv_path).with_suffix("")
    g0 = np.array([r[0] for r in rows], dtype=float)
    lam = np.array([r[1] for r in rows], dtype=float)
    hop = np.array([r[2] for r in rows], dtype=float)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(g0, lam, "o-", label=r"$\lambda$")
    ax.plot(g0, hop, "s-", label=r"$\Gamma/2$")
    crossing = meta.get("crossing_gamma0", "")
    if crossing:
        ax.axvline(float(crossing), color="gray", ls=":", lw=1)
    ax.set_xlabel(r"$\Gamma_0 / J$")
    ax.set_ylabel("effective coupling / J")
    ax.legend()
    ax.grid(alpha=0.3)
    return [_save(fig, f"{stem}_couplings.png")]


def render_analytic(density_csv, msd_csv) -> list[Path]:
    out = []
    meta, header, rows = read_csv(density_csv)
    data = np.asarray(rows, dtype=float)
    stem = Path(density_csv).with_suffix("")
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.bar(data[:, 0], data[:, 1], width=0.9)
    ax.set_xlabel("x")
    ax.set_ylabel(r"$|\Psi(x)|^2$")
    out.append(_save(fig, f"{stem}.png"))

    meta, header, rows = read_csv(msd_csv)
    data = np.asarray(rows, dtype=float)
    stem = Path(msd_csv).with_suffix("")
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(data[:, 0], data[:, 1], "o-")
    ax.set_xlabel(r"$t\,\Gamma$")
    ax.set_ylabel(r"$\langle x^2 \rangle$")
    ax.grid(alpha=0.3)
    out.append(_save(fig, f"{stem}.png"))
    return out


def render_for_experiment(kind: str, outputs: list) -> list[Path]:
    """Render the figures belonging to one experiment's written files."""
    if kind in ("base-dynamics", "strobo", "classical-rw"):
        return render_trajectory(outputs[0])
    if kind == "disorder-sweep":
        return render_disorder_sweep(outputs[0])
    if kind == "spectra":
        return render_spectra(outputs[0])
    if kind == "coupling-map":
        return render_coupling_map(outputs[0])
    if kind == "analytic":
        return render_analytic(outputs[0], outputs[1])
    return []  # dwave-feasibility: JSON report only
