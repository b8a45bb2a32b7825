"""Figure rendering for the command-line report paths.

Figures are written straight to files; the Agg backend is forced so
rendering works without a display.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spectra import DB_FLOOR_REL

_DPI = 150


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_map_figure(path, spectrum, title=None) -> None:
    db = spectrum.to_db()
    grid = db.grid
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    mesh = ax.pcolormesh(
        grid.field_values, grid.probe_frequencies, db.power.T, shading="nearest"
    )
    fig.colorbar(mesh, ax=ax, label="power (dB rel max)")
    ax.set_xlabel("bias field (T)")
    ax.set_ylabel("probe frequency (GHz)")
    if title:
        ax.set_title(title)
    _finish(fig, path)


def save_branches_figure(path, branches, title=None) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    n_branch = branches.frequencies_ghz.shape[1]
    scatter = None
    for k in range(n_branch):
        scatter = ax.scatter(
            branches.field_values,
            branches.frequencies_ghz[:, k],
            c=branches.photon_fractions[:, k],
            cmap="viridis",
            vmin=0.0,
            vmax=1.0,
            s=7,
        )
    if scatter is not None:
        fig.colorbar(scatter, ax=ax, label="photon fraction")
    ax.set_xlabel("bias field (T)")
    ax.set_ylabel("mode frequency (GHz)")
    if title:
        ax.set_title(title)
    _finish(fig, path)


def save_trajectory_figure(path, trajectory, title=None) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    energies = trajectory.energies()
    for j, label in enumerate(trajectory.mode_labels):
        ax.plot(trajectory.times_ns, energies[:, j], label=label)
    ax.set_xlabel("time (ns)")
    ax.set_ylabel("mode energy")
    ax.legend(loc="best", fontsize=8)
    if title:
        ax.set_title(title)
    _finish(fig, path)


def save_spectrum_figure(path, frequencies, power, title=None) -> None:
    power = np.asarray(power, dtype=float)
    top = float(power.max())
    db = 10.0 * np.log10(np.maximum(power / max(top, 1e-300), DB_FLOOR_REL))
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    ax.plot(frequencies, db)
    ax.set_xlabel("frequency (GHz)")
    ax.set_ylabel("power (dB rel max)")
    if title:
        ax.set_title(title)
    _finish(fig, path)


def save_bandwidth_figure(path, result, title=None) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    ax.plot(result.field_values, result.efficiencies, marker=".", ms=3)
    half = 0.5 * result.peak_efficiency
    ax.axhline(half, color="gray", lw=0.8, ls="--")
    ax.axvspan(result.field_window[0], result.field_window[1], alpha=0.15)
    ax.set_xlabel("bias field (T)")
    ax.set_ylabel("conversion efficiency (peak power)")
    label = title or f"bandwidth {result.bandwidth_mhz:.1f} MHz"
    ax.set_title(label)
    _finish(fig, path)


def save_size_fit_figure(path, samples, fit, title=None) -> None:
    from .size_effects import fitted_params, predicted_b_fh

    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    d = np.array([s.diameter_mm for s in samples])
    y = np.array([s.b_fh_tesla for s in samples])
    sig = [s.sigma_tesla for s in samples]
    if all(s is not None for s in sig):
        ax.errorbar(d, y, yerr=np.array(sig), fmt="o", ms=4, capsize=2)
    else:
        ax.plot(d, y, "o", ms=4)
    params = fitted_params(fit)
    smooth = np.linspace(0.0, float(d.max()) * 1.05, 200)
    curve = [
        predicted_b_fh(
            phi, fit.cavity_frequency_ghz, fit.gyromagnetic_ghz_per_t, params
        )
        for phi in smooth
    ]
    ax.plot(smooth, curve, lw=1.2)
    ax.set_xlabel("sphere diameter (mm)")
    ax.set_ylabel("full-hybridization field (T)")
    if title:
        ax.set_title(title)
    _finish(fig, path)
