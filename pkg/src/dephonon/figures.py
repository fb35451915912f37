"""Matplotlib figure rendering for the pipeline report outputs.

Each helper renders one PNG next to the delimited data it visualizes.  The
files are written without timestamp metadata so re-running an identical
configuration reproduces them byte for byte.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KWARGS = {"dpi": 130, "metadata": {"Software": None}}


def _finish(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path


def plot_modes(frequencies: np.ndarray, dos_centers: np.ndarray,
               dos_counts: np.ndarray, path: Path) -> Path:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.plot(np.arange(frequencies.size), frequencies, lw=0.8)
    ax1.set_xlabel("mode index")
    ax1.set_ylabel(r"$\omega_\lambda$")
    ax1.set_title("phonon spectrum")
    ax2.step(dos_centers, dos_counts, where="mid", lw=0.8)
    ax2.set_xlabel(r"$\omega$")
    ax2.set_ylabel("modes per bin")
    ax2.set_title("density of states")
    return _finish(fig, path)


def plot_sdf_fit(grid: np.ndarray, values: np.ndarray,
                 model: np.ndarray | None, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.plot(grid, values, lw=0.8, label="sampled")
    if model is not None:
        ax.plot(grid, model, lw=1.0, ls="--", label="fitted model")
        ax.legend()
    ax.set_xlabel(r"$\omega$")
    ax.set_ylabel(r"$J(\omega)$")
    ax.set_title("spectral density")
    return _finish(fig, path)


def plot_rate(times: np.ndarray, gamma_c: np.ndarray, gamma_approx: np.ndarray,
              upsilon: np.ndarray, path: Path) -> Path:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    ax1.plot(times, gamma_c, lw=0.6, label=r"$\gamma_c$")
    ax1.plot(times, gamma_approx, lw=0.6, ls="--", label="approx")
    ax1.set_ylabel("rate")
    ax1.legend()
    ax2.plot(times, upsilon, lw=0.8)
    ax2.set_xlabel("t")
    ax2.set_ylabel(r"$\Upsilon(t)$")
    return _finish(fig, path)


def plot_evolution(times: np.ndarray, coherence: np.ndarray,
                   m_z: np.ndarray, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(times, coherence, lw=0.8, label="C(t)")
    ax.plot(times, m_z, lw=0.8, label=r"$\langle M_z\rangle$")
    ax.set_xlabel("t")
    ax.legend()
    ax.set_title("dephasing dynamics")
    return _finish(fig, path)


def plot_nm_sweep(k_values: np.ndarray, t_factors: np.ndarray,
                  table: np.ndarray, ylabel: str, path: Path) -> Path:
    """One curve per temperature over the interface-spring sweep."""
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    for j, tf in enumerate(t_factors):
        ax.plot(k_values, table[:, j], marker="o", ms=3, lw=0.8,
                label=rf"$T = {tf}\,\omega_{{max}}$")
    ax.set_xlabel(r"$k_I / k$")
    ax.set_ylabel(ylabel)
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    return _finish(fig, path)


def plot_control(times: np.ndarray, populations: np.ndarray,
                 coherence: np.ndarray, path: Path) -> Path:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    for i in range(4):
        ax1.plot(times, populations[:, i], lw=0.8, label=rf"$|c_{i+1}|^2$")
    ax1.set_ylabel("population")
    ax1.legend(fontsize=8)
    ax2.plot(times, coherence, lw=0.8)
    ax2.set_xlabel("t")
    ax2.set_ylabel("C(t) from observables")
    return _finish(fig, path)
