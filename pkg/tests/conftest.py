"""Shared fixtures: the canonical chain is expensive to diagonalize, so the
eigensolves and spectral-density fits are computed once per session."""

from __future__ import annotations

import warnings

import numpy as np
import pytest

from dephonon.coupling import CouplingParams, spin_phonon_couplings
from dephonon.lattice import ChainConfig, build_dynamical_matrix, solve_modes
from dephonon.sdf import fit_model, numerical_sdf

#: Interface springs covered by the sweep-based tests.
SWEEP_KS = (0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


def _solve_preset(k_interface: float):
    chain = ChainConfig(k_interface=k_interface)
    modes = solve_modes(build_dynamical_matrix(chain))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        couplings = spin_phonon_couplings(modes, CouplingParams())
    sdf = numerical_sdf(couplings, modes)
    return {
        "chain": chain,
        "modes": modes,
        "couplings": couplings,
        "sdf": sdf,
        "fit": fit_model(sdf),
    }


@pytest.fixture(scope="session")
def canonical():
    """Canonical preset: N=2022, m=1, M=2, k=K=1, k_I=0.1, C=0.01."""
    return _solve_preset(0.1)


@pytest.fixture(scope="session")
def sweep(canonical):
    """Fits and sampled SDFs over the interface-spring sweep."""
    out = {0.1: canonical}
    for k in SWEEP_KS:
        if k not in out:
            out[k] = _solve_preset(k)
    return out


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260826)


def simplex_grid_amplitudes(step: float = 1e-3):
    """Amplitude triples (r1, r2, r3) of a brute-force simplex grid.

    Uniform step over (p1, p2) with p3 = p4 = (1 - p1 - p2)/2, augmented
    with geometric refinement near the simplex edges: the gain has square-
    root curvature in the populations, so a maximizer within one uniform
    cell of an edge would otherwise be resolved only to ~step**(1/2).
    """
    refine = np.geomspace(1e-10, 2e-2, 300)
    axis = np.unique(np.concatenate(
        [np.arange(0.0, 1.0 + step / 2, step), refine, 1.0 - refine]))
    p1g, p2g = np.meshgrid(axis, axis, indexing="ij")
    mask = p1g + p2g <= 1.0
    p1f, p2f = p1g[mask], p2g[mask]
    p3f = np.clip(0.5 * (1.0 - p1f - p2f), 0.0, None)
    return np.sqrt(p1f), np.sqrt(p2f), np.sqrt(p3f)
