"""Dynamical matrix assembly and normal-mode analysis."""

import numpy as np
import pytest

from dephonon.lattice import (
    Boundary,
    ChainConfig,
    DynamicalMatrix,
    build_dynamical_matrix,
    density_of_states,
    periodic_dispersion,
    solve_modes,
)


def test_config_rejects_odd_bulk():
    with pytest.raises(ValueError, match="even"):
        ChainConfig(n_bulk=2021)


def test_config_rejects_bad_parameters():
    with pytest.raises(ValueError):
        ChainConfig(m_bulk=-1.0)
    with pytest.raises(ValueError):
        ChainConfig(k_bulk=0.0)
    with pytest.raises(ValueError):
        ChainConfig(k_interface=-0.1)


def test_boundary_coerced_from_string():
    cfg = ChainConfig(boundary="FREE")
    assert cfg.boundary is Boundary.FREE


def test_defect_sites_are_central_and_adjacent():
    cfg = ChainConfig(n_bulk=10)
    assert cfg.n_sites == 12
    assert cfg.defect_sites == (5, 6)


def test_matrix_is_symmetric_tridiagonal():
    dm = build_dynamical_matrix(ChainConfig(n_bulk=20))
    m = dm.entries
    assert np.array_equal(m, m.T)
    # no couplings beyond nearest neighbours
    assert np.all(np.triu(m, 2) == 0.0)


def test_spring_layout():
    cfg = ChainConfig(n_bulk=8, k_interface=0.3, k_defect=2.0)
    dm = build_dynamical_matrix(cfg)
    d1, d2 = cfg.defect_sites
    assert dm.site_springs[d1] == 0.3
    assert dm.site_springs[d1 + 1] == 2.0
    assert dm.site_springs[d2 + 1] == 0.3
    assert dm.site_springs[0] == cfg.k_bulk and dm.site_springs[-1] == cfg.k_bulk


def test_free_boundary_has_zero_mode():
    cfg = ChainConfig(
        n_bulk=40, m_defect=1.0, k_defect=1.0, k_interface=1.0,
        boundary=Boundary.FREE,
    )
    modes = solve_modes(build_dynamical_matrix(cfg))
    assert modes.frequencies[0] < 1e-8
    assert modes.frequencies[1] > 1e-3


def test_uniform_fixed_chain_matches_analytic():
    # with the defect parameters set to bulk values the chain is uniform and
    # the fixed-end frequencies are 2 sin(j pi / (2 (n + 1)))
    n = 30
    cfg = ChainConfig(n_bulk=n - 2, m_defect=1.0, k_defect=1.0, k_interface=1.0)
    modes = solve_modes(build_dynamical_matrix(cfg))
    j = np.arange(1, n + 1)
    exact = 2.0 * np.sin(j * np.pi / (2.0 * (n + 1)))
    assert np.allclose(modes.frequencies, exact, atol=1e-12)


def test_eigenvector_orthonormality(canonical):
    v = canonical["modes"].eigenvectors
    gram = v.T @ v
    assert np.abs(gram - np.eye(gram.shape[0])).max() < 1e-8


def test_negative_eigenvalue_rejected():
    bad = DynamicalMatrix(
        entries=np.array([[1.0, 2.0], [2.0, 1.0]]),
        site_masses=np.ones(2),
        site_springs=np.ones(3),
    )
    with pytest.raises(ValueError, match="negative eigenvalue"):
        solve_modes(bad)


def test_dos_counts_all_modes(canonical):
    modes = canonical["modes"]
    centers, counts = density_of_states(modes, 100)
    assert counts.sum() == modes.n_modes
    assert centers.size == 100
    with pytest.raises(ValueError):
        density_of_states(modes, 1)


def test_periodic_dispersion():
    q = np.array([0.0, np.pi / 2, np.pi])
    w = periodic_dispersion(q, k=1.0, m=1.0, a=1.0)
    assert np.allclose(w, [0.0, 2 * np.sin(np.pi / 4), 2.0])
    with pytest.raises(ValueError, match="Brillouin"):
        periodic_dispersion(np.array([3.5]), k=1.0, m=1.0, a=1.0)


def test_band_edge_frequency(canonical):
    # omega_max of the defect chain equals the uniform-lattice band edge
    # sqrt(4k/m) = 2 up to finite-size corrections
    assert abs(canonical["modes"].omega_max - 2.0) < 1e-3
