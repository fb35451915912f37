"""One-dimensional defect-phonon chain: dynamical matrix and normal modes.

A chain of ``n_bulk`` identical atoms (mass ``m_bulk``, springs ``k_bulk``)
hosts a two-site defect at its center: two atoms of mass ``m_defect`` joined
by an internal spring ``k_defect`` and attached to the surrounding lattice by
interface springs ``k_interface``.  Diagonalizing the mass-weighted
force-constant matrix gives the phonon frequencies and displacement patterns
of the combined system.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

#: Relative tolerance for eigenvector orthonormality checks.
ORTH_TOL = 1e-8

#: Eigenvalues below -EIG_TOL_FACTOR * omega_max**2 are treated as errors;
#: anything between that and zero is clamped to zero before the square root.
EIG_TOL_FACTOR = 1e-9


class Boundary(str, enum.Enum):
    """End condition of the chain."""

    FIXED = "FIXED"  # end atoms attached to rigid walls with spring k_bulk
    FREE = "FREE"    # no wall springs; a zero translational mode appears


@dataclass(frozen=True)
class ChainConfig:
    """Microscopic parameters of the defect-phonon chain.

    The two defect sites occupy the central positions ``n_bulk // 2`` and
    ``n_bulk // 2 + 1`` of the ``n_bulk + 2`` sites (0-based).
    """

    n_bulk: int = 2022
    m_bulk: float = 1.0
    m_defect: float = 2.0
    k_bulk: float = 1.0
    k_defect: float = 1.0
    k_interface: float = 0.1
    lattice_const: float = 1.0
    boundary: Boundary = Boundary.FIXED

    def __post_init__(self) -> None:
        if self.n_bulk < 0 or self.n_bulk % 2 != 0:
            raise ValueError(f"n_bulk must be even and non-negative, got {self.n_bulk}")
        if self.m_bulk <= 0 or self.m_defect <= 0:
            raise ValueError("masses must be positive")
        if self.k_bulk <= 0 or self.k_defect <= 0:
            raise ValueError("k_bulk and k_defect must be positive")
        if self.k_interface < 0:
            raise ValueError("k_interface must be non-negative")
        if self.lattice_const <= 0:
            raise ValueError("lattice_const must be positive")
        # coerce plain strings so configs loaded from JSON round-trip
        if not isinstance(self.boundary, Boundary):
            object.__setattr__(self, "boundary", Boundary(self.boundary))

    @property
    def n_sites(self) -> int:
        return self.n_bulk + 2

    @property
    def defect_sites(self) -> tuple[int, int]:
        return self.n_bulk // 2, self.n_bulk // 2 + 1


@dataclass(frozen=True)
class DynamicalMatrix:
    """Mass-weighted force-constant matrix of the chain.

    ``site_springs[i]`` is the spring connecting sites ``i - 1`` and ``i``;
    the first and last entries are the wall springs (zero for FREE ends), so
    the vector has ``n_sites + 1`` entries.
    """

    entries: np.ndarray
    site_masses: np.ndarray
    site_springs: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class PhononModes:
    """Eigenfrequencies and orthonormal displacement patterns.

    ``frequencies`` is ascending; column ``lam`` of ``eigenvectors`` is the
    unit-norm displacement pattern of mode ``lam``.
    """

    frequencies: np.ndarray
    eigenvectors: np.ndarray
    omega_max: float

    @property
    def n_modes(self) -> int:
        return self.frequencies.size


def build_dynamical_matrix(config: ChainConfig) -> DynamicalMatrix:
    """Assemble the symmetric dynamical matrix of the defect chain.

    Entry (i, j) is ``[(k_i + k_{j-1}) d_ij - k_{j-1} d_{i,j-1}
    - k_j d_{i,j+1}] / sqrt(M_i M_j)`` for the spring layout with the defect
    pair at the center.
    """
    n = config.n_sites
    d1, d2 = config.defect_sites

    masses = np.full(n, config.m_bulk)
    masses[[d1, d2]] = config.m_defect

    # springs[i] connects sites i-1 and i; springs[0] / springs[n] are walls
    springs = np.full(n + 1, config.k_bulk)
    springs[d1 + 1] = config.k_defect      # internal defect spring
    springs[d1] = config.k_interface       # left interface
    springs[d2 + 1] = config.k_interface   # right interface
    if config.boundary is Boundary.FREE:
        springs[0] = 0.0
        springs[n] = 0.0

    inv_sqrt_m = 1.0 / np.sqrt(masses)
    entries = np.zeros((n, n))
    diag = (springs[:-1] + springs[1:]) / masses
    np.fill_diagonal(entries, diag)
    off = -springs[1:-1] * inv_sqrt_m[:-1] * inv_sqrt_m[1:]
    idx = np.arange(n - 1)
    entries[idx, idx + 1] = off
    entries[idx + 1, idx] = off

    return DynamicalMatrix(entries=entries, site_masses=masses, site_springs=springs)


def solve_modes(dm: DynamicalMatrix) -> PhononModes:
    """Full eigendecomposition of the dynamical matrix.

    Frequencies are ``sqrt(max(eigenvalue, 0))`` in ascending order; each
    eigenvector is normalized with its first nonzero component positive.
    Raises ``ValueError`` if any eigenvalue is below the negative tolerance.
    """
    if not np.allclose(dm.entries, dm.entries.T, atol=0.0):
        raise ValueError("dynamical matrix must be symmetric")
    evals, evecs = np.linalg.eigh(dm.entries)

    eps = EIG_TOL_FACTOR * max(evals.max(), 0.0)
    if evals.min() < -eps:
        raise ValueError(
            f"dynamical matrix has negative eigenvalue {evals.min():.3e} "
            f"below tolerance {-eps:.3e}"
        )
    evals = np.clip(evals, 0.0, None)

    order = np.argsort(evals, kind="stable")
    evals = evals[order]
    evecs = evecs[:, order]

    # sign convention: first component with non-negligible magnitude positive
    for lam in range(evecs.shape[1]):
        col = evecs[:, lam]
        nz = np.flatnonzero(np.abs(col) > 1e-12 * np.abs(col).max())
        if nz.size and col[nz[0]] < 0:
            evecs[:, lam] = -col

    freqs = np.sqrt(evals)
    return PhononModes(frequencies=freqs, eigenvectors=evecs, omega_max=float(freqs[-1]))


def density_of_states(modes: PhononModes, n_bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Histogram of mode frequencies on equal-width bins over [0, omega_max].

    Returns (bin centers, counts); counts sum to the number of modes.
    """
    if n_bins < 2:
        raise ValueError("n_bins must be at least 2")
    edges = np.linspace(0.0, modes.omega_max, n_bins + 1)
    counts, _ = np.histogram(np.clip(modes.frequencies, 0.0, modes.omega_max), bins=edges)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, counts


def periodic_dispersion(q, k: float, m: float, a: float):
    """Dispersion of the uniform periodic chain, sqrt(4k/m) |sin(q a / 2)|."""
    q = np.asarray(q, dtype=float)
    if np.any(np.abs(q) > np.pi / a * (1 + 1e-12)):
        raise ValueError("wavenumber outside the first Brillouin zone")
    return np.sqrt(4.0 * k / m) * np.abs(np.sin(q * a / 2.0))
