"""Spin-phonon coupling constants from mode projections onto the defect.

The two defect sites define local symmetric (translation) and antisymmetric
(breathing) displacement patterns.  Projecting each chain mode onto the
antisymmetric pattern and folding in the zero-point amplitude gives the
per-mode coupling ``g_lam = 3 C P_A(w_lam) sqrt(1 / (2 M w_lam)) / a**4``
(hbar = 1).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .lattice import PhononModes

#: Fraction of the defect energy scale E = C / a**3 above which the largest
#: coupling triggers a weak-coupling warning.
WEAK_COUPLING_RATIO = 0.1


@dataclass(frozen=True)
class CouplingParams:
    """Parameters entering the coupling constants.

    ``dipolar_strength`` is the dipolar prefactor C in natural units;
    ``omega_cut`` is the absolute frequency below which couplings are zeroed
    (removes the singular zero mode of free chains).
    """

    dipolar_strength: float = 0.01
    m_defect: float = 2.0
    lattice_const: float = 1.0
    omega_cut: float = 0.0

    def __post_init__(self) -> None:
        if self.dipolar_strength <= 0:
            raise ValueError("dipolar_strength must be positive")
        if self.m_defect <= 0:
            raise ValueError("m_defect must be positive")
        if self.lattice_const <= 0:
            raise ValueError("lattice_const must be positive")
        if self.omega_cut < 0:
            raise ValueError("omega_cut must be non-negative")

    @property
    def energy_scale(self) -> float:
        """Characteristic defect energy E = C / a**3."""
        return self.dipolar_strength / self.lattice_const**3


@dataclass(frozen=True)
class ModeCouplings:
    """Per-mode projections and coupling constants."""

    projections_sym: np.ndarray
    projections_asym: np.ndarray
    g: np.ndarray

    @property
    def hr_sum(self) -> float:
        """Total coupling weight, sum of |g_lam|**2."""
        return float(np.sum(self.g**2))


def defect_local_vectors(
    total_sites: int, defect_positions: tuple[int, int]
) -> tuple[np.ndarray, np.ndarray]:
    """Unit-norm symmetric and antisymmetric local defect patterns.

    The antisymmetric vector carries (-1, +1)/sqrt(2) on the two (adjacent)
    defect sites; both vectors vanish elsewhere.
    """
    s1, s2 = defect_positions
    if s2 != s1 + 1:
        raise ValueError(f"defect sites must be adjacent, got {defect_positions}")
    if s1 < 0 or s2 >= total_sites:
        raise ValueError(f"defect sites {defect_positions} out of range for {total_sites} sites")
    h_sym = np.zeros(total_sites)
    h_asym = np.zeros(total_sites)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    h_sym[[s1, s2]] = inv_sqrt2
    h_asym[s1] = -inv_sqrt2
    h_asym[s2] = inv_sqrt2
    return h_sym, h_asym


def project_modes(modes: PhononModes, h_defect: np.ndarray) -> np.ndarray:
    """Dot product of every chain mode with a local defect pattern."""
    h_defect = np.asarray(h_defect, dtype=float)
    if h_defect.shape != (modes.eigenvectors.shape[0],):
        raise ValueError(
            f"defect vector length {h_defect.shape} does not match "
            f"{modes.eigenvectors.shape[0]} sites"
        )
    return modes.eigenvectors.T @ h_defect


def spin_phonon_couplings(
    modes: PhononModes,
    params: CouplingParams,
    defect_positions: tuple[int, int] | None = None,
) -> ModeCouplings:
    """Coupling constants g_lam for all modes.

    Modes below ``params.omega_cut`` get zero coupling.  If the defect
    positions are not given, the two central sites are assumed.
    """
    n = modes.eigenvectors.shape[0]
    if defect_positions is None:
        defect_positions = (n // 2 - 1, n // 2)
    h_sym, h_asym = defect_local_vectors(n, defect_positions)
    p_sym = project_modes(modes, h_sym)
    p_asym = project_modes(modes, h_asym)

    c = params.dipolar_strength
    m = params.m_defect
    a = params.lattice_const
    omega = modes.frequencies
    active = omega >= max(params.omega_cut, 0.0)
    g = np.zeros_like(omega)
    with np.errstate(divide="ignore", invalid="ignore"):
        amp = np.sqrt(1.0 / (2.0 * m * omega[active]))
    g[active] = 3.0 * c * p_asym[active] * amp / a**4

    g_max = np.abs(g).max(initial=0.0)
    if g_max > WEAK_COUPLING_RATIO * params.energy_scale:
        warnings.warn(
            f"largest coupling {g_max:.3e} is not small against the defect "
            f"energy scale {params.energy_scale:.3e}; weak-coupling treatment "
            "may be inaccurate",
            stacklevel=2,
        )

    return ModeCouplings(projections_sym=p_sym, projections_asym=p_asym, g=g)
