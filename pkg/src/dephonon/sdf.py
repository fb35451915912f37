"""Spectral density of the spin-phonon coupling and its phenomenological fit.

The sampled spectral density is a Gaussian smearing of the discrete coupling
weights ``|g_lam|**2`` over [0, omega_max].  A four-parameter model,

    J(w) = J0 * sin(pi w / w_max)**(1 + n) * (G/2) / ((w - w_loc)**2 + (G/2)**2),

(a Lorentzian peak shaped by a sine envelope that pins J(0) = J(w_max) = 0)
is fitted to the samples by damped least squares.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .lattice import PhononModes
from .coupling import ModeCouplings

#: Default smearing width as a fraction of omega_max.
SIGMA_FACTOR = 1e-2

#: Default number of frequency samples.
N_GRID = 2048

#: Default cap on least-squares iterations before flagging non-convergence.
MAX_FIT_ITER = 500


@dataclass(frozen=True)
class SampledSDF:
    """Numerically sampled spectral density on a uniform frequency grid."""

    grid: np.ndarray
    values: np.ndarray
    sigma: float
    hr_sum: float

    @property
    def omega_max(self) -> float:
        return float(self.grid[-1])

    def __call__(self, omega):
        """Linear interpolation of the samples; zero outside [0, omega_max]."""
        return np.interp(omega, self.grid, self.values, left=0.0, right=0.0)

    def integral(self) -> float:
        """Trapezoidal integral of the samples over the grid."""
        return float(np.trapezoid(self.values, self.grid))


@dataclass(frozen=True)
class SdfParams:
    """Fitted parameters of the phenomenological spectral density."""

    j0: float
    gamma: float
    omega_loc: float
    n_exp: float
    goodness: float
    omega_max: float
    converged: bool = True

    def __call__(self, omega):
        return eval_model(self, omega, self.omega_max)


def numerical_sdf(
    couplings: ModeCouplings,
    modes: PhononModes,
    sigma: float | None = None,
    n_grid: int = N_GRID,
) -> SampledSDF:
    """Gaussian-smeared spectral density of the coupling weights.

    Each mode contributes ``|g|**2 * exp(-(w - w_lam)**2 / sigma**2)
    / (sqrt(pi) sigma)`` so the total integral equals the sum of weights.
    """
    if n_grid < 64:
        raise ValueError("n_grid must be at least 64")
    if sigma is None:
        sigma = SIGMA_FACTOR * modes.omega_max
    if sigma <= 0:
        raise ValueError("sigma must be positive")

    grid = np.linspace(0.0, modes.omega_max, n_grid)
    g2 = couplings.g**2
    active = g2 > 0.0
    if np.any(active):
        diff = grid[:, None] - modes.frequencies[None, active]
        values = (g2[None, active] * np.exp(-(diff / sigma) ** 2)).sum(axis=1)
        values /= np.sqrt(np.pi) * sigma
    else:
        values = np.zeros_like(grid)
    return SampledSDF(grid=grid, values=values, sigma=float(sigma), hr_sum=float(g2.sum()))


def eval_model(params: SdfParams, omega, omega_max: float):
    """Evaluate the phenomenological model; zero outside (0, omega_max)."""
    omega = np.asarray(omega, dtype=float)
    inside = (omega > 0.0) & (omega < omega_max)
    out = np.zeros_like(omega)
    w = omega[inside]
    envelope = np.sin(np.pi * w / omega_max) ** (1.0 + params.n_exp)
    half = params.gamma / 2.0
    out[inside] = params.j0 * envelope * half / ((w - params.omega_loc) ** 2 + half**2)
    return out if out.ndim else float(out)


def _fwhm_estimate(grid: np.ndarray, values: np.ndarray, peak_idx: int) -> float:
    """Full width at half maximum read directly from the samples."""
    half = values[peak_idx] / 2.0
    left = grid[0]
    for i in range(peak_idx, 0, -1):
        if values[i - 1] < half:
            left = np.interp(half, [values[i - 1], values[i]], [grid[i - 1], grid[i]])
            break
    right = grid[-1]
    for i in range(peak_idx, len(values) - 1):
        if values[i + 1] < half:
            right = np.interp(half, [values[i + 1], values[i]], [grid[i + 1], grid[i]])
            break
    width = right - left
    if width <= 0:
        width = grid[1] - grid[0]
    return float(width)


def fit_model(sdf: SampledSDF, max_iter: int = MAX_FIT_ITER) -> SdfParams:
    """Least-squares fit of the phenomenological model to a sampled SDF.

    Initial guesses come straight from the samples: peak position, FWHM and
    peak height.  The goodness entry is the coefficient of determination.
    """
    values = sdf.values
    if values.max() <= 0:
        raise ValueError("sampled SDF must have a strictly positive maximum")
    grid = sdf.grid
    omega_max = sdf.omega_max

    peak_idx = int(np.argmax(values))
    omega_loc0 = float(grid[peak_idx])
    gamma0 = _fwhm_estimate(grid, values, peak_idx)
    n0 = 1.0
    envelope0 = np.sin(np.pi * omega_loc0 / omega_max) ** (1.0 + n0)
    j0_0 = values[peak_idx] * (gamma0 / 2.0) / max(envelope0, 1e-12)

    eps = 1e-9 * omega_max

    def residuals(theta):
        j0, gamma, omega_loc, n_exp = theta
        p = SdfParams(j0, gamma, omega_loc, n_exp, 0.0, omega_max)
        return eval_model(p, grid, omega_max) - values

    result = least_squares(
        residuals,
        x0=[j0_0, gamma0, omega_loc0, n0],
        bounds=([0.0, eps, eps, 1.0], [np.inf, omega_max, omega_max - eps, 20.0]),
        max_nfev=max_iter,
        xtol=1e-14,
        ftol=1e-14,
        gtol=1e-14,
    )
    converged = bool(result.status > 0 and result.nfev < max_iter)
    if not converged:
        warnings.warn(
            f"SDF fit did not converge within {max_iter} evaluations; "
            "returning best parameters found",
            stacklevel=2,
        )

    j0, gamma, omega_loc, n_exp = result.x
    ss_res = float(np.sum(result.fun**2))
    ss_tot = float(np.sum((values - values.mean()) ** 2))
    goodness = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return SdfParams(
        j0=float(j0),
        gamma=float(gamma),
        omega_loc=float(omega_loc),
        n_exp=float(n_exp),
        goodness=max(goodness, 0.0),
        omega_max=omega_max,
        converged=converged,
    )
