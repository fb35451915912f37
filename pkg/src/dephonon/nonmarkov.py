"""Non-Markovianity measures of the dephasing channel.

Two measures are computed.  The rate-based measure accumulates the negative
part of the canonical rate,

    N_gamma = (1/2) * int (|gamma_c| - gamma_c) dt,

with an exact closed form for the damped-sinusoid rate.  The coherence-based
measure N_C accumulates coherence backflow, maximized over pure initial
states parameterized by populations p on the probability simplex.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq, minimize

from .dynamics import (
    XI_1,
    XI_2,
    BellSystem,
    RateProfile,
    rate_amplitude,
    upsilon_steady_state,
)
from .sdf import SdfParams

#: Time resolution for locating sign changes of the sampled rate.
ROOT_TOL = 1e-8

#: Side of the dense grid used to seed the population optimizer.
GRID_SEED = 64

#: Relative wobble of the exposure over the trailing window above which the
#: profile is judged not to have reached its plateau.
PLATEAU_TOL = 1e-2


@dataclass(frozen=True)
class NmReport:
    """Both non-Markovianity measures and the optimizing initial state."""

    n_gamma_numeric: float
    n_gamma_closed: float
    n_coherence: float
    optimal_populations: np.ndarray
    weights: tuple[float, float]
    temperature: float


def n_gamma_numeric(rate_profile: RateProfile) -> float:
    """Trapezoidal accumulation of the negative part of the canonical rate."""
    g = rate_profile.gamma_c
    integrand = 0.5 * (np.abs(g) - g)
    return float(np.trapezoid(integrand, rate_profile.times))


def n_gamma_closed(params: SdfParams, temperature: float) -> float:
    """Exact negative-part integral of the damped-sinusoid rate.

    Summing the geometric series of negative half-periods of
    ``Lam sin(w t) exp(-G t / 2)`` gives

        N_gamma = Lam * w / (w**2 + (G/2)**2) / (exp(beta) - 1),

    with beta = pi G / (2 w).  (The half-period integral is
    ``w (1 + e^{-beta}) / (w**2 + (G/2)**2)`` and the alternating-sign series
    telescopes to 1/(e^beta - 1).)
    """
    if params.gamma <= 0:
        raise ValueError("gamma must be positive")
    beta = np.pi * params.gamma / (2.0 * params.omega_loc)
    return upsilon_steady_state(params, temperature) / np.expm1(beta)


def _negative_intervals(spline: CubicSpline, times: np.ndarray) -> list[tuple[float, float]]:
    """Subintervals of the time grid where the splined rate is negative."""
    vals = spline(times)
    roots = []
    for i in range(times.size - 1):
        if vals[i] == 0.0:
            roots.append(times[i])
        elif vals[i] * vals[i + 1] < 0:
            roots.append(brentq(spline, times[i], times[i + 1], xtol=ROOT_TOL))
    if vals[-1] == 0.0:
        roots.append(times[-1])
    edges = np.unique(np.concatenate([[times[0]], roots, [times[-1]]]))
    intervals = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a > ROOT_TOL and spline(0.5 * (a + b)) < 0:
            intervals.append((float(a), float(b)))
    return intervals


def compute_weights(
    rate_profile: RateProfile, system: BellSystem
) -> tuple[float, float]:
    """Backflow weights of the two distinct dephasing exponents.

    ``W1`` carries exponent 2/3 (pairs (1,3) and (1,4)); ``W2`` carries
    exponent 1/3 (pairs (1,2), (2,3) and (2,4)).  Each is
    ``-2 xi int_{gamma<0} gamma_c exp(-xi Upsilon) dt``; the degenerate pair
    (3,4) has zero exponent and zero weight.
    """
    times = rate_profile.times
    ups = rate_profile.upsilon
    tail = ups[int(0.9 * ups.size) :]
    wobble = tail.max() - tail.min()
    if ups[-1] > 0 and wobble > PLATEAU_TOL * ups[-1]:
        warnings.warn(
            "exposure has not plateaued over the profile horizon; "
            "backflow weights may be truncated",
            stacklevel=2,
        )

    gamma_spline = CubicSpline(times, rate_profile.gamma_c)
    ups_spline = CubicSpline(times, ups)
    intervals = _negative_intervals(gamma_spline, times)

    def weight(xi: float) -> float:
        total = 0.0
        for a, b in intervals:
            val, _ = quad(
                lambda t: gamma_spline(t) * np.exp(-xi * ups_spline(t)),
                a,
                b,
                limit=200,
            )
            total += val
        return -2.0 * xi * total

    return weight(XI_2), weight(XI_1)


def _gain(p1: float, p2: float, w1: float, w2: float) -> float:
    p3 = 0.5 * (1.0 - p1 - p2)
    if p3 < 0.0:
        return -np.inf
    r1, r2, r3 = np.sqrt(p1), np.sqrt(p2), np.sqrt(p3)
    return w1 * 2.0 * r1 * r3 + w2 * (r1 * r2 + 2.0 * r2 * r3)


def maximize_coherence_nm(w1: float, w2: float) -> tuple[float, np.ndarray]:
    """Maximize the coherence backflow over initial populations.

    The maximizer always has equal populations on the degenerate pair, so the
    search runs over (p1, p2) with p3 = p4 = (1 - p1 - p2)/2: a dense grid
    seed followed by constrained local refinement.
    """
    if w1 < 0 or w2 < 0:
        raise ValueError("weights must be non-negative")
    if w1 == 0.0 and w2 == 0.0:
        return 0.0, np.full(4, 0.25)

    grid = np.linspace(0.0, 1.0, GRID_SEED)
    best = (-np.inf, 0.0, 0.0)
    for p1 in grid:
        for p2 in grid:
            if p1 + p2 > 1.0:
                continue
            g = _gain(p1, p2, w1, w2)
            if g > best[0]:
                best = (g, p1, p2)

    result = minimize(
        lambda x: -_gain(x[0], x[1], w1, w2),
        x0=[best[1], best[2]],
        method="SLSQP",
        bounds=[(0.0, 1.0), (0.0, 1.0)],
        constraints=[{"type": "ineq", "fun": lambda x: 1.0 - x[0] - x[1]}],
        options={"ftol": 1e-14, "maxiter": 500},
    )
    if result.success and -result.fun >= best[0]:
        p1, p2 = result.x
        gain = -result.fun
    else:
        gain, p1, p2 = best
    p1 = min(max(p1, 0.0), 1.0)
    p2 = min(max(p2, 0.0), 1.0 - p1)
    p3 = max(0.5 * (1.0 - p1 - p2), 0.0)
    populations = np.array([p1, p2, p3, p3])
    populations /= populations.sum()
    return float(gain), populations


def n_gamma_from_observables(
    rho13_0: float, m_z_infinity: float, params: SdfParams
) -> float:
    """Backflow estimate from the initial coherence and asymptotic magnetization.

        N_gamma ~ (3/2) coth(pi G / 2 w_loc) * ln(2 rho13(0) / <M_z(inf)>)
    """
    if rho13_0 <= 0:
        raise ValueError("rho13_0 must be positive")
    if m_z_infinity <= 0:
        raise ValueError("m_z_infinity must be positive")
    if m_z_infinity > 2.0 * rho13_0:
        raise ValueError(
            "m_z_infinity exceeds 2*rho13_0: magnetization cannot grow "
            "under pure dephasing"
        )
    beta = np.pi * params.gamma / (2.0 * params.omega_loc)
    return 1.5 / np.tanh(beta) * np.log(2.0 * rho13_0 / m_z_infinity)


def nm_report(
    rate_profile: RateProfile,
    params: SdfParams,
    system: BellSystem,
) -> NmReport:
    """Bundle both measures for one spectral density and temperature."""
    w1, w2 = compute_weights(rate_profile, system)
    n_c, populations = maximize_coherence_nm(w1, w2)
    return NmReport(
        n_gamma_numeric=n_gamma_numeric(rate_profile),
        n_gamma_closed=n_gamma_closed(params, rate_profile.temperature),
        n_coherence=n_c,
        optimal_populations=populations,
        weights=(w1, w2),
        temperature=rate_profile.temperature,
    )
