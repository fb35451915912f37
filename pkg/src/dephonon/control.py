"""Coherent control of the defect by global and local magnetic fields.

Everything here is closed-system: Bell-basis spin component operators, the
Hamiltonians produced by a field acting on both spins (global) or on one spin
(local), Schrodinger propagation of the four amplitudes, and a coherence
readout built from six two-spin observables.  The gyromagnetic factor is
absorbed into the field, which therefore carries units of energy.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .dynamics import BellDensityMatrix

NORM_TOL = 1e-8

ODE_RTOL = 1e-10
ODE_ATOL = 1e-12


class FieldMode(enum.Enum):
    """Whether the field drives both spins or only the first."""

    GLOBAL = "GLOBAL"
    LOCAL = "LOCAL"


@dataclass(frozen=True)
class SpinOperatorSet:
    """The six spin-1/2 component operators of the pair in the Bell basis."""

    s1x: np.ndarray
    s2x: np.ndarray
    s1y: np.ndarray
    s2y: np.ndarray
    s1z: np.ndarray
    s2z: np.ndarray

    def spin1(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.s1x, self.s1y, self.s1z

    def spin2(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.s2x, self.s2y, self.s2z


def bell_spin_operators() -> SpinOperatorSet:
    """Individual spin components written in the Bell eigenbasis."""

    def ketbra(i: int, j: int) -> np.ndarray:
        m = np.zeros((4, 4), dtype=complex)
        m[i - 1, j - 1] = 1.0
        return m

    s1x = 0.5 * (-ketbra(1, 2) - ketbra(2, 1) + ketbra(3, 4) + ketbra(4, 3))
    s2x = 0.5 * (ketbra(1, 2) + ketbra(2, 1) + ketbra(3, 4) + ketbra(4, 3))
    s1y = 0.5j * (-ketbra(1, 4) + ketbra(4, 1) - ketbra(2, 3) + ketbra(3, 2))
    s2y = 0.5j * (-ketbra(1, 4) + ketbra(4, 1) + ketbra(2, 3) - ketbra(3, 2))
    s1z = 0.5 * (ketbra(1, 3) + ketbra(3, 1) + ketbra(2, 4) + ketbra(4, 2))
    s2z = 0.5 * (ketbra(1, 3) + ketbra(3, 1) - ketbra(2, 4) - ketbra(4, 2))
    return SpinOperatorSet(s1x=s1x, s2x=s2x, s1y=s1y, s2y=s2y, s1z=s1z, s2z=s2z)


@dataclass(frozen=True)
class ControlField:
    """Time-dependent field (Bx, By, Bz), callable or sampled.

    Sampled fields are interpolated component-wise by cubic splines; a
    closed-form field is passed as a callable t -> 3-vector.
    """

    func: Callable[[float], np.ndarray]

    @staticmethod
    def from_callable(func: Callable[[float], Sequence[float]]) -> "ControlField":
        return ControlField(func=lambda t: np.asarray(func(t), dtype=float))

    @staticmethod
    def constant(b: Sequence[float]) -> "ControlField":
        vec = np.asarray(b, dtype=float).copy()
        if vec.shape != (3,):
            raise ValueError("field must be a 3-vector")
        return ControlField(func=lambda t: vec)

    @staticmethod
    def from_samples(times: np.ndarray, values: np.ndarray) -> "ControlField":
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if values.shape != (times.size, 3):
            raise ValueError("values must have shape (n_times, 3)")
        spline = CubicSpline(times, values, axis=0)
        return ControlField(func=lambda t: spline(t))

    def __call__(self, t: float) -> np.ndarray:
        b = np.asarray(self.func(t), dtype=float)
        if not np.all(np.isfinite(b)):
            raise ValueError(f"control field is not finite at t={t}")
        return b


def hamiltonian_global(b: Sequence[float], energies: np.ndarray) -> np.ndarray:
    """Bell energies plus a field coupled to the total spin.

    The second row and column stay diagonal: the singlet is dark under any
    global field.
    """
    ops = bell_spin_operators()
    bx, by, bz = np.asarray(b, dtype=float)
    h = np.diag(np.asarray(energies, dtype=complex))
    h = h + bx * (ops.s1x + ops.s2x) + by * (ops.s1y + ops.s2y) + bz * (ops.s1z + ops.s2z)
    return h


def hamiltonian_local(b: Sequence[float], energies: np.ndarray) -> np.ndarray:
    """Bell energies plus a field coupled to the first spin only."""
    ops = bell_spin_operators()
    bx, by, bz = np.asarray(b, dtype=float)
    h = np.diag(np.asarray(energies, dtype=complex))
    return h + bx * ops.s1x + by * ops.s1y + bz * ops.s1z


def evolve_schrodinger(
    c0: np.ndarray,
    field: ControlField,
    energies: np.ndarray,
    t_span: tuple[float, float],
    mode: FieldMode,
    t_eval: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Propagate amplitudes under dc/dt = -i H(t) c.

    The state is integrated in split real/imaginary form (8 real equations).
    Returns (times, amplitudes) with amplitudes of shape (n_times, 4); the
    norm is checked to stay within NORM_TOL of unity.
    """
    c0 = np.asarray(c0, dtype=complex)
    if c0.shape != (4,):
        raise ValueError("initial amplitudes must be a 4-vector")
    norm = np.linalg.norm(c0)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"initial amplitudes must be normalized, got |c| = {norm}")

    builder = hamiltonian_global if mode is FieldMode.GLOBAL else hamiltonian_local
    energies = np.asarray(energies, dtype=float)

    def rhs(t, y):
        c = y[:4] + 1j * y[4:]
        dc = -1j * (builder(field(t), energies) @ c)
        return np.concatenate([dc.real, dc.imag])

    y0 = np.concatenate([c0.real, c0.imag])
    sol = solve_ivp(
        rhs,
        t_span,
        y0,
        t_eval=t_eval,
        method="DOP853",
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
    )
    if not sol.success:
        raise RuntimeError(f"amplitude integration failed: {sol.message}")
    c = (sol.y[:4] + 1j * sol.y[4:]).T
    norms = np.linalg.norm(c, axis=1)
    if np.abs(norms - 1.0).max() > NORM_TOL:
        raise RuntimeError(
            f"norm drifted by {np.abs(norms - 1.0).max():.2e} during evolution"
        )
    return sol.t, c


def coherence_observables() -> list[np.ndarray]:
    """Six bilinear two-spin operators whose expectations read out coherence."""
    ops = bell_spin_operators()
    mx_m = ops.s2x - ops.s1x
    mx_p = ops.s2x + ops.s1x
    my_m = ops.s2y - ops.s1y
    my_p = ops.s2y + ops.s1y
    mz_m = ops.s2z - ops.s1z
    mz_p = ops.s2z + ops.s1z
    return [
        mz_m @ my_p,
        mx_m @ my_m,
        mz_m @ mx_m,
        mz_p @ mx_m,
        mx_p @ my_m,
        mz_m @ my_m,
    ]


def coherence_from_observables(rho: np.ndarray | BellDensityMatrix) -> float:
    """Coherence as 2 * sum_i |<O_i>| over the six bilinear observables.

    Each observable is proportional to a single off-diagonal matrix unit, so
    this equals the direct off-diagonal sum for every density matrix.
    """
    m = rho.rho if isinstance(rho, BellDensityMatrix) else np.asarray(rho, dtype=complex)
    total = 0.0
    for op in coherence_observables():
        total += abs(np.trace(m @ op))
    return 2.0 * total
