"""Dephasing dynamics and non-Markovianity of a two-spin defect in a 1D phonon chain."""

__version__ = "0.1.0"

from .lattice import (
    Boundary,
    ChainConfig,
    DynamicalMatrix,
    PhononModes,
    build_dynamical_matrix,
    density_of_states,
    periodic_dispersion,
    solve_modes,
)
from .coupling import (
    CouplingParams,
    ModeCouplings,
    defect_local_vectors,
    project_modes,
    spin_phonon_couplings,
)
from .sdf import SampledSDF, SdfParams, eval_model, fit_model, numerical_sdf
from .dynamics import (
    BellDensityMatrix,
    BellSystem,
    RateProfile,
    build_rate_profile,
    canonical_rate,
    coherence,
    evolve_analytic,
    evolve_ode,
    magnetization_z,
    rate_approx,
    upsilon,
    upsilon_approx,
    upsilon_steady_state,
    xi_matrix,
)
from .nonmarkov import (
    NmReport,
    compute_weights,
    maximize_coherence_nm,
    n_gamma_closed,
    n_gamma_from_observables,
    n_gamma_numeric,
    nm_report,
)
from .control import (
    ControlField,
    FieldMode,
    SpinOperatorSet,
    bell_spin_operators,
    coherence_from_observables,
    evolve_schrodinger,
    hamiltonian_global,
    hamiltonian_local,
)
from .config import RunConfig, config_from_dict, load_config
from .pipeline import Stage, run_pipeline

__all__ = [
    "__version__",
    "Boundary", "ChainConfig", "DynamicalMatrix", "PhononModes",
    "build_dynamical_matrix", "density_of_states", "periodic_dispersion",
    "solve_modes",
    "CouplingParams", "ModeCouplings", "defect_local_vectors",
    "project_modes", "spin_phonon_couplings",
    "SampledSDF", "SdfParams", "eval_model", "fit_model", "numerical_sdf",
    "BellDensityMatrix", "BellSystem", "RateProfile", "build_rate_profile",
    "canonical_rate", "coherence", "evolve_analytic", "evolve_ode",
    "magnetization_z", "rate_approx", "upsilon", "upsilon_approx",
    "upsilon_steady_state", "xi_matrix",
    "NmReport", "compute_weights", "maximize_coherence_nm", "n_gamma_closed",
    "n_gamma_from_observables", "n_gamma_numeric", "nm_report",
    "ControlField", "FieldMode", "SpinOperatorSet", "bell_spin_operators",
    "coherence_from_observables", "evolve_schrodinger", "hamiltonian_global",
    "hamiltonian_local",
    "RunConfig", "config_from_dict", "load_config",
    "Stage", "run_pipeline",
]
