"""Sampled spectral density and the phenomenological fit."""

import numpy as np
import pytest

from dephonon.coupling import ModeCouplings
from dephonon.lattice import PhononModes
from dephonon.sdf import SampledSDF, SdfParams, eval_model, fit_model, numerical_sdf


def _single_mode(omega0=1.0, g=0.1):
    modes = PhononModes(
        frequencies=np.array([omega0]),
        eigenvectors=np.eye(1),
        omega_max=2.0,
    )
    couplings = ModeCouplings(
        projections_sym=np.zeros(1),
        projections_asym=np.ones(1),
        g=np.array([g]),
    )
    return modes, couplings


def test_gaussian_weight_normalized():
    modes, couplings = _single_mode()
    sdf = numerical_sdf(couplings, modes, sigma=0.01, n_grid=4096)
    assert abs(sdf.integral() / couplings.hr_sum - 1.0) < 1e-3
    assert abs(sdf.hr_sum - 0.01) < 1e-15


def test_peak_at_mode_frequency():
    modes, couplings = _single_mode(omega0=0.7)
    sdf = numerical_sdf(couplings, modes, sigma=0.02)
    assert abs(sdf.grid[np.argmax(sdf.values)] - 0.7) < 2e-3


def test_interpolation_zero_outside():
    modes, couplings = _single_mode()
    sdf = numerical_sdf(couplings, modes, sigma=0.02)
    assert sdf(-0.5) == 0.0
    assert sdf(2.5) == 0.0
    assert sdf(1.0) > 0.0


def test_input_validation():
    modes, couplings = _single_mode()
    with pytest.raises(ValueError, match="n_grid"):
        numerical_sdf(couplings, modes, n_grid=10)
    with pytest.raises(ValueError, match="sigma"):
        numerical_sdf(couplings, modes, sigma=0.0)


def test_model_pinned_at_band_edges():
    p = SdfParams(j0=1.0, gamma=0.1, omega_loc=1.0, n_exp=2.0,
                  goodness=1.0, omega_max=2.0)
    assert eval_model(p, 0.0, 2.0) == 0.0
    assert eval_model(p, 2.0, 2.0) == 0.0
    assert eval_model(p, -1.0, 2.0) == 0.0
    # at the peak: envelope 1, Lorentzian 2/gamma
    assert eval_model(p, 1.0, 2.0) == pytest.approx(2.0 / 0.1, rel=1e-12)


def test_fit_recovers_known_parameters():
    truth = SdfParams(j0=2e-4, gamma=0.05, omega_loc=1.1, n_exp=4.0,
                      goodness=1.0, omega_max=2.0)
    grid = np.linspace(0.0, 2.0, 2048)
    samples = SampledSDF(grid=grid, values=truth(grid), sigma=0.02,
                         hr_sum=float(np.trapezoid(truth(grid), grid)))
    fitted = fit_model(samples)
    assert fitted.goodness > 1.0 - 1e-10
    assert abs(fitted.j0 / truth.j0 - 1.0) < 1e-6
    assert abs(fitted.gamma / truth.gamma - 1.0) < 1e-6
    assert abs(fitted.omega_loc - truth.omega_loc) < 1e-8
    assert abs(fitted.n_exp - truth.n_exp) < 1e-5
    assert fitted.converged


def test_fit_canonical_is_narrow_resonance(canonical):
    fit = canonical["fit"]
    assert abs(fit.omega_loc - 1.0) < 0.05
    assert 0.0 < fit.gamma < 0.1
    assert fit.converged
    assert fit.goodness > 0.95


def test_fit_warns_when_iteration_capped(canonical):
    with pytest.warns(UserWarning, match="did not converge"):
        fitted = fit_model(canonical["sdf"], max_iter=3)
    assert not fitted.converged


def test_fit_rejects_empty_sdf():
    grid = np.linspace(0.0, 2.0, 256)
    empty = SampledSDF(grid=grid, values=np.zeros_like(grid), sigma=0.02, hr_sum=0.0)
    with pytest.raises(ValueError, match="positive maximum"):
        fit_model(empty)


def test_sum_rule_for_canonical(canonical):
    sdf = canonical["sdf"]
    assert abs(sdf.integral() / sdf.hr_sum - 1.0) < 0.01
