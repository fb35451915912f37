"""Canonical rate, exposure, and Bell-basis dephasing evolution."""

import numpy as np
import pytest
from scipy.integrate import quad

from dephonon.dynamics import (
    BellDensityMatrix,
    BellSystem,
    RateProfile,
    build_rate_profile,
    canonical_rate,
    coherence,
    evolve_analytic,
    evolve_ode,
    magnetization_z,
    rate_amplitude,
    rate_approx,
    thermal_factor,
    upsilon,
    upsilon_approx,
    upsilon_steady_state,
    xi_matrix,
)
from dephonon.sdf import SampledSDF, SdfParams


@pytest.fixture(scope="module")
def model_params(canonical):
    return canonical["fit"]


def _profile(params, temperature, horizon_factor=10.0, per_period=100):
    horizon = horizon_factor / params.gamma
    n = int(per_period * params.omega_loc * horizon / (2 * np.pi))
    times = np.linspace(0.0, horizon, n)
    return build_rate_profile(params, params.omega_max, temperature, times)


def test_xi_matrix_structure():
    xi = xi_matrix()
    assert np.array_equal(xi, xi.T)
    assert np.all(np.diag(xi) == 0.0)
    assert xi[2, 3] == 0.0
    assert xi[0, 1] == pytest.approx(1 / 3)
    assert xi[0, 2] == pytest.approx(2 / 3)
    assert set(np.round(xi.ravel(), 12)) <= {0.0, round(1 / 3, 12), round(2 / 3, 12)}


def test_bell_system_build():
    sys_ = BellSystem.build(0.3)
    assert np.allclose(sys_.energies, [0.3, 0.0, -0.15, -0.15])
    assert abs(np.sum(sys_.dephasing_op**2) - 1.0) < 1e-12


def test_channels_realize_xi_weights():
    sys_ = BellSystem.build(1.0)
    damp = np.zeros((4, 4))
    for ch in sys_.dephasing_channels():
        d = np.diag(ch).real
        damp += 0.5 * (d[:, None] - d[None, :]) ** 2
    assert np.allclose(damp, sys_.xi, atol=1e-14)


def test_density_matrix_validation():
    with pytest.raises(ValueError, match="unit trace"):
        BellDensityMatrix(np.eye(4))
    rho = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
    rho[0, 1] = 0.1
    with pytest.raises(ValueError, match="Hermitian"):
        BellDensityMatrix(rho)
    ok = BellDensityMatrix.from_pure(np.array([1.0, 1.0, 0.0, 1.0]))
    assert abs(np.trace(ok.rho) - 1.0) < 1e-12


def test_thermal_factor():
    assert thermal_factor(1.3, 0.0) == 1.0
    assert thermal_factor(1.0, 0.5) == pytest.approx(1.0 / np.tanh(1.0))
    # monotone in temperature
    assert thermal_factor(1.0, 2.0) > thermal_factor(1.0, 1.0) > 1.0


def test_rate_and_upsilon_vanish_at_t0(model_params):
    assert canonical_rate(model_params, 2.0, 0.0, 0.0) == 0.0
    assert upsilon(model_params, 2.0, 0.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        canonical_rate(model_params, 2.0, 0.0, -1.0)


def test_narrow_peak_rate_matches_delta_limit():
    # a very narrow sampled peak approximates J = g^2 delta(w - w0), for
    # which the rate is 3 g^2 / w0 coth(w0/2T) sin(w0 t)
    w0, g2, sig = 1.2, 4e-4, 5e-4
    grid = np.linspace(0.0, 2.0, 20001)
    values = g2 * np.exp(-((grid - w0) / sig) ** 2) / (np.sqrt(np.pi) * sig)
    sdf = SampledSDF(grid=grid, values=values, sigma=sig, hr_sum=g2)
    for temp in (0.0, 1.5):
        for t in (0.7, 3.0):
            expected = (
                3.0 * g2 / w0 * float(thermal_factor(w0, temp)) * np.sin(w0 * t)
            )
            got = canonical_rate(sdf, 2.0, temp, t)
            assert got == pytest.approx(expected, rel=2e-3, abs=1e-9)


def test_profile_matches_scalar_quadrature(model_params):
    prof = _profile(model_params, 2.0)
    for t in (1.0, 37.0, 205.0):
        i = np.argmin(np.abs(prof.times - t))
        ti = prof.times[i]
        assert prof.gamma_c[i] == pytest.approx(
            canonical_rate(model_params, 2.0, 2.0, ti), rel=1e-5, abs=1e-12
        )
        assert prof.upsilon[i] == pytest.approx(
            upsilon(model_params, 2.0, 2.0, ti), rel=1e-5
        )


def test_upsilon_is_time_integral_of_rate(model_params):
    t_end = 40.0
    u_freq = upsilon(model_params, 2.0, 0.0, t_end)
    u_time, _ = quad(
        lambda tau: canonical_rate(model_params, 2.0, 0.0, tau),
        0.0,
        t_end,
        limit=400,
    )
    assert abs(u_freq / u_time - 1.0) < 1e-4


def test_upsilon_nonnegative_and_bounded(model_params):
    prof = _profile(model_params, 2.0)
    assert prof.upsilon[0] == 0.0
    assert np.all(prof.upsilon >= -1e-12)
    bound, _ = quad(
        lambda w: 6.0 * model_params(w) / w**2 * float(thermal_factor(w, 2.0)),
        1e-9,
        2.0,
        limit=400,
    )
    assert prof.upsilon.max() <= bound * (1 + 1e-6)


def test_rate_amplitude_reduces_to_alpha_at_t0(model_params):
    alpha = rate_amplitude(model_params, 0.0)
    expected = (
        3.0 * np.pi * model_params.j0
        * np.sin(np.pi * model_params.omega_loc / model_params.omega_max)
        ** (1.0 + model_params.n_exp)
        / model_params.omega_loc
    )
    assert alpha == pytest.approx(expected, rel=1e-14)
    assert rate_amplitude(model_params, 2.0) > alpha


def test_rate_approx_shape(model_params):
    assert rate_approx(model_params, 0.0, 0.0) == 0.0
    t = np.pi / (2 * model_params.omega_loc)
    assert rate_approx(model_params, 0.0, t) == pytest.approx(
        rate_amplitude(model_params, 0.0) * np.exp(-model_params.gamma * t / 2),
        rel=1e-10,
    )


def test_rate_temperature_monotone_at_quarter_period(model_params):
    t_star = np.pi / (2.0 * model_params.omega_loc)
    vals = [canonical_rate(model_params, 2.0, temp, t_star) for temp in (0.0, 1.0, 2.0)]
    assert vals[0] < vals[1] < vals[2]


def test_upsilon_approx_limits(model_params):
    assert upsilon_approx(model_params, 0.0, 0.0) == 0.0
    ups_inf = upsilon_steady_state(model_params, 0.0)
    assert upsilon_approx(model_params, 0.0, 1e6) == pytest.approx(ups_inf, rel=1e-10)
    t5 = 5.0 / model_params.gamma
    assert upsilon_approx(model_params, 0.0, t5) == pytest.approx(
        upsilon(model_params, 2.0, 0.0, t5), rel=0.15
    )


def test_evolve_analytic():
    sys_ = BellSystem.build(1.0)
    rho0 = BellDensityMatrix.from_pure(np.array([1.0, 1.0, 1.0, 1.0]))
    same = evolve_analytic(rho0, sys_, 0.0)
    assert np.allclose(same.rho, rho0.rho)
    late = evolve_analytic(rho0, sys_, 500.0)
    assert np.allclose(np.diag(late.rho), np.diag(rho0.rho))
    assert late.rho[2, 3] == pytest.approx(rho0.rho[2, 3])  # degenerate pair
    assert abs(late.rho[0, 2]) < 1e-12
    with pytest.raises(ValueError):
        evolve_analytic(rho0, sys_, -1.0)


def test_evolve_ode_zero_rate_is_identity():
    sys_ = BellSystem.build(1.0)
    times = np.linspace(0.0, 5.0, 200)
    prof = RateProfile(times, np.zeros_like(times), np.zeros_like(times), 0.0)
    rho0 = BellDensityMatrix.from_pure(np.array([1.0, 0.5, 0.25, 0.5]))
    _, traj = evolve_ode(rho0, sys_, prof, t_eval=times[::50])
    assert np.abs(traj - rho0.rho).max() < 1e-12


def test_evolve_ode_preserves_structure(model_params):
    sys_ = BellSystem.build(0.01)
    prof = _profile(model_params, 0.0, horizon_factor=3.0)
    rho0 = BellDensityMatrix.from_pure(np.array([1.0, 1.0j, 0.5, -0.5]))
    _, traj = evolve_ode(rho0, sys_, prof, t_eval=prof.times[:: len(prof.times) // 20])
    traces = np.trace(traj, axis1=1, axis2=2)
    assert np.abs(traces - 1.0).max() < 1e-9
    assert np.abs(traj - traj.conj().transpose(0, 2, 1)).max() < 1e-9
    pops = np.diagonal(traj, axis1=1, axis2=2).real
    assert np.abs(pops - np.diag(rho0.rho).real).max() < 1e-8
    # element-wise monotone damping
    assert (np.abs(traj) <= np.abs(rho0.rho)[None] + 1e-10).all()


def test_dark_state_is_fixed_point(model_params):
    sys_ = BellSystem.build(0.01)
    prof = _profile(model_params, 0.0, horizon_factor=3.0)
    dark = BellDensityMatrix(np.diag([0.0, 1.0, 0.0, 0.0]).astype(complex))
    _, traj = evolve_ode(dark, sys_, prof, t_eval=prof.times[::500])
    assert np.abs(traj - dark.rho).max() < 1e-10


def test_coherence_values():
    assert coherence(np.diag([0.25] * 4).astype(complex)) == 0.0
    rho = BellDensityMatrix.from_pure(0.5 * np.ones(4))
    assert coherence(rho) == pytest.approx(3.0)
    p = np.array([0.4, 0.3, 0.2, 0.1])
    rho_p = BellDensityMatrix.from_pure(np.sqrt(p))
    expected = 2.0 * sum(
        np.sqrt(p[i] * p[j]) for i in range(4) for j in range(i + 1, 4)
    )
    assert coherence(rho_p) == pytest.approx(expected)


def test_magnetization():
    assert magnetization_z(np.diag([0.25] * 4).astype(complex)) == 0.0
    rho = BellDensityMatrix.from_pure(np.array([1.0, 0.0, 1.0, 0.0]))
    assert magnetization_z(rho) == pytest.approx(1.0)
    # decays with exponent 2/3 under the analytic map
    sys_ = BellSystem.build(1.0)
    out = evolve_analytic(rho, sys_, 1.2)
    assert magnetization_z(out) == pytest.approx(np.exp(-2 * 1.2 / 3), rel=1e-12)
