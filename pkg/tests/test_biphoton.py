import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jtdsim.biphoton import (GAUSSIAN_PM_GAMMA, SINC_HALF_AMPLITUDE_X, AxisGrid, JointAmplitude,
                             JointDensity, build_jsa, correlation_coefficient, density, fwhm,
                             make_grids, marginals, moments, phase_matching,
                             phase_matching_fwhm, pump_envelope, pump_sigma, to_spectral,
                             to_temporal)
from jtdsim.errors import DegenerateDataError, InputError, RangeError, ResolutionError
from jtdsim.units import ExperimentConfig

from conftest import rotated_gaussian

T = 1400.0


def test_pump_envelope_half_points():
    s = 0.01
    # amplitude half-max of exp(-W^2/4s^2)
    assert pump_envelope(2 * s * math.sqrt(math.log(2)), s) == pytest.approx(0.5)
    # intensity half-max
    assert pump_envelope(s * math.sqrt(2 * math.log(2)), s) ** 2 == pytest.approx(0.5)
    assert pump_envelope(0.0, s) == 1.0


def test_pump_envelope_rejects_bad_sigma():
    with pytest.raises(InputError):
        pump_envelope(0.0, 0.0)


def test_sinc_zeros_and_peak():
    assert phase_matching(0.0, "sinc", T) == 1.0
    for k in (1, 2, 3):
        assert abs(phase_matching(2 * math.pi * k / T, "sinc", T)) < 1e-15


def test_gaussian_pm_matches_sinc_amplitude_half_max():
    x_half = 2 * SINC_HALF_AMPLITUDE_X / T
    assert phase_matching(x_half, "sinc", T) == pytest.approx(0.5, abs=1e-12)
    assert phase_matching(x_half, "gaussian", T) == pytest.approx(0.5, abs=1e-12)
    assert GAUSSIAN_PM_GAMMA == pytest.approx(0.193, abs=1e-3)


@pytest.mark.parametrize("kind", ["sinc", "gaussian"])
def test_phase_matching_fwhm_is_intensity_fwhm(kind):
    w = phase_matching_fwhm(kind, T)
    assert phase_matching(w / 2, kind, T) ** 2 == pytest.approx(0.5, abs=1e-9)


def test_unknown_pm_kind():
    with pytest.raises(InputError):
        phase_matching(0.0, "boxcar", T)
    with pytest.raises(InputError):
        phase_matching_fwhm("boxcar", T)


def test_default_grid_resolution():
    spectral, temporal = make_grids(ExperimentConfig())
    assert spectral.n == temporal.n == 256
    assert spectral.is_centered and temporal.is_centered
    assert spectral.step * temporal.step * 256 == pytest.approx(2 * math.pi)
    assert 153.1 / temporal.step >= 4


def test_resolution_error_names_feature():
    with pytest.raises(ResolutionError) as info:
        make_grids(ExperimentConfig(spdc_pump_fwhm_nm=0.3))
    assert info.value.diagnostics["feature"] == "pump bandwidth"
    with pytest.raises(ResolutionError) as info:
        make_grids(ExperimentConfig(grid_points=64))
    assert "samples" in info.value.diagnostics


def test_axis_grid_validation():
    with pytest.raises(InputError):
        AxisGrid([0.0, 1.0, 3.0])
    with pytest.raises(InputError):
        AxisGrid([0.0, -1.0])
    g = AxisGrid.centered(8, 0.5)
    assert g.values[4] == 0.0 and g.span == 4.0
    assert g.conjugate().conjugate() == g


def test_jsa_is_normalized_and_symmetric(default_config):
    a = build_jsa(default_config)
    assert a.norm() == pytest.approx(1.0, abs=1e-12)
    # exchange symmetry A(ws, wi) = A(wi, ws) on the centered grid
    assert np.allclose(a.values, a.values.T, atol=1e-15)
    with pytest.raises(ValueError):
        a.values[0, 0] = 1.0


@pytest.mark.parametrize("kind", ["gaussian", "sinc"])
def test_parseval_and_round_trip(kind):
    a = build_jsa(ExperimentConfig(pm_kind=kind))
    t = to_temporal(a)
    assert t.domain == "temporal"
    assert t.norm() == pytest.approx(1.0, abs=1e-12)
    back = to_spectral(t)
    assert np.max(np.abs(back.values - a.values)) < 1e-12 * np.max(np.abs(a.values))
    with pytest.raises(InputError):
        to_spectral(a)


def test_sinc_boxcar_support():
    # the sinc phase matching becomes a boxcar |ts - ti| <= T in time
    cfg = ExperimentConfig(pm_kind="sinc", spdc_pump_fwhm_nm=12.0, grid_points=512)
    d = density(to_temporal(build_jsa(cfg)))
    ts, ti = np.meshgrid(d.grid_s.values, d.grid_i.values, indexing="ij")
    diff = np.abs(ts - ti)
    inside = d.values[diff < 0.8 * T].sum()
    outside = d.values[diff > 1.2 * T].sum()
    assert outside < 0.01 * inside
    # density stays flat across the window centre along the anti-diagonal
    k = d.grid_s.n // 2
    anti = np.array([d.values[k + j, k - j] for j in range(-3, 4)])
    assert np.ptp(anti) < 0.05 * anti.max()


def test_gaussian_temporal_variances(default_config):
    """var(ts + ti) = 1/sigma+^2 and var(ts - ti) = gamma T^2 for the gaussian model."""
    cfg = default_config.replace(grid_points=512)
    d = density(to_temporal(build_jsa(cfg)))
    ts, ti = np.meshgrid(d.grid_s.values, d.grid_i.values, indexing="ij")
    p = d.values / d.values.sum()
    var_sum = np.sum(p * (ts + ti) ** 2)
    var_diff = np.sum(p * (ts - ti) ** 2)
    assert var_sum == pytest.approx(1.0 / pump_sigma(cfg) ** 2, rel=1e-3)
    assert var_diff == pytest.approx(GAUSSIAN_PM_GAMMA * T**2, rel=1e-3)


@pytest.mark.parametrize("a, b", [(1.0, 1.0), (1.0, 2.0), (3.0, 1.0), (0.5, 4.0)])
def test_rotated_gaussian_correlation(a, b):
    # exp(-(x+y)^2/(4a^2) - (x-y)^2/(4b^2)) has density correlation (a^2-b^2)/(a^2+b^2)
    d = density(rotated_gaussian(a, b))
    assert correlation_coefficient(d) == pytest.approx((a**2 - b**2) / (a**2 + b**2), abs=1e-6)


def test_broadband_pump_correlation_signs(default_config):
    # 6 nm pump vs a 1.4 ps window: phase matching pins Ws = Wi, so the
    # frequencies are correlated and the arrival times anticorrelated
    a = build_jsa(default_config)
    assert correlation_coefficient(density(a)) > 0.5
    assert correlation_coefficient(density(to_temporal(a))) < -0.5


@given(st.floats(0.3, 4.0), st.floats(0.3, 4.0))
@settings(max_examples=25, deadline=None)
def test_correlation_sign_law(a, b):
    rho = correlation_coefficient(density(rotated_gaussian(a, b, n=128)))
    if a > 1.05 * b:
        assert rho > 0
    elif b > 1.05 * a:
        assert rho < 0


def test_marginals_and_moments_oracle():
    a = rotated_gaussian(1.0, 1.0)
    d = density(a)
    ms, mi = marginals(d)
    assert ms.integral() == pytest.approx(1.0) and mi.integral() == pytest.approx(1.0)
    m = moments(d)
    # factorable case: |A|^2 = exp(-x^2) exp(-y^2), variance 1/2 per axis
    assert m["var_s"] == pytest.approx(0.5, rel=1e-6)
    assert m["cov"] == pytest.approx(0.0, abs=1e-12)


def test_zero_variance_is_degenerate():
    g = AxisGrid.centered(8, 1.0)
    v = np.zeros((8, 8))
    v[4, :] = 1.0
    with pytest.raises(DegenerateDataError):
        correlation_coefficient(JointDensity.from_values("temporal", g, g, v))


def test_density_rejects_negative():
    g = AxisGrid.centered(8, 1.0)
    v = np.ones((8, 8))
    v[0, 0] = -1
    with pytest.raises(InputError):
        JointDensity.from_values("temporal", g, g, v)


def test_amplitude_shape_check():
    g = AxisGrid.centered(8, 1.0)
    with pytest.raises(InputError):
        JointAmplitude("spectral", g, g, np.ones((8, 4)))
    with pytest.raises(InputError):
        JointAmplitude("bogus", g, g, np.ones((8, 8)))


def test_fwhm_oracle():
    x = np.linspace(-10, 10, 201)
    assert fwhm(x, np.exp(-4 * math.log(2) * x**2 / 3.0**2)) == pytest.approx(3.0, rel=1e-3)
    with pytest.raises(RangeError):
        fwhm(x, np.ones_like(x) + (x == 0))
    with pytest.raises(DegenerateDataError):
        fwhm(x, np.zeros_like(x))
