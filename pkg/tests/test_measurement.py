import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jtdsim.biphoton import AxisGrid, JointDensity, fwhm
from jtdsim.errors import DegenerateDataError, InputError, RangeError, ResolutionError
from jtdsim.measurement import (CountsSurface, Histogram1D, ScanSurface, accidental_rate,
                                coincidence_response, coincidence_surface, common_delay_scan,
                                expected_counts, gate_profile, jtd_scan, make_gate, scan_delays,
                                simulate_scan, synthesize_counts)
from jtdsim.units import ExperimentConfig

GRID = AxisGrid.centered(256, 20.0)


def gaussian_density(sigma_s, sigma_i, rho=0.0):
    ts, ti = np.meshgrid(GRID.values, GRID.values, indexing="ij")
    x, y = ts / sigma_s, ti / sigma_i
    v = np.exp(-(x**2 - 2 * rho * x * y + y**2) / (2 * (1 - rho**2)))
    return JointDensity.from_values("temporal", GRID, GRID, v)


def test_gate_profile_default(default_config):
    g = gate_profile(default_config)
    assert g.fwhm == pytest.approx(153.1, abs=0.1)
    assert g.intensity.sum() * g.grid.step == pytest.approx(1.0)
    # the sampled gate reproduces its nominal width
    assert fwhm(g.grid.values, g.intensity) == pytest.approx(153.0, abs=1.0)


def test_gate_checks():
    with pytest.raises(InputError):
        make_gate(GRID, 0.0)
    with pytest.raises(ResolutionError):
        make_gate(GRID, 50.0)
    assert make_gate(GRID, 50.0, check=False).fwhm == 50.0


def test_delta_gate_recovers_density():
    d = gaussian_density(200.0, 300.0, rho=-0.6)
    g = make_gate(GRID, 1e-3, check=False)
    delays = GRID.values[100:156:5]
    got = coincidence_surface(d, g, delays, delays)
    want = d.values[100:156:5][:, 100:156:5]
    # a unit-integral spike on one sample gives d * dt^2 / dt^2
    assert np.allclose(got, want, rtol=1e-12, atol=0)


def test_gaussian_convolution_oracle():
    # a Gaussian density blurred by a Gaussian gate stays Gaussian, widths add in quadrature
    sigma = 250.0
    d = gaussian_density(sigma, sigma)
    g = make_gate(GRID, 153.0)
    h = common_delay_scan(d, g, np.arange(-1500.0, 1500.1, 5.0))
    s_eff = math.hypot(sigma, g.sigma)
    assert fwhm(h[0].delays, h[0].values) == pytest.approx(2.3548 * s_eff, rel=1e-3)


def test_factorable_coincidence_is_narrower_by_sqrt2():
    d = gaussian_density(300.0, 300.0)
    g = make_gate(GRID, 153.0)
    singles, _, coinc = common_delay_scan(d, g, np.arange(-1500.0, 1500.1, 5.0))
    ratio = fwhm(singles.delays, singles.values) / fwhm(coinc.delays, coinc.values)
    assert ratio == pytest.approx(math.sqrt(2), rel=1e-3)


def test_coincidence_response_matches_surface():
    d = gaussian_density(300.0, 200.0, rho=0.4)
    g = make_gate(GRID, 153.0)
    surf = coincidence_surface(d, g, [-100.0, 0.0, 250.0], [50.0, 75.0])
    assert coincidence_response(d, g, 250.0, 75.0) == pytest.approx(surf[2, 1], rel=1e-14)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0))
def test_response_is_linear_in_density(a, b):
    d1 = gaussian_density(300.0, 200.0, rho=0.5)
    d2 = gaussian_density(150.0, 400.0, rho=-0.3)
    g = make_gate(GRID, 153.0)
    delays = np.linspace(-800, 800, 9)
    mix = JointDensity("temporal", GRID, GRID, a * d1.values + b * d2.values)
    lhs = coincidence_surface(mix, g, delays, delays)
    rhs = a * coincidence_surface(d1, g, delays, delays) + b * coincidence_surface(d2, g, delays, delays)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-300)


@settings(max_examples=10, deadline=None)
@given(st.floats(100.0, 400.0))
def test_wider_gate_widens_coincidence(w):
    d = gaussian_density(200.0, 200.0, rho=-0.8)
    delays = np.arange(-1500.0, 1500.1, 5.0)
    narrow = common_delay_scan(d, make_gate(GRID, w), delays)[2]
    wide = common_delay_scan(d, make_gate(GRID, 1.2 * w), delays)[2]
    assert fwhm(wide.delays, wide.values) > fwhm(narrow.delays, narrow.values)


def test_delays_outside_window():
    d = gaussian_density(200.0, 200.0)
    g = make_gate(GRID, 153.0)
    with pytest.raises(RangeError):
        coincidence_surface(d, g, [0.0, 2500.0], [0.0])
    with pytest.raises(InputError):
        coincidence_surface(JointDensity("spectral", GRID, GRID, d.values), g, [0.0], [0.0])


def test_exchange_symmetry_of_scan(scans):
    for surface in scans.values():
        assert np.allclose(surface.values, surface.values.T, rtol=1e-10)


def test_scan_grid():
    assert np.allclose(np.diff(scan_delays(2000.0)), 2000.0 / 15)
    assert scan_delays(2000.0).size == 16
    with pytest.raises(InputError):
        scan_delays(0.0)


def test_jtd_scan_default_spans(scans):
    assert scans["gaussian", 6.0].delays_s[-1] == pytest.approx(1000.0)
    assert scans["gaussian", 1.1].delays_s[-1] == pytest.approx(2000.0)
    s = scans["gaussian", 6.0]
    assert s.normalized and s.values.sum() * s.cell == pytest.approx(1.0)


def test_histogram_and_surface_validation():
    with pytest.raises(InputError):
        Histogram1D([0, 1], [1, 2], "doubles")
    with pytest.raises(InputError):
        Histogram1D([0, 0], [1, 2], "coincidence")
    with pytest.raises(InputError):
        Histogram1D([0, 1], [1, -2], "coincidence")
    with pytest.raises(InputError):
        ScanSurface([0, 1], [0, 1], np.ones((3, 2)))
    with pytest.raises(DegenerateDataError):
        ScanSurface([0, 1], [0, 1], np.zeros((2, 2))).unit_normalized()
    with pytest.raises(InputError):
        CountsSurface([0, 1], [0, 1], [[1.5, 0], [0, 0]], 60.0)
    with pytest.raises(InputError):
        CountsSurface([0, 1], [0, 1], [[-1, 0], [0, 0]], 60.0)


def test_accidental_rate():
    assert accidental_rate(5300, 5300, 1.8) == pytest.approx(0.0506, abs=2e-4)


def test_expected_peak_counts(scans):
    cfg = ExperimentConfig()
    mean = expected_counts(scans["gaussian", 6.0], cfg)
    # 17/s for 60 s, plus 0.0506/s * 60 s of accidentals at the peak singles rate
    assert mean.max() == pytest.approx(1020 + 3.03, abs=0.05)
    # the corners still carry background accidentals only
    floor = accidental_rate(1900, 1900, 1.8) * 60
    assert mean.min() > floor * 0.99


def test_synthesized_counts_are_reproducible(scans):
    cfg = ExperimentConfig()
    s = scans["gaussian", 6.0]
    a = synthesize_counts(s, cfg, 7)
    b = synthesize_counts(s, cfg, 7)
    c = synthesize_counts(s, cfg, 8)
    assert np.array_equal(a.counts, b.counts)
    assert not np.array_equal(a.counts, c.counts)
    assert a.seed == 7 and a.dwell_s == 60.0
    with pytest.raises(InputError):
        synthesize_counts(s, cfg, -1)


def test_per_point_streams_are_order_independent(scans):
    # a sub-grid reuses the (seed, row, col) streams of the full grid's top-left block
    cfg = ExperimentConfig()
    s = scans["gaussian", 6.0]
    full = synthesize_counts(s, cfg, 3).counts
    mean = expected_counts(s, cfg)
    rng = np.random.default_rng(np.random.SeedSequence([3, 5, 9]))
    assert full[5, 9] == rng.poisson(mean[5, 9])


@pytest.mark.slow
def test_poisson_statistics_over_seeds(scans):
    """Sample means over 1000 seeds sit within 3 standard errors of the model mean.

    With 256 independent points about 0.7 excursions beyond 3 sigma are
    expected, so a literal every-point bound would fail at random.  The peak
    point must pass, at most 5 points may exceed 3 sigma, none may exceed
    4.5 sigma, and the standardized residuals must look standard normal.
    """
    cfg = ExperimentConfig()
    s = scans["gaussian", 6.0]
    mean = expected_counts(s, cfg)
    seeds = 1000
    total = sum(synthesize_counts(s, cfg, seed).counts.astype(float) for seed in range(seeds))
    z = (total / seeds - mean) / np.sqrt(mean / seeds)
    peak = np.unravel_index(np.argmax(mean), mean.shape)
    assert abs(z[peak]) < 3
    assert np.count_nonzero(np.abs(z) > 3) <= 5
    assert abs(z.mean()) < 0.25
    assert 0.85 < z.std() < 1.15
    assert np.max(np.abs(z)) < 4.5


def test_simulate_scan_uses_config(default_config):
    s = simulate_scan(default_config, span_fs=1000.0, points=8)
    assert s.values.shape == (8, 8)
    assert s.delays_s[0] == pytest.approx(-500.0)


def test_jtd_scan_explicit(temporal_6nm):
    d, g = temporal_6nm
    s = jtd_scan(d, g, span_fs=1500.0, points=6)
    assert s.values.shape == (6, 6)
