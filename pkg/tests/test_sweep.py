import logging

import numpy as np
import pytest

from jtdsim.errors import InputError, SearchError
from jtdsim.sweep import (EntropyCurve, entropy_at, entropy_vs_bandwidth,
                          find_factorable_bandwidth, golden_section, matched_gaussian_bandwidth,
                          resolved_config, sweep)
from jtdsim.units import ExperimentConfig


def test_golden_section_quadratic():
    x, fx = golden_section(lambda x: (x - 1.234) ** 2, 0.0, 3.0, 1e-6)
    assert x == pytest.approx(1.234, abs=1e-6)
    assert fx < 1e-12


def test_matched_bandwidth():
    assert matched_gaussian_bandwidth(ExperimentConfig()) == pytest.approx(1.2688, abs=1e-4)


def test_gaussian_factorable_point():
    bw, ent = find_factorable_bandwidth("gaussian")
    assert bw == pytest.approx(matched_gaussian_bandwidth(ExperimentConfig()), abs=0.01)
    assert ent < 1e-4


def test_sinc_minimum_is_entangled():
    bw, ent = find_factorable_bandwidth("sinc")
    assert 0.8 < bw < 1.6
    assert ent > 0.05


def test_resolved_config_refines_narrow_pumps():
    cfg = resolved_config(ExperimentConfig(spdc_pump_fwhm_nm=0.3))
    assert cfg.grid_points > 256
    assert resolved_config(ExperimentConfig()).grid_points == 256


def test_grid_convergence():
    for kind in ("gaussian", "sinc"):
        for bw in (1.1, 6.0):
            cfg = ExperimentConfig(pm_kind=kind)
            coarse = entropy_at(bw, kind, cfg)[0]
            fine = entropy_at(bw, kind, cfg.replace(grid_points=512))[0]
            assert abs(coarse - fine) < 1e-4


def test_sweep_shape_and_ordering():
    res = sweep((0.5, 8.0), 16)
    g, s = res.curves["gaussian"], res.curves["sinc"]
    assert g.bandwidths_nm.size == 16
    assert np.all(s.entropy_bits > g.entropy_bits)
    assert np.all((g.purity > 0) & (g.purity <= 1))
    assert res.argmin_nm["gaussian"] == g.argmin


def test_parallel_equals_serial():
    a = entropy_vs_bandwidth((0.5, 8.0), 8, "sinc", workers=1)
    b = entropy_vs_bandwidth((0.5, 8.0), 8, "sinc", workers=3)
    assert np.array_equal(a.entropy_bits, b.entropy_bits)
    assert np.array_equal(a.purity, b.purity)


@pytest.mark.parametrize("rng, steps", [((0.1, 5.0), 16), ((1.0, 12.0), 16), ((5.0, 2.0), 16),
                                        ((1.0, 5.0), 4)])
def test_sweep_argument_checks(rng, steps):
    with pytest.raises(InputError):
        entropy_vs_bandwidth(rng, steps, "gaussian")


def test_sweep_unknown_kind():
    with pytest.raises(InputError):
        entropy_vs_bandwidth((1.0, 5.0), 8, "boxcar")


def test_non_unimodal_scan(monkeypatch, caplog):
    import jtdsim.sweep as sw

    # two wells: the coarse scan cannot bracket a single minimum
    monkeypatch.setattr(sw, "entropy_at",
                        lambda b, k, c: (float(np.cos(3 * b) + 2), 1.0))
    with caplog.at_level(logging.WARNING):
        bw, ent = sw.find_factorable_bandwidth("gaussian")
    assert "not unimodal" in caplog.text
    assert ent == pytest.approx(min(np.cos(3 * np.linspace(0.5, 8, 16)) + 2))
    with pytest.raises(SearchError) as info:
        sw.find_factorable_bandwidth("gaussian", strict=True)
    assert len(info.value.scan) == 16


def test_curve_validation():
    with pytest.raises(InputError):
        EntropyCurve([1, 2], [0.1], [0.9, 0.9], "gaussian")
    with pytest.raises(InputError):
        EntropyCurve([2, 1], [0.1, 0.1], [0.9, 0.9], "gaussian")
