import numpy as np
import pytest

from jtdsim.measurement import gate_profile, simulate_scan, simulate_temporal_density
from jtdsim.units import ExperimentConfig

FIG_BANDWIDTHS = (6.0, 3.6, 2.2, 1.1)


@pytest.fixture(scope="session")
def default_config():
    return ExperimentConfig()


@pytest.fixture(scope="session")
def sinc_config():
    return ExperimentConfig(pm_kind="sinc")


@pytest.fixture(scope="session")
def temporal_6nm(default_config):
    d = simulate_temporal_density(default_config)
    return d, gate_profile(default_config, d.grid_s)


@pytest.fixture(scope="session")
def scans():
    """Noiseless gated 16x16 scans keyed by (pm_kind, pump bandwidth)."""
    out = {}
    for kind in ("gaussian", "sinc"):
        for bw in FIG_BANDWIDTHS:
            out[kind, bw] = simulate_scan(ExperimentConfig(spdc_pump_fwhm_nm=bw, pm_kind=kind))
    return out


def rotated_gaussian(sum_width, diff_width, n=256, span_widths=12.0):
    """exp(-(x+y)^2/(4a^2) - (x-y)^2/(4b^2)) on a square grid wide enough for both widths."""
    from jtdsim.biphoton import AxisGrid, JointAmplitude

    widest = max(sum_width, diff_width)
    step = np.sqrt(2.0) * widest * span_widths / n
    grid = AxisGrid.centered(n, step)
    x, y = np.meshgrid(grid.values, grid.values, indexing="ij")
    values = np.exp(-(x + y) ** 2 / (4 * sum_width**2) - (x - y) ** 2 / (4 * diff_width**2))
    return JointAmplitude("spectral", grid, grid, values).normalized()


ACCEPTANCE_LINES = []


def record_acceptance(tag, ok, detail):
    line = f"{tag} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
