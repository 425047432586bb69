"""Entanglement entropy as a function of SPDC pump bandwidth."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .biphoton import build_jsa, make_grids, phase_matching_fwhm
from .errors import InputError, ResolutionError, SearchError
from .schmidt import entropy, purity, schmidt_decompose
from .units import C_NM_PER_FS, PM_KINDS, ExperimentConfig

log = logging.getLogger(__name__)

BANDWIDTH_LIMITS_NM = (0.2, 12.0)
MAX_GRID_POINTS = 8192
COARSE_POINTS = 16
SEARCH_TOLERANCE_NM = 0.01

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class EntropyCurve:
    bandwidths_nm: np.ndarray
    entropy_bits: np.ndarray
    purity: np.ndarray
    pm_kind: str

    def __post_init__(self):
        b = np.asarray(self.bandwidths_nm, dtype=float)
        e = np.asarray(self.entropy_bits, dtype=float)
        p = np.asarray(self.purity, dtype=float)
        if not (b.shape == e.shape == p.shape) or b.ndim != 1:
            raise InputError("curve axes must be aligned vectors")
        if np.any(np.diff(b) <= 0):
            raise InputError("bandwidths must be increasing")
        if np.any(e < 0):
            raise InputError("entropy cannot be negative")
        for name, value in (("bandwidths_nm", b), ("entropy_bits", e), ("purity", p)):
            object.__setattr__(self, name, value)

    @property
    def argmin(self) -> float:
        return float(self.bandwidths_nm[np.argmin(self.entropy_bits)])


@dataclass(frozen=True)
class SweepResult:
    curves: dict
    argmin_nm: dict
    min_entropy_bits: dict


def resolved_config(config: ExperimentConfig) -> ExperimentConfig:
    """Raise ``grid_points`` until the spectral features are resolved.

    Narrow pumps need finer frequency sampling than the default grid offers;
    the temporal step is set by the span and cannot be fixed this way.
    """
    while True:
        try:
            make_grids(config)
            return config
        except ResolutionError as exc:
            spectral = exc.diagnostics.get("feature", "").endswith("bandwidth")
            if not spectral or config.grid_points >= MAX_GRID_POINTS:
                raise
            config = config.replace(grid_points=config.grid_points * 2)


def entropy_at(bandwidth_nm: float, pm_kind: str, config: ExperimentConfig):
    """``(entropy_bits, purity)`` of the model state at one pump bandwidth."""
    cfg = resolved_config(config.replace(spdc_pump_fwhm_nm=float(bandwidth_nm), pm_kind=pm_kind))
    spectrum = schmidt_decompose(build_jsa(cfg))
    return entropy(spectrum), purity(spectrum)


def _entropy_task(args):
    return entropy_at(*args)


def _check_range(lo, hi):
    lo_lim, hi_lim = BANDWIDTH_LIMITS_NM
    if not (lo_lim < lo < hi < hi_lim):
        raise InputError(
            f"bandwidth range must satisfy {lo_lim} < min < max < {hi_lim} nm, got ({lo}, {hi})")


def entropy_vs_bandwidth(bandwidth_range, steps: int, pm_kind: str,
                         config: ExperimentConfig | None = None,
                         workers: int = 1) -> EntropyCurve:
    """Entropy and purity on ``steps`` uniformly spaced pump bandwidths.

    ``workers > 1`` evaluates points in worker processes; results are
    identical to the serial run and come back in input order.
    """
    lo, hi = map(float, bandwidth_range)
    _check_range(lo, hi)
    if steps < 8:
        raise InputError(f"a sweep needs at least 8 steps, got {steps}")
    if pm_kind not in PM_KINDS:
        raise InputError(f"unknown phase-matching kind {pm_kind!r}")
    config = config or ExperimentConfig()
    bandwidths = np.linspace(lo, hi, int(steps))
    tasks = [(float(b), pm_kind, config) for b in bandwidths]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_entropy_task, tasks))
    else:
        results = [_entropy_task(t) for t in tasks]
    ent, pur = np.array(results).T
    return EntropyCurve(bandwidths, ent, pur, pm_kind)


def golden_section(f, a: float, b: float, tol: float):
    """Minimize a unimodal ``f`` on ``[a, b]`` until the bracket is shorter than ``tol``.

    Returns ``(x, f(x))`` for the best point evaluated.
    """
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a >= tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def _is_unimodal(values, rtol=1e-9) -> bool:
    i = int(np.argmin(values))
    slack = rtol * max(1.0, float(np.max(np.abs(values))))
    left = np.diff(values[: i + 1])
    right = np.diff(values[i:])
    return bool(np.all(left <= slack) and np.all(right >= -slack))


def find_factorable_bandwidth(pm_kind: str, config: ExperimentConfig | None = None,
                              bandwidth_range=(0.5, 8.0), strict: bool = False):
    """Pump bandwidth [nm] of minimum entanglement entropy, and that entropy.

    A 16-point scan brackets the minimum, then golden-section search
    narrows the bracket below 0.01 nm.  If the scan is not unimodal the
    coarse argmin is returned with a warning, or :class:`SearchError` is
    raised when ``strict``.
    """
    config = config or ExperimentConfig()
    lo, hi = map(float, bandwidth_range)
    _check_range(lo, hi)
    grid = np.linspace(lo, hi, COARSE_POINTS)
    coarse = np.array([entropy_at(b, pm_kind, config)[0] for b in grid])
    i = int(np.argmin(coarse))
    if not _is_unimodal(coarse):
        scan = list(zip(grid.tolist(), coarse.tolist()))
        if strict:
            raise SearchError("entropy scan is not unimodal", scan=scan)
        log.warning("entropy scan is not unimodal; returning the coarse minimum")
        return float(grid[i]), float(coarse[i])
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, COARSE_POINTS - 1)]
    x, fx = golden_section(lambda bw: entropy_at(bw, pm_kind, config)[0],
                           a, b, SEARCH_TOLERANCE_NM)
    if coarse[i] < fx:
        return float(grid[i]), float(coarse[i])
    return float(x), float(fx)


def matched_gaussian_bandwidth(config: ExperimentConfig) -> float:
    """Pump bandwidth [nm] at which the gaussian-PM amplitude factorizes.

    The product of two Gaussians in the sum and difference detunings is
    separable exactly when both have the same width.
    """
    fwhm = phase_matching_fwhm("gaussian", config.window_fs)
    lam = config.pump_center_wavelength_nm
    return fwhm * lam**2 / (2.0 * math.pi * C_NM_PER_FS)


def sweep(bandwidth_range=(0.5, 8.0), steps: int = 32, pm_kinds=PM_KINDS,
          config: ExperimentConfig | None = None, workers: int = 1) -> SweepResult:
    curves, argmin, minimum = {}, {}, {}
    for kind in pm_kinds:
        curve = entropy_vs_bandwidth(bandwidth_range, steps, kind, config, workers)
        curves[kind] = curve
        argmin[kind] = curve.argmin
        minimum[kind] = float(curve.entropy_bits.min())
    return SweepResult(curves, argmin, minimum)
