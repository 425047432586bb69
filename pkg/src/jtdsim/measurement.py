"""Time-resolved upconversion measurements of a joint temporal density.

The gate is the intensity profile of the transform-limited upconversion
pulse.  Every observable is the joint temporal density convolved with the
gate intensity along each detection channel.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .biphoton import (AxisGrid, JointDensity, build_jta, density, make_grids,
                       marginals)
from .errors import DegenerateDataError, InputError, RangeError, ResolutionError
from .units import FWHM_PER_SIGMA, ExperimentConfig

HISTOGRAM_KINDS = ("singles_signal", "singles_idler", "coincidence")

#: Delay axis used for common-delay scans unless one is given [fs].
DEFAULT_SCAN_DELAYS = np.arange(-2000.0, 2000.0 + 1e-9, 10.0)

#: Gate standard deviations that must fit between a delay and the grid edge.
_EDGE_SIGMAS = 4.0


@dataclass(frozen=True, eq=False)
class GateProfile:
    """Gate intensity sampled on the temporal grid, unit integral."""

    grid: AxisGrid
    intensity: np.ndarray
    fwhm: float

    @property
    def sigma(self) -> float:
        return self.fwhm / FWHM_PER_SIGMA

    def kernel(self, delays) -> np.ndarray:
        """Rows ``g(t - tau)`` for each delay, each with unit integral on the grid."""
        delays = np.atleast_1d(np.asarray(delays, dtype=float))
        t = self.grid.values
        k = np.exp(-((t[None, :] - delays[:, None]) ** 2) / (2.0 * self.sigma**2))
        sums = k.sum(axis=1) * self.grid.step
        if np.any(sums == 0):
            raise ResolutionError(
                "gate is narrower than the grid can represent at an off-grid delay",
                {"fwhm": self.fwhm, "step": self.grid.step})
        return k / sums[:, None]


def make_gate(grid: AxisGrid, fwhm_fs: float, check: bool = True) -> GateProfile:
    """Gaussian gate of intensity FWHM ``fwhm_fs`` on ``grid``.

    ``check=False`` skips the sampling check, which is needed for the
    delta-function limit.
    """
    if not fwhm_fs > 0:
        raise InputError(f"gate FWHM must be positive, got {fwhm_fs}")
    if check and fwhm_fs / grid.step < 4.0:
        raise ResolutionError(
            f"gate FWHM {fwhm_fs:.4g} fs spans only {fwhm_fs / grid.step:.2f} samples",
            {"fwhm": fwhm_fs, "step": grid.step})
    gate = GateProfile(grid, np.empty(0), float(fwhm_fs))
    intensity = gate.kernel([0.0])[0]
    return GateProfile(grid, intensity, float(fwhm_fs))


def gate_profile(config: ExperimentConfig, grid: AxisGrid | None = None) -> GateProfile:
    """Transform-limited gate for ``config.gate_fwhm_nm`` on the simulation time grid."""
    if grid is None:
        grid = make_grids(config)[1]
    return make_gate(grid, config.gate_duration_fs)


@dataclass(frozen=True, eq=False)
class Histogram1D:
    delays: np.ndarray
    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in HISTOGRAM_KINDS:
            raise InputError(f"unknown histogram kind {self.kind!r}")
        delays = np.asarray(self.delays, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if delays.shape != values.shape or delays.ndim != 1:
            raise InputError("delays and values must be vectors of equal length")
        if np.any(np.diff(delays) <= 0):
            raise InputError("delays must be strictly increasing")
        if np.any(values < 0):
            raise InputError("histogram values must be non-negative")
        object.__setattr__(self, "delays", delays)
        object.__setattr__(self, "values", values)

    def peak_normalized(self) -> "Histogram1D":
        return Histogram1D(self.delays, self.values / self.values.max(), self.kind)


@dataclass(frozen=True, eq=False)
class ScanSurface:
    """Observable sampled on a (signal delay, idler delay) grid."""

    delays_s: np.ndarray
    delays_i: np.ndarray
    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        ds = np.asarray(self.delays_s, dtype=float)
        di = np.asarray(self.delays_i, dtype=float)
        values = np.asarray(self.values, dtype=float)
        for name, axis in (("signal", ds), ("idler", di)):
            if axis.ndim != 1 or axis.size < 2 or np.any(np.diff(axis) <= 0):
                raise InputError(f"{name} delays must be strictly increasing")
        if values.shape != (ds.size, di.size):
            raise InputError(f"surface shape {values.shape} does not match axes")
        if np.any(values < 0):
            raise InputError("surface values must be non-negative")
        object.__setattr__(self, "delays_s", ds)
        object.__setattr__(self, "delays_i", di)
        object.__setattr__(self, "values", values)

    @property
    def cell(self) -> float:
        return float(np.mean(np.diff(self.delays_s)) * np.mean(np.diff(self.delays_i)))

    def unit_normalized(self) -> "ScanSurface":
        total = self.values.sum() * self.cell
        if not total > 0:
            raise DegenerateDataError("surface has zero integral")
        return ScanSurface(self.delays_s, self.delays_i, self.values / total, True)

    def to_density(self) -> JointDensity:
        return JointDensity.from_values(
            "temporal", AxisGrid.from_values(self.delays_s),
            AxisGrid.from_values(self.delays_i), self.values)


@dataclass(frozen=True, eq=False)
class CountsSurface:
    """Integer coincidence counts on a delay grid plus acquisition metadata."""

    delays_s: np.ndarray
    delays_i: np.ndarray
    counts: np.ndarray
    dwell_s: float
    seed: int | None = None
    rates: dict = field(default_factory=dict)

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.dtype.kind not in "iu":
            if not np.all(np.equal(np.mod(counts, 1), 0)):
                raise InputError("counts must be integers")
            counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise InputError("counts must be non-negative")
        # reuse the axis/shape checks of ScanSurface
        ScanSurface(self.delays_s, self.delays_i, counts)
        object.__setattr__(self, "counts", counts.astype(np.int64))
        object.__setattr__(self, "delays_s", np.asarray(self.delays_s, dtype=float))
        object.__setattr__(self, "delays_i", np.asarray(self.delays_i, dtype=float))

    def as_surface(self) -> ScanSurface:
        return ScanSurface(self.delays_s, self.delays_i, self.counts.astype(float))


# ---------------------------------------------------------------------------
# observables

def _check_temporal(d: JointDensity):
    if d.domain != "temporal":
        raise InputError("measurements need a temporal-domain density")


def _check_delays(delays, grid: AxisGrid, gate: GateProfile):
    delays = np.asarray(delays, dtype=float)
    lo = grid.values[0] + _EDGE_SIGMAS * gate.sigma
    hi = grid.values[-1] - _EDGE_SIGMAS * gate.sigma
    if delays.size and (delays.min() < lo or delays.max() > hi):
        raise RangeError(
            f"delays [{delays.min():.1f}, {delays.max():.1f}] fs exceed the "
            f"simulated window [{lo:.1f}, {hi:.1f}] fs")


def coincidence_surface(d: JointDensity, g: GateProfile, delays_s, delays_i) -> np.ndarray:
    """Gated coincidence response on the outer product of two delay axes."""
    _check_temporal(d)
    for grid, delays in ((d.grid_s, delays_s), (d.grid_i, delays_i)):
        _check_delays(delays, grid, g)
    ks = _kernel_on(g, d.grid_s, delays_s)
    ki = _kernel_on(g, d.grid_i, delays_i)
    return ks @ d.values @ ki.T * d.cell


def _kernel_on(g: GateProfile, grid: AxisGrid, delays) -> np.ndarray:
    if grid is g.grid or grid == g.grid:
        return g.kernel(delays)
    return GateProfile(grid, np.empty(0), g.fwhm).kernel(delays)


def coincidence_response(d: JointDensity, g: GateProfile, tau_s: float, tau_i: float) -> float:
    """``int int d(ts, ti) g(ts - tau_s) g(ti - tau_i) dts dti``."""
    return float(coincidence_surface(d, g, [tau_s], [tau_i])[0, 0])


def common_delay_scan(d: JointDensity, g: GateProfile, delays=None, normalize=True):
    """Singles and coincidence histograms for one delay shared by both channels.

    Returns ``(signal_singles, idler_singles, coincidence)``; each is peak
    normalized unless ``normalize`` is false.
    """
    _check_temporal(d)
    delays = DEFAULT_SCAN_DELAYS if delays is None else np.asarray(delays, dtype=float)
    _check_delays(delays, d.grid_s, g)
    _check_delays(delays, d.grid_i, g)
    ks = _kernel_on(g, d.grid_s, delays)
    ki = _kernel_on(g, d.grid_i, delays)
    ms, mi = marginals(d)
    singles_s = ks @ ms.values * d.grid_s.step
    singles_i = ki @ mi.values * d.grid_i.step
    coinc = np.einsum("aj,jk,ak->a", ks, d.values, ki) * d.cell
    out = (Histogram1D(delays, np.clip(singles_s, 0, None), "singles_signal"),
           Histogram1D(delays, np.clip(singles_i, 0, None), "singles_idler"),
           Histogram1D(delays, np.clip(coinc, 0, None), "coincidence"))
    if normalize:
        out = tuple(h.peak_normalized() for h in out)
    return out


def simulate_temporal_density(config: ExperimentConfig) -> JointDensity:
    return density(build_jta(config))


def theoretical_profiles(configs, delays=None) -> list[Histogram1D]:
    """Peak-normalized common-delay coincidence profile for each config."""
    profiles = []
    for config in configs:
        d = simulate_temporal_density(config)
        g = gate_profile(config, d.grid_s)
        profiles.append(common_delay_scan(d, g, delays)[2])
    return profiles


def default_scan_span(config: ExperimentConfig) -> float:
    """Delay span [fs]: 2 ps for broad pumps, 4 ps below 1.5 nm."""
    return 4000.0 if config.spdc_pump_fwhm_nm < 1.5 else 2000.0


def scan_delays(span_fs: float, points: int = 16) -> np.ndarray:
    if points < 2 or not span_fs > 0:
        raise InputError("a scan needs at least two points and a positive span")
    return np.linspace(-span_fs / 2.0, span_fs / 2.0, points)


def jtd_scan(d: JointDensity, g: GateProfile, config: ExperimentConfig | None = None,
             span_fs: float | None = None, points: int = 16) -> ScanSurface:
    """Gated coincidences on a square delay grid, unit-normalized over the grid.

    With the default 16 points the grid is 2 ps with 133 fs steps, or 4 ps
    with 267 fs steps for SPDC pumps narrower than 1.5 nm.
    """
    if span_fs is None:
        span_fs = default_scan_span(config) if config is not None else 2000.0
    delays = scan_delays(span_fs, points)
    values = coincidence_surface(d, g, delays, delays)
    return ScanSurface(delays, delays, np.clip(values, 0, None)).unit_normalized()


def simulate_scan(config: ExperimentConfig, span_fs=None, points=16) -> ScanSurface:
    d = simulate_temporal_density(config)
    return jtd_scan(d, gate_profile(config, d.grid_s), config, span_fs, points)


# ---------------------------------------------------------------------------
# counting noise

def accidental_rate(singles_s_hz: float, singles_i_hz: float, window_ns: float) -> float:
    """Accidental coincidence rate ``Rs Ri tau`` [1/s]."""
    return singles_s_hz * singles_i_hz * window_ns * 1e-9


def expected_counts(surface: ScanSurface, config: ExperimentConfig) -> np.ndarray:
    """Mean counts per scan point: true coincidences plus accidentals.

    Singles rates along each delay axis are the background plus the
    peak-scaled row/column sums of the surface, a proxy for the gated
    singles profile.
    """
    v = surface.values
    vmax = v.max()
    if not vmax > 0:
        raise DegenerateDataError("surface is identically zero")
    shape = v / vmax
    ms, mi = v.sum(axis=1), v.sum(axis=0)
    bg, peak = config.background_rate_hz, config.peak_singles_rate_hz
    rate_s = bg + (peak - bg) * ms / ms.max()
    rate_i = bg + (peak - bg) * mi / mi.max()
    accidentals = accidental_rate(rate_s[:, None], rate_i[None, :], config.coincidence_window_ns)
    return (config.peak_coincidence_rate_hz * shape + accidentals) * config.dwell_s


def synthesize_counts(surface: ScanSurface, config: ExperimentConfig, seed: int) -> CountsSurface:
    """Poisson counts around :func:`expected_counts`.

    Each scan point draws from its own generator keyed by
    ``(seed, row, column)``, so results do not depend on evaluation order.
    """
    seed = int(seed)
    if seed < 0:
        raise InputError("seed must be non-negative")
    mean = expected_counts(surface, config)
    counts = np.zeros(mean.shape, dtype=np.int64)
    for (j, k), lam in np.ndenumerate(mean):
        rng = np.random.default_rng(np.random.SeedSequence([seed, j, k]))
        counts[j, k] = rng.poisson(lam)
    rates = {
        "background_rate_hz": config.background_rate_hz,
        "peak_singles_rate_hz": config.peak_singles_rate_hz,
        "peak_coincidence_rate_hz": config.peak_coincidence_rate_hz,
        "coincidence_window_ns": config.coincidence_window_ns,
    }
    return CountsSurface(surface.delays_s, surface.delays_i, counts,
                         config.dwell_s, seed, rates)


__all__ = [
    "GateProfile", "Histogram1D", "ScanSurface", "CountsSurface", "make_gate",
    "gate_profile", "coincidence_response", "coincidence_surface", "common_delay_scan",
    "theoretical_profiles", "jtd_scan", "simulate_scan", "simulate_temporal_density",
    "scan_delays", "default_scan_span", "accidental_rate", "expected_counts",
    "synthesize_counts",
]
