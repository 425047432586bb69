"""Joint spectral / temporal amplitudes of ultrafast SPDC photon pairs.

The spectral amplitude is the product of a Gaussian pump envelope in the
sum detuning ``Ws + Wi`` and a phase-matching function in the difference
detuning ``Ws - Wi`` (extended phase matching).  Detunings are measured from
the degenerate carrier and the carrier phase is dropped.

Conventions for the phase-matching window ``T`` (``two_photon_window``):
the sinc kind is ``sinc((Ws - Wi) T / 2)``, whose Fourier dual is a boxcar
of full width ``2 T`` in ``ts - ti``; each photon's own arrival time then
spans a window of full width ``T`` about the pump arrival.  The gaussian
kind ``exp(-gamma ((Ws - Wi) T / 2)**2)`` takes ``gamma`` so that its
amplitude half-maximum coincides with that of the sinc main lobe.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DegenerateDataError, InputError, RangeError, ResolutionError
from .units import ExperimentConfig, FWHM_PER_SIGMA, fwhm_to_amplitude_sigma

# sinc(x) = 1/2 and sinc(x)**2 = 1/2, sinc(x) = sin(x)/x
SINC_HALF_AMPLITUDE_X = 1.8954942670339812
SINC_HALF_INTENSITY_X = 1.39155737825151
#: Gaussian exponent matching the sinc amplitude half-maximum (the usual 0.193).
GAUSSIAN_PM_GAMMA = math.log(2.0) / SINC_HALF_AMPLITUDE_X**2

#: Minimum samples per FWHM for any feature on either grid.
MIN_SAMPLES_PER_FWHM = 4.0

DOMAINS = ("spectral", "temporal")
UNITS = {"spectral": "rad/fs", "temporal": "fs"}


class AxisGrid:
    """Uniformly spaced, increasing coordinate axis.

    Simulation grids are built with :meth:`centered`, which follows the FFT
    layout ``(-n/2 ... n/2 - 1) * step``; measured scan axes may have any
    length and are built with :meth:`from_values`.
    """

    __slots__ = ("values", "step")

    def __init__(self, values, step=None):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise InputError("an axis needs at least two coordinates")
        if not np.all(np.isfinite(values)):
            raise InputError("axis coordinates must be finite")
        diffs = np.diff(values)
        if np.any(diffs <= 0):
            raise InputError("axis coordinates must be strictly increasing")
        if step is None:
            step = float(np.mean(diffs))
        if not np.allclose(diffs, step, rtol=1e-6, atol=0):
            raise InputError("axis coordinates must be uniformly spaced")
        values.setflags(write=False)
        self.values = values
        self.step = float(step)

    @classmethod
    def centered(cls, n: int, step: float) -> "AxisGrid":
        if n < 2 or n & (n - 1):
            raise InputError(f"grid size must be a power of two, got {n}")
        if not step > 0:
            raise InputError(f"grid step must be positive, got {step}")
        return cls((np.arange(n) - n // 2) * step, step)

    @classmethod
    def from_values(cls, values) -> "AxisGrid":
        return cls(values)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def span(self) -> float:
        return self.n * self.step

    @property
    def is_centered(self) -> bool:
        n = self.n
        return (n & (n - 1)) == 0 and self.values[n // 2] == 0.0

    def conjugate(self) -> "AxisGrid":
        """Discrete-Fourier conjugate grid, ``step' = 2 pi / (n step)``."""
        return AxisGrid.centered(self.n, 2.0 * math.pi / (self.n * self.step))

    def __eq__(self, other):
        return (isinstance(other, AxisGrid) and self.n == other.n
                and np.array_equal(self.values, other.values))

    def __repr__(self):
        return f"AxisGrid(n={self.n}, step={self.step:.6g}, start={self.values[0]:.6g})"


def _check_domain(domain):
    if domain not in DOMAINS:
        raise InputError(f"domain must be one of {DOMAINS}, got {domain!r}")


def _check_shape(values, grid_s, grid_i):
    if values.shape != (grid_s.n, grid_i.n):
        raise InputError(
            f"matrix shape {values.shape} does not match grids ({grid_s.n}, {grid_i.n})")


@dataclass(frozen=True, eq=False)
class JointAmplitude:
    """Complex two-photon amplitude on a signal x idler grid."""

    domain: str
    grid_s: AxisGrid
    grid_i: AxisGrid
    values: np.ndarray

    def __post_init__(self):
        _check_domain(self.domain)
        values = np.array(self.values, dtype=complex)
        _check_shape(values, self.grid_s, self.grid_i)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def cell(self) -> float:
        return self.grid_s.step * self.grid_i.step

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.cell))

    def normalized(self) -> "JointAmplitude":
        nrm = self.norm()
        if nrm == 0:
            raise DegenerateDataError("cannot normalize a zero amplitude")
        return JointAmplitude(self.domain, self.grid_s, self.grid_i, self.values / nrm)


@dataclass(frozen=True, eq=False)
class JointDensity:
    """Non-negative joint probability density with unit integral."""

    domain: str
    grid_s: AxisGrid
    grid_i: AxisGrid
    values: np.ndarray

    def __post_init__(self):
        _check_domain(self.domain)
        values = np.array(self.values, dtype=float)
        _check_shape(values, self.grid_s, self.grid_i)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def cell(self) -> float:
        return self.grid_s.step * self.grid_i.step

    def integral(self) -> float:
        return float(np.sum(self.values) * self.cell)

    @classmethod
    def from_values(cls, domain, grid_s, grid_i, values) -> "JointDensity":
        """Build a unit-integral density from arbitrary non-negative weights."""
        values = np.asarray(values, dtype=float)
        if np.any(values < 0):
            raise InputError("density values must be non-negative")
        total = values.sum() * grid_s.step * grid_i.step
        if not total > 0:
            raise DegenerateDataError("density has zero integral")
        return cls(domain, grid_s, grid_i, values / total)


@dataclass(frozen=True, eq=False)
class MarginalDensity:
    grid: AxisGrid
    values: np.ndarray

    def integral(self) -> float:
        return float(np.sum(self.values) * self.grid.step)


# ---------------------------------------------------------------------------
# model ingredients

def pump_sigma(config: ExperimentConfig) -> float:
    """Intensity standard deviation of the pump in the sum detuning [rad/fs]."""
    return config.pump_angular_fwhm / FWHM_PER_SIGMA


def phase_matching_fwhm(kind: str, window_fs: float) -> float:
    """Intensity FWHM of the phase-matching function in ``Ws - Wi`` [rad/fs]."""
    if not window_fs > 0:
        raise InputError(f"two-photon window must be positive, got {window_fs}")
    if kind == "sinc":
        return 4.0 * SINC_HALF_INTENSITY_X / window_fs
    if kind == "gaussian":
        return 4.0 * math.sqrt(math.log(2.0) / (2.0 * GAUSSIAN_PM_GAMMA)) / window_fs
    raise InputError(f"unknown phase-matching kind {kind!r}")


def pump_envelope(omega_plus, sigma_plus: float) -> np.ndarray:
    """Gaussian pump amplitude ``exp(-W+**2 / (4 sigma+**2))``.

    ``sigma_plus`` is the standard deviation of the pump *intensity*, so
    ``|alpha|**2`` has FWHM ``2 sqrt(2 ln 2) sigma_plus``.
    """
    if not sigma_plus > 0:
        raise InputError(f"pump sigma must be positive, got {sigma_plus}")
    omega_plus = np.asarray(omega_plus, dtype=float)
    return np.exp(-omega_plus**2 / (4.0 * sigma_plus**2))


def phase_matching(omega_minus, kind: str, window_fs: float) -> np.ndarray:
    if not window_fs > 0:
        raise InputError(f"two-photon window must be positive, got {window_fs}")
    x = np.asarray(omega_minus, dtype=float) * window_fs / 2.0
    if kind == "sinc":
        # np.sinc(y) = sin(pi y)/(pi y) and handles y = 0 exactly
        return np.sinc(x / np.pi)
    if kind == "gaussian":
        return np.exp(-GAUSSIAN_PM_GAMMA * x**2)
    raise InputError(f"unknown phase-matching kind {kind!r}")


def make_grids(config: ExperimentConfig) -> tuple[AxisGrid, AxisGrid]:
    """Spectral detuning grid and its conjugate time grid.

    The spectral half-span is ``grid_span_sigmas`` amplitude standard
    deviations of the broadest of pump, phase matching and gate.  Raises
    :class:`ResolutionError` if any spectral or temporal feature gets fewer
    than four samples per FWHM.
    """
    n = config.grid_points
    pm_fwhm = phase_matching_fwhm(config.pm_kind, config.window_fs)
    widths = {
        "pump": config.pump_angular_fwhm,
        "phase matching": pm_fwhm,
        "gate": config.gate_angular_fwhm,
    }
    sigma = max(fwhm_to_amplitude_sigma(w) for w in widths.values())
    half_span = config.grid_span_sigmas * sigma
    spectral = AxisGrid.centered(n, 2.0 * half_span / n)
    temporal = spectral.conjugate()

    spectral_features = {"pump bandwidth": widths["pump"],
                         "phase-matching bandwidth": pm_fwhm}
    temporal_features = {"gate duration": config.gate_duration_fs,
                         "pump duration": config.pump_duration_fs,
                         "two-photon window": config.window_fs}
    for grid, features, unit in ((spectral, spectral_features, "rad/fs"),
                                 (temporal, temporal_features, "fs")):
        for name, fwhm in features.items():
            samples = fwhm / grid.step
            if samples < MIN_SAMPLES_PER_FWHM:
                raise ResolutionError(
                    f"{name} ({fwhm:.4g} {unit}) spans only {samples:.2f} samples "
                    f"(step {grid.step:.4g} {unit}); adjust grid_points or grid_span_sigmas",
                    {"feature": name, "fwhm": fwhm, "step": grid.step, "samples": samples})
    return spectral, temporal


def build_jsa(config: ExperimentConfig) -> JointAmplitude:
    """Normalized joint spectral amplitude ``alpha(Ws + Wi) phi(Ws - Wi)``."""
    spectral, _ = make_grids(config)
    ws, wi = np.meshgrid(spectral.values, spectral.values, indexing="ij")
    values = pump_envelope(ws + wi, pump_sigma(config)) * phase_matching(
        ws - wi, config.pm_kind, config.window_fs)
    return JointAmplitude("spectral", spectral, spectral, values).normalized()


def to_temporal(jsa: JointAmplitude) -> JointAmplitude:
    """Centered unitary 2D DFT onto the conjugate time grids (flat spectral phase).

    Uses ``exp(-i W t)`` kernels, the sign convention of a field
    ``E(t) = int E(W) exp(-i W t) dW / 2 pi``.
    """
    if jsa.domain != "spectral":
        raise InputError("to_temporal expects a spectral-domain amplitude")
    return _transform(jsa, "temporal", np.fft.fft2)


def to_spectral(jta: JointAmplitude) -> JointAmplitude:
    """Inverse of :func:`to_temporal`."""
    if jta.domain != "temporal":
        raise InputError("to_spectral expects a temporal-domain amplitude")
    return _transform(jta, "spectral", np.fft.ifft2)


def _transform(a: JointAmplitude, domain: str, fft) -> JointAmplitude:
    for grid in (a.grid_s, a.grid_i):
        if not grid.is_centered:
            raise InputError("Fourier transforms need centered power-of-two grids")
    gs, gi = a.grid_s.conjugate(), a.grid_i.conjugate()
    out = np.fft.fftshift(fft(np.fft.ifftshift(a.values), norm="ortho"))
    # rescale so that sum |A|^2 dx dy is carried over unchanged
    out *= math.sqrt(a.cell / (gs.step * gi.step))
    return JointAmplitude(domain, gs, gi, out)


def build_jta(config: ExperimentConfig) -> JointAmplitude:
    return to_temporal(build_jsa(config))


def density(a: JointAmplitude) -> JointDensity:
    """Pointwise ``|A|**2`` renormalized to unit integral."""
    return JointDensity.from_values(a.domain, a.grid_s, a.grid_i, np.abs(a.values) ** 2)


def marginals(d: JointDensity) -> tuple[MarginalDensity, MarginalDensity]:
    """Signal and idler single-channel densities."""
    signal = d.values.sum(axis=1) * d.grid_i.step
    idler = d.values.sum(axis=0) * d.grid_s.step
    signal = signal / (signal.sum() * d.grid_s.step)
    idler = idler / (idler.sum() * d.grid_i.step)
    return MarginalDensity(d.grid_s, signal), MarginalDensity(d.grid_i, idler)


def moments(d: JointDensity) -> dict:
    """Means, variances and covariance of the coordinates under ``d``."""
    p = d.values / d.values.sum()
    x, y = d.grid_s.values, d.grid_i.values
    px, py = p.sum(axis=1), p.sum(axis=0)
    mx, my = px @ x, py @ y
    dx, dy = x - mx, y - my
    return {"mean_s": mx, "mean_i": my, "var_s": px @ dx**2, "var_i": py @ dy**2,
            "cov": dx @ p @ dy}


def correlation_coefficient(d: JointDensity) -> float:
    """Pearson correlation of signal and idler coordinates under ``d``."""
    m = moments(d)
    if m["var_s"] <= 0 or m["var_i"] <= 0:
        raise DegenerateDataError("density has zero variance along one axis")
    rho = m["cov"] / math.sqrt(m["var_s"] * m["var_i"])
    return float(min(1.0, max(-1.0, rho)))


def fwhm(x, y) -> float:
    """Full width at half maximum of a sampled single-peaked profile.

    Half-maximum crossings are located on a cubic spline through the
    samples, the nearest ones on either side of the peak.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    peak = int(np.argmax(y))
    half = y[peak] / 2.0
    if half <= 0:
        raise DegenerateDataError("profile has no positive peak")
    above = np.nonzero(y >= half)[0]
    if above[0] == 0 or above[-1] == y.size - 1:
        raise RangeError("profile does not fall below half maximum inside the axis")
    roots = CubicSpline(x, y).solve(half, extrapolate=False)
    left = roots[roots < x[peak]]
    right = roots[roots > x[peak]]
    if not left.size or not right.size:
        raise RangeError("could not bracket the half-maximum crossings")
    return float(right.min() - left.max())
