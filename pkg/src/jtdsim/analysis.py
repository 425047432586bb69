"""Reduction of measured or synthesized scan data to entanglement figures."""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .biphoton import correlation_coefficient
from .csvio import load_surface  # noqa: F401  (re-exported)
from .errors import DegenerateDataError, FitError, InputError
from .measurement import CountsSurface, Histogram1D, ScanSurface
from .schmidt import EntanglementReport, entropy_from_density

log = logging.getLogger(__name__)

_FOUR_LN2 = 4.0 * math.log(2.0)
MAX_ITERATIONS = 200
STEP_TOLERANCE = 1e-8


@dataclass(frozen=True)
class GaussianFit:
    amplitude: float
    center: float
    fwhm: float
    offset: float
    rms_residual: float
    iterations: int = 0
    name: str = ""

    def __call__(self, t):
        return gaussian(np.asarray(t, dtype=float), self.amplitude, self.center,
                        self.fwhm, self.offset)

    def to_dict(self) -> dict:
        return {"name": self.name, "amplitude": self.amplitude, "center": self.center,
                "fwhm": self.fwhm, "offset": self.offset,
                "rms_residual": self.rms_residual}


@dataclass(frozen=True)
class AnalysisReport:
    entanglement: EntanglementReport
    correlation: float
    background_per_point: float
    points_used: int
    fits: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = self.entanglement.to_dict()
        out.update({"correlation": self.correlation,
                    "background_per_point": self.background_per_point,
                    "points_used": self.points_used,
                    "fits": [f.to_dict() for f in self.fits]})
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def gaussian(t, amplitude, center, fwhm, offset):
    return amplitude * np.exp(-_FOUR_LN2 * (t - center) ** 2 / fwhm**2) + offset


def _jacobian(p, t, y):
    amplitude, center, fwhm, _ = p
    e = np.exp(-_FOUR_LN2 * (t - center) ** 2 / fwhm**2)
    d_center = amplitude * e * 2.0 * _FOUR_LN2 * (t - center) / fwhm**2
    d_fwhm = amplitude * e * 2.0 * _FOUR_LN2 * (t - center) ** 2 / fwhm**3
    return np.column_stack([e, d_center, d_fwhm, np.ones_like(t)])


def _moment_guess(t, y):
    offset = float(y.min())
    w = y - offset
    total = w.sum()
    center = float(w @ t / total)
    var = float(w @ (t - center) ** 2 / total)
    # the moment width overshoots on a flat offset tail; never start wider than the axis
    fwhm = min(math.sqrt(max(var, 0.0)) * 2.0 * math.sqrt(2.0 * math.log(2.0)),
               t[-1] - t[0])
    return np.array([float(w.max()), center, max(fwhm, np.min(np.diff(t))), offset])


def fit_gaussian_1d(h: Histogram1D, name: str = "") -> GaussianFit:
    """Least-squares Gaussian-plus-offset fit (Levenberg-Marquardt).

    Starts from the moments of the offset-subtracted data and stops when
    the relative parameter step drops below 1e-8, or after 200 iterations.
    """
    t, y = h.delays, h.values
    if t.size < 5:
        raise FitError("need at least five points to fit a Gaussian", {"points": t.size})
    if np.ptp(y) == 0:
        raise FitError("histogram is constant", {"value": float(y[0])})
    p0 = _moment_guess(t, y)
    try:
        res = least_squares(
            lambda p: gaussian(t, *p) - y, p0, jac=lambda p: _jacobian(p, t, y),
            method="lm", xtol=STEP_TOLERANCE, ftol=1e-15, gtol=1e-15,
            x_scale="jac", max_nfev=MAX_ITERATIONS * 5)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise FitError(f"fit failed: {exc}", {"start": p0.tolist()}) from exc
    amplitude, center, width, offset = res.x
    width = abs(width)
    diagnostics = {"status": int(res.status), "message": res.message, "nfev": int(res.nfev),
                   "start": p0.tolist(), "end": res.x.tolist()}
    if res.status <= 0:
        raise FitError(f"fit did not converge: {res.message}", diagnostics)
    if not np.all(np.isfinite(res.x)) or width < np.min(np.diff(t)):
        raise FitError("fitted width collapsed below one delay step", diagnostics)
    rms = float(np.sqrt(np.mean(res.fun**2)))
    return GaussianFit(float(amplitude), float(center), float(width), float(offset),
                       rms, int(res.nfev), name)


def boundary_mean(values: np.ndarray) -> float:
    """Mean of the outermost rows and columns of a matrix."""
    mask = np.zeros(values.shape, dtype=bool)
    mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = True
    return float(values[mask].mean())


def _raw_values(c) -> np.ndarray:
    if isinstance(c, CountsSurface):
        return c.counts.astype(float)
    return np.asarray(c.values, dtype=float)


def subtract_background(c) -> ScanSurface:
    """Remove the boundary-frame mean, clip at zero and renormalize to unit integral."""
    values = _raw_values(c)
    background = boundary_mean(values)
    cleaned = np.clip(values - background, 0.0, None)
    if not np.any(cleaned > 0):
        raise DegenerateDataError(
            f"no signal left after subtracting a background of {background:.6g} per point")
    return ScanSurface(c.delays_s, c.delays_i, cleaned).unit_normalized()


def _fits(surface: ScanSurface) -> list[GaussianFit]:
    v = surface.values
    cuts = [("signal_marginal", surface.delays_s, v.sum(axis=1)),
            ("idler_marginal", surface.delays_i, v.sum(axis=0))]
    if np.array_equal(surface.delays_s, surface.delays_i):
        cuts.append(("diagonal", surface.delays_s, np.diag(v)))
    fits = []
    for name, t, y in cuts:
        try:
            fits.append(fit_gaussian_1d(Histogram1D(t, y, "coincidence"), name))
        except FitError as exc:
            log.warning("skipping %s fit: %s", name, exc)
    return fits


def analyze_jtd(data, subtract: bool | None = None, fit: bool = True) -> AnalysisReport:
    """Entropy, purity and correlation of a measured joint temporal density.

    ``data`` is a :class:`CountsSurface` (background subtracted by default)
    or a noiseless :class:`ScanSurface` (used as is by default).
    """
    if isinstance(data, CountsSurface):
        subtract = True if subtract is None else subtract
    elif isinstance(data, ScanSurface):
        subtract = False if subtract is None else subtract
    else:
        raise InputError(f"cannot analyze {type(data).__name__}")
    if subtract:
        surface = subtract_background(data)
        background = boundary_mean(_raw_values(data))
    else:
        raw = data.as_surface() if isinstance(data, CountsSurface) else data
        surface, background = raw.unit_normalized(), 0.0
    d = surface.to_density()
    return AnalysisReport(
        entanglement=entropy_from_density(d),
        correlation=correlation_coefficient(d),
        background_per_point=background,
        points_used=int(np.count_nonzero(surface.values)),
        fits=_fits(surface) if fit else [],
    )
