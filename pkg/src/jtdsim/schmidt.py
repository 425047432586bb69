"""Continuous-variable Schmidt decomposition and entanglement measures."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .biphoton import JointAmplitude, JointDensity
from .errors import InputError, NumericError

#: Eigenvalues below this (after normalization) are dropped.
EIGENVALUE_CUTOFF = 1e-12


@dataclass(frozen=True, eq=False)
class SchmidtSpectrum:
    """Descending Schmidt eigenvalues, summing to one."""

    eigenvalues: np.ndarray
    mode_count_kept: int

    @classmethod
    def from_weights(cls, weights, cutoff=EIGENVALUE_CUTOFF) -> "SchmidtSpectrum":
        """Normalize, truncate below ``cutoff``, renormalize and sort descending."""
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size == 0 or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InputError("Schmidt weights must be a non-empty non-negative vector")
        total = w.sum()
        if total <= 0:
            raise InputError("Schmidt weights sum to zero")
        w = w / total
        w = w[w >= cutoff]
        w = w / w.sum()
        # stable sort keeps the input order among ties
        w = w[np.argsort(-w, kind="stable")]
        w.setflags(write=False)
        return cls(w, int(w.size))

    def __len__(self):
        return self.mode_count_kept


@dataclass(frozen=True)
class EntanglementReport:
    entropy_bits: float
    purity: float
    schmidt_number: float

    def to_dict(self) -> dict:
        return {"entropy_bits": self.entropy_bits, "purity": self.purity,
                "schmidt_number": self.schmidt_number}


def _singular_values(matrix: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.svd(matrix, compute_uv=False)
    except np.linalg.LinAlgError as first:
        # gesdd occasionally fails where the slower QR-iteration driver succeeds
        try:
            return scipy.linalg.svd(matrix, compute_uv=False, lapack_driver="gesvd")
        except (np.linalg.LinAlgError, ValueError) as second:
            raise NumericError(
                "singular value decomposition did not converge",
                {"shape": matrix.shape, "finite": bool(np.all(np.isfinite(matrix))),
                 "max_abs": float(np.nanmax(np.abs(matrix))),
                 "gesdd": str(first), "gesvd": str(second)}) from second


def schmidt_decompose(a: JointAmplitude) -> SchmidtSpectrum:
    """Schmidt eigenvalues of a joint amplitude in either domain.

    The matrix is weighted by ``sqrt(dx dy)`` before the SVD, which makes
    the singular values approximate those of the continuous kernel.
    """
    s = _singular_values(a.values * math.sqrt(a.cell))
    return SchmidtSpectrum.from_weights(s**2)


def entropy(spectrum: SchmidtSpectrum) -> float:
    """Entanglement entropy in bits, ``-sum l log2 l`` with ``0 log 0 = 0``."""
    lam = spectrum.eigenvalues
    lam = lam[lam > 0]
    return float(max(0.0, -np.sum(lam * np.log2(lam))))


def purity(spectrum: SchmidtSpectrum) -> float:
    """Heralded single-photon purity ``sum l**2``."""
    return float(np.sum(spectrum.eigenvalues**2))


def schmidt_number(spectrum: SchmidtSpectrum) -> float:
    return 1.0 / purity(spectrum)


def report(spectrum: SchmidtSpectrum) -> EntanglementReport:
    p = purity(spectrum)
    return EntanglementReport(entropy(spectrum), p, 1.0 / p)


def gaussian_oracle(sum_width: float, diff_width: float) -> SchmidtSpectrum:
    """Analytic Schmidt spectrum of a two-variable Gaussian amplitude.

    For ``exp(-(x+y)**2/(4 a**2) - (x-y)**2/(4 b**2))`` the Mehler kernel
    gives ``l_n = (1 - mu**2) mu**(2n)`` with ``mu = |a - b| / (a + b)``.
    """
    a, b = float(sum_width), float(diff_width)
    if not (a > 0 and b > 0):
        raise InputError("Gaussian widths must be positive")
    mu = abs(a - b) / (a + b)
    if mu == 0.0:
        return SchmidtSpectrum.from_weights([1.0])
    r = mu * mu
    # number of terms until (1 - r) r**n drops below the cutoff
    count = int(math.ceil(math.log(EIGENVALUE_CUTOFF / (1.0 - r)) / math.log(r))) + 1
    n = np.arange(max(count, 1))
    return SchmidtSpectrum.from_weights((1.0 - r) * r**n)


def entropy_from_density(d: JointDensity) -> EntanglementReport:
    """Entanglement measures of a density under a flat spectral phase.

    The amplitude is taken as the non-negative square root of ``d``; no
    phase retrieval is attempted.
    """
    values = np.asarray(d.values, dtype=float)
    if np.any(values < 0):
        raise InputError("density has negative entries; subtract and clip first")
    amp = JointAmplitude(d.domain, d.grid_s, d.grid_i, np.sqrt(values)).normalized()
    return report(schmidt_decompose(amp))
