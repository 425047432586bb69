"""Physical constants, bandwidth/duration conversions and the experiment config.

Internally times are in femtoseconds and angular frequencies in rad/fs, so
typical magnitudes stay within a few decades of unity.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass

from .errors import ConfigError, InputError

#: Speed of light in vacuum [m/s].
SPEED_OF_LIGHT = 299_792_458.0
#: Speed of light in nm/fs (the unit pair used throughout).
C_NM_PER_FS = SPEED_OF_LIGHT * 1e9 / 1e15

#: Time-bandwidth product of a transform-limited Gaussian, 2 ln 2 / pi.
GAUSSIAN_TBP = 2.0 * math.log(2.0) / math.pi

#: Ratio between intensity FWHM and intensity standard deviation of a Gaussian.
FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))

PM_KINDS = ("gaussian", "sinc")


@dataclass(frozen=True)
class BandwidthSpec:
    """A 3-dB (intensity FWHM) bandwidth in wavelength units around a carrier."""

    fwhm_wavelength: float  # nm
    center_wavelength: float  # nm

    def __post_init__(self):
        if not math.isfinite(self.center_wavelength) or self.center_wavelength <= 0:
            raise InputError(
                f"center wavelength must be positive, got {self.center_wavelength!r}")
        if not math.isfinite(self.fwhm_wavelength) or self.fwhm_wavelength < 0:
            raise InputError(
                f"bandwidth must be non-negative, got {self.fwhm_wavelength!r}")


def bandwidth_to_angular_frequency(spec: BandwidthSpec) -> float:
    """Angular-frequency FWHM in rad/s, ``2 pi c dlambda / lambda0**2``."""
    lam0 = spec.center_wavelength * 1e-9
    return 2.0 * math.pi * SPEED_OF_LIGHT * (spec.fwhm_wavelength * 1e-9) / lam0**2


def angular_fwhm_rad_per_fs(fwhm_nm: float, center_nm: float) -> float:
    """Same as :func:`bandwidth_to_angular_frequency` but in rad/fs."""
    return bandwidth_to_angular_frequency(BandwidthSpec(fwhm_nm, center_nm)) * 1e-15


def transform_limited_duration(freq_fwhm: float) -> float:
    """Intensity FWHM duration of a transform-limited Gaussian pulse.

    ``freq_fwhm`` is the FWHM of the intensity spectrum in cycles per unit
    time (Hz gives seconds, 1/fs gives fs).
    """
    if not freq_fwhm > 0 or not math.isfinite(freq_fwhm):
        raise InputError(f"frequency FWHM must be positive, got {freq_fwhm!r}")
    return GAUSSIAN_TBP / freq_fwhm


def duration_to_bandwidth(duration_fwhm: float) -> float:
    """Inverse of :func:`transform_limited_duration`."""
    if not duration_fwhm > 0 or not math.isfinite(duration_fwhm):
        raise InputError(f"duration must be positive, got {duration_fwhm!r}")
    return GAUSSIAN_TBP / duration_fwhm


def pulse_duration_fs(fwhm_nm: float, center_nm: float) -> float:
    """Transform-limited intensity FWHM [fs] of a pulse with the given 3-dB bandwidth."""
    nu = angular_fwhm_rad_per_fs(fwhm_nm, center_nm) / (2.0 * math.pi)
    return transform_limited_duration(nu)


def fwhm_to_amplitude_sigma(fwhm: float) -> float:
    """Standard deviation of the *amplitude* of a Gaussian with given intensity FWHM.

    An intensity ``exp(-x**2 / (2 s**2))`` has amplitude ``exp(-x**2 / (4 s**2))``
    whose own standard deviation is ``sqrt(2) * s``.
    """
    return fwhm / FWHM_PER_SIGMA * math.sqrt(2.0)


# ---------------------------------------------------------------------------
# experiment configuration

_FLOAT_KEYS = (
    "pump_center_wavelength_nm",
    "spdc_pump_fwhm_nm",
    "gate_fwhm_nm",
    "two_photon_window_ps",
    "rep_rate_mhz",
    "dwell_s",
    "background_rate_hz",
    "peak_singles_rate_hz",
    "peak_coincidence_rate_hz",
    "coincidence_window_ns",
    "grid_span_sigmas",
)
# dwell may be zero (empty acquisition); everything else must be strictly positive
_NONNEGATIVE_KEYS = ("dwell_s",)


@dataclass(frozen=True)
class ExperimentConfig:
    """All physical and numerical parameters of one simulation.

    Field names carry their unit and double as the keys of the JSON
    configuration document.
    """

    pump_center_wavelength_nm: float = 790.0
    spdc_pump_fwhm_nm: float = 6.0
    gate_fwhm_nm: float = 6.0
    pm_kind: str = "gaussian"
    two_photon_window_ps: float = 1.4
    rep_rate_mhz: float = 80.0
    dwell_s: float = 60.0
    background_rate_hz: float = 1900.0
    peak_singles_rate_hz: float = 5300.0
    peak_coincidence_rate_hz: float = 17.0
    coincidence_window_ns: float = 1.8
    grid_points: int = 256
    grid_span_sigmas: float = 8.0

    def __post_init__(self):
        for key in _FLOAT_KEYS:
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"expected a number, got {value!r}", key)
            if not math.isfinite(value):
                raise ConfigError(f"must be finite, got {value!r}", key)
            if key in _NONNEGATIVE_KEYS:
                if value < 0:
                    raise ConfigError(f"must be non-negative, got {value!r}", key)
            elif value <= 0:
                raise ConfigError(f"must be strictly positive, got {value!r}", key)
            object.__setattr__(self, key, float(value))
        n = self.grid_points
        if isinstance(n, bool) or not isinstance(n, int):
            raise ConfigError(f"expected an integer, got {n!r}", "grid_points")
        if n < 64 or n & (n - 1):
            raise ConfigError(f"must be a power of two >= 64, got {n}", "grid_points")
        if self.pm_kind not in PM_KINDS:
            raise ConfigError(
                f"must be one of {', '.join(PM_KINDS)}, got {self.pm_kind!r}", "pm_kind")

    # derived quantities in internal units ---------------------------------

    @property
    def pump_center_angular(self) -> float:
        """Pump carrier angular frequency [rad/fs]."""
        return 2.0 * math.pi * C_NM_PER_FS / self.pump_center_wavelength_nm

    @property
    def pump_angular_fwhm(self) -> float:
        """SPDC pump intensity FWHM [rad/fs]."""
        return angular_fwhm_rad_per_fs(self.spdc_pump_fwhm_nm, self.pump_center_wavelength_nm)

    @property
    def gate_angular_fwhm(self) -> float:
        """Upconversion gate intensity FWHM [rad/fs]."""
        return angular_fwhm_rad_per_fs(self.gate_fwhm_nm, self.pump_center_wavelength_nm)

    @property
    def gate_duration_fs(self) -> float:
        return pulse_duration_fs(self.gate_fwhm_nm, self.pump_center_wavelength_nm)

    @property
    def pump_duration_fs(self) -> float:
        return pulse_duration_fs(self.spdc_pump_fwhm_nm, self.pump_center_wavelength_nm)

    @property
    def window_fs(self) -> float:
        return self.two_photon_window_ps * 1e3

    @property
    def background_per_pulse(self) -> float:
        return self.background_rate_hz / (self.rep_rate_mhz * 1e6)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


CONFIG_KEYS = tuple(f.name for f in dataclasses.fields(ExperimentConfig))


def config_from_mapping(mapping) -> ExperimentConfig:
    if not isinstance(mapping, dict):
        raise ConfigError(f"configuration must be an object, got {type(mapping).__name__}")
    for key in mapping:
        if key not in CONFIG_KEYS:
            raise ConfigError("unknown key", key)
    return ExperimentConfig(**mapping)


def load_config(text: str) -> ExperimentConfig:
    """Parse a JSON configuration document; missing keys take their defaults."""
    if not text.strip():
        return ExperimentConfig()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed document: {exc}") from None
    return config_from_mapping(data)


def dump_config(config: ExperimentConfig) -> str:
    return json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n"


def config_hash(config: ExperimentConfig) -> str:
    """Short stable digest of a config, written into output headers."""
    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]
