"""Simulation and analysis of ultrafast SPDC two-photon states.

Builds joint spectral/temporal amplitudes, predicts time-resolved
upconversion measurements, and quantifies frequency entanglement through
the Schmidt decomposition.
"""
__version__ = "0.1.0"

from .units import ExperimentConfig, load_config, dump_config  # noqa: E402
from .biphoton import (AxisGrid, JointAmplitude, JointDensity, build_jsa, build_jta,  # noqa: E402
                       correlation_coefficient, density, make_grids, marginals,
                       to_spectral, to_temporal)
from .schmidt import (SchmidtSpectrum, EntanglementReport, entropy,  # noqa: E402
                      entropy_from_density, gaussian_oracle, purity, schmidt_decompose)
from .measurement import (CountsSurface, GateProfile, Histogram1D, ScanSurface,  # noqa: E402
                          coincidence_response, common_delay_scan, gate_profile, jtd_scan,
                          synthesize_counts, theoretical_profiles)
from .analysis import analyze_jtd, fit_gaussian_1d, load_surface, subtract_background  # noqa: E402
from .sweep import entropy_vs_bandwidth, find_factorable_bandwidth  # noqa: E402
