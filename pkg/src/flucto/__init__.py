"""Fluctuation phenomenology of intermittent (shelved) resonance fluorescence.

A driven two-level transition with a metastable shelf, treated by an exact
matrix engine and by closed-form approximations valid for slow shelving.
"""

__version__ = "0.1.0"

from .chd import CHDRecord, chd_spectrum, h_correlation, h_split, integrated_chd_spectrum
from .dynamics import (
    BlochVector,
    CorrelationSeries,
    corr_second_order,
    corr_third_order_fluct,
    corr_third_order_sandwich,
    evolve_approx,
    evolve_exact,
)
from .errors import (
    DomainError,
    EngineMismatchError,
    FluctoError,
    IntegrationError,
    ParameterError,
    SingularSystemError,
    ZeroDenominatorError,
)
from .model import (
    AtomParams,
    EigenSet,
    LiouvillianSystem,
    SteadyState,
    bright_dark_times,
    build_liouvillian,
    eigenvalues,
    eigenvalues_approx,
    steady_state_analytic,
    steady_state_exact,
)
from .spectra import (
    SpectrumSeries,
    integrated_squeezing_spectrum,
    noise_correlator_spectra,
    power_spectrum,
    squeezing_spectrum,
    variance,
)
from .validation import ValidationReport, run_approximation_sweep, run_identity_suite

__all__ = [
    "__version__",
    "AtomParams",
    "LiouvillianSystem",
    "SteadyState",
    "EigenSet",
    "BlochVector",
    "CorrelationSeries",
    "SpectrumSeries",
    "CHDRecord",
    "ValidationReport",
    "build_liouvillian",
    "steady_state_exact",
    "steady_state_analytic",
    "eigenvalues",
    "eigenvalues_approx",
    "bright_dark_times",
    "evolve_exact",
    "evolve_approx",
    "corr_second_order",
    "corr_third_order_sandwich",
    "corr_third_order_fluct",
    "power_spectrum",
    "squeezing_spectrum",
    "noise_correlator_spectra",
    "variance",
    "integrated_squeezing_spectrum",
    "h_correlation",
    "h_split",
    "chd_spectrum",
    "integrated_chd_spectrum",
    "run_identity_suite",
    "run_approximation_sweep",
    "FluctoError",
    "ParameterError",
    "DomainError",
    "SingularSystemError",
    "EngineMismatchError",
    "ZeroDenominatorError",
    "IntegrationError",
]
