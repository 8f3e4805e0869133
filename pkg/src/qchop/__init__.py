"""qchop: few-photon scattering from a periodically coupled nonlinear cavity.

Computes quasistationary single-photon transmission/reflection envelopes and
two-photon second-order coherences for a waveguide-coupled Kerr cavity whose
coupling g(t) is modulated periodically (a quantum analogue of an optical
chopper).
"""

from ._backend import BACKEND_NAME
from .errors import (
    ApproximationDomainError,
    ConfigurationError,
    DegenerateKernelError,
    DivergentTailError,
    NumericalError,
    OracleBudgetError,
    QchopError,
)
from .oracle import BruteResult, TruncationSpec, brute_bbar, brute_envelope
from .protocol import (
    CouplingProtocol,
    HarmonicSpectrum,
    RateKernel,
    adiabaticity_margin,
    coupling_derivative,
    fosc,
    gamma0_mean,
    gamma_rate,
    harmonics,
    load_protocol_document,
    rate_kernel,
    sample_coupling,
)
from .quadrature import PeriodGrid, cumulative_integral, geometric_tail, integrate_period
from .single_photon import (
    EnvelopeGrid,
    ScatterParams,
    adiabatic_envelope,
    amplitude_identity_residual,
    envelope,
    envelope_at,
    f1_eval,
    g1_coherences,
    normalization_residual,
    w_period,
)
from .two_photon import (
    CoherenceGrid,
    bbar,
    coherence_grid,
    constant_coupling_B,
    inelastic_B,
    large_U_B,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "QchopError",
    "ConfigurationError",
    "NumericalError",
    "DegenerateKernelError",
    "DivergentTailError",
    "ApproximationDomainError",
    "OracleBudgetError",
    "CouplingProtocol",
    "HarmonicSpectrum",
    "RateKernel",
    "sample_coupling",
    "coupling_derivative",
    "gamma_rate",
    "gamma0_mean",
    "fosc",
    "harmonics",
    "rate_kernel",
    "adiabaticity_margin",
    "load_protocol_document",
    "PeriodGrid",
    "integrate_period",
    "cumulative_integral",
    "geometric_tail",
    "ScatterParams",
    "EnvelopeGrid",
    "f1_eval",
    "w_period",
    "envelope",
    "envelope_at",
    "adiabatic_envelope",
    "normalization_residual",
    "amplitude_identity_residual",
    "g1_coherences",
    "CoherenceGrid",
    "inelastic_B",
    "bbar",
    "coherence_grid",
    "constant_coupling_B",
    "large_U_B",
    "TruncationSpec",
    "BruteResult",
    "brute_envelope",
    "brute_bbar",
]
