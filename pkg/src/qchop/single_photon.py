"""Single-photon transmission/reflection envelopes.

In the quasistationary regime a long resonant pulse scattered by the
periodically coupled cavity acquires a T-periodic envelope A(tau_c):
transmission t = 1 + A, reflection r = A, with

    A(tau_c) = -pi g(tau_c) e^{-f1(tau_c)} W(tau_c),
    W(t)     = int_{-inf}^t e^{f1(t')} g(t') dt',
    f1(t)    = -i (delta + i gamma0) t + f_osc(t).

Photon-number conservation fixes (1/T) int (|t|^2 + |r|^2) d tau_c = 1; the
residual of that identity is the primary numerical health check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _engine
from .errors import ApproximationDomainError, ConfigurationError
from .protocol import CouplingProtocol, RateKernel, _pfuncs, rate_kernel
from .quadrature import PeriodGrid

__all__ = [
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
]


@dataclass(frozen=True)
class ScatterParams:
    """Physics inputs for one scattering computation.

    delta is the detuning of the input carrier from the cavity resonance and
    U the Kerr nonlinearity, both in rate units.  The rate kernel is derived
    from the protocol once and cached on construction.
    """

    delta: float
    U: float
    protocol: CouplingProtocol
    kernel: Optional[RateKernel] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.protocol, CouplingProtocol):
            raise ConfigurationError("protocol must be a CouplingProtocol")
        if self.kernel is None:
            n = _engine.default_grid_n(self.protocol)
            object.__setattr__(self, "kernel", rate_kernel(self.protocol, n))
        else:
            ref = _pfuncs(self.protocol)
            gamma_ref = ref.gamma(self.kernel.nodes)
            consistent = (
                abs(self.kernel.T - self.protocol.period) <= 1e-9 * self.protocol.period
                and abs(self.kernel.gamma0 - ref.gamma0) <= 1e-9 * ref.gamma0
                and np.max(np.abs(self.kernel.gamma_samples - gamma_ref))
                <= 1e-9 * ref.gamma0
            )
            if not consistent:
                raise ConfigurationError("kernel was derived from a different protocol")

    @property
    def gamma0(self) -> float:
        return self.kernel.gamma0

    @property
    def beta(self) -> float:
        """Normalized drive speed omega / gamma0."""
        return self.protocol.omega / self.gamma0


@dataclass(frozen=True)
class EnvelopeGrid:
    """Envelope A sampled on one period, both endpoints included.

    tau_c runs over n+1 uniform nodes in [-T/2, T/2]; the first and last
    samples describe the same physical time, so A[0] == A[-1] up to the
    solver tolerance (wraparound periodicity check).
    """

    tau_c: np.ndarray
    A: np.ndarray
    params: ScatterParams

    @property
    def t_amp(self) -> np.ndarray:
        return 1.0 + self.A

    @property
    def r_amp(self) -> np.ndarray:
        return self.A

    @property
    def wraparound_error(self) -> float:
        return float(abs(self.A[0] - self.A[-1]))


def _resolve_n(params: ScatterParams, grid: Optional[PeriodGrid]) -> int:
    if grid is None:
        return _engine.default_grid_n(params.protocol)
    if abs(grid.T - params.protocol.period) > 1e-9 * params.protocol.period:
        raise ConfigurationError("grid period does not match the protocol period")
    return grid.n


def f1_eval(params: ScatterParams, t):
    """Phase function f1(t) = -i(delta + i gamma0) t + f_osc(t).

    Its real part grows like gamma0 * t, so e^{+f1} diverges toward late
    times; the evaluators only ever exponentiate differences.
    """
    eng = _engine.get_engine(params.protocol, params.delta)
    out = eng.f1(t)
    return complex(out) if np.ndim(t) == 0 else out


def w_period(params: ScatterParams, grid: Optional[PeriodGrid] = None) -> np.ndarray:
    """Raw history integral W on the grid nodes of one period.

    W itself carries the growing factor e^{f1}; it is exposed for validation
    (e.g. the constant-coupling closed form and the periodicity of
    e^{-f1} W).  Production consumers use ``envelope`` instead.
    """
    n = _resolve_n(params, grid)
    eng = _engine.get_engine(params.protocol, params.delta, n)
    return eng.w_at(eng.uniform_nodes[:-1])


def envelope(params: ScatterParams, grid: Optional[PeriodGrid] = None) -> EnvelopeGrid:
    """Periodic envelope A(tau_c) over one period [-T/2, T/2]."""
    n = _resolve_n(params, grid)
    eng = _engine.get_engine(params.protocol, params.delta, n)
    nodes = eng.uniform_nodes
    A = -np.pi * eng.funcs.g(nodes) * eng.P_uniform
    return EnvelopeGrid(tau_c=nodes, A=A, params=params)


def envelope_at(params: ScatterParams, tau_c):
    """Envelope A at arbitrary times (exact off-node propagation)."""
    eng = _engine.get_engine(params.protocol, params.delta)
    return eng.a_at(tau_c)


def adiabatic_envelope(params: ScatterParams, tau_c):
    """Instantaneous amplitude plus first adiabatic correction.

    A_ad = -i Gamma/(delta + i Gamma) [1 - i (gdot/g) (delta - i Gamma) /
    (delta + i Gamma)^2] evaluated at tau_c.  Undefined where g(tau_c) = 0:
    the expansion presumes a nonzero instantaneous coupling.
    """
    funcs = _pfuncs(params.protocol)
    t = np.asarray(tau_c, dtype=float)
    g = funcs.g(t)
    if np.any(g == 0.0):
        raise ApproximationDomainError(
            "adiabatic expansion undefined where the coupling vanishes"
        )
    gd = funcs.gdot(t)
    gam = funcs.gamma(t)
    z = params.delta + 1j * gam
    lead = -1j * gam / z
    corr = 1.0 - 1j * (gd / g) * (params.delta - 1j * gam) / (z * z)
    out = lead * corr
    return complex(out) if np.ndim(tau_c) == 0 else out


def normalization_residual(env: EnvelopeGrid) -> float:
    """| (1/T) int (|1+A|^2 + |A|^2) d tau_c  -  1 |.

    Uses breakpoint-aware Gauss-Legendre panels, so rectangular protocols
    (discontinuous A) are integrated to the same accuracy as smooth ones.
    """
    params = env.params
    eng = _engine.get_engine(params.protocol, params.delta, len(env.tau_c) - 1)
    mean = eng.period_mean_of_amplitude(
        lambda amp: np.abs(1.0 + amp) ** 2 + np.abs(amp) ** 2
    )
    return float(abs(mean.real - 1.0))


def amplitude_identity_residual(env: EnvelopeGrid) -> float:
    """Residual of the equivalent identity (1/T)[int |A|^2 + Re int A] = 0."""
    params = env.params
    eng = _engine.get_engine(params.protocol, params.delta, len(env.tau_c) - 1)
    mean_sq = eng.period_mean_of_amplitude(lambda amp: np.abs(amp) ** 2)
    mean_a = eng.period_mean_of_amplitude(lambda amp: amp)
    return float(abs(mean_sq.real + mean_a.real))


def g1_coherences(env: EnvelopeGrid, alpha: complex, L: float):
    """Equal-time first-order coherences of transmitted/reflected fields.

    Returns (g1_r, g1_l) = (|alpha|^2/L) (|t|^2, |r|^2) for a weak coherent
    input of amplitude alpha and pulse length L.
    """
    if not L > 0.0:
        raise ConfigurationError("pulse length L must be positive")
    scale = abs(alpha) ** 2 / L
    return scale * np.abs(env.t_amp) ** 2, scale * np.abs(env.r_amp) ** 2
