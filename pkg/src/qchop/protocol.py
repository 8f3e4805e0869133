"""Periodic coupling protocols and the rate kernel derived from them.

A protocol is a real T-periodic coupling g(t).  Everything downstream
consumes the derived rate quantities

    Gamma(t)   = pi * g(t)**2          instantaneous decay rate
    gamma0     = period mean of Gamma  (the zeroth harmonic)
    f_osc(t)   = zero-mean antiderivative of Gamma(t) - gamma0

Built-in families:

    constant            g(t) = g0
    on_off_cosine       g(t) = g0 * (1 + cos(omega t))
    sign_change_cosine  g(t) = g0 * cos(omega t)
    rect_on_off         g0 on the duty window centered at t=0, g_off outside
    rect_sign_change    g0 on the duty window, -g0 outside
    custom              finite harmonic list or a user sampler

For every built-in kind g, dg/dt, Gamma and f_osc have closed forms, which
the evaluators below use directly; custom protocols go through a truncated
harmonic representation (spectral differentiation and integration).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, DegenerateKernelError

__all__ = [
    "KINDS",
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
]

KINDS = (
    "constant",
    "on_off_cosine",
    "sign_change_cosine",
    "rect_on_off",
    "rect_sign_change",
    "custom",
)

SMOOTH_KINDS = ("constant", "on_off_cosine", "sign_change_cosine", "custom")
RECT_KINDS = ("rect_on_off", "rect_sign_change")

# Harmonic truncation used when a custom sampler is converted to a spectrum.
SAMPLER_TRUNCATION = 128


@dataclass(frozen=True)
class CouplingProtocol:
    """A real, T-periodic coupling g(t) with period T = 2*pi/omega.

    g0 carries units of sqrt(rate)/sqrt(2*pi) so that pi*g0**2 is a rate.
    Rectangular kinds use ``duty`` (fraction of the period at the high level,
    window centered at t=0) and ``g_off`` (the low level, rect_on_off only).
    Custom kinds carry either ``harmonic_coeffs`` — coefficients c_m for
    m = 0..M of g(t) = sum_m c_m exp(-i m omega t) with c_{-m} = conj(c_m)
    implied — or a vectorized ``sampler`` g(t) of the stated period.
    """

    kind: str
    g0: float = 1.0
    omega: float = 1.0
    duty: float = 0.5
    g_off: float = 0.0
    harmonic_coeffs: Optional[tuple] = None
    sampler: Optional[Callable] = None  # compared/hashed by identity

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown protocol kind {self.kind!r}")
        if not (self.omega > 0.0) or not math.isfinite(self.omega):
            raise ConfigurationError(f"omega must be positive, got {self.omega}")
        if not math.isfinite(self.g0):
            raise ConfigurationError("g0 must be finite")
        if self.kind in RECT_KINDS and not (0.0 < self.duty < 1.0):
            raise ConfigurationError(f"duty must lie in (0, 1), got {self.duty}")
        if self.kind == "custom":
            if (self.harmonic_coeffs is None) == (self.sampler is None):
                raise ConfigurationError(
                    "custom protocol needs exactly one of harmonic_coeffs or sampler"
                )
            if self.harmonic_coeffs is not None:
                coeffs = tuple(complex(c) for c in self.harmonic_coeffs)
                if len(coeffs) == 0:
                    raise ConfigurationError("harmonic_coeffs must be non-empty")
                if abs(complex(coeffs[0]).imag) > 1e-14 * (1 + abs(coeffs[0])):
                    raise ConfigurationError("m=0 harmonic must be real for real g(t)")
                object.__setattr__(self, "harmonic_coeffs", coeffs)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega


@dataclass(frozen=True)
class HarmonicSpectrum:
    """Truncated Fourier representation g(t) = sum_m coeffs[m] e^{-i m omega t}.

    ``coeffs`` holds m = -M..M in ascending order and satisfies the Hermitian
    symmetry coeffs[-m] = conj(coeffs[m]) exactly (enforced by averaging).
    """

    coeffs: tuple
    M: int
    omega: float

    def __post_init__(self):
        if len(self.coeffs) != 2 * self.M + 1:
            raise ConfigurationError("coeffs must have length 2M+1")

    def coeff(self, m: int) -> complex:
        if abs(m) > self.M:
            return 0.0 + 0.0j
        return self.coeffs[m + self.M]

    def resynthesize(self, t):
        """Evaluate the truncated series at times t (real result)."""
        t = np.asarray(t, dtype=float)
        ms = np.arange(-self.M, self.M + 1)
        phases = np.exp(-1j * self.omega * np.multiply.outer(t, ms))
        return (phases @ np.asarray(self.coeffs)).real


@dataclass(frozen=True)
class RateKernel:
    """Sampled periodic rate quantities on a uniform one-period grid.

    ``gamma_samples`` holds Gamma(t_i) = pi g(t_i)^2 and ``fosc_samples`` the
    zero-mean antiderivative of Gamma - gamma0, both on nodes
    t_i = -T/2 + i T/n for i = 0..n-1.  ``fosc_at`` interpolates between the
    nodes (trigonometric for smooth kinds, piecewise linear for rectangular
    ones, matching the smoothness class of the true f_osc).
    """

    T: float
    gamma0: float
    nodes: np.ndarray
    gamma_samples: np.ndarray
    fosc_samples: np.ndarray
    smooth: bool

    def fosc_at(self, t):
        t = np.asarray(t, dtype=float)
        if self.smooth:
            n = len(self.nodes)
            spec = np.fft.fft(self.fosc_samples) / n
            ms = np.fft.fftfreq(n, d=1.0 / n)  # integer harmonic indices
            # samples start at -T/2: compensate the origin shift
            phase = np.exp(2j * np.pi * np.multiply.outer(t / self.T + 0.5, ms))
            return (phase @ spec).real
        x = (t + self.T / 2.0) % self.T
        return np.interp(
            x,
            np.append(self.nodes, self.nodes[0] + self.T) + self.T / 2.0,
            np.append(self.fosc_samples, self.fosc_samples[0]),
        )


def _wrap(t, T):
    """Reduce times to the principal period [-T/2, T/2)."""
    return (np.asarray(t, dtype=float) + T / 2.0) % T - T / 2.0


def _require_valid(protocol: CouplingProtocol) -> None:
    if not isinstance(protocol, CouplingProtocol):
        raise ConfigurationError("expected a CouplingProtocol")


def _custom_coeffs(protocol: CouplingProtocol) -> np.ndarray:
    """Full coefficient array m = -M..M for a custom protocol."""
    if protocol.harmonic_coeffs is not None:
        half = np.asarray(protocol.harmonic_coeffs, dtype=complex)
        M = len(half) - 1
        full = np.empty(2 * M + 1, dtype=complex)
        full[M:] = half
        full[:M] = np.conj(half[1:][::-1])
        full[M] = half[0].real
        return full
    # Sampler route: project on a fixed truncation via FFT.
    M = SAMPLER_TRUNCATION
    n = 8 * M
    T = protocol.period
    ts = -T / 2.0 + T * np.arange(n) / n
    vals = np.asarray(protocol.sampler(ts), dtype=float)
    if vals.shape != ts.shape:
        raise ConfigurationError("sampler must return an array matching its input")
    spec = np.fft.ifft(vals)
    ms = np.arange(-M, M + 1)
    full = spec[ms % n] * ((-1.0) ** ms)
    full = 0.5 * (full + np.conj(full[::-1]))
    return full


def _harmonic_sum(coeffs: np.ndarray, omega: float, t, weight=None):
    """sum_m w_m coeffs[m] e^{-i m omega t}, vectorized over t."""
    t = np.asarray(t, dtype=float)
    M = (len(coeffs) - 1) // 2
    ms = np.arange(-M, M + 1)
    w = coeffs if weight is None else coeffs * weight(ms)
    return np.exp(-1j * omega * np.multiply.outer(t, ms)) @ w


class _ProtocolFuncs:
    """Vectorized closed-form evaluators for one protocol.

    Provides g(t), gdot(t), gamma(t), fosc(t), the exact period mean gamma0
    and the list of discontinuity points of g inside [-T/2, T/2).  This is
    the single source the scattering engine draws from.
    """

    def __init__(self, protocol: CouplingProtocol):
        self.protocol = protocol
        self.omega = protocol.omega
        self.T = protocol.period
        self.kind = protocol.kind
        if protocol.kind == "custom":
            self._coeffs = _custom_coeffs(protocol)
            # Gamma(t) = pi g^2: harmonic coefficients by self-convolution
            self._gamma_coeffs = np.pi * np.convolve(self._coeffs, self._coeffs)
        self.gamma0 = self._gamma0()
        self.breakpoints = self._breakpoints()

    # -- g and derivatives -------------------------------------------------
    def g(self, t):
        p = self.protocol
        t = np.asarray(t, dtype=float)
        if p.kind == "constant":
            return np.full_like(t, p.g0)
        if p.kind == "on_off_cosine":
            return p.g0 * (1.0 + np.cos(p.omega * t))
        if p.kind == "sign_change_cosine":
            return p.g0 * np.cos(p.omega * t)
        if p.kind in RECT_KINDS:
            tw = _wrap(t, self.T)
            edge = p.duty * self.T / 2.0
            hi = np.abs(tw) <= edge + 1e-12 * self.T
            lo_val = p.g_off if p.kind == "rect_on_off" else -p.g0
            return np.where(hi, p.g0, lo_val)
        if p.sampler is not None:
            return np.asarray(p.sampler(t), dtype=float)
        return _harmonic_sum(self._coeffs, p.omega, t).real

    def gdot(self, t):
        p = self.protocol
        t = np.asarray(t, dtype=float)
        if p.kind == "constant":
            return np.zeros_like(t)
        if p.kind == "on_off_cosine":
            return -p.g0 * p.omega * np.sin(p.omega * t)
        if p.kind == "sign_change_cosine":
            return -p.g0 * p.omega * np.sin(p.omega * t)
        if p.kind in RECT_KINDS:
            # zero inside the flat pieces; the jumps themselves carry no
            # pointwise derivative
            return np.zeros_like(t)
        return _harmonic_sum(
            self._coeffs, p.omega, t, weight=lambda ms: -1j * ms * p.omega
        ).real

    def gamma(self, t):
        g = self.g(t)
        return np.pi * g * g

    # -- period means and f_osc --------------------------------------------
    def _gamma0(self) -> float:
        p = self.protocol
        if p.kind == "constant":
            return math.pi * p.g0**2
        if p.kind == "on_off_cosine":
            return 1.5 * math.pi * p.g0**2
        if p.kind == "sign_change_cosine":
            return 0.5 * math.pi * p.g0**2
        if p.kind == "rect_on_off":
            return math.pi * (p.duty * p.g0**2 + (1.0 - p.duty) * p.g_off**2)
        if p.kind == "rect_sign_change":
            return math.pi * p.g0**2
        M = (len(self._coeffs) - 1) // 2
        return float(self._gamma_coeffs[2 * M].real)

    def fosc(self, t):
        p = self.protocol
        t = np.asarray(t, dtype=float)
        w = p.omega
        if p.kind == "constant":
            return np.zeros_like(t)
        if p.kind == "on_off_cosine":
            a = math.pi * p.g0**2
            return a * (2.0 * np.sin(w * t) / w + np.sin(2.0 * w * t) / (4.0 * w))
        if p.kind == "sign_change_cosine":
            a = math.pi * p.g0**2
            return a * np.sin(2.0 * w * t) / (4.0 * w)
        if p.kind == "rect_sign_change":
            return np.zeros_like(t)  # Gamma is constant although g flips sign
        if p.kind == "rect_on_off":
            # continuous, piecewise linear, odd; zero-mean by oddness
            tw = _wrap(t, self.T)
            edge = p.duty * self.T / 2.0
            ghi = math.pi * p.g0**2 - self.gamma0
            glo = math.pi * p.g_off**2 - self.gamma0
            inner = ghi * tw
            outer = np.sign(tw) * (ghi * edge + glo * (np.abs(tw) - edge))
            return np.where(np.abs(tw) <= edge, inner, outer)
        # custom: integrate the nonzero Gamma harmonics term by term
        gc = self._gamma_coeffs
        M2 = (len(gc) - 1) // 2
        ms = np.arange(-M2, M2 + 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            wts = np.where(ms != 0, 1.0 / (-1j * ms * w), 0.0)
        return (np.exp(-1j * w * np.multiply.outer(t, ms)) @ (gc * wts)).real

    def _breakpoints(self) -> np.ndarray:
        if self.kind in RECT_KINDS:
            edge = self.protocol.duty * self.T / 2.0
            pts = [-edge, edge]
            return np.asarray(sorted(p for p in pts if -self.T / 2.0 <= p < self.T / 2.0))
        return np.empty(0)


_FUNCS_CACHE: dict = {}


def _pfuncs(protocol: CouplingProtocol) -> _ProtocolFuncs:
    key = protocol
    try:
        return _FUNCS_CACHE[key]
    except (KeyError, TypeError):
        funcs = _build_pfuncs(protocol)
        try:
            _FUNCS_CACHE[key] = funcs
        except TypeError:
            pass
        return funcs


def _build_pfuncs(protocol: CouplingProtocol) -> _ProtocolFuncs:
    return _ProtocolFuncs(protocol)


def clear_caches() -> None:
    """Drop memoized protocol evaluators (mainly for tests)."""
    _FUNCS_CACHE.clear()


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def sample_coupling(protocol: CouplingProtocol, t):
    """Evaluate g(t); t may be a scalar or array, reduced mod T internally."""
    _require_valid(protocol)
    out = _pfuncs(protocol).g(t)
    return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out


def coupling_derivative(protocol: CouplingProtocol, t):
    """dg/dt, analytic for built-ins, spectral for custom protocols."""
    _require_valid(protocol)
    out = _pfuncs(protocol).gdot(t)
    return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out


def gamma_rate(protocol: CouplingProtocol, t):
    """Instantaneous decay rate Gamma(t) = pi g(t)^2."""
    _require_valid(protocol)
    out = _pfuncs(protocol).gamma(t)
    return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out


def gamma0_mean(protocol: CouplingProtocol) -> float:
    """Period mean of Gamma(t) (exact closed form per kind)."""
    _require_valid(protocol)
    return _pfuncs(protocol).gamma0


def fosc(protocol: CouplingProtocol, t):
    """Zero-mean antiderivative of Gamma(t) - gamma0 (closed form/spectral)."""
    _require_valid(protocol)
    out = _pfuncs(protocol).fosc(t)
    return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out


def harmonics(protocol: CouplingProtocol, M: int) -> HarmonicSpectrum:
    """Fourier coefficients g^(m) = (1/T) int g(t) e^{i m omega t} dt, m=-M..M.

    Computed by FFT on >= 8M uniform samples; Hermitian symmetry is enforced
    exactly by averaging coefficients with their mirrored conjugates.
    """
    _require_valid(protocol)
    if M < 1:
        raise ConfigurationError("M must be >= 1")
    funcs = _pfuncs(protocol)
    n = max(8 * M, 256)
    T = protocol.period
    ts = -T / 2.0 + T * np.arange(n) / n
    spec = np.fft.ifft(funcs.g(ts))
    ms = np.arange(-M, M + 1)
    coeffs = spec[ms % n] * ((-1.0) ** ms)  # origin shift from -T/2
    coeffs = 0.5 * (coeffs + np.conj(coeffs[::-1]))
    return HarmonicSpectrum(coeffs=tuple(coeffs), M=M, omega=protocol.omega)


def rate_kernel(protocol: CouplingProtocol, n_grid: int = 2048) -> RateKernel:
    """Sample Gamma(t) and f_osc(t) on a uniform period grid.

    The cumulative integral for f_osc runs spectrally for smooth kinds and by
    composite trapezoid for rectangular ones; the additive constant is fixed
    by removing the period mean.  Raises DegenerateKernelError when the
    protocol is identically zero (gamma0 = 0 breaks every tail formula).
    """
    _require_valid(protocol)
    if n_grid < 64 or (n_grid & (n_grid - 1)) != 0:
        raise ConfigurationError("n_grid must be a power of two >= 64")
    funcs = _pfuncs(protocol)
    T = protocol.period
    nodes = -T / 2.0 + T * np.arange(n_grid) / n_grid
    gam = funcs.gamma(nodes)
    gamma0 = funcs.gamma0
    if gamma0 <= 1e-300:
        raise DegenerateKernelError("protocol has vanishing mean decay rate")
    dev = gam - gamma0
    if protocol.kind in RECT_KINDS:
        h = T / n_grid
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (dev[1:] + dev[:-1]) * h)])
        f = cum - cum.mean()
    else:
        # FFT bin k of samples starting at -T/2 holds (-1)^k c_{-k} of
        # dev(t) = sum_m c_m e^{-i m omega t}; integrating term by term
        # turns bin k into weight 1/(i k omega), and evaluating back on the
        # same nodes is one inverse FFT
        spec = np.fft.fft(dev)
        ms = np.fft.fftfreq(n_grid, d=1.0 / n_grid)
        with np.errstate(divide="ignore", invalid="ignore"):
            wts = np.where(ms != 0, 1.0 / (1j * ms * protocol.omega), 0.0)
        f = np.fft.ifft(spec * wts).real
        f = f - f.mean()
    return RateKernel(
        T=T,
        gamma0=gamma0,
        nodes=nodes,
        gamma_samples=gam,
        fosc_samples=f,
        smooth=protocol.kind not in RECT_KINDS,
    )


def adiabaticity_margin(protocol: CouplingProtocol, delta: float, t):
    """|gdot/g| / sqrt(delta^2 + Gamma(t)^2); +inf where g(t) = 0.

    Values much below one indicate the adiabatic-following regime.
    """
    _require_valid(protocol)
    funcs = _pfuncs(protocol)
    g = funcs.g(t)
    gd = funcs.gdot(t)
    gam = funcs.gamma(t)
    scale = np.sqrt(delta * delta + gam * gam)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(g != 0.0, np.abs(gd) / (np.abs(g) * scale), np.inf)
    return float(out) if np.ndim(t) == 0 else out


def load_protocol_document(source) -> CouplingProtocol:
    """Build a custom protocol from a harmonic-coefficient document.

    The document is JSON with keys ``omega`` and ``harmonics``, the latter a
    list of [m, re, im] triples with m >= 0 (negative harmonics are implied
    by Hermitian symmetry).  ``source`` may be a path, a file object or an
    already-decoded mapping.
    """
    if hasattr(source, "read"):
        doc = json.load(source)
    elif isinstance(source, dict):
        doc = source
    else:
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    if not isinstance(doc, dict) or "omega" not in doc or "harmonics" not in doc:
        raise ConfigurationError("protocol document needs 'omega' and 'harmonics'")
    entries = doc["harmonics"]
    by_m = {}
    for item in entries:
        try:
            m, re, im = int(item[0]), float(item[1]), float(item[2])
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigurationError(f"bad harmonic entry {item!r}") from exc
        if m < 0:
            raise ConfigurationError("harmonic entries must have m >= 0")
        if m in by_m:
            raise ConfigurationError(f"duplicate harmonic m={m}")
        by_m[m] = complex(re, im)
    if not by_m:
        raise ConfigurationError("protocol document lists no harmonics")
    M = max(by_m)
    coeffs = tuple(by_m.get(m, 0.0 + 0.0j) for m in range(M + 1))
    return CouplingProtocol(
        kind="custom", omega=float(doc["omega"]), harmonic_coeffs=coeffs
    )
