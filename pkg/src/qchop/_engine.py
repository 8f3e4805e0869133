"""Evaluation engine for the quasistationary scattering amplitudes.

The single-photon history integral W(t) = int_{-inf}^t e^{f1} g dt' grows
like e^{gamma0 t}, so the engine never forms W alone.  It works with the
periodic product

    P(t) = e^{-f1(t)} W(t),

built on one period from per-segment Gauss-Legendre integrals that are
referenced to their right endpoint (every exponent has non-positive real
part), chained by a damped scan, and closed over the infinitely many earlier
periods with the geometric tail of ratio e^{-i(delta + i gamma0) T}.

The two-photon inelastic kernel uses the same structure with the phase
2 f1(t) + i U t and the integrand P(t)^2:

    K(t) = int_{-inf}^t e^{iU(t'-t)} e^{2 f1(t') - 2 f1(t)} P(t')^2 dt'.

Rectangular protocols get their discontinuity points inserted as extra
segment boundaries so every quadrature panel sees a smooth integrand.
Off-node queries propagate exactly from the nearest node on the left with
one short Gauss-Legendre panel, so P, A and K are available at arbitrary
times with node-level accuracy.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from ._backend import kernels
from .errors import ConfigurationError, NumericalError
from .protocol import RECT_KINDS, CouplingProtocol, _pfuncs
from .quadrature import geometric_tail

_GLX, _GLW = leggauss(4)

DEFAULT_N = 2048
DEFAULT_N_RECT = 4096


def default_grid_n(protocol: CouplingProtocol) -> int:
    return DEFAULT_N_RECT if protocol.kind in RECT_KINDS else DEFAULT_N


def _wrap_half_open(t, T):
    return (np.asarray(t, dtype=float) + T / 2.0) % T - T / 2.0


class Engine:
    """Per-(protocol, delta, n) tables for P(t) and derived amplitudes."""

    def __init__(self, protocol: CouplingProtocol, delta: float, n: int):
        if n < 64:
            raise ConfigurationError("engine grid needs n >= 64")
        self.protocol = protocol
        self.delta = float(delta)
        self.n = int(n)
        self.funcs = _pfuncs(protocol)
        self.T = protocol.period
        self.gamma0 = self.funcs.gamma0
        self.lam = self.gamma0 - 1j * self.delta  # f1(t) = lam*t + fosc(t)
        self._build_nodes()
        self._build_P()

    # -- node layout ---------------------------------------------------------
    def _build_nodes(self):
        T, n = self.T, self.n
        uniform = -T / 2.0 + T * np.arange(n + 1) / n
        extra = []
        tol = 1e-12 * T
        for bp in self.funcs.breakpoints:
            j = np.searchsorted(uniform, bp)
            near = min(
                abs(bp - uniform[max(j - 1, 0)]), abs(bp - uniform[min(j, n)])
            )
            if near > tol:
                extra.append(bp)
        if extra:
            anodes = np.sort(np.concatenate([uniform, np.asarray(extra)]))
        else:
            anodes = uniform
        self.anodes = anodes
        self.uidx = np.searchsorted(anodes, uniform)

    # -- phases ----------------------------------------------------------------
    def f1(self, t):
        """f1(t) = -i (delta + i gamma0) t + f_osc(t) = lam t + f_osc(t)."""
        t = np.asarray(t, dtype=float)
        return self.lam * t + self.funcs.fosc(t)

    def _gl_referenced(self, a, b, phase, values):
        """int_a^b e^{phase(s) - phase(b)} values(s) ds by one GL panel each.

        a, b are same-shape arrays with b >= a; the exponent has non-positive
        real part throughout, so nothing overflows.
        """
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        mid = 0.5 * (a + b)
        hw = 0.5 * (b - a)
        sub = mid[..., None] + hw[..., None] * _GLX
        expo = phase(sub) - phase(b)[..., None]
        return ((np.exp(expo) * values(sub)) @ _GLW) * hw

    # -- P table ---------------------------------------------------------------
    def _build_P(self):
        an = self.anodes
        f1n = self.f1(an)
        seg = self._gl_referenced(an[:-1], an[1:], self.f1, self.funcs.g)
        decay = np.exp(f1n[:-1] - f1n[1:])
        Q = kernels.damped_scan(
            np.ascontiguousarray(decay), np.ascontiguousarray(seg)
        )
        rho = np.exp(-self.lam * self.T)
        P0 = Q[-1] + geometric_tail(Q[-1], rho)
        self.P_anodes = np.exp(f1n[0] - f1n) * P0 + Q
        self._f1_anodes = f1n

    @property
    def P_uniform(self) -> np.ndarray:
        """P at the n+1 uniform nodes (both period endpoints included)."""
        return self.P_anodes[self.uidx]

    @property
    def uniform_nodes(self) -> np.ndarray:
        return self.anodes[self.uidx]

    # -- point evaluation -------------------------------------------------------
    def _locate(self, tw):
        idx = np.searchsorted(self.anodes, tw, side="right") - 1
        return np.clip(idx, 0, len(self.anodes) - 2)

    def p_at(self, tau):
        """P at arbitrary times (periodic continuation)."""
        tau = np.asarray(tau, dtype=float)
        tw = _wrap_half_open(tau, self.T)
        idx = self._locate(tw)
        a = self.anodes[idx]
        carry = np.exp(self._f1_anodes[idx] - self.f1(tw)) * self.P_anodes[idx]
        corr = self._gl_referenced(a, tw, self.f1, self.funcs.g)
        out = carry + corr
        return complex(out) if tau.ndim == 0 else out

    def a_at(self, tau):
        """Envelope A(tau) = -pi g(tau) P(tau), periodic in tau."""
        tau = np.asarray(tau, dtype=float)
        tw = _wrap_half_open(tau, self.T)
        out = -np.pi * self.funcs.g(tw) * self.p_at(tw)
        return complex(out) if tau.ndim == 0 else out

    def w_at(self, tau):
        """Raw history integral W(tau) = e^{f1(tau)} P(tau); may be huge."""
        tau = np.asarray(tau, dtype=float)
        tw = _wrap_half_open(tau, self.T)
        f1v = self.f1(tw)
        if np.max(f1v.real) > 700.0:
            raise NumericalError(
                "raw W overflows double precision at this drive speed; "
                "work with the envelope instead"
            )
        out = np.exp(f1v) * self.p_at(tw)
        return complex(out) if tau.ndim == 0 else out

    # -- exact periodic averages --------------------------------------------------
    def period_mean_of_amplitude(self, func):
        """(1/T) int_0^T func(A(t)) dt with breakpoint-aware GL panels.

        func maps a complex amplitude array to a real/complex array; the
        average is machine-accurate even for discontinuous rect couplings.
        """
        a, b = self.anodes[:-1], self.anodes[1:]
        mid = 0.5 * (a + b)
        hw = 0.5 * (b - a)
        sub = mid[:, None] + hw[:, None] * _GLX
        amp = -np.pi * self.funcs.g(sub) * self.p_at(sub)
        return (func(amp) @ _GLW) @ hw / self.T


class KTable:
    """Two-photon kernel table K(t) for one (engine, U) pair."""

    def __init__(self, engine: Engine, U: float):
        self.engine = engine
        self.U = float(U)
        self.lam2 = 2.0 * engine.lam + 1j * self.U
        self._build()

    def phase2(self, t):
        t = np.asarray(t, dtype=float)
        return self.lam2 * t + 2.0 * self.engine.funcs.fosc(t)

    def _psq(self, t):
        p = self.engine.p_at(t)
        return p * p

    def _build(self):
        eng = self.engine
        an = eng.anodes
        h2n = self.phase2(an)
        seg = eng._gl_referenced(an[:-1], an[1:], self.phase2, self._psq)
        decay = np.exp(h2n[:-1] - h2n[1:])
        Q = kernels.damped_scan(
            np.ascontiguousarray(decay), np.ascontiguousarray(seg)
        )
        rho2 = np.exp(-self.lam2 * eng.T)
        K0 = Q[-1] + geometric_tail(Q[-1], rho2)
        self.K_anodes = np.exp(h2n[0] - h2n) * K0 + Q
        self._h2_anodes = h2n

    def k_at(self, tau):
        tau = np.asarray(tau, dtype=float)
        eng = self.engine
        tw = _wrap_half_open(tau, eng.T)
        idx = eng._locate(tw)
        a = eng.anodes[idx]
        carry = np.exp(self._h2_anodes[idx] - self.phase2(tw)) * self.K_anodes[idx]
        corr = eng._gl_referenced(a, tw, self.phase2, self._psq)
        out = carry + corr
        return complex(out) if tau.ndim == 0 else out


@lru_cache(maxsize=64)
def _engine_cached(protocol: CouplingProtocol, delta: float, n: int) -> Engine:
    return Engine(protocol, delta, n)


@lru_cache(maxsize=64)
def _ktable_cached(
    protocol: CouplingProtocol, delta: float, U: float, n: int
) -> KTable:
    return KTable(_engine_cached(protocol, delta, n), U)


def get_engine(protocol: CouplingProtocol, delta: float, n: int | None = None) -> Engine:
    if n is None:
        n = default_grid_n(protocol)
    try:
        return _engine_cached(protocol, float(delta), int(n))
    except TypeError:
        return Engine(protocol, float(delta), int(n))


def get_ktable(
    protocol: CouplingProtocol, delta: float, U: float, n: int | None = None
) -> KTable:
    if n is None:
        n = default_grid_n(protocol)
    try:
        return _ktable_cached(protocol, float(delta), float(U), int(n))
    except TypeError:
        return KTable(get_engine(protocol, delta, n), float(U))


def clear_caches() -> None:
    _engine_cached.cache_clear()
    _ktable_cached.cache_clear()
