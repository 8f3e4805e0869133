"""Two-photon inelastic kernel and second-order coherences.

The two-photon scattering amplitude factorizes into the product of
single-photon envelopes plus an inelastic part proportional to the Kerr
nonlinearity U:

    Bbar(tau_c, tau_d) = B(tau_c, tau_d) + A(tau_c) A(tau_c + tau_d),

    B = -i U g(tau_c) e^{-f1(tau_c)} g(tau_c+tau_d) e^{-f1(tau_c+tau_d)}
        * int_{-inf}^{tau_c} e^{iU(t'-tau_c)} e^{2 f1(t')} A^2(t')/g^2(t') dt'.

Since A/g = -pi e^{-f1} W, the integrand reduces to pi^2 W^2 e^{iU(t'-tau_c)}
and the whole integral to the cached periodic kernel K(tau_c) of the engine,
leaving only bounded exponentials:

    B = -i U pi^2 g(tau_c) g(tau_c+tau_d) e^{f1(tau_c)-f1(tau_c+tau_d)} K(tau_c).

Second-order coherences follow as
g2_rr = |1 + B/(t t')|^2 and g2_ll = |1 + B/(r r')|^2; entries whose
denominator sits on an envelope node are flagged NaN instead of clamped,
because g2 genuinely diverges there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _engine
from ._backend import kernels
from .errors import ConfigurationError
from .single_photon import ScatterParams

__all__ = [
    "CoherenceGrid",
    "inelastic_B",
    "bbar",
    "coherence_grid",
    "constant_coupling_B",
    "large_U_B",
]

# relative scale below which a g2 denominator counts as an envelope node
EPS_DEN_REL = 1e-6

# drive counts as fast (tau_d horizon 4T instead of 10/gamma0) above this beta
FAST_BETA = 2.5


@dataclass(frozen=True)
class CoherenceGrid:
    """B and g2 sampled on a (tau_c, tau_d) rectangle.

    tau_c covers one period including both endpoints; tau_d >= 0 up to the
    chosen horizon.  g2 entries at undefined points (envelope nodes in the
    denominator) are NaN and serialize as empty CSV fields.
    """

    tau_c: np.ndarray
    tau_d: np.ndarray
    B: np.ndarray
    g2_rr: np.ndarray
    g2_ll: np.ndarray
    params: ScatterParams


def _check_taud(tau_d) -> np.ndarray:
    td = np.asarray(tau_d, dtype=float)
    if np.any(td < 0.0):
        raise ValueError("tau_d must be non-negative")
    return td


def inelastic_B(params: ScatterParams, tau_c, tau_d):
    """Inelastic two-photon kernel B(tau_c, tau_d); vanishes for U = 0.

    tau_c and tau_d broadcast; tau_d must be >= 0.
    """
    td = _check_taud(tau_d)
    tc = np.asarray(tau_c, dtype=float)
    if params.U == 0.0:
        out = np.zeros(np.broadcast(tc, td).shape, dtype=complex)
        return complex(0.0) if out.ndim == 0 else out
    eng = _engine.get_engine(params.protocol, params.delta)
    kt = _engine.get_ktable(params.protocol, params.delta, params.U)
    funcs = eng.funcs
    tw = _engine._wrap_half_open(tc, eng.T)
    ts = _engine._wrap_half_open(tc + td, eng.T)
    expfac = np.exp(-eng.lam * td + funcs.fosc(tw) - funcs.fosc(ts))
    out = (
        -1j
        * params.U
        * np.pi**2
        * funcs.g(tw)
        * funcs.g(ts)
        * expfac
        * kt.k_at(tw)
    )
    return complex(out) if out.ndim == 0 else out


def bbar(params: ScatterParams, tau_c, tau_d):
    """Full two-photon amplitude Bbar = B + A(tau_c) A(tau_c + tau_d)."""
    td = _check_taud(tau_d)
    tc = np.asarray(tau_c, dtype=float)
    eng = _engine.get_engine(params.protocol, params.delta)
    out = inelastic_B(params, tc, td) + eng.a_at(tc) * eng.a_at(tc + td)
    return complex(out) if np.ndim(out) == 0 else out


def constant_coupling_B(gamma: float, delta: float, U: float, tau_d):
    """Closed-form inelastic kernel for a time-independent coupling.

    B(tau_d) = -A^2 U/(U - 2(delta + i Gamma)) e^{i(delta + i Gamma) tau_d}
    with A = -i Gamma/(delta + i Gamma).
    """
    if not gamma > 0.0:
        raise ConfigurationError("gamma must be positive")
    td = _check_taud(tau_d)
    z = delta + 1j * gamma
    A = -1j * gamma / z
    out = -A * A * (U / (U - 2.0 * z)) * np.exp(1j * z * td)
    return complex(out) if np.ndim(tau_d) == 0 else out


def large_U_B(params: ScatterParams, tau_c, tau_d):
    """|U| -> inf limit of the inelastic kernel (two-level-system regime).

    Evaluated in the product form -pi^2 g(tau_c) g(tau_c+tau_d) P^2(tau_c)
    e^{f_osc(tau_c)-f_osc(tau_c+tau_d)} e^{i(delta + i gamma0) tau_d}, which
    is regular where g(tau_c) = 0 (the A^2/g ratio has a removable
    singularity there).
    """
    td = _check_taud(tau_d)
    tc = np.asarray(tau_c, dtype=float)
    eng = _engine.get_engine(params.protocol, params.delta)
    funcs = eng.funcs
    tw = _engine._wrap_half_open(tc, eng.T)
    ts = _engine._wrap_half_open(tc + td, eng.T)
    p = eng.p_at(tw)
    expfac = np.exp(-eng.lam * td + funcs.fosc(tw) - funcs.fosc(ts))
    out = -np.pi**2 * funcs.g(tw) * funcs.g(ts) * p * p * expfac
    return complex(out) if np.ndim(out) == 0 else out


def default_taud_horizon(params: ScatterParams) -> float:
    """4T for fast drives, 10/gamma0 otherwise."""
    if params.beta >= FAST_BETA:
        return 4.0 * params.protocol.period
    return 10.0 / params.gamma0


def coherence_grid(
    params: ScatterParams,
    n_tauc: int = 257,
    n_taud: int = 256,
    taud_horizon: Optional[float] = None,
    tau_c: Optional[np.ndarray] = None,
    eps_den_rel: float = EPS_DEN_REL,
) -> CoherenceGrid:
    """Evaluate B, g2_rr and g2_ll on a (tau_c, tau_d) rectangle.

    tau_c defaults to n_tauc uniform points spanning one closed period; an
    explicit array may be passed for figure cuts.  tau_d spans
    [0, taud_horizon] (rate units; default per drive speed).
    """
    eng = _engine.get_engine(params.protocol, params.delta)
    T = eng.T
    if tau_c is None:
        if n_tauc < 2:
            raise ConfigurationError("n_tauc must be >= 2")
        tau_c = np.linspace(-T / 2.0, T / 2.0, n_tauc)
    else:
        tau_c = np.asarray(tau_c, dtype=float)
    if n_taud < 2:
        raise ConfigurationError("n_taud must be >= 2")
    if taud_horizon is None:
        taud_horizon = default_taud_horizon(params)
    if not taud_horizon > 0.0:
        raise ConfigurationError("taud_horizon must be positive")
    tau_d = np.linspace(0.0, float(taud_horizon), n_taud)

    shift = tau_c[:, None] + tau_d[None, :]
    A1 = eng.a_at(tau_c)
    A2 = eng.a_at(shift)
    B = inelastic_B(params, tau_c[:, None], tau_d[None, :])

    t1, r1 = 1.0 + A1, A1
    t2, r2 = 1.0 + A2, A2
    # the amplitude-product denominator is compared against a threshold
    # linear in the grid's amplitude scale, so an identically vanishing
    # channel (e.g. resonant transmission at constant coupling) flags as
    # undefined as a whole
    eps_t = eps_den_rel * float(np.max(np.abs(t1)))
    eps_r = eps_den_rel * float(np.max(np.abs(r1)))
    g2_rr, g2_ll = kernels.coherence_combine(
        np.ascontiguousarray(B),
        np.ascontiguousarray(t1),
        np.ascontiguousarray(t2),
        np.ascontiguousarray(r1),
        np.ascontiguousarray(r2),
        eps_t,
        eps_r,
    )
    return CoherenceGrid(
        tau_c=tau_c, tau_d=tau_d, B=B, g2_rr=g2_rr, g2_ll=g2_ll, params=params
    )
