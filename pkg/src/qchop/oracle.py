"""Brute-force validation oracles.

These evaluators deliberately share nothing with the production path beyond
protocol sampling: the envelope oracle integrates the defining history
integral directly over a truncated window with composite trapezoid, and the
two-photon oracle evaluates the two time-ordered sectors of the reduced
two-dimensional integral

    Bbar = pi^2 g(tc+td) e^{-f1(tc+td)} g(tc) e^{-f1(tc)} (S1 + 2 S2),
    S1   = int_{tc}^{tc+td} e^{f1} g dt2 * int_{-inf}^{tc} e^{f1} g dt4,
    S2   = int_{-inf}^{tc} dt2 e^{-iU(tc-t2)} e^{f1(t2)} g(t2)
                * int_{-inf}^{t2} e^{f1(t4)} g(t4) dt4,

with no geometric-series closure and no integration-by-parts reduction, so
agreement with the production evaluators validates those reductions
numerically.  All exponents are evaluated as differences against f1(tau_c),
which keeps them bounded on the truncated window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConfigurationError, OracleBudgetError
from .protocol import _pfuncs
from .single_photon import ScatterParams

__all__ = ["TruncationSpec", "BruteResult", "brute_envelope", "brute_bbar"]

# brute_bbar refuses to run when steps_per_period**2 * n_periods exceeds this
DEFAULT_COST_BUDGET = 4.0e9


@dataclass(frozen=True)
class TruncationSpec:
    """History window (n_periods * T) and sampling density for the oracles."""

    n_periods: int
    steps_per_period: int

    def __post_init__(self):
        if self.n_periods < 1:
            raise ConfigurationError("n_periods must be >= 1")
        if self.steps_per_period < 256:
            raise ConfigurationError("steps_per_period must be >= 256")


class BruteResult(NamedTuple):
    value: complex
    truncation_bound: float


def default_spec(params: ScatterParams, steps_per_period: int) -> TruncationSpec:
    """Window long enough that gamma0 * window >= 30."""
    gt = params.gamma0 * params.protocol.period
    return TruncationSpec(
        n_periods=max(1, math.ceil(30.0 / gt)), steps_per_period=steps_per_period
    )


def _scales(funcs):
    """Coarse bounds max|g| and max|f_osc| used in the truncation bound."""
    probe = np.linspace(-funcs.T / 2.0, funcs.T / 2.0, 512)
    return float(np.max(np.abs(funcs.g(probe)))), float(
        np.max(np.abs(funcs.fosc(probe)))
    )


def _trapezoid_mesh(funcs, a: float, b: float, n: int) -> np.ndarray:
    """Uniform n+1 nodes on [a, b], refined at coupling discontinuities.

    Rectangular kinds get every jump time inside (a, b) inserted twice, a
    hair left and right of the jump, so the trapezoid sees the one-sided
    limits and keeps its clean O(h^2) convergence on each smooth piece.
    """
    t = np.linspace(a, b, n + 1)
    base = funcs.breakpoints
    if len(base) == 0:
        return t
    T = funcs.T
    eta = 1e-9 * T
    kmin = math.floor((a - float(np.max(base))) / T)
    kmax = math.ceil((b - float(np.min(base))) / T)
    ks = np.arange(kmin, kmax + 1)
    jumps = (base[None, :] + T * ks[:, None]).ravel()
    jumps = jumps[(jumps >= a - eta) & (jumps <= b + eta)]
    if len(jumps) == 0:
        return t
    flanks = np.concatenate([jumps - eta, jumps + eta])
    flanks = flanks[(flanks > a) & (flanks < b)]
    return np.unique(np.concatenate([t, flanks]))


def brute_envelope(
    params: ScatterParams, tau_c: float, spec: Optional[TruncationSpec] = None
) -> BruteResult:
    """Envelope by direct truncated integration of the defining integral.

    A = -pi g(tau_c) int_{tau_c - W}^{tau_c} e^{f1(t') - f1(tau_c)} g(t') dt'
    with composite trapezoid on n_periods*steps_per_period+1 nodes.  The
    reported bound majorizes the discarded tail:
    pi gmax^2 e^{2 max|f_osc|} e^{-gamma0 W} / gamma0.
    """
    if spec is None:
        spec = default_spec(params, 1024)
    funcs = _pfuncs(params.protocol)
    lam = params.gamma0 - 1j * params.delta
    T = params.protocol.period
    window = spec.n_periods * T
    n = spec.n_periods * spec.steps_per_period
    t = _trapezoid_mesh(funcs, tau_c - window, tau_c, n)
    f1c = lam * tau_c + float(funcs.fosc(tau_c))
    y = np.exp(lam * t + funcs.fosc(t) - f1c) * funcs.g(t)
    integral = np.trapezoid(y, t)
    value = -np.pi * float(funcs.g(tau_c)) * integral
    gmax, fmax = _scales(funcs)
    bound = (
        np.pi * gmax**2 * math.exp(2.0 * fmax) * math.exp(-params.gamma0 * window)
        / params.gamma0
    )
    return BruteResult(complex(value), float(bound))


def brute_bbar(
    params: ScatterParams,
    tau_c: float,
    tau_d: float,
    spec: Optional[TruncationSpec] = None,
    cost_budget: float = DEFAULT_COST_BUDGET,
) -> BruteResult:
    """Two-photon amplitude by direct evaluation of the two sectors.

    The inner time-ordered integral of S2 is accumulated cumulatively, and
    the tau_d leg of S1 is sampled at the same density as the history
    window.  Raises OracleBudgetError when the configured cost model
    (steps_per_period^2 * n_periods) exceeds the budget.
    """
    if tau_d < 0.0:
        raise ValueError("tau_d must be non-negative")
    if spec is None:
        spec = default_spec(params, 512)
    cost = float(spec.steps_per_period) ** 2 * spec.n_periods
    if cost > cost_budget:
        raise OracleBudgetError(
            f"brute_bbar cost {cost:.3g} exceeds budget {cost_budget:.3g}"
        )
    funcs = _pfuncs(params.protocol)
    lam = params.gamma0 - 1j * params.delta
    T = params.protocol.period
    window = spec.n_periods * T
    n = spec.n_periods * spec.steps_per_period
    t = _trapezoid_mesh(funcs, tau_c - window, tau_c, n)
    f1c = lam * tau_c + float(funcs.fosc(tau_c))
    y = np.exp(lam * t + funcs.fosc(t) - f1c) * funcs.g(t)  # e^{f1-f1c} g
    # inner cumulative integral: Y(t2) = int_{tc - W}^{t2} e^{f1 - f1c} g dt4
    Y = np.empty(len(t), dtype=complex)
    Y[0] = 0.0
    np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t), out=Y[1:])
    phase = np.exp(-1j * params.U * (tau_c - t))
    s2 = np.trapezoid(phase * y * Y, t)
    if tau_d > 0.0:
        m = max(int(math.ceil(tau_d / T * spec.steps_per_period)), 8)
        t2 = _trapezoid_mesh(funcs, tau_c, tau_c + tau_d, m)
        y2 = np.exp(lam * t2 + funcs.fosc(t2) - f1c) * funcs.g(t2)
        s1 = np.trapezoid(y2, t2) * Y[-1]
    else:
        s1 = 0.0 + 0.0j
    ts = tau_c + tau_d
    f1s = lam * ts + float(funcs.fosc(ts))
    pref = np.pi**2 * float(funcs.g(tau_c)) * float(funcs.g(ts)) * np.exp(f1c - f1s)
    value = pref * (s1 + 2.0 * s2)
    gmax, fmax = _scales(funcs)
    bound = (
        3.0
        * np.pi**2
        * gmax**4
        * math.exp(8.0 * fmax)
        * math.exp(-params.gamma0 * window)
        / params.gamma0**2
    )
    return BruteResult(complex(value), float(bound))
