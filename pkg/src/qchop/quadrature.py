"""Shared quadrature utilities on uniform period grids.

Trapezoid sums on a periodic grid are spectrally accurate for smooth
periodic integrands; partial-period integrals use the cumulative trapezoid.
The semi-infinite history integrals that appear in the scattering formulas
reduce to a one-period integral times a geometric series over earlier
periods, summed in closed form by ``geometric_tail``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DivergentTailError

__all__ = ["PeriodGrid", "integrate_period", "cumulative_integral", "geometric_tail"]


@dataclass(frozen=True)
class PeriodGrid:
    """n uniform nodes t_i = -T/2 + i T/n covering one period [-T/2, T/2)."""

    n: int
    T: float

    def __post_init__(self):
        if self.n < 64:
            raise ConfigurationError("PeriodGrid needs n >= 64")
        if not self.T > 0.0:
            raise ConfigurationError("PeriodGrid needs T > 0")

    @property
    def h(self) -> float:
        return self.T / self.n

    @property
    def nodes(self) -> np.ndarray:
        return -self.T / 2.0 + self.T * np.arange(self.n) / self.n


def _check(values, grid: PeriodGrid) -> np.ndarray:
    values = np.asarray(values)
    if values.shape != (grid.n,):
        raise ConfigurationError(
            f"expected {grid.n} samples on the period grid, got shape {values.shape}"
        )
    return values


def integrate_period(values, grid: PeriodGrid) -> complex:
    """Trapezoid rule over the full period (wraps around periodically)."""
    values = _check(values, grid)
    return complex(values.sum() * grid.h)


def cumulative_integral(values, grid: PeriodGrid) -> np.ndarray:
    """F(t_i) = int_{-T/2}^{t_i} values dt by cumulative trapezoid; F(t_0)=0."""
    values = _check(values, grid)
    h = grid.h
    out = np.empty(grid.n, dtype=np.result_type(values.dtype, float))
    out[0] = 0.0
    np.cumsum(0.5 * (values[1:] + values[:-1]) * h, out=out[1:])
    return out


def geometric_tail(period_integral: complex, ratio: complex) -> complex:
    """Sum over infinitely many earlier periods: sum_{k>=1} x r^k = x r/(1-r).

    For physical inputs the ratio is exp(-i(delta + i gamma0)T) with
    gamma0 > 0, so |ratio| < 1 strictly.  A ratio at or above magnitude one
    signals a vanishing mean decay rate or misconfiguration.
    """
    r = complex(ratio)
    if abs(r) >= 1.0 - 1e-12:
        raise DivergentTailError(
            f"geometric tail ratio has magnitude {abs(r):.6g} >= 1"
        )
    return complex(period_integral) * r / (1.0 - r)
