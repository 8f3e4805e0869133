import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qchop.errors import ConfigurationError, DivergentTailError
from qchop.quadrature import (
    PeriodGrid,
    cumulative_integral,
    geometric_tail,
    integrate_period,
)


class TestIntegratePeriod:
    def test_constant_gives_period(self):
        grid = PeriodGrid(128, 2 * math.pi)
        assert integrate_period(np.ones(128), grid) == pytest.approx(2 * math.pi)

    def test_pure_harmonic_vanishes(self):
        grid = PeriodGrid(256, 2 * math.pi)
        vals = np.exp(1j * grid.nodes)
        assert abs(integrate_period(vals, grid)) < 1e-14

    def test_cos_squared(self):
        T = 2 * math.pi
        grid = PeriodGrid(128, T)
        vals = np.cos(grid.nodes) ** 2
        assert integrate_period(vals, grid) == pytest.approx(T / 2, rel=1e-13)

    @pytest.mark.parametrize("m", [1, 2, 5, 17])
    def test_harmonics_vanish(self, m):
        grid = PeriodGrid(512, 3.0)
        omega = 2 * math.pi / 3.0
        vals = np.exp(1j * m * omega * grid.nodes)
        assert abs(integrate_period(vals, grid)) < 1e-13

    def test_length_mismatch(self):
        grid = PeriodGrid(128, 1.0)
        with pytest.raises(ConfigurationError):
            integrate_period(np.ones(100), grid)

    def test_grid_validation(self):
        with pytest.raises(ConfigurationError):
            PeriodGrid(32, 1.0)
        with pytest.raises(ConfigurationError):
            PeriodGrid(128, 0.0)


class TestCumulativeIntegral:
    def test_constant(self):
        grid = PeriodGrid(128, 4.0)
        F = cumulative_integral(np.ones(128), grid)
        np.testing.assert_allclose(F, grid.nodes + 2.0, atol=1e-13)

    def test_cosine_on_half_period_grid(self):
        # grid spanning [-pi/(2w), pi/(2w)): antiderivative (sin wt + 1)/w
        omega = 2.0
        grid = PeriodGrid(1024, math.pi / omega)
        vals = np.cos(omega * grid.nodes)
        F = cumulative_integral(vals, grid)
        np.testing.assert_allclose(
            F, (np.sin(omega * grid.nodes) + 1.0) / omega, atol=1e-5
        )

    def test_odd_integrand_closes_to_zero(self):
        grid = PeriodGrid(512, 2 * math.pi)
        vals = np.sin(grid.nodes)
        F = cumulative_integral(vals, grid)
        end = F[-1] + grid.h * 0.5 * (vals[-1] + vals[0])  # extrapolated T/2 value
        assert abs(end) < 1e-13

    def test_starts_at_zero(self):
        grid = PeriodGrid(64, 1.0)
        F = cumulative_integral(np.random.default_rng(0).normal(size=64), grid)
        assert F[0] == 0.0


class TestGeometricTail:
    def test_half_ratio(self):
        assert geometric_tail(1.0, 0.5) == pytest.approx(1.0)

    def test_zero_ratio(self):
        assert geometric_tail(3.0 + 1j, 0.0) == 0.0

    def test_divergent_ratio_rejected(self):
        with pytest.raises(DivergentTailError):
            geometric_tail(1.0, 1.0)
        with pytest.raises(DivergentTailError):
            geometric_tail(1.0, -1.0 + 1e-15j)

    def test_constant_coupling_tail_reproduces_envelope(self):
        # For g(t) = g0 the one-period integral of e^{f1} g has a closed
        # form; summing the earlier periods with the geometric tail must
        # reproduce A = -i Gamma/(delta + i Gamma) at the period edge.
        g0, delta = 0.8, 0.6
        gamma = math.pi * g0**2
        lam = gamma - 1j * delta
        T = 2 * math.pi
        c0 = g0 * (np.exp(lam * T / 2) - np.exp(-lam * T / 2)) / lam
        ratio = np.exp(1j * (delta + 1j * gamma) * T)
        w_edge = geometric_tail(c0, ratio)  # W at the left period edge
        A = -math.pi * g0 * np.exp(-lam * (-T / 2)) * w_edge
        expected = -1j * gamma / (delta + 1j * gamma)
        assert A == pytest.approx(expected, abs=1e-12)


@given(
    x=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    r=st.complex_numbers(max_magnitude=0.95, allow_nan=False, allow_infinity=False),
)
@settings(max_examples=200, deadline=None)
def test_tail_self_consistency(x, r):
    # the tail must satisfy x r + tail * r = tail
    t = geometric_tail(x, r)
    assert abs(x * r + t * r - t) <= 1e-9 * (1 + abs(t) + abs(x))
