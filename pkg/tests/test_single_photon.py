import math

import numpy as np
import pytest

from conftest import unit_params
from qchop.errors import ApproximationDomainError, ConfigurationError
from qchop.protocol import CouplingProtocol, adiabaticity_margin
from qchop.quadrature import PeriodGrid
from qchop.single_photon import (
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
from qchop._engine import get_engine

GAMMA = 1.0  # all unit_params protocols have gamma0 = 1


class TestF1:
    def test_constant_resonant_is_real_growth(self):
        params = unit_params("constant", 1.0)
        ts = np.linspace(-2, 2, 11)
        np.testing.assert_allclose(f1_eval(params, ts), ts, atol=1e-14)

    def test_zero_at_origin(self):
        for kind in ("on_off_cosine", "sign_change_cosine"):
            params = unit_params(kind, 1.0, delta=0.7)
            assert abs(f1_eval(params, 0.0)) < 1e-14

    def test_on_off_closed_form(self):
        # g0 = omega = 1, delta = 0: f1(t) = 1.5 pi t + pi(2 sin t + sin 2t/4)
        p = CouplingProtocol(kind="on_off_cosine", g0=1.0, omega=1.0)
        params = ScatterParams(delta=0.0, U=0.0, protocol=p)
        t = math.pi / 2
        expected = 1.5 * math.pi * t + math.pi * (2.0 + 0.0)
        assert f1_eval(params, t) == pytest.approx(expected, rel=1e-12)


class TestWPeriod:
    def test_constant_closed_form(self):
        # W(t) = g0 e^{Gamma t} / Gamma on resonance
        params = unit_params("constant", 1.0)
        g0 = params.protocol.g0
        grid = PeriodGrid(256, params.protocol.period)
        W = w_period(params, grid)
        np.testing.assert_allclose(
            W, g0 * np.exp(GAMMA * grid.nodes) / GAMMA, rtol=1e-10
        )

    @pytest.mark.parametrize("kind", ["on_off_cosine", "sign_change_cosine", "rect_on_off"])
    def test_damped_history_product_is_periodic(self, kind):
        # e^{-f1(t)} W(t) must be T-periodic
        params = unit_params(kind, 1.0, delta=0.3)
        eng = get_engine(params.protocol, params.delta)
        ts = np.linspace(-0.5, 0.5, 17) * params.protocol.period
        np.testing.assert_allclose(
            eng.p_at(ts + params.protocol.period), eng.p_at(ts), atol=1e-12
        )

    def test_on_off_frozen_value(self):
        # frozen from the brute-force oracle (40 periods, 16384 steps/period)
        params = unit_params("on_off_cosine", 1.0)
        eng = get_engine(params.protocol, 0.0)
        assert eng.w_at(0.0) == pytest.approx(0.3856344 + 0.0j, abs=2e-6)


class TestEnvelope:
    def test_constant_full_reflection(self):
        env = envelope(unit_params("constant", 1.0))
        np.testing.assert_allclose(env.A, -1.0, atol=1e-12)

    def test_constant_detuned_closed_form(self):
        env = envelope(unit_params("constant", 1.0, delta=GAMMA))
        np.testing.assert_allclose(env.A, (-1.0 - 1.0j) / 2.0, atol=1e-10)

    def test_on_off_quench_nodes(self):
        # coupling quench at Omega tau_c = +-pi gives perfect transmission
        params = unit_params("on_off_cosine", 1.0)
        T = params.protocol.period
        assert envelope_at(params, T / 2) == 0.0
        assert envelope_at(params, -T / 2) == 0.0

    def test_sign_change_fast_drive_scale(self):
        params = unit_params("sign_change_cosine", 10.0)
        env = envelope(params)
        target = -(1.0 / 10.0) * np.sin(2 * params.protocol.omega * env.tau_c)
        assert np.max(np.abs(env.A)) == pytest.approx(0.1, abs=0.02)
        np.testing.assert_allclose(env.A, target, atol=0.02)

    def test_on_off_frozen_value(self):
        # frozen from the brute-force oracle (40 periods, 16384 steps/period)
        params = unit_params("on_off_cosine", 1.0)
        assert envelope_at(params, 0.0) == pytest.approx(-1.1161821 + 0j, abs=2e-6)

    def test_wraparound_periodicity(self):
        for kind in ("on_off_cosine", "rect_sign_change"):
            env = envelope(unit_params(kind, 1.0, delta=0.5))
            assert env.wraparound_error < 1e-8

    def test_grid_period_mismatch_rejected(self):
        params = unit_params("constant", 1.0)
        with pytest.raises(ConfigurationError):
            envelope(params, PeriodGrid(128, 1.234 * params.protocol.period))

    def test_foreign_kernel_rejected(self):
        from qchop.protocol import rate_kernel

        p1 = unit_params("on_off_cosine", 1.0).protocol
        p2 = unit_params("sign_change_cosine", 1.0).protocol
        with pytest.raises(ConfigurationError):
            ScatterParams(delta=0.0, U=0.0, protocol=p2, kernel=rate_kernel(p1, 2048))


class TestAdiabaticEnvelope:
    def test_constant_resonant(self):
        params = unit_params("constant", 1.0)
        assert adiabatic_envelope(params, 0.3) == pytest.approx(-1.0)

    def test_constant_detuned_leading_term(self):
        params = unit_params("constant", 1.0, delta=GAMMA)
        assert adiabatic_envelope(params, 0.0) == pytest.approx((-1 - 1j) / 2)

    def test_slow_drive_plateau_agreement(self):
        # slow on-off drive at the plateau center: within 2% of the full result
        params = unit_params("on_off_cosine", 0.1)
        full = envelope_at(params, 0.0)
        approx = adiabatic_envelope(params, 0.0)
        assert abs(full - approx) < 0.02 * abs(full)

    def test_rejects_quenched_coupling(self):
        # on-off coupling vanishes exactly at half period (1 + cos(pi) == 0)
        params = unit_params("on_off_cosine", 1.0)
        quench = params.protocol.period / 2.0
        with pytest.raises(ApproximationDomainError):
            adiabatic_envelope(params, quench)

    def test_agreement_where_margin_small(self):
        for kind in ("constant", "on_off_cosine", "sign_change_cosine"):
            for beta in (0.05, 0.1):
                params = unit_params(kind, beta)
                env = envelope(params)
                marg = adiabaticity_margin(params.protocol, 0.0, env.tau_c)
                sel = marg < 0.05
                if not np.any(sel):
                    continue
                err = np.abs(env.A[sel] - adiabatic_envelope(params, env.tau_c[sel]))
                assert np.max(err) < 0.05


class TestNormalization:
    def test_constant_pointwise_unitary(self):
        for delta in (0.0, GAMMA, -GAMMA):
            env = envelope(unit_params("constant", 1.0, delta=delta))
            assert normalization_residual(env) < 1e-12

    def test_on_off_moderate_drive(self):
        env = envelope(unit_params("on_off_cosine", 1.0))
        assert normalization_residual(env) < 1e-8

    def test_rect_sign_change(self):
        env = envelope(unit_params("rect_sign_change", 3.0))
        assert normalization_residual(env) < 1e-6

    @pytest.mark.parametrize(
        "kind",
        ["constant", "on_off_cosine", "sign_change_cosine", "rect_on_off", "rect_sign_change"],
    )
    @pytest.mark.parametrize("beta", [0.1, 1.0, 10.0])
    @pytest.mark.parametrize("dfrac", [0.0, 1.0, -1.0])
    def test_conservation_sweep(self, kind, beta, dfrac):
        env = envelope(unit_params(kind, beta, delta=dfrac * GAMMA))
        tol = 1e-4 if kind.startswith("rect") else 1e-6
        assert normalization_residual(env) < tol

    def test_identity_residual(self):
        env = envelope(unit_params("sign_change_cosine", 0.5))
        assert amplitude_identity_residual(env) < 1e-10


class TestG1Coherences:
    def test_zero_input(self):
        env = envelope(unit_params("on_off_cosine", 1.0))
        g1r, g1l = g1_coherences(env, 0.0, 10.0)
        assert not np.any(g1r) and not np.any(g1l)

    def test_constant_full_reflection(self):
        env = envelope(unit_params("constant", 1.0))
        g1r, g1l = g1_coherences(env, 1.0, 1.0)
        np.testing.assert_allclose(g1l, 1.0, atol=1e-12)
        np.testing.assert_allclose(g1r, 0.0, atol=1e-12)

    def test_fast_drive_reflection_follows_coupling(self):
        params = unit_params("on_off_cosine", 10.0)
        env = envelope(params)
        _, g1l = g1_coherences(env, 1.0, 1.0)
        target = ((2.0 / 3.0) * (1 + np.cos(params.protocol.omega * env.tau_c))) ** 2
        assert np.max(np.abs(g1l - target)) < 0.15 * np.max(target)

    def test_invalid_length(self):
        env = envelope(unit_params("constant", 1.0))
        with pytest.raises(ConfigurationError):
            g1_coherences(env, 1.0, 0.0)


class TestRegimeFeatures:
    def test_fast_drive_on_off_asymptote(self):
        params = unit_params("on_off_cosine", 100.0)
        env = envelope(params)
        target = -(2.0 / 3.0) * (1 + np.cos(params.protocol.omega * env.tau_c))
        assert np.max(np.abs(env.A - target)) <= 0.05

    def test_fast_drive_sign_change_asymptote(self):
        params = unit_params("sign_change_cosine", 100.0)
        env = envelope(params)
        target = -(1.0 / 100.0) * np.sin(2 * params.protocol.omega * env.tau_c)
        assert np.max(np.abs(env.A - target)) <= 0.2 / 100.0

    @pytest.mark.parametrize("beta", [0.3, 1.0])
    def test_slow_drive_overshoot(self, beta):
        env = envelope(unit_params("on_off_cosine", beta))
        assert np.max(np.abs(env.r_amp)) > 1.0

    def test_extra_node_slow_sign_change(self):
        params = unit_params("sign_change_cosine", 0.5)
        env = envelope(params)
        th = params.protocol.omega * env.tau_c
        inside = (th > -np.pi / 2 + 1e-3) & (th < -1e-3)
        assert np.min(np.abs(env.A[inside])) < 5e-3 * np.max(np.abs(env.A))

    def test_plateau_slow_on_off(self):
        env = envelope(unit_params("on_off_cosine", 0.1))
        frac = np.mean(np.abs(env.A[:-1] + 1.0) < 0.05)
        assert frac >= 0.2
