"""Figure-reproduction presets.

All presets measure rates in units of the period-averaged decay gamma0: the
coupling amplitude g0 is solved per kind so that gamma0 = 1, and the drive
frequency follows from the normalized speed beta = omega/gamma0.  Every free
parameter is pinned here, including the sign of the nonlinearity (positive
throughout; the closed formulas keep the sign explicit, so either works).

    fig1b  on-off cosine envelopes, beta in {0.3, 1, 3, 10}, delta = 0
    fig1d  sign-change cosine envelopes, same beta set
    fig2   rectangular envelopes (on-off with g_off = g0/5, and sign-change)
    fig3   g2_ll(tau_c = 0, tau_d) cut, on-off, beta = 10, U = +2 gamma0
    fig4a  g2_ll map, sign-change, beta = 10, U = +4 gamma0
    fig4b  g2_ll map, sign-change, beta = 1,  U = +4 gamma0, tau_d to 15
    fig5   g2_rr map, on-off, beta = 10, U = +2 gamma0
"""

from __future__ import annotations

import math

from .errors import ConfigurationError
from .protocol import CouplingProtocol

__all__ = ["PRESETS", "unit_rate_protocol", "preset_runs"]

_FIG1_BETAS = (0.3, 1.0, 3.0, 10.0)


def unit_rate_g0(kind: str, duty: float = 0.5, g_off_over_g0: float = 0.0) -> float:
    """Coupling amplitude giving gamma0 = 1 for a built-in kind."""
    if kind == "constant" or kind == "rect_sign_change":
        return 1.0 / math.sqrt(math.pi)
    if kind == "on_off_cosine":
        return math.sqrt(2.0 / (3.0 * math.pi))
    if kind == "sign_change_cosine":
        return math.sqrt(2.0 / math.pi)
    if kind == "rect_on_off":
        mean = duty + (1.0 - duty) * g_off_over_g0**2
        return 1.0 / math.sqrt(math.pi * mean)
    raise ConfigurationError(f"no unit-rate amplitude for kind {kind!r}")


def unit_rate_protocol(
    kind: str, beta: float, duty: float = 0.5, g_off_over_g0: float = 0.0
) -> CouplingProtocol:
    """Built-in protocol with gamma0 = 1 and omega = beta."""
    g0 = unit_rate_g0(kind, duty, g_off_over_g0)
    return CouplingProtocol(
        kind=kind, g0=g0, omega=beta, duty=duty, g_off=g_off_over_g0 * g0
    )


# Each run is a flat config dict consumable by cli.RunConfig.
PRESETS = {
    "fig1b": {
        "command": "envelope",
        "runs": [
            (
                f"beta{beta:g}",
                {"protocol": "on_off_cosine", "beta": beta, "n_tauc": 513},
            )
            for beta in _FIG1_BETAS
        ],
    },
    "fig1d": {
        "command": "envelope",
        "runs": [
            (
                f"beta{beta:g}",
                {"protocol": "sign_change_cosine", "beta": beta, "n_tauc": 513},
            )
            for beta in _FIG1_BETAS
        ],
    },
    "fig2": {
        "command": "envelope",
        "runs": [
            (
                f"{tag}_beta{beta:g}",
                {
                    "protocol": kind,
                    "beta": beta,
                    "duty": 0.5,
                    "g_off_over_g0": 0.2 if kind == "rect_on_off" else 0.0,
                    "n_tauc": 513,
                },
            )
            for (tag, kind) in (
                ("onoff", "rect_on_off"),
                ("signchange", "rect_sign_change"),
            )
            for beta in _FIG1_BETAS
        ],
    },
    "fig3": {
        "command": "g2",
        "runs": [
            (
                "",
                {
                    "protocol": "on_off_cosine",
                    "beta": 10.0,
                    "u_over_gamma0": 2.0,
                    "tauc_cut": 0.0,
                    "n_taud": 513,
                    "taud_horizon": 8.0,
                },
            )
        ],
    },
    "fig4a": {
        "command": "g2",
        "runs": [
            (
                "",
                {
                    "protocol": "sign_change_cosine",
                    "beta": 10.0,
                    "u_over_gamma0": 4.0,
                    "n_tauc": 257,
                    "n_taud": 256,
                },
            )
        ],
    },
    "fig4b": {
        "command": "g2",
        "runs": [
            (
                "",
                {
                    "protocol": "sign_change_cosine",
                    "beta": 1.0,
                    "u_over_gamma0": 4.0,
                    "n_tauc": 257,
                    "n_taud": 256,
                    "taud_horizon": 15.0,
                },
            )
        ],
    },
    "fig5": {
        "command": "g2",
        "runs": [
            (
                "",
                {
                    "protocol": "on_off_cosine",
                    "beta": 10.0,
                    "u_over_gamma0": 2.0,
                    "n_tauc": 257,
                    "n_taud": 256,
                },
            )
        ],
    },
}


def preset_runs(name: str):
    """(command, [(suffix, config-dict), ...]) for a named preset."""
    try:
        spec = PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None
    return spec["command"], spec["runs"]
