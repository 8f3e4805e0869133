"""Command-line front end.

Subcommands:

    envelope --config cfg.json [--out file] [--format csv|json]
    g2       --config cfg.json [--out file] [--format csv|json]
    figure   <preset> [--out dir] [--format csv|json]
    validate [quick|full] [--out file]

Configs are flat JSON documents (see RunConfig); unknown keys are rejected.
Outputs are byte-stable: fixed 17-significant-digit scientific notation,
LF line endings, and a resolved-parameter echo in the header that reproduces
the run exactly.  Exit codes: 0 success, 1 validation failure, 2
configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, _backend, presets, validation
from .errors import ConfigurationError, NumericalError, QchopError
from .presets import unit_rate_g0
from .protocol import KINDS, CouplingProtocol, gamma0_mean
from .single_photon import ScatterParams, envelope_at
from .two_photon import coherence_grid

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


@dataclass(frozen=True)
class RunConfig:
    """Flat run configuration; exactly one of beta/omega must be given.

    Rates are in units of the mean decay gamma0 when g0 is omitted (it is
    then solved so gamma0 = 1).  taud_horizon is in units of 1/gamma0;
    tauc_cut (g2 only) pins a single central-time cut in units of T.
    """

    protocol: str
    beta: Optional[float] = None
    omega: Optional[float] = None
    g0: Optional[float] = None
    delta_over_gamma0: float = 0.0
    u_over_gamma0: float = 0.0
    duty: float = 0.5
    g_off_over_g0: float = 0.0
    harmonics: Optional[tuple] = None
    n_tauc: int = 257
    n_taud: int = 256
    taud_horizon: Optional[float] = None
    tauc_cut: Optional[float] = None
    out: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        if self.protocol not in KINDS:
            raise ConfigurationError(f"unknown protocol kind {self.protocol!r}")
        if (self.beta is None) == (self.omega is None):
            raise ConfigurationError("exactly one of beta/omega must be given")
        speed = self.beta if self.beta is not None else self.omega
        if not speed > 0.0:
            raise ConfigurationError("beta/omega must be positive")
        if self.n_tauc < 16 or self.n_taud < 16:
            raise ConfigurationError("grid sizes must be >= 16")
        if self.format not in ("csv", "json"):
            raise ConfigurationError("format must be csv or json")
        if self.protocol == "custom" and self.harmonics is None:
            raise ConfigurationError("custom protocol config needs 'harmonics'")
        if self.harmonics is not None:
            object.__setattr__(
                self,
                "harmonics",
                tuple(tuple(entry) for entry in self.harmonics),
            )


def load_config(data: dict) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    if "protocol" not in data:
        raise ConfigurationError("config needs a 'protocol' key")
    try:
        return RunConfig(**data)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from exc


def read_config_file(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("config document must be a JSON object")
    return load_config(data)


@dataclass(frozen=True)
class ResolvedRun:
    config: RunConfig
    params: ScatterParams
    gamma0: float
    omega: float
    beta: float


def resolve(config: RunConfig) -> ResolvedRun:
    """Build physics objects from a config (omega = beta*gamma0 when needed)."""
    kind = config.protocol
    proto_kwargs = {}
    if kind == "custom":
        by_m = {}
        for entry in config.harmonics:
            if len(entry) != 3:
                raise ConfigurationError("harmonics entries must be [m, re, im]")
            m, re, im = int(entry[0]), float(entry[1]), float(entry[2])
            if m < 0 or m in by_m:
                raise ConfigurationError("harmonics need unique m >= 0")
            by_m[m] = complex(re, im)
        coeffs = tuple(by_m.get(m, 0j) for m in range(max(by_m) + 1))
        proto_kwargs["harmonic_coeffs"] = coeffs
        g0 = 1.0  # unused by the custom evaluators
    elif config.g0 is not None:
        g0 = config.g0
    else:
        g0 = unit_rate_g0(kind, config.duty, config.g_off_over_g0)
    if kind in ("rect_on_off", "rect_sign_change"):
        proto_kwargs["duty"] = config.duty
        proto_kwargs["g_off"] = config.g_off_over_g0 * g0

    def build(omega):
        return CouplingProtocol(kind=kind, g0=g0, omega=omega, **proto_kwargs)

    if config.omega is not None:
        protocol = build(config.omega)
        gamma0 = gamma0_mean(protocol)
    else:
        # gamma0 of every kind is independent of omega, so one pass suffices
        gamma0 = gamma0_mean(build(1.0))
        protocol = build(config.beta * gamma0)
    params = ScatterParams(
        delta=config.delta_over_gamma0 * gamma0,
        U=config.u_over_gamma0 * gamma0,
        protocol=protocol,
    )
    return ResolvedRun(
        config=config,
        params=params,
        gamma0=gamma0,
        omega=protocol.omega,
        beta=protocol.omega / gamma0,
    )


# ---------------------------------------------------------------------------
# output formatting
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    if math.isnan(x):
        return ""
    return f"{x:.16e}"


def _config_json(config: RunConfig) -> str:
    data = {}
    for f in fields(RunConfig):
        v = getattr(config, f.name)
        if v is None or f.name in ("out", "format"):
            continue
        if f.name == "harmonics":
            v = [list(entry) for entry in v]
        data[f.name] = v
    return json.dumps(data, sort_keys=True)


def _header_lines(command: str, run: ResolvedRun) -> list[str]:
    return [
        f"# qchop {command} v{__version__}",
        f"# config = {_config_json(run.config)}",
        f"# resolved gamma0 = {_fmt(run.gamma0)}",
        f"# resolved omega = {_fmt(run.omega)}",
        f"# resolved beta = {_fmt(run.beta)}",
        f"# resolved period = {_fmt(run.params.protocol.period)}",
        f"# resolved delta = {_fmt(run.params.delta)}",
        f"# resolved U = {_fmt(run.params.U)}",
    ]


def _write_table(buf, command, run, names, columns):
    for line in _header_lines(command, run):
        buf.write(line + "\n")
    buf.write(",".join(names) + "\n")
    rows = len(columns[0])
    for i in range(rows):
        buf.write(",".join(_fmt(col[i]) for col in columns) + "\n")


def _write_json(buf, command, run, names, columns):
    payload = {
        "command": command,
        "version": __version__,
        "config": json.loads(_config_json(run.config)),
        "resolved": {
            "gamma0": run.gamma0,
            "omega": run.omega,
            "beta": run.beta,
            "period": run.params.protocol.period,
            "delta": run.params.delta,
            "U": run.params.U,
        },
        "columns": {
            name: [None if math.isnan(v) else v for v in map(float, col)]
            for name, col in zip(names, columns)
        },
    }
    json.dump(payload, buf, sort_keys=True)
    buf.write("\n")


def _emit(command, run, names, columns, out, fmt):
    sink = io.StringIO()
    if fmt == "csv":
        _write_table(sink, command, run, names, columns)
    else:
        _write_json(sink, command, run, names, columns)
    text = sink.getvalue()
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_envelope(run: ResolvedRun, out: Optional[str], fmt: str) -> None:
    params = run.params
    T = params.protocol.period
    tau_c = np.linspace(-T / 2.0, T / 2.0, run.config.n_tauc)
    A = envelope_at(params, tau_c)
    names = ["tauc_over_T", "re_A", "im_A", "abs_r", "abs_t", "phase_r"]
    columns = [
        tau_c / T,
        A.real,
        A.imag,
        np.abs(A),
        np.abs(1.0 + A),
        np.angle(A),
    ]
    _emit("envelope", run, names, columns, out, fmt)


def cmd_g2(run: ResolvedRun, out: Optional[str], fmt: str) -> None:
    params = run.params
    cfg = run.config
    horizon = None
    if cfg.taud_horizon is not None:
        horizon = cfg.taud_horizon / run.gamma0
    tau_c = None
    if cfg.tauc_cut is not None:
        tau_c = np.asarray([cfg.tauc_cut * params.protocol.period])
    grid = coherence_grid(
        params,
        n_tauc=cfg.n_tauc,
        n_taud=cfg.n_taud,
        taud_horizon=horizon,
        tau_c=tau_c,
    )
    T = params.protocol.period
    nc, nd = grid.B.shape
    tc = np.repeat(grid.tau_c / T, nd)
    td = np.tile(grid.tau_d * run.gamma0, nc)
    names = ["tauc_over_T", "taud_gamma0", "g2_ll", "g2_rr", "re_B", "im_B"]
    columns = [
        tc,
        td,
        grid.g2_ll.ravel(),
        grid.g2_rr.ravel(),
        grid.B.real.ravel(),
        grid.B.imag.ravel(),
    ]
    _emit("g2", run, names, columns, out, fmt)


def cmd_figure(name: str, outdir: Optional[str], fmt: str) -> None:
    command, runs = presets.preset_runs(name)
    base = Path(outdir) if outdir is not None else Path(".")
    base.mkdir(parents=True, exist_ok=True)
    ext = "csv" if fmt == "csv" else "json"
    for suffix, cfg_data in runs:
        run = resolve(load_config(dict(cfg_data)))
        stem = name if not suffix else f"{name}_{suffix}"
        path = str(base / f"{stem}.{ext}")
        if command == "envelope":
            cmd_envelope(run, path, fmt)
        else:
            cmd_g2(run, path, fmt)
        print(path)


def cmd_validate(level: str, out: Optional[str]) -> int:
    rep = validation.report(level)
    text = json.dumps(rep, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    for check in rep["checks"]:
        if not check["passed"]:
            print(
                f"FAIL {check['name']}: measured {check['measured']:.6g} "
                f"{check['comparison']} {check['tolerance']:.6g} violated",
                file=sys.stderr,
            )
    return EXIT_OK if rep["passed"] else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qchop",
        description="Few-photon scattering observables for a periodically "
        "modulated cavity coupling",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, metavar="N")

    for name in ("envelope", "g2"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--out", default=None, metavar="PATH")
        p.add_argument("--format", default=None, choices=("csv", "json"))

    p = sub.add_parser("figure", parents=[common])
    p.add_argument("preset", metavar="PRESET")
    p.add_argument("--out", default=None, metavar="DIR")
    p.add_argument("--format", default="csv", choices=("csv", "json"))

    p = sub.add_parser("validate", parents=[common])
    p.add_argument("level", nargs="?", default="quick", choices=("quick", "full"))
    p.add_argument("--out", default=None, metavar="PATH")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigurationError("--threads must be >= 1")
            _backend.set_num_threads(args.threads)
        if args.command == "validate":
            return cmd_validate(args.level, args.out)
        if args.command == "figure":
            cmd_figure(args.preset, args.out, args.format)
            return EXIT_OK
        config = read_config_file(args.config)
        run = resolve(config)
        out = args.out if args.out is not None else config.out
        fmt = args.format if args.format is not None else config.format
        if args.command == "envelope":
            cmd_envelope(run, out, fmt)
        else:
            cmd_g2(run, out, fmt)
        return EXIT_OK
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except QchopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
