import json

import numpy as np
import pytest

import qchop._engine as engine_mod
import qchop.protocol as protocol_mod
import qchop.validation as validation_mod
from qchop import cli
from qchop.single_photon import ScatterParams, envelope, normalization_residual
from qchop.validation import CheckResult


def write_cfg(tmp_path, name="cfg.json", **data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run_cli(*argv):
    return cli.main(list(argv))


def read_rows(path):
    lines = [l for l in open(path).read().split("\n") if l and not l.startswith("#")]
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


class TestConfigValidation:
    def test_unknown_key_exits_2(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, protocol="constant", beta=1.0, bogus=3)
        assert run_cli("envelope", "--config", cfg) == 2
        assert "unknown config keys" in capsys.readouterr().err

    def test_beta_and_omega_both_given(self, tmp_path):
        cfg = write_cfg(tmp_path, protocol="constant", beta=1.0, omega=1.0)
        assert run_cli("envelope", "--config", cfg) == 2

    def test_neither_speed_given(self, tmp_path):
        cfg = write_cfg(tmp_path, protocol="constant")
        assert run_cli("envelope", "--config", cfg) == 2

    def test_bad_protocol_kind(self, tmp_path):
        cfg = write_cfg(tmp_path, protocol="triangle", beta=1.0)
        assert run_cli("envelope", "--config", cfg) == 2

    def test_small_grid_rejected(self, tmp_path):
        cfg = write_cfg(tmp_path, protocol="constant", beta=1.0, n_tauc=8)
        assert run_cli("envelope", "--config", cfg) == 2

    def test_missing_file(self, tmp_path):
        assert run_cli("envelope", "--config", str(tmp_path / "nope.json")) == 2

    def test_bad_thread_count(self, tmp_path):
        cfg = write_cfg(tmp_path, protocol="constant", beta=1.0)
        assert run_cli("envelope", "--config", cfg, "--threads", "0") == 2

    def test_unwritable_output_path(self, tmp_path):
        cfg = write_cfg(tmp_path, protocol="constant", beta=1.0)
        out = str(tmp_path / "missing_dir" / "env.csv")
        assert run_cli("envelope", "--config", cfg, "--out", out) == 2

    def test_degenerate_custom_protocol_exits_3(self, tmp_path):
        cfg = write_cfg(
            tmp_path, protocol="custom", omega=1.0, harmonics=[[0, 0.0, 0.0]]
        )
        assert run_cli("envelope", "--config", cfg) == 3


class TestEnvelopeCommand:
    def test_constant_reflection_column(self, tmp_path):
        cfg = write_cfg(tmp_path, protocol="constant", beta=1.0, n_tauc=33)
        out = str(tmp_path / "env.csv")
        assert run_cli("envelope", "--config", cfg, "--out", out) == 0
        header, rows = read_rows(out)
        assert header == ["tauc_over_T", "re_A", "im_A", "abs_r", "abs_t", "phase_r"]
        assert len(rows) == 33
        for row in rows:
            assert float(row[3]) == pytest.approx(1.0, abs=1e-9)

    def test_formatting_and_line_endings(self, tmp_path):
        cfg = write_cfg(tmp_path, protocol="on_off_cosine", beta=2.0, n_tauc=17)
        out = str(tmp_path / "env.csv")
        run_cli("envelope", "--config", cfg, "--out", out)
        raw = open(out, "rb").read()
        assert b"\r" not in raw
        header, rows = read_rows(out)
        # fixed 17-significant-digit scientific notation
        assert all("e" in cell for cell in rows[0])
        mantissa = rows[0][0].split("e")[0]
        assert len(mantissa.lstrip("-").replace(".", "")) == 17

    def test_stdout_when_no_out(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, protocol="constant", beta=1.0, n_tauc=17)
        assert run_cli("envelope", "--config", cfg) == 0
        assert "tauc_over_T" in capsys.readouterr().out

    def test_config_roundtrip_reproduces_bytes(self, tmp_path):
        cfg = write_cfg(
            tmp_path, protocol="sign_change_cosine", beta=3.0, n_tauc=33
        )
        out1 = str(tmp_path / "a.csv")
        run_cli("envelope", "--config", cfg, "--out", out1)
        echoed = next(
            l for l in open(out1).read().split("\n") if l.startswith("# config = ")
        )
        cfg2 = tmp_path / "echoed.json"
        cfg2.write_text(echoed[len("# config = "):])
        out2 = str(tmp_path / "b.csv")
        run_cli("envelope", "--config", str(cfg2), "--out", out2)
        assert open(out1, "rb").read() == open(out2, "rb").read()

    def test_json_format(self, tmp_path):
        cfg = write_cfg(tmp_path, protocol="constant", beta=1.0, n_tauc=17)
        out = str(tmp_path / "env.json")
        run_cli("envelope", "--config", cfg, "--format", "json", "--out", out)
        doc = json.loads(open(out).read())
        assert doc["command"] == "envelope"
        assert len(doc["columns"]["abs_r"]) == 17

    def test_custom_harmonics_match_builtin(self, tmp_path):
        # harmonic document for g0 (1 + cos wt) must reproduce the built-in
        g0 = (2.0 / (3.0 * np.pi)) ** 0.5
        cfg_c = write_cfg(
            tmp_path,
            "custom.json",
            protocol="custom",
            omega=1.0,
            harmonics=[[0, g0, 0.0], [1, g0 / 2, 0.0]],
            n_tauc=33,
        )
        cfg_b = write_cfg(
            tmp_path, "builtin.json", protocol="on_off_cosine", omega=1.0, n_tauc=33
        )
        out_c, out_b = str(tmp_path / "c.csv"), str(tmp_path / "b.csv")
        assert run_cli("envelope", "--config", cfg_c, "--out", out_c) == 0
        assert run_cli("envelope", "--config", cfg_b, "--out", out_b) == 0
        _, rows_c = read_rows(out_c)
        _, rows_b = read_rows(out_b)
        for rc, rb in zip(rows_c, rows_b):
            assert float(rc[1]) == pytest.approx(float(rb[1]), abs=1e-12)
            assert float(rc[3]) == pytest.approx(float(rb[3]), abs=1e-12)


class TestG2Command:
    def test_u_zero_all_coherent(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            protocol="on_off_cosine",
            beta=1.0,
            u_over_gamma0=0.0,
            n_tauc=17,
            n_taud=16,
        )
        out = str(tmp_path / "g2.csv")
        assert run_cli("g2", "--config", cfg, "--out", out) == 0
        header, rows = read_rows(out)
        assert header == ["tauc_over_T", "taud_gamma0", "g2_ll", "g2_rr", "re_B", "im_B"]
        assert len(rows) == 17 * 16
        for row in rows:
            if row[2]:
                assert float(row[2]) == pytest.approx(1.0, abs=1e-9)
            assert float(row[4]) == 0.0 and float(row[5]) == 0.0

    def test_undefined_entries_serialize_empty(self, tmp_path):
        # constant coupling on resonance: t = 0, so every g2_rr is undefined
        cfg = write_cfg(
            tmp_path,
            protocol="constant",
            beta=1.0,
            u_over_gamma0=4.0,
            n_tauc=17,
            n_taud=16,
        )
        out = str(tmp_path / "g2.csv")
        run_cli("g2", "--config", cfg, "--out", out)
        _, rows = read_rows(out)
        assert all(row[3] == "" for row in rows)
        assert all(row[2] != "" for row in rows)

    def test_json_nan_becomes_null(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            protocol="constant",
            beta=1.0,
            u_over_gamma0=4.0,
            n_tauc=17,
            n_taud=16,
        )
        out = str(tmp_path / "g2.json")
        run_cli("g2", "--config", cfg, "--format", "json", "--out", out)
        doc = json.loads(open(out).read())
        assert all(v is None for v in doc["columns"]["g2_rr"])

    def test_tauc_cut(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            protocol="on_off_cosine",
            beta=10.0,
            u_over_gamma0=2.0,
            tauc_cut=0.0,
            n_taud=32,
            taud_horizon=4.0,
        )
        out = str(tmp_path / "cut.csv")
        run_cli("g2", "--config", cfg, "--out", out)
        _, rows = read_rows(out)
        assert len(rows) == 32
        assert all(float(r[0]) == 0.0 for r in rows)


class TestDeterminism:
    def test_byte_identical_across_runs_and_threads(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            protocol="sign_change_cosine",
            beta=10.0,
            u_over_gamma0=4.0,
            n_tauc=33,
            n_taud=32,
        )
        outs = []
        for i, threads in enumerate(("1", "4", "1")):
            out = str(tmp_path / f"g2_{i}.csv")
            assert run_cli(
                "g2", "--config", cfg, "--out", out, "--threads", threads
            ) == 0
            outs.append(open(out, "rb").read())
        assert outs[0] == outs[1] == outs[2]

    def test_envelope_byte_identical(self, tmp_path):
        cfg = write_cfg(tmp_path, protocol="rect_on_off", beta=1.0,
                        g_off_over_g0=0.2, n_tauc=65)
        a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        run_cli("envelope", "--config", cfg, "--out", a, "--threads", "2")
        run_cli("envelope", "--config", cfg, "--out", b, "--threads", "8")
        assert open(a, "rb").read() == open(b, "rb").read()


class TestFigureCommand:
    def test_fig1b_emits_four_files(self, tmp_path, capsys):
        assert run_cli("figure", "fig1b", "--out", str(tmp_path)) == 0
        files = sorted(p.name for p in tmp_path.glob("*.csv"))
        assert files == [
            "fig1b_beta0.3.csv",
            "fig1b_beta1.csv",
            "fig1b_beta10.csv",
            "fig1b_beta3.csv",
        ]

    def test_unknown_preset_exits_2(self, tmp_path):
        assert run_cli("figure", "fig99", "--out", str(tmp_path)) == 2

    def test_fig3_is_single_cut(self, tmp_path):
        assert run_cli("figure", "fig3", "--out", str(tmp_path)) == 0
        _, rows = read_rows(str(tmp_path / "fig3.csv"))
        assert all(float(r[0]) == 0.0 for r in rows)

    @pytest.mark.parametrize(
        "preset", ["fig1b", "fig1d", "fig2", "fig3", "fig4a", "fig4b", "fig5"]
    )
    def test_every_preset_runs(self, tmp_path, preset):
        assert run_cli("figure", preset, "--out", str(tmp_path)) == 0
        assert list(tmp_path.glob(f"{preset}*.csv"))


class TestValidateCommand:
    def test_exit_codes_follow_results(self, tmp_path, monkeypatch):
        ok = [CheckResult("fine", 0.0, 1.0, True)]
        bad = [CheckResult("broken", 2.0, 1.0, False)]
        monkeypatch.setattr(validation_mod, "run_checks", lambda level: ok)
        out = str(tmp_path / "rep.json")
        assert run_cli("validate", "quick", "--out", out) == 0
        rep = json.loads(open(out).read())
        assert rep["passed"] is True and rep["n_checks"] == 1
        monkeypatch.setattr(validation_mod, "run_checks", lambda level: bad)
        assert run_cli("validate", "quick", "--out", out) == 1
        rep = json.loads(open(out).read())
        assert rep["passed"] is False and rep["n_failed"] == 1

    def test_corrupted_fosc_breaks_conservation(self, monkeypatch):
        # negative control: biasing f_osc must show up in the normalization
        original = protocol_mod._build_pfuncs

        def corrupted(protocol):
            funcs = original(protocol)
            true_fosc = funcs.fosc
            funcs.fosc = lambda t: true_fosc(t) + 0.05 * np.sin(
                protocol.omega * np.asarray(t, dtype=float)
            )
            return funcs

        try:
            monkeypatch.setattr(protocol_mod, "_build_pfuncs", corrupted)
            protocol_mod.clear_caches()
            engine_mod.clear_caches()
            from qchop.presets import unit_rate_protocol

            params = ScatterParams(
                delta=0.0, U=0.0, protocol=unit_rate_protocol("on_off_cosine", 1.0)
            )
            residual = normalization_residual(envelope(params))
            assert residual > 1e-6
        finally:
            monkeypatch.undo()
            protocol_mod.clear_caches()
            engine_mod.clear_caches()
