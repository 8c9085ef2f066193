"""CLI contract: subcommands, exit codes, strict config, stable CSV output."""

import json
import subprocess
import sys

import pytest

from jetlag.cli import TRAJECTORY_HEADER, main


def run_cli(*args):
    return main(list(args))


@pytest.fixture()
def cfg_path(tmp_path):
    cfg = {
        "model": "monolayer",
        "params": {"m": 1.0, "p": 10.0, "V_abs": 1000.0, "R0": 1.0},
        "initial_state": {"t": 0.0, "r": 0.5, "phi": 0.0, "rdot": -1.0, "phidot": 0.1},
        "t_end": 1e-3,
        "validate": {"n_points": 6},
        "resonant": {"n_samples": 50},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return str(path)


class TestConfig:
    def test_unknown_key_rejected(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"mdoel": "monolayer"}')
        assert run_cli("simulate", "--config", str(path)) == 2
        assert "unknown configuration key" in capsys.readouterr().err

    def test_nested_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"params": {"mass": 2.0}}')
        assert run_cli("simulate", "--config", str(path)) == 2

    def test_wrong_type_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"t_end": "soon"}')
        assert run_cli("simulate", "--config", str(path)) == 2

    def test_missing_file(self):
        assert run_cli("simulate", "--config", "/nonexistent.json") == 2

    def test_bad_model_name(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"model": "spherical_cow"}')
        assert run_cli("simulate", "--config", str(path)) == 2


class TestEval:
    def test_smoke(self, cfg_path, tmp_path, capsys):
        csv = tmp_path / "row.csv"
        rc = run_cli("eval", "--config", cfg_path, "--point", "0.001,0.5,0,-1,0.2",
                     "--csv", str(csv))
        assert rc == 0
        out = capsys.readouterr().out
        for name in ("g11", "g22", "G1", "G2", "N11", "EYM"):
            assert name in out
        header = csv.read_text().splitlines()[0]
        assert header.startswith("t,r,phi,rdot,phidot,closed_g11,oracle_g11")

    def test_rdot_zero_names_precondition(self, cfg_path, capsys):
        rc = run_cli("eval", "--config", cfg_path, "--point", "0.001,0.5,0,0,0.2")
        assert rc == 3
        assert "rdot" in capsys.readouterr().err

    def test_oracle_only_leaves_closed_blank(self, cfg_path, capsys):
        rc = run_cli("eval", "--config", cfg_path, "--point", "0.001,0.5,0,-1,0.2",
                     "--oracle-only")
        assert rc == 0
        lines = capsys.readouterr().out.splitlines()
        g11 = next(l for l in lines if l.startswith("g11"))
        assert len(g11.split()) == 2  # name + oracle column only

    def test_malformed_point(self, cfg_path):
        assert run_cli("eval", "--config", cfg_path, "--point", "1,2,3") == 2


class TestSimulate:
    def test_csv_schema_and_determinism(self, cfg_path, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run_cli("simulate", "--config", cfg_path, "--out", str(out1)) == 0
        assert run_cli("simulate", "--config", cfg_path, "--out", str(out2)) == 0
        body1 = (out1 / "trajectory.csv").read_bytes()
        body2 = (out2 / "trajectory.csv").read_bytes()
        assert body1 == body2
        header = body1.decode().splitlines()[0]
        assert header == ",".join(TRAJECTORY_HEADER)
        assert header == "t,r,phi,rdot,phidot,E_inst,H,H_YM,EYM,g11,event"

    def test_numbers_round_trip(self, cfg_path, tmp_path):
        out = tmp_path / "o"
        run_cli("simulate", "--config", cfg_path, "--out", str(out))
        lines = (out / "trajectory.csv").read_text().splitlines()
        row = lines[2].split(",")
        for cell in row[:10]:
            v = float(cell)
            assert f"{v:.17g}" == cell  # 17 significant digits round-trip

    def test_free_polar_radial_column(self, tmp_path):
        cfg = {
            "model": "free_polar",
            "initial_state": {"t": 0.0, "r": 1.0, "phi": 0.0, "rdot": 1.0, "phidot": 0.0},
            "t_end": 1.0,
        }
        path = tmp_path / "fp.json"
        path.write_text(json.dumps(cfg))
        out = tmp_path / "o"
        assert run_cli("simulate", "--config", str(path), "--out", str(out)) == 0
        lines = (out / "trajectory.csv").read_text().splitlines()[1:]
        for line in lines:
            cells = line.split(",")
            if cells[-1]:
                continue
            t, r = float(cells[0]), float(cells[1])
            assert abs(r - (1.0 + t)) < 1e-8

    def test_increasing_time_and_finite(self, cfg_path, tmp_path):
        out = tmp_path / "o"
        run_cli("simulate", "--config", cfg_path, "--out", str(out))
        lines = (out / "trajectory.csv").read_text().splitlines()[1:]
        ts = [float(l.split(",")[0]) for l in lines if not l.split(",")[-1]]
        assert all(b > a for a, b in zip(ts, ts[1:]))


class TestResonant:
    def test_columns(self, cfg_path, tmp_path):
        out = tmp_path / "o"
        assert run_cli("resonant", "--config", cfg_path, "--out", str(out)) == 0
        lines = (out / "resonant.csv").read_text().splitlines()
        assert lines[0] == "t,r0,r0dot,residual_eq21,residual_eq22,closed_form_r0,closed_form_residual"
        # closed-form columns stay empty without --closed-form
        assert lines[1].endswith(",,")
        for line in lines[1:]:
            assert float(line.split(",")[4]) < 1e-6  # eq22 residual

    def test_closed_form_flag_populates(self, cfg_path, tmp_path):
        out = tmp_path / "o"
        assert run_cli("resonant", "--config", cfg_path, "--closed-form", "--out", str(out)) == 0
        line = (out / "resonant.csv").read_text().splitlines()[1]
        cells = line.split(",")
        assert cells[5] != "" and cells[6] != ""

    def test_plateau_summary_printed(self, cfg_path, tmp_path, capsys):
        out = tmp_path / "o"
        assert run_cli("resonant", "--config", cfg_path, "--out", str(out)) == 0
        assert "plateau" in capsys.readouterr().out


class TestDeviation:
    def test_affine_column(self, cfg_path, tmp_path):
        out = tmp_path / "o"
        assert run_cli("deviation", "--config", cfg_path, "--out", str(out)) == 0
        lines = (out / "deviation.csv").read_text().splitlines()
        assert lines[0] == "t,delta_r,delta_rdot,delta_phi,delta_phidot,affine_residual"
        for line in lines[1:]:
            cells = line.split(",")
            assert float(cells[5]) < 1e-8  # slope-1 intercept-0 fit
            assert float(cells[1]) == 0.0  # zero initial data, zero forcing

    def test_compose_adds_r(self, cfg_path, tmp_path):
        out = tmp_path / "o"
        assert run_cli("deviation", "--config", cfg_path, "--compose", "--out", str(out)) == 0
        lines = (out / "deviation.csv").read_text().splitlines()
        assert lines[0].endswith(",r")
        rs = [float(l.split(",")[-1]) for l in lines[1:]]
        assert all(b < a for a, b in zip(rs, rs[1:]))  # decaying envelope


class TestValidate:
    def test_report_and_exit(self, cfg_path, tmp_path):
        out = tmp_path / "o"
        assert run_cli("validate", "--config", cfg_path, "--out", str(out)) == 0
        data = json.loads((out / "discrepancy_report.json").read_text())
        assert data["summary"]["n_flagged_unexplained"] == 0

    def test_determinism(self, cfg_path, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_cli("validate", "--config", cfg_path, "--out", str(a))
        run_cli("validate", "--config", cfg_path, "--out", str(b))
        assert (a / "discrepancy_report.json").read_bytes() == (b / "discrepancy_report.json").read_bytes()

    def test_negative_control_detected(self, cfg_path, tmp_path):
        out = tmp_path / "o"
        assert run_cli("validate", "--config", cfg_path, "--negative-control",
                       "--out", str(out)) == 0

    def test_seed_override_changes_report(self, cfg_path, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_cli("validate", "--config", cfg_path, "--out", str(a))
        run_cli("validate", "--config", cfg_path, "--seed", "9", "--out", str(b))
        assert (a / "discrepancy_report.json").read_bytes() != (b / "discrepancy_report.json").read_bytes()


def test_all_outputs_byte_identical(cfg_path, tmp_path):
    # the determinism contract covers every emitted file, not just simulate
    for cmd, fname, extra in (
        ("resonant", "resonant.csv", ["--closed-form"]),
        ("deviation", "deviation.csv", ["--compose"]),
    ):
        a, b = tmp_path / f"{cmd}_a", tmp_path / f"{cmd}_b"
        assert run_cli(cmd, "--config", cfg_path, *extra, "--out", str(a)) == 0
        assert run_cli(cmd, "--config", cfg_path, *extra, "--out", str(b)) == 0
        assert (a / fname).read_bytes() == (b / fname).read_bytes()


class TestSweep:
    def test_index_written(self, tmp_path):
        cfg = {
            "model": "monolayer",
            "sweep": {"r": [0.3, 0.5, 2], "rdot": [-2.0, -1.0, 2],
                      "phidot_values": [0.0], "t_end": 2e-4},
        }
        path = tmp_path / "sw.json"
        path.write_text(json.dumps(cfg))
        out = tmp_path / "o"
        assert run_cli("sweep", "--config", path.as_posix(), "--out", str(out)) == 0
        lines = (out / "index.csv").read_text().splitlines()
        assert lines[0].startswith("run,r0,rdot0,phidot0,status")
        assert len(lines) == 5  # header + 2x2 grid
        assert (out / "run_000.csv").exists()


def test_eval_other_models(tmp_path, capsys):
    fp = tmp_path / "fp.json"
    fp.write_text(json.dumps({"model": "free_polar"}))
    assert run_cli("eval", "--config", str(fp), "--point", "0,2,0,3,0.5") == 0
    out = capsys.readouterr().out
    g1_line = next(l for l in out.splitlines() if l.startswith("G1"))
    assert float(g1_line.split()[1]) == pytest.approx(-0.25, rel=1e-12)

    ed = tmp_path / "ed.json"
    ed.write_text(json.dumps({"model": "electrodynamics_fixture",
                              "fixture": {"m": 1.0, "c": 1.0, "e": 1.0, "a": 2.0, "b": -1.0}}))
    assert run_cli("eval", "--config", str(ed), "--point", "0,1.5,0.7,0.3,-0.2") == 0
    out = capsys.readouterr().out
    f21_line = next(l for l in out.splitlines() if l.startswith("F21"))
    assert float(f21_line.split()[1]) == pytest.approx(1.5, rel=1e-12)  # (e/2m)(a-b)


def test_console_entry_point(cfg_path):
    proc = subprocess.run(
        [sys.executable, "-m", "jetlag.cli", "eval", "--config", cfg_path,
         "--point", "0.001,0.5,0,-1,0.2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "g11" in proc.stdout


def test_log_env_var(cfg_path, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "jetlag.cli", "simulate", "--config", cfg_path,
         "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
        env={**__import__("os").environ, "JETLAG_LOG": "debug"},
    )
    assert proc.returncode == 0
