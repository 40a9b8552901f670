import json

import pytest

from cylscatter.cli import main


def run(tmp_path, *argv):
    return main(["--output-dir", str(tmp_path), *argv])


def test_build_surface_and_reuse(tmp_path):
    assert run(tmp_path, "build-surface", "--model", "linear", "--t", "1.0") == 0
    surface = tmp_path / "surface.json"
    assert json.loads(surface.read_text())["kind"] == "linear"
    assert (
        run(
            tmp_path,
            "phase-shifts",
            "--surface",
            str(surface),
            "--lam",
            "50",
            "--eps",
            "0.1",
            "--backend",
            "model",
        )
        == 0
    )
    header = (tmp_path / "phase_shifts.csv").read_text().splitlines()[0]
    assert header == "lambda,k,delta,backend,est_error"


def test_paircorr_from_table(tmp_path):
    run(tmp_path, "phase-shifts", "--model", "linear", "--lam", "50", "--eps", "0.1",
        "--backend", "model")
    code = run(
        tmp_path,
        "paircorr",
        "--input",
        str(tmp_path / "phase_shifts.csv"),
        "--lam",
        "50",
        "--eps",
        "0.1",
        "--method",
        "direct",
    )
    assert code == 0
    body = (tmp_path / "paircorr.csv").read_text().splitlines()
    assert body[0].startswith("lambda,eps,sigma,method,value")


def test_scan_deterministic(tmp_path):
    args = ["scan", "--lams", "100,200", "--samples", "8", "--seed", "7"]
    assert run(tmp_path, *args, "--out", "a.csv") == 0
    assert run(tmp_path, *args, "--out", "b.csv") == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert run(tmp_path, "scan", "--lams", "100", "--samples", "8", "--seed", "8",
               "--out", "c.csv") == 0
    assert (tmp_path / "a.csv").read_bytes() != (tmp_path / "c.csv").read_bytes()


def test_arith_output(tmp_path):
    assert run(tmp_path, "arith", "--n", "1000", "--lam", "10", "--ell2-max", "1") == 0
    lines = (tmp_path / "arith.csv").read_text().splitlines()
    assert lines[0] == "quantity,argument,value"
    f_row = [l for l in lines if l.startswith("count_F")][0]
    assert f_row.endswith(",108")


def test_usage_errors_exit_one(tmp_path):
    assert main(["no-such-command"]) == 1
    assert main([]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["--config", str(bad), "arith", "--n", "100"]) == 1


def test_validation_errors_exit_two(tmp_path):
    # lambda below the supported range
    assert run(tmp_path, "phase-shifts", "--model", "linear", "--lam", "5") == 2


def test_config_defaults_and_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"arith": {"n": 500, "lam": 10, "ell2-max": 1}}))
    assert main(["--config", str(cfg), "--output-dir", str(tmp_path), "arith"]) == 0
    lines = (tmp_path / "arith.csv").read_text().splitlines()
    assert ",500," in lines[1]
    # flag wins over config
    assert main(["--config", str(cfg), "--output-dir", str(tmp_path), "arith",
                 "--n", "600"]) == 0
    lines = (tmp_path / "arith.csv").read_text().splitlines()
    assert ",600," in lines[1]


def test_output_dir_env_override(tmp_path, monkeypatch):
    env_dir = tmp_path / "env_out"
    monkeypatch.setenv("CYLSCATTER_OUTPUT_DIR", str(env_dir))
    assert main(["--output-dir", str(tmp_path), "arith", "--n", "100", "--lam", "5",
                 "--ell2-max", "1"]) == 0
    assert (env_dir / "arith.csv").exists()
    assert not (tmp_path / "arith.csv").exists()


def test_rotation_subcommand(tmp_path):
    assert run(tmp_path, "rotation", "--model", "linear", "--lam", "80",
               "--n-grid", "4", "--backend", "wkb") == 0
    assert (tmp_path / "rotation.csv").exists()
