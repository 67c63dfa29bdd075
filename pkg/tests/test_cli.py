import os
import subprocess
import sys

from dswave.cli import load_config, main

RUN = [sys.executable, "-m", "dswave.cli"]


def run_cli(args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(RUN + args, capture_output=True, text=True, env=env)


def test_no_command_usage_error():
    assert run_cli([]).returncode == 2


def test_unknown_suite_exit_2(tmp_path):
    r = run_cli(["--out", str(tmp_path), "verify", "nonsense"])
    assert r.returncode == 2


def test_bad_config_exit_2(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("this line has no equals sign\n")
    r = run_cli(["--config", str(bad), "--out", str(tmp_path), "planewave"])
    assert r.returncode == 2


def test_invalid_value_exit_2(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("n = banana\n")
    r = run_cli(["--config", str(cfg), "--out", str(tmp_path), "planewave"])
    assert r.returncode == 2


def test_config_parsing_and_env_override(tmp_path, monkeypatch):
    path = tmp_path / "c.cfg"
    path.write_text("n = 3\nrho = 1.25   # comment\n\n# full comment\n")
    loaded = load_config(str(path))
    assert loaded["n"] == "3"
    assert loaded["rho"] == "1.25"
    monkeypatch.setenv("DSWAVE_N", "4")
    loaded = load_config(str(path))
    assert loaded["n"] == "4"


def test_planewave_alpha1_zero_row(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("n = 2\nalpha = 1\nrho = 1.0\nm = 1\n"
                   "beta_min = -1.0\nbeta_max = 1.0\nbeta_steps = 5\n")
    r = run_cli(["--config", str(cfg), "--out", str(tmp_path), "planewave"])
    assert r.returncode == 0
    rows = [l for l in (tmp_path / "planewave.csv").read_text().splitlines()
            if not l.startswith("#")]
    header, data = rows[0], rows[1:]
    assert header == "beta,re_psi,im_psi"
    assert len(data) == 5
    mid = data[2].split(",")
    assert float(mid[0]) == 0.0
    assert float(mid[1]) == 0.0 and float(mid[2]) == 0.0


def test_planewave_ambient_unit_row(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("n = 2\nmode = ambient\nmu = 1.0\nR = 1.0\n"
                   "beta_min = 0.0\nbeta_max = 1.0\nbeta_steps = 3\n")
    r = run_cli(["--config", str(cfg), "--out", str(tmp_path), "planewave"])
    assert r.returncode == 0
    rows = [l for l in (tmp_path / "planewave.csv").read_text().splitlines()
            if not l.startswith("#")]
    first = rows[1].split(",")
    # beta = 0 is the origin: mu R = 1 makes psi = 1 there
    assert abs(float(first[1]) - 1.0) < 1e-12
    assert abs(float(first[2])) < 1e-12


def test_verify_algebra_passes(tmp_path):
    r = run_cli(["--out", str(tmp_path), "verify", "algebra"])
    assert r.returncode == 0
    assert "PASS" in r.stdout
    assert (tmp_path / "verify_algebra.csv").exists()


def test_contract_command(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("n_grid = 2,3\nR_scan = 10,100,1000\n")
    r = run_cli(["--config", str(cfg), "--out", str(tmp_path), "contract"])
    assert r.returncode == 0
    assert "PASS" in r.stdout


def test_wavepacket_deterministic_across_threads(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("n = 2\nmu = 1.5\npath_points = 24\npath_s_min = 2.0\n"
                   "path_s_max = 40.0\ncap_theta_nodes = 8\nwindows = 2\n")
    outs = []
    for threads, sub in (("1", "a"), ("4", "b")):
        out = tmp_path / sub
        r = run_cli(["--config", str(cfg), "--out", str(out),
                     "--threads", threads, "--seed", "7", "wavepacket"])
        assert r.returncode == 0
        outs.append((out / "wavepacket.csv").read_bytes())
    assert outs[0] == outs[1]


def test_main_in_process_exit_codes(tmp_path):
    assert main(["--out", str(tmp_path), "verify", "nope"]) == 2
    assert main([]) == 2
