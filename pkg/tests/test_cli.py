import os

import numpy as np
import pytest

from spheroid.cli import cli

CONFIG = """
[grid]
n = 101

[solver]
dt = 0.02
t_end = 2.0
output_interval = 0.2
snapshot_every = 5
"""


@pytest.fixture()
def config_path(tmp_path):
    path = tmp_path / "run.config"
    path.write_text(CONFIG)
    return str(path)


def test_usage_errors():
    assert cli(["no-such-command"]) == 2
    assert cli(["simulate", "--no-such-flag"]) == 2
    assert cli([]) == 2


def test_check_assumptions_ok(capsys):
    assert cli(["check-assumptions"]) == 0
    out = capsys.readouterr().out
    for name in ("A1", "A2", "A3", "A4", "A5"):
        assert name in out
    assert "f(1,1)" in out


def test_check_assumptions_failing_model(tmp_path, capsys):
    cfg = tmp_path / "bad.config"
    cfg.write_text("[rates.K_B]\nfamily = constant\nvalue = 0.3\n")
    assert cli(["check-assumptions", "--config", str(cfg)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_bounds_subcommand(capsys):
    assert cli(["lemma31", "--grid-n", "201", "--z-values=-1,0,1"]) == 0
    out = capsys.readouterr().out
    assert "all bounds hold" in out
    assert out.count("pass") == 21


def test_missing_config_file():
    assert cli(["check-assumptions", "--config", "/nope.config"]) == 1


def test_stationary_subcommand(tmp_path, config_path, capsys):
    out_dir = str(tmp_path / "out")
    code = cli(["stationary", "--config", config_path, "--out", out_dir])
    assert code == 0
    printed = capsys.readouterr().out
    assert "z*" in printed and "direct" in printed
    assert os.path.exists(os.path.join(out_dir, "stationary.snap"))
    assert os.path.exists(os.path.join(out_dir, "stationary.csv"))
    with open(os.path.join(out_dir, "stationary.csv")) as fh:
        assert fh.readline().strip() == "r,c,p,v"


def _read_rows(path):
    with open(path) as fh:
        return fh.read().splitlines()


def test_simulate_deterministic_and_resume(tmp_path, config_path):
    # full run
    out_a = str(tmp_path / "a")
    assert cli(["simulate", "--config", config_path, "--out", out_a,
                "--delta", "0.01", "--seed", "1"]) == 0
    rows_a = _read_rows(os.path.join(out_a, "timeseries.csv"))
    assert rows_a[0].startswith("t,R,z,v1,")
    t_col = [float(r.split(",")[0]) for r in rows_a[1:]]
    assert all(b > a for a, b in zip(t_col, t_col[1:]))

    # identical second run is byte-identical
    out_b = str(tmp_path / "b")
    assert cli(["simulate", "--config", config_path, "--out", out_b,
                "--delta", "0.01", "--seed", "1"]) == 0
    assert _read_rows(os.path.join(out_b, "timeseries.csv")) == rows_a

    # interrupted at t=1 (snapshot written at output 5), then resumed
    out_c = str(tmp_path / "c")
    assert cli(["simulate", "--config", config_path, "--out", out_c,
                "--delta", "0.01", "--seed", "1", "--tend", "1.0"]) == 0
    snap = os.path.join(out_c, "snap_000005.snap")
    assert os.path.exists(snap)
    assert cli(["simulate", "--config", config_path, "--out", out_c,
                "--resume", snap]) == 0
    rows_head = _read_rows(os.path.join(out_c, "timeseries.csv"))
    rows_tail = _read_rows(os.path.join(out_c, "timeseries_resumed.csv"))
    assert rows_tail[0] == rows_a[0]
    stitched = rows_head + rows_tail[1:]
    assert stitched == rows_a

    # the resumed leg numbers its outputs after the snapshot's index:
    # output 10 (t = 2.0) lands in snap_000010, matching the full run
    from spheroid import load_snapshot
    state_c, header_c = load_snapshot(os.path.join(out_c, "snap_000010.snap"))
    state_a, header_a = load_snapshot(os.path.join(out_a, "snap_000010.snap"))
    assert header_c["output_index"] == header_a["output_index"] == 10
    assert state_c.t == state_a.t
    assert np.array_equal(state_c.c, state_a.c)
    assert np.array_equal(state_c.p, state_a.p)


def test_simulate_zero_amplitude_stays_at_floor(tmp_path, config_path):
    out_dir = str(tmp_path / "z")
    assert cli(["simulate", "--config", config_path, "--out", out_dir,
                "--delta", "0.0"]) == 0
    rows = _read_rows(os.path.join(out_dir, "timeseries.csv"))
    header = rows[0].split(",")
    for row in rows[1:]:
        vals = dict(zip(header, (float(x) for x in row.split(","))))
        for name in ("c_dev", "p_dev", "z_dev", "eta_dev"):
            assert vals[name] < 1e-6, (name, vals[name])


def test_resume_rejects_wrong_grid(tmp_path, config_path):
    out_dir = str(tmp_path / "x")
    assert cli(["simulate", "--config", config_path, "--out", out_dir,
                "--tend", "1.0"]) == 0
    snap = os.path.join(out_dir, "snap_000000.snap")
    code = cli(["simulate", "--config", config_path, "--out", out_dir,
                "--resume", snap, "--grid-n", "51"])
    assert code == 1


def test_stability_subcommand_small(tmp_path, config_path):
    out_dir = str(tmp_path / "s")
    code = cli(["stability", "--config", config_path, "--out", out_dir,
                "--eps", "0.0", "--delta", "0.01", "--seed", "2",
                "--tend", "3.0"])
    assert code == 0
    rows = _read_rows(os.path.join(out_dir, "stability.csv"))
    assert rows[0].startswith("eps,delta,shape,seed,status,converged,crossing_time")
    assert len(rows) == 3  # header + two shapes


def test_convergence_subcommand_reporting(monkeypatch, tmp_path, capsys):
    from spheroid.analysis import ConvergenceStudy
    import spheroid.cli as cli_mod

    def fake_suite(model):
        return [
            ConvergenceStudy("diffusion-h", [101, 201, 401], [4e-4, 1e-4],
                             [2.0], True),
            ConvergenceStudy("transport-h", [101, 201, 401], [4e-4, 1e-4],
                             [2.0], True),
            ConvergenceStudy("dt", [0.08, 0.04, 0.02], [4e-4, 1e-4], [2.0], True),
        ]

    monkeypatch.setattr(cli_mod, "standard_convergence_suite", fake_suite)
    assert cli(["convergence", "--out", str(tmp_path / "c")]) == 0
    out = capsys.readouterr().out
    assert "diffusion-h" in out and "dt" in out
    rows = _read_rows(str(tmp_path / "c" / "convergence.csv"))
    assert rows[0] == "kind,level_coarse,level_fine,diff,observed_order"
    assert len(rows) == 4

    def failing_suite(model):
        return [ConvergenceStudy("dt", [0.08, 0.04, 0.02], [4e-4, 3e-4],
                                 [0.4], True)]

    monkeypatch.setattr(cli_mod, "standard_convergence_suite", failing_suite)
    assert cli(["convergence", "--out", str(tmp_path / "c2")]) == 1
