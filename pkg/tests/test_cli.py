from __future__ import annotations

import csv
import subprocess
import sys

import numpy as np
import pytest

from pairhop.cli import main as cli_main
from pairhop.cli.config import parse_config
from pairhop.cli.io import csv_text, format_value, write_atomic
from pairhop.cli.main import load_preset, main, preset_names
from pairhop.cli.runner import time_grid
from pairhop.errors import ConfigError
from pairhop.model import effective_coupling

BASE = """
system.omega_a = 4/3
system.omega_b = 1
system.omega_c = 4/3
system.g = 0.06
"""


def _write(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


# --- config -------------------------------------------------------------------------


def test_parse_fractions_and_defaults():
    cfg = parse_config(BASE + "run.kind = spectrum\n")
    assert cfg["system.omega_a"] == 4 / 3
    assert cfg.cutoffs == (7, 5, 7)
    assert cfg.seed == 0
    assert cfg.bracket() == (0.95, 1.05)
    assert cfg.system().gammas == (0.0, 0.0, 0.0)


@pytest.mark.parametrize(
    "extra, match",
    [
        ("run.kind = spectrum\nrun.bogus = 1\n", "unknown key run.bogus"),
        ("run.kind = spectrum\nrun.kind = crossing\n", "repeated key run.kind"),
        ("run.kind = spectrum\nrun.seed =\n", "empty value"),
        ("run.kind = spectrum\nrun.seed = -1\n", "run.seed"),
        ("run.kind = warp\n", "run.kind"),
        ("run.kind = spectrum\nsystem.g\n", "expected"),
        ("run.kind = trajectory\n", "run.t_max"),
        ("run.kind = ensemble\nrun.t_max = 10\n", "run.n_traj"),
    ],
)
def test_parse_rejections(extra, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(BASE + extra)


def test_missing_required_system_key():
    with pytest.raises(ConfigError, match="system.g"):
        parse_config("system.omega_a = 1\nsystem.omega_b = 1\nsystem.omega_c = 1\nrun.kind = spectrum\n")


def test_io_helpers(tmp_path):
    assert format_value(0.1) == "0.10000000000000001"
    assert float(format_value(1 / 3)) == 1 / 3
    assert format_value(np.int64(3)) == "3"
    assert csv_text(("x", "y"), [(1, "a")]) == "x,y\n1,a\n"
    target = tmp_path / "f.txt"
    write_atomic(target, "one\n")
    write_atomic(target, "two\n")
    assert target.read_text() == "two\n"
    assert [p.name for p in tmp_path.iterdir()] == ["f.txt"]


def test_time_grid():
    t = time_grid(10.0, 3.0)
    assert t[0] == 0.0 and t[-1] == 10.0
    assert np.diff(t).max() <= 3.0
    assert len(time_grid(16000, 10)) == 1601


# --- exit statuses ----------------------------------------------------------------------


def test_missing_t_max_exit_2(tmp_path, capsys):
    out = tmp_path / "out"
    status = main(["run", _write(tmp_path, BASE + "run.kind = trajectory\n"), "--out", str(out)])
    err = capsys.readouterr().err
    assert status == 2
    assert "status=2" in err and "run.t_max" in err
    assert not out.exists()


def test_instability_exit_3(tmp_path, capsys):
    text = BASE.replace("system.g = 0.06", "system.g = 2") + "run.kind = spectrum\n"
    out = tmp_path / "out"
    status = main(["run", _write(tmp_path, text), "--out", str(out)])
    assert status == 3
    assert "type=InstabilityError" in capsys.readouterr().err
    assert not out.exists()


def test_analytic_off_resonance_exit_3(tmp_path, capsys):
    text = BASE.replace("system.omega_a = 4/3", "system.omega_a = 1.4") + "run.kind = analytic\nrun.t_max = 100\n"
    status = main(["verify", _write(tmp_path, text)])
    assert status == 3
    assert "resonance required" in capsys.readouterr().err


def test_effective_hamiltonian_rejected_for_spectrum(tmp_path, capsys):
    text = BASE + "run.kind = spectrum\nrun.hamiltonian = effective\n"
    assert main(["verify", _write(tmp_path, text)]) == 2


def test_tolerance_exit_4(tmp_path, capsys):
    text = BASE + (
        "system.gamma_a = 0.5\nsystem.cutoff_a = 3\nsystem.cutoff_b = 2\nsystem.cutoff_c = 3\n"
        "run.kind = trajectory\nrun.t_max = 10\nrun.dt_jump = 1\n"
    )
    out = tmp_path / "out"
    assert main(["run", _write(tmp_path, text), "--out", str(out)]) == 4
    assert "run.dt_jump" in capsys.readouterr().err
    assert not out.exists()


def test_unreadable_config_exit_2(tmp_path, capsys):
    assert main(["verify", str(tmp_path / "nope.cfg")]) == 2


def test_initial_beyond_cutoff(tmp_path):
    text = BASE + "system.cutoff_a = 3\nrun.kind = trajectory\nrun.t_max = 10\nrun.initial = 3,0,0\n"
    assert main(["verify", _write(tmp_path, text)]) == 2


# --- verify and presets ----------------------------------------------------------------


def test_presets_bundled():
    assert preset_names() == ["fig2", "fig3a", "fig3b", "fig4"]
    for name in preset_names():
        assert load_preset(name).source == f"preset:{name}"
    with pytest.raises(ConfigError):
        load_preset("fig9")


def test_verify_fig3b(capsys):
    assert main(["verify", "fig3b"]) == 0
    out = capsys.readouterr().out
    assert "status = ok" in out
    assert "max_dp_estimate" in out
    assert "oracle feasible at reduced cutoffs" in out


def test_verify_all_presets(capsys):
    for name in preset_names():
        assert main(["verify", name]) == 0


def test_console_script_module():
    proc = subprocess.run(
        [sys.executable, "-m", "pairhop.cli.main", "verify", "fig2"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert "status = ok" in proc.stdout


# --- runs ----------------------------------------------------------------------------------


@pytest.fixture(scope="module")
def fig2_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig2")
    assert main(["preset", "fig2", "--out", str(out)]) == 0
    return out


def test_fig2_spectrum(fig2_run):
    header, data = _read_csv(fig2_run / "spectrum.csv")
    assert header[0] == "ratio" and header[-1] == "gap_tracked"
    assert data.shape == (201, 1 + 12 + 1)
    k = int(np.argmin(data[:, -1]))
    assert abs(data[k, 0] - 1.0) < 0.01
    assert np.all(np.diff(data[:, 1:13], axis=1) >= 0)


def test_manifest(fig2_run):
    lines = (fig2_run / "manifest").read_text().splitlines()
    assert lines[0].startswith("# generated ")
    body = dict(line.split(" = ", 1) for line in lines[1:])
    assert body["source"] == "preset:fig2"
    assert body["seed"] == "0"
    assert body["cutoffs"] == "7,5,7"
    assert body["files"] == "spectrum.csv"
    assert body["system.omega_a"].startswith("1.33333")
    assert "check.stability" in body


def test_fig3a_trajectory(tmp_path):
    assert main(["preset", "fig3a", "--out", str(tmp_path)]) == 0
    header, data = _read_csv(tmp_path / "trajectory.csv")
    assert header == ["t", "exp_na", "exp_nb", "exp_nc", "norm"]
    with open(tmp_path / "jumps.csv") as fh:
        jumps = list(csv.reader(fh))[1:]
    assert jumps and all(ch in ("a", "b", "c") for _, ch in jumps)
    first = float(jumps[0][0])
    gt = effective_coupling(load_preset("fig3a").system())
    pre = data[:, 0] < first
    ref = 2 * np.cos(2 * gt * data[pre, 0]) ** 2
    assert np.abs(data[pre, 1] - ref).max() < 0.05


def test_byte_identical_rerun(tmp_path):
    text = BASE + (
        "system.gamma_a = 1e-4\nsystem.gamma_b = 1e-4\nsystem.gamma_c = 1e-4\n"
        "system.cutoff_a = 3\nsystem.cutoff_b = 2\nsystem.cutoff_c = 3\n"
        "run.kind = ensemble\nrun.t_max = 4000\nrun.dt_jump = 1\nrun.dt_out = 100\nrun.n_traj = 20\nrun.seed = 9\n"
    )
    cfg = _write(tmp_path, text)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", cfg, "--out", str(a)]) == 0
    assert main(["run", cfg, "--out", str(b)]) == 0
    for name in ("ensemble.csv", "lindblad.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    ma = (a / "manifest").read_text().splitlines()[1:]
    mb = (b / "manifest").read_text().splitlines()[1:]
    assert ma == mb


def test_analytic_and_crossing_runs(tmp_path):
    text = BASE + "system.cutoff_a = 5\nsystem.cutoff_b = 3\nsystem.cutoff_c = 5\n"
    assert main(["run", _write(tmp_path, text + "run.kind = analytic\nrun.t_max = 5000\nrun.dt_out = 50\n", "an.cfg"), "--out", str(tmp_path / "an")]) == 0
    header, data = _read_csv(tmp_path / "an" / "analytic.csv")
    assert header == ["t", "exp_na_gt", "exp_nc_gt", "exp_na_2gt", "exp_nc_2gt", "exp_nb", "survival"]
    np.testing.assert_allclose(data[:, 1] + data[:, 2], 2.0)
    assert main(["run", _write(tmp_path, text + "run.kind = crossing\n", "cr.cfg"), "--out", str(tmp_path / "cr")]) == 0
    with open(tmp_path / "cr" / "crossing.csv") as fh:
        table = {k: float(v) for k, v in list(csv.reader(fh))[1:]}
    assert abs(table["location"] - 1.0) < 0.01
    assert table["gap"] == pytest.approx(table["predicted_gap"], rel=0.1)


def test_pulse_run_small(tmp_path):
    text = (
        "system.omega_a = 1.1\nsystem.omega_b = 1\nsystem.omega_c = 1.1\nsystem.g = 0.09\n"
        "system.cutoff_a = 5\nsystem.cutoff_b = 3\nsystem.cutoff_c = 5\n"
        "run.kind = pulse\nrun.t_max = 120\nrun.dt_out = 10\npulse.amplitude = 0.03\n"
    )
    assert main(["run", _write(tmp_path, text), "--out", str(tmp_path / "p")]) == 0
    with open(tmp_path / "p" / "pulse.csv") as fh:
        rows = list(csv.reader(fh))[1:]
    odd_c = [float(p) for m, n, p in rows if m == "c" and int(n) % 2]
    assert max(odd_c) <= 1e-6
    header, data = _read_csv(tmp_path / "p" / "pulse_trajectory.csv")
    assert header[-1] == "parity_c"
    np.testing.assert_allclose(data[:, -1], 1.0, atol=1e-8)


def test_entry_point_declared():
    from importlib.metadata import entry_points

    (ep,) = [e for e in entry_points(group="console_scripts") if e.name == "simulate"]
    assert ep.load() is cli_main.main
