import csv
import os
import subprocess
import sys

import pytest

from vnslab.cli import EXIT_BLOWUP, EXIT_FAILED, EXIT_OK, EXIT_USAGE, main


def _cfg(tmp_path, name="run.cfg", **over):
    keys = dict(mode="grid1d", x_max=8.0, nx=64, nv=32, v_max=6.0, t_final=3.0, sponge_width=8, snapshot_every=1,
                epsilon=0.01, output=str(tmp_path / "snaps"))
    keys.update(over)
    path = tmp_path / name
    path.write_text("".join(f"{k} = {v}\n" for k, v in keys.items()))
    return str(path)


def test_verify_one_suite_writes_a_report(tmp_path, capsys):
    out = str(tmp_path / "v.csv")
    assert main(["verify", "--suite", "weights", "--samples", "300", "--out", out]) == EXIT_OK
    rows = list(csv.DictReader(open(out)))
    assert rows and all(r["pass"] == "1" for r in rows if r["gating"] == "1")
    assert "gating failures" in capsys.readouterr().out


def test_verify_unknown_suite():
    assert main(["verify", "--suite", "nope"]) == EXIT_USAGE


def test_simulate_diagnose_decay(tmp_path, capsys):
    cfg = _cfg(tmp_path)
    assert main(["simulate", cfg]) == EXIT_OK
    snaps = str(tmp_path / "snaps")
    assert any(n.endswith(".vns") for n in os.listdir(snaps))
    assert main(["diagnose", snaps, "--rho", "1.5,2.0,2.5"]) == EXIT_OK
    rows = list(csv.DictReader(open(os.path.join(snaps, "norms.csv"))))
    quantities = {r["quantity"] for r in rows}
    assert {"chi_f", "E0_f", "E1_f", "L2_f", "L2_Yf", "energy_identity_residual"} <= quantities
    # too few points for a fit is a usage error, not a crash
    assert main(["decay", "--csv", os.path.join(snaps, "norms.csv"), "--quantity", "E0_f"]) == EXIT_USAGE
    assert main(["decay", "--csv", os.path.join(snaps, "norms.csv"), "--quantity", "missing"]) == EXIT_USAGE


def test_diagnose_errors(tmp_path):
    cfg = _cfg(tmp_path)
    assert main(["simulate", cfg]) == EXIT_OK
    snaps = str(tmp_path / "snaps")
    assert main(["diagnose", snaps, "--rho", "9.0"]) == EXIT_USAGE  # above the stored times
    assert main(["diagnose", snaps]) == EXIT_OK  # nothing requested
    assert main(["diagnose", str(tmp_path / "absent"), "--rho", "2"]) == EXIT_USAGE


def test_config_errors_name_the_key(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("mode = grid1d\nbogus = 3\n")
    assert main(["simulate", str(bad)]) == EXIT_USAGE
    assert "bogus" in capsys.readouterr().err
    assert main(["simulate", str(tmp_path / "missing.cfg")]) == EXIT_USAGE


def test_argument_errors():
    assert main([]) == EXIT_USAGE
    assert main(["verify", "--seed", "-1"]) == EXIT_USAGE
    assert main(["decay", "--window", "5,1"]) == EXIT_USAGE
    assert main(["--help"]) == EXIT_OK


def test_convergence_exit_codes(tmp_path):
    cfg = _cfg(tmp_path, coupling="free_wave", evolve_Phi="false", epsilon=1.0, nv=16, v_max=4.0)
    assert main(["convergence", cfg, "--levels", "1"]) == EXIT_USAGE
    assert main(["convergence", cfg, "--levels", "3"]) == EXIT_OK


@pytest.mark.parametrize("mode_keys", [
    dict(mode="grid1d"),
    dict(mode="particle3d", nx=24, x_max=6.0, n_particles=2000, t_final=2.0),
])
def test_blowup_exit_code(tmp_path, mode_keys):
    cfg = _cfg(tmp_path, epsilon=1e300, **mode_keys)
    with pytest.warns(RuntimeWarning):
        assert main(["simulate", cfg]) == EXIT_BLOWUP


def test_failed_convergence_gate_exits_2(tmp_path, monkeypatch):
    import vnslab.diagnostics.convergence as conv

    cfg = _cfg(tmp_path, coupling="free_wave", evolve_Phi="false", epsilon=1.0, nv=16, v_max=4.0)
    monkeypatch.setattr(conv.ConvergenceTable, "passed", lambda self: False)
    assert main(["convergence", cfg, "--levels", "2"]) == EXIT_FAILED


def test_console_entry_point_runs():
    res = subprocess.run([sys.executable, "-m", "vnslab.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "verify" in res.stdout
