import json
import subprocess
import sys

import pytest

from glvsim import __version__
from glvsim.cli import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK, OUTPUT_ROOT_ENV, main
from glvsim.config import SCENARIOS

SHORT = ["--set", "campaigns.point_to_point.horizon_s=120.0"]


def run(tmp_path, name, *extra):
    out = tmp_path / name
    code = main(["run", "--scenario", "point_to_point", "--out", str(out), *SHORT, *extra])
    return code, out


def read_csvs(out):
    return {p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))}


def test_list_scenarios(capsys):
    assert main(["list-scenarios"]) == EXIT_OK
    text = capsys.readouterr().out
    assert [line.split()[0] for line in text.splitlines()] == list(SCENARIOS)


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_validate_prints_provenance(capsys):
    assert main(["validate"]) == EXIT_OK
    text = capsys.readouterr().out
    assert "is valid" in text
    assert any("molecules.HOL.r_liq" in line and "placeholder" in line for line in text.splitlines())


def test_validate_reports_problems(capsys):
    assert main(["validate", "--set", "loss.mean=0.5", "--set", "loss.cv=2.0"]) == EXIT_CONFIG
    assert "cv^2 = 4" in capsys.readouterr().out


def test_run_writes_outputs_and_is_reproducible(tmp_path):
    code, a = run(tmp_path, "a")
    assert code == EXIT_OK
    assert {p.name for p in a.iterdir()} >= {"manifest.json", "summary.txt", "air.csv", "trajectory.csv"}
    man = json.loads((a / "manifest.json").read_text())
    assert man["scenario"] == "point_to_point" and man["seed"] == 1
    assert man["package_version"] == __version__
    assert "campaigns.point_to_point.horizon_s=120.0" in man["overrides"]
    assert set(man["files"]) == set(read_csvs(a))
    _, b = run(tmp_path, "b")
    assert read_csvs(a) == read_csvs(b)


def test_manifest_reruns_identically(tmp_path):
    _, a = run(tmp_path, "a", "--seed", "5", "--set", "wind.regime=nondirected_weak")
    man = json.loads((a / "manifest.json").read_text())
    assert "wind.regime=nondirected_weak" in man["overrides"]
    assert man["config"]["wind"]["regime"] == "nondirected_weak"
    b = tmp_path / "b"
    assert main(["run", str(a / "manifest.json"), "--out", str(b)]) == EXIT_OK
    assert read_csvs(a) == read_csvs(b)


def test_workers_do_not_change_results(tmp_path):
    args = ["run", "--scenario", "distance_sweep", "--set", "campaigns.distance_sweep.horizon_s=60.0",
            "--set", "campaigns.distance_sweep.n_points=3"]
    assert main(args + ["--out", str(tmp_path / "w1"), "--workers", "1"]) == EXIT_OK
    assert main(args + ["--out", str(tmp_path / "w2"), "--workers", "2"]) == EXIT_OK
    assert read_csvs(tmp_path / "w1") == read_csvs(tmp_path / "w2")


def test_output_root_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path / "root"))
    assert main(["run", "--seed", "3", *SHORT]) == EXIT_OK
    assert (tmp_path / "root" / "point_to_point-seed3" / "manifest.json").exists()


def test_config_error_exit_code(tmp_path, capsys):
    code, _ = run(tmp_path, "x", "--set", "molecules.HOL.r_liq=null")
    assert code == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "HOL" in err and "r_liq" in err


def test_missing_config_file(tmp_path):
    assert main(["run", str(tmp_path / "nope.yaml")]) in (EXIT_CONFIG, EXIT_IO)


def test_numeric_error_exit_code(tmp_path, capsys):
    code, _ = run(tmp_path, "x", "--set", "molecules.HOL.emission_amplitude=1.0e300")
    assert code == EXIT_NUMERIC
    assert "error" in capsys.readouterr().err


def test_io_error_exit_code(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _ = run(tmp_path, "file/sub")
    assert code == EXIT_IO


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "glvsim", "list-scenarios"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "alarm_map" in proc.stdout
