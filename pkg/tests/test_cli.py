import subprocess
import sys

import pytest

from emcsim.cli import main


def test_simulate(tmp_path, capsys):
    assert main(["simulate", "distrej", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "distrej.csv").exists()
    assert (tmp_path / "distrej_trace.csv").exists()
    assert "rmse_tracking=" in capsys.readouterr().out


def test_seed_override_changes_output(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "distrej", "--out-dir", str(a)]) == 0
    assert main(["simulate", "distrej", "--seed", "11", "--out-dir", str(b)]) == 0
    assert (a / "distrej.csv").read_bytes() != (b / "distrej.csv").read_bytes()


def test_benchmark(tmp_path, capsys):
    assert main(["benchmark", "benchmark", "--out-dir", str(tmp_path)]) == 0
    for suffix in ("emc", "pi", "metrics"):
        assert (tmp_path / f"benchmark_{suffix}.csv").exists()
    assert "rmse ratio emc/pi" in capsys.readouterr().out


def test_stability(tmp_path, capsys):
    assert main(["stability", "distrej", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "distrej_stability.csv").read_text().startswith("ts,group,index,re,im,modulus,argument")
    assert "all_stable=True" in capsys.readouterr().out


def test_sweep_list(tmp_path):
    assert main(["sweep", "critical", "--ts-max", "0.05,0.1", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "critical_tsmax0.05.csv").exists()
    assert len((tmp_path / "critical_sweep_metrics.csv").read_text().splitlines()) == 3


def test_bad_config_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[scenario]\nname = x\n[timing]\nts_min = -1\n")
    assert main(["simulate", str(bad), "--out-dir", str(tmp_path)]) != 0
    assert "ts_min" in capsys.readouterr().err
    assert main(["simulate", str(tmp_path / "missing.ini")]) != 0


def test_sweep_without_values(tmp_path):
    assert main(["sweep", "distrej", "--out-dir", str(tmp_path)]) != 0


def test_bad_ts_list():
    with pytest.raises(SystemExit):
        main(["sweep", "critical", "--ts-max", "a,b"])


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "emcsim", "stability", "distrej", "--out-dir", str(tmp_path)],
                         capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
