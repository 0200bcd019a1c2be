import json
import subprocess
import sys

import pytest

from xfmrlife.cli import main


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--seed", "3", "--days", "14", "--out-dir", str(d)]) == 0
    return d


def test_synth_writes_bundle(synth_dir):
    assert {p.name for p in synth_dir.iterdir()} >= {"load.csv", "temperature.csv", "pv.csv"}


def test_ingest_summary(synth_dir, tmp_path):
    assert main(["ingest", "--bundle", str(synth_dir), "--out-dir", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["days"] == 14
    assert (tmp_path / "load.csv").read_bytes() == (synth_dir / "load.csv").read_bytes()


def test_ingest_separate_files(synth_dir, tmp_path):
    rc = main(["ingest", "--load", str(synth_dir / "load.csv"),
               "--temperature", str(synth_dir / "temperature.csv"),
               "--pv", str(synth_dir / "pv.csv"), "--out-dir", str(tmp_path)])
    assert rc == 0


def test_pipeline(synth_dir, tmp_path):
    pev = tmp_path / "pev.csv"
    assert main(["pev-gen", "--seed", "1", "--days", "14", "--fleet", "12", "--slots", "10",
                 "--out", str(pev)]) == 0
    sched = tmp_path / "sched"
    assert main(["schedule", "--bundle", str(synth_dir), "--pev", str(pev), "--capacity-kwh", "40",
                 "--rated-kw", "10", "--seed", "2", "--out-dir", str(sched),
                 "--config", str(_fast_config(tmp_path))]) == 0
    days = json.loads((sched / "schedule.json").read_text())["days"]
    assert len(days) == 14 and days[0]["charge_window"] is None
    age = tmp_path / "age"
    assert main(["age", "--flow", str(sched / "flow.csv"), "--temperature",
                 str(synth_dir / "temperature.csv"), "--out-dir", str(age)]) == 0
    assert set(json.loads((age / "aging.json").read_text())) == {"f_eqa", "loss_of_life_percent", "max_theta_h"}
    econ = tmp_path / "econ"
    assert main(["econ", "--bundle", str(synth_dir), "--baseline-flow", str(synth_dir / "load.csv"),
                 "--flow", str(sched / "flow.csv"), "--bess-kwh", "40", "--scenario-id", "x",
                 "--out-dir", str(econ)]) == 0
    assert json.loads((econ / "x.json").read_text())["inv0"] == pytest.approx(4000.0)


def _fast_config(tmp_path):
    cfg = tmp_path / "fast.json"
    cfg.write_text(json.dumps({"ga.population": 20, "ga.generations": 10}))
    return cfg


def test_run_all_outputs(tmp_path):
    out = tmp_path / "out"
    rc = main(["run-all", "--synthetic", "--seed", "42", "--days", "20", "--out-dir", str(out),
               "--config", str(_fast_config(tmp_path))])
    assert rc == 0
    for name in ("table2.csv", "table3.csv", "payback.csv", "plot_data.csv"):
        assert (out / name).exists()
    assert len(list((out / "reports").glob("*.json"))) == 7


def test_errors_exit_nonzero(tmp_path, capsys):
    assert main(["synth", "--days", "5", "--out-dir", str(tmp_path)]) != 0
    assert "error" in capsys.readouterr().err
    bad = tmp_path / "bad.csv"
    bad.write_text("timestamp,value\n2018-01-01T00:00,NaN\n")
    assert main(["ingest", "--load", str(bad), "--temperature", str(bad), "--pv", str(bad),
                 "--out-dir", str(tmp_path)]) != 0
    assert "row 1" in capsys.readouterr().err
    assert main(["ingest", "--load", str(bad), "--out-dir", str(tmp_path)]) != 0
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nope": 1}))
    assert main(["synth", "--config", str(cfg), "--out-dir", str(tmp_path)]) != 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "xfmrlife", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "kernels" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "xfmrlife", "synth", "--days", "3",
                           "--out-dir", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 2 and "error" in proc.stderr
