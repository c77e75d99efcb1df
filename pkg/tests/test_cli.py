import json
import shutil
import subprocess
import sys

import pytest

from rigclique.cli import main
from rigclique.distributions import SetSizeLaw


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_usage_errors(capsys):
    assert _run(capsys, "bogus")[0] == 1
    assert _run(capsys, "gen", "10")[0] == 1
    assert _run(capsys, "maxload", "3", "3", "--wat")[0] == 1
    assert _run(capsys, "predict", "powerlaw-clique", "--n", "100")[0] == 1


def test_runtime_errors(capsys, tmp_path):
    code, out, err = _run(capsys, "clique", str(tmp_path / "missing.txt"))
    assert code == 2 and out == "" and err
    assert _run(capsys, "gen", "10", "10", '{"kind": "Nope"}')[0] == 2
    assert _run(capsys, "maxload", "500", "3", "--exact")[0] == 2


def test_gen_is_deterministic(tmp_path, capsys):
    law = json.dumps(SetSizeLaw.power_law(1.5).to_dict())
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert _run(capsys, "gen", "300", "300", law, "--seed", "9", "--out", str(a))[0] == 0
    assert _run(capsys, "gen", "300", "300", law, "--seed", "9", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_law_from_file(tmp_path, capsys):
    law_file = tmp_path / "law.json"
    law_file.write_text(json.dumps({"kind": "Deterministic", "x_fixed": 2}))
    code, out, _ = _run(capsys, "gen", "5", "7", f"@{law_file}")
    assert code == 0
    assert out.splitlines()[0].split()[:2] == ["5", "7"]


def test_clique_and_graph_on_cover_file(tmp_path, capsys, cover_instance):
    path = tmp_path / "cover.txt"
    cover_instance.save(path)
    code, out, _ = _run(capsys, "clique", str(path), "--algo", "exact")
    assert code == 0 and json.loads(out)["size"] == 4
    for algo in ("greedy", "mono"):
        result = json.loads(_run(capsys, "clique", str(path), "--algo", algo)[1])
        assert result["algorithm"] == algo and result["size"] == 4
    code, out, _ = _run(capsys, "graph", str(path))
    assert code == 0 and len(out.splitlines()) == 6


def test_predict(capsys):
    code, out, _ = _run(capsys, "predict", "finite-variance", "--n", "1000000")
    assert code == 0 and abs(json.loads(out)["value"] - 5.261) <= 1e-3
    value = json.loads(_run(capsys, "predict", "h-of-k", "--k", "6")[1])["value"]
    assert value == 6
    th = json.loads(_run(capsys, "predict", "thresholds", "--n", "10000", "--m", "10000",
                         "--alpha", "1.5")[1])
    assert th["theta2"] == pytest.approx(151.74, abs=0.01)
    law = json.dumps({"kind": "Deterministic", "x_fixed": 3})
    dm = json.loads(_run(capsys, "predict", "degree-moments", "--law", law, "--n", "100",
                         "--m", "100")[1])
    assert dm["mean_d"] == pytest.approx(9) and dm["var_d"] == pytest.approx(9)


def test_maxload(capsys):
    code, out, _ = _run(capsys, "maxload", "3", "3", "--exact")
    assert code == 0
    pmf = json.loads(out)["pmf"]
    assert pmf["2"] == pytest.approx(18 / 27)
    data = json.loads(_run(capsys, "maxload", "5", "5", "--trials", "100", "--seed", "1")[1])
    assert data["source"] == "empirical" and data["trials"] == 100


def _write_config(tmp_path, **over):
    cfg = {"experiment": "coupling", "schedule": [[200, 200]], "trials": 20, "master_seed": 1,
           "params": {"eps": 0.001}}
    cfg.update(over)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def test_experiment_pass_and_fail(tmp_path, capsys):
    path = _write_config(tmp_path)
    code, out, err = _run(capsys, "experiment", str(path))
    assert code == 0 and json.loads(out)["passed"] and "PASS" in err
    failing = _write_config(tmp_path, params={"eps": 0.5, "p_equal_min": 1.01})
    assert _run(capsys, "experiment", str(failing))[0] == 3


def test_experiment_csv_out(tmp_path, capsys):
    path = _write_config(tmp_path)
    out_path = tmp_path / "report.csv"
    assert _run(capsys, "experiment", str(path), "--format", "csv", "--out", str(out_path),
                "--workers", "2")[0] == 0
    assert len(out_path.read_text().splitlines()) == 21


def test_experiment_bad_config(tmp_path, capsys):
    path = _write_config(tmp_path, trials=0)
    assert _run(capsys, "experiment", str(path))[0] == 2


def test_console_script():
    exe = shutil.which("rigclique")
    cmd = [exe] if exe else [sys.executable, "-m", "rigclique.cli"]
    proc = subprocess.run(cmd + ["predict", "h-of-k", "--k", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["value"] == 5
    assert subprocess.run(cmd + ["nonsense"], capture_output=True).returncode == 1
