import csv
import io
import json
import math

import pytest

from rigclique.distributions import SetSizeLaw
from rigclique.errors import ConfigError
from rigclique.harness import (CLAIMS, EXPERIMENTS, ExperimentConfig, derive_seed, emit, run,
                               summarize)
from rigclique.instance import IntersectionInstance

D3 = SetSizeLaw.deterministic(3)


def _cfg(experiment="degree-moments", schedule=((200, 200), (400, 400)), law=D3, trials=3,
         params=None, workers=1):
    return ExperimentConfig(experiment, list(schedule), law, trials, 11, params or {}, workers)


def test_every_experiment_has_a_claim():
    assert set(CLAIMS) == set(EXPERIMENTS)


def test_seed_derivation_distinct_and_stable():
    seeds = {derive_seed(1, "coupling", p, t) for p in range(5) for t in range(200)}
    assert len(seeds) == 1000
    assert derive_seed(1, "coupling", 0, 0) == derive_seed(1, "coupling", 0, 0)
    assert derive_seed(1, "coupling", 0, 0) != derive_seed(2, "coupling", 0, 0)
    assert derive_seed(1, "coupling", 0, 0) != derive_seed(1, "tv-maxload", 0, 0)


def test_same_config_same_bytes():
    assert emit(run(_cfg())) == emit(run(_cfg()))


def test_worker_count_invariance():
    for experiment, law in [("degree-moments", D3), ("finite-variance-structure", D3),
                            ("coupling", None)]:
        single = emit(run(_cfg(experiment, law=law, trials=4, workers=1)))
        pooled = emit(run(_cfg(experiment, law=law, trials=4, workers=4)))
        assert single == pooled


def test_record_count_and_self_consistency():
    cfg = _cfg("finite-variance-structure", trials=5)
    report = run(cfg)
    assert len(report["records"]) == 10
    points, rules = summarize(cfg, report["records"])
    assert points == report["points"] and rules == report["rules"]
    for pt in report["points"]:
        recs = [r for r in report["records"] if r["point"] == pt["point"]]
        omega = [r["omega"] for r in recs]
        assert pt["stats"]["omega"]["mean"] == pytest.approx(sum(omega) / len(omega))
        assert pt["stats"]["omega"]["count"] == len(recs)
        assert pt["omega_ge_prime"] == 1.0
    assert report["passed"] == all(r["passed"] for r in report["rules"])


def test_json_round_trip_idempotent():
    first = emit(run(_cfg()))
    assert emit(json.loads(first)) == first


def test_csv_rows():
    report = run(_cfg(schedule=[(100, 100)], trials=3))
    text = emit(report, "csv").decode()
    lines = text.splitlines()
    assert len(lines) == 4
    rows = list(csv.DictReader(io.StringIO(text)))
    assert lines[0].startswith("point,trial,n,m,seed")
    assert [int(r["trial"]) for r in rows] == [0, 1, 2]


def test_csv_header_only_for_empty_report():
    assert emit({"records": []}, "csv") == b"point,trial,n,m,seed\n"


def test_unsupported_format():
    with pytest.raises(ValueError):
        emit(run(_cfg(schedule=[(50, 50)], trials=1)), "xml")


def test_replayed_cover_instance(tmp_path, cover_instance):
    path = tmp_path / "cover.txt"
    cover_instance.save(path)
    cfg = _cfg("finite-variance-structure", schedule=[(4, 3)], trials=1,
               params={"instance_file": str(path)})
    rec = run(cfg)["records"][0]
    assert (rec["omega"], rec["omega_prime"]) == (4, 3)
    assert rec["omega"] - rec["omega_prime"] == 1


def test_replayed_square_bad_cycles(tmp_path):
    path = tmp_path / "square.txt"
    IntersectionInstance.from_subsets([[0, 3], [0, 1], [1, 2], [2, 3]], m=4).save(path)
    cfg = _cfg("finite-variance-structure", schedule=[(4, 4)], trials=1,
               params={"instance_file": str(path), "count_bad_cycles": True})
    assert run(cfg)["records"][0]["bad_cycles"] == 8


def test_budget_exclusions_are_recorded():
    cfg = _cfg("finite-variance-structure", schedule=[(300, 300)], trials=4,
               params={"node_budget": 1})
    report = run(cfg)
    assert all(r["excluded"] == 1 and r["omega"] is None for r in report["records"])
    assert report["points"][0]["excluded"] == 4
    assert not report["passed"]


def test_config_echo_and_claim():
    report = run(_cfg(trials=1))
    assert report["config"]["master_seed"] == 11
    assert "worker_count" not in report["config"]
    assert report["claim"] == CLAIMS["degree-moments"]


@pytest.mark.parametrize("data", [
    {"experiment": "nope", "schedule": [[10, 10]], "law": D3.to_dict()},
    {"experiment": "degree-moments", "schedule": [], "law": D3.to_dict()},
    {"experiment": "degree-moments", "schedule": [[10, 10]], "law": D3.to_dict(), "trials": 0},
    {"experiment": "degree-moments", "schedule": [[10, 10]], "law": D3.to_dict(), "worker_count": 0},
    {"experiment": "degree-moments", "schedule": [[10, 10]]},
    {"schedule": [[10, 10]]},
])
def test_config_errors(data):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(data)


def test_config_round_trip():
    cfg = _cfg(params={"rules": ["mean_degree"]}, workers=2)
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def test_rule_selection():
    report = run(_cfg(trials=2, params={"rules": ["mean_degree"]}))
    assert {r["name"] for r in report["rules"]} == {"mean_degree"}


def test_sdr_and_coupling_experiments():
    sdr = run(ExperimentConfig("sdr-maximization", [(1, 1)], None, 2, 3,
                               {"sizes": [1, 2], "m": 5, "d": 2, "candidates": 5}))
    assert sdr["passed"]
    coupling = run(ExperimentConfig("coupling", [(500, 500)], None, 50, 3, {"eps": 0.001}))
    assert coupling["points"][0]["monotone"] == 1.0


def test_powerlaw_point_has_prediction():
    cfg = _cfg("powerlaw-clique", schedule=[(300, 300), (600, 600)],
               law=SetSizeLaw.power_law(1.5), trials=2)
    report = run(cfg)
    pt = report["points"][-1]
    assert pt["ratio"] == pytest.approx(pt["stats"]["greedy"]["mean"] / pt["predicted"])
    assert math.isfinite(pt["predicted"])
