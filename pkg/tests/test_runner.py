"""Scenario runner and file writer: seed precedence, payload shape, outputs."""

import json
import math

import pytest

from vanet_chain import __version__
from vanet_chain.errors import OutOfRange
from vanet_chain.output import write_scenario_outputs
from vanet_chain.runner import SEED_ENV_VAR, resolve_seed, run_scenario
from vanet_chain.scenarios import load_scenario

ANALYTIC_ONLY = {
    "name": "toy-analytic",
    "fleet_size": 3,
    "calibration": {"p": 0.3, "q": 0.3, "dt_s": 0.01},
    "experiments": [
        {"kind": "link_duration", "name": "dur"},
        {"kind": "cluster_lifetime", "cluster": {"first_car": 1, "link_count": 2}},
        {"kind": "cluster_existence", "cluster": {"first_car": 1, "link_count": 1},
         "start": 2, "end_first": 2, "end_last": 6},
        {"kind": "omega_stable", "start": 1, "window": 2, "end_first": 3, "end_last": 8},
    ],
}

WITH_SIM = {
    "name": "toy-sim",
    "fleet_size": 2,
    "calibration": {"p": 0.3, "q": 0.3, "dt_s": 0.01},
    "experiments": [{"kind": "link_duration", "name": "dur",
                     "simulation": {"trials": 500, "seed": 3}}],
}

# seed 23 is the one value in 0..39 whose 500-trial run puts an analytic
# mass outside the 99% interval, so the zero-tolerance gate trips
GATE_FAIL = {
    "name": "gate-check",
    "fleet_size": 2,
    "calibration": {"p": 0.3, "q": 0.3, "dt_s": 0.01},
    "experiments": [{"kind": "link_duration", "name": "strict",
                     "max_ci_violation_rate": 0.0,
                     "simulation": {"trials": 500, "seed": 23}}],
}


def test_resolve_seed_precedence(monkeypatch):
    monkeypatch.setenv(SEED_ENV_VAR, "7")
    assert resolve_seed(42, 9) == 42
    assert resolve_seed(None, 9) == 9
    assert resolve_seed(None, None) == 7
    monkeypatch.setenv(SEED_ENV_VAR, "  ")
    assert resolve_seed(None, None) == 0
    monkeypatch.delenv(SEED_ENV_VAR)
    assert resolve_seed(None, None) == 0
    monkeypatch.setenv(SEED_ENV_VAR, "pi")
    with pytest.raises(OutOfRange):
        resolve_seed(None, None)


def test_analytic_only_payload():
    payload = run_scenario(load_scenario(ANALYTIC_ONLY))
    assert payload["scenario"] == "toy-analytic"
    assert payload["version"] == __version__
    assert payload["passed"] is True
    names = [e["name"] for e in payload["experiments"]]
    assert names == ["dur", "cluster_lifetime_1", "cluster_existence_2", "omega_stable_3"]
    for exp in payload["experiments"]:
        assert exp["simulation"] is None
        assert exp.get("counts") is None
        assert exp.get("report") is None
        assert exp["passed"] is True
        assert len(exp["analytic"]) > 0
    duration = payload["experiments"][0]
    assert duration["support_start"] == 1
    assert duration["analytic"][0] == pytest.approx(0.3)
    existence = payload["experiments"][2]
    assert existence["support_start"] == 2
    assert len(existence["analytic"]) == 5
    stable = payload["experiments"][3]
    assert len(stable["analytic"]) == 6
    # a pure-recurrence curve still carries the analytic step times
    assert stable["params"] == {"start": 1, "window": 2, "end_first": 3, "end_last": 8}


def test_analytic_only_manifest_lists_one_file_per_experiment():
    payload = run_scenario(load_scenario(ANALYTIC_ONLY))
    manifest = payload["manifest"]
    assert manifest["tool"] == "vanet-chain"
    assert manifest["scenario"] == "toy-analytic"
    assert manifest["fleet_size"] == 3
    for entry in manifest["experiments"]:
        assert entry["outputs"] == [f"{entry['name']}_analytic.csv"]
        assert entry["simulation"] is None


def test_simulated_payload_and_determinism():
    scenario = load_scenario(WITH_SIM)
    one = run_scenario(scenario)
    two = run_scenario(scenario)
    threaded = run_scenario(scenario, threads=4)
    assert json.dumps(one, sort_keys=True) == json.dumps(two, sort_keys=True)
    assert json.dumps(one, sort_keys=True) == json.dumps(threaded, sort_keys=True)

    exp = one["experiments"][0]
    assert exp["simulation"] == {"trials": 500, "seed": 3, "horizon": exp["simulation"]["horizon"]}
    assert exp["episodes"] >= 100
    assert sum(exp["counts"]) == exp["episodes"]
    assert exp["report"]["bins_compared"] >= len(exp["analytic"])
    assert exp["mean_check"]["analytic_s"] == pytest.approx(0.01 / 0.3)
    assert one["manifest"]["experiments"][0]["outputs"] == [
        "dur_analytic.csv", "dur_empirical.csv", "dur_report.json"]


def test_overrides_replace_block_values():
    scenario = load_scenario(WITH_SIM)
    payload = run_scenario(scenario, seed=99, trials=600)
    sim = payload["experiments"][0]["simulation"]
    assert sim["seed"] == 99
    assert sim["trials"] == 600
    assert payload["experiments"][0]["episodes"] <= 600


def test_env_seed_reaches_the_simulation(monkeypatch):
    doc = dict(WITH_SIM, experiments=[{"kind": "link_duration", "name": "dur",
                                       "simulation": {"trials": 500}}])
    monkeypatch.setenv(SEED_ENV_VAR, "77")
    payload = run_scenario(load_scenario(doc))
    assert payload["experiments"][0]["simulation"]["seed"] == 77


def test_zero_tolerance_gate_trips():
    payload = run_scenario(load_scenario(GATE_FAIL))
    exp = payload["experiments"][0]
    assert exp["report"]["floor_ci_violations"] == 1
    assert exp["passed"] is False
    assert payload["passed"] is False


def make_output_payload() -> dict:
    experiment = {
        "name": "toy", "kind": "link_duration",
        "calibration": {"p": 0.3, "q": 0.3, "dt_s": 0.5, "p_good": 0.5, "f_d_hz": None},
        "params": {}, "passed": True, "max_ci_violation_rate": 0.02,
        "simulation": {"trials": 80, "seed": 0, "horizon": 3},
        "support_start": 1,
        "analytic": [0.5, 0.0, 0.25], "analytic_tail": 0.25,
        "counts": [40, 0, 20], "episodes": 80,
        "report": {"bins_compared": 3}, "mean_check": {"rel_error": 0.0},
    }
    manifest = {"tool": "vanet-chain", "scenario": "toy", "experiments": []}
    return {"scenario": "toy", "manifest": manifest, "experiments": [experiment]}


def test_output_files_and_csv_format(tmp_path):
    paths = write_scenario_outputs(make_output_payload(), tmp_path / "out")
    assert [p.name for p in paths] == ["toy_analytic.csv", "toy_empirical.csv",
                                       "toy_report.json", "run.json"]
    analytic = (tmp_path / "out" / "toy_analytic.csv").read_text().splitlines()
    assert analytic[0] == "index,time_s,probability,log10_probability"
    assert analytic[1] == f"1,0.5,0.5,{math.log10(0.5)!r}"
    # zero probability leaves the log cell empty instead of writing -inf
    assert analytic[2] == "2,1.0,0.0,"
    assert analytic[3].startswith("3,1.5,0.25,")

    empirical = (tmp_path / "out" / "toy_empirical.csv").read_text().splitlines()
    assert empirical[0] == "index,time_s,count,frequency,ci_low,ci_high"
    assert empirical[1].startswith("1,0.5,40,0.5,")
    low_cell = float(empirical[2].split(",")[4])
    assert low_cell == 0.0

    report = json.loads((tmp_path / "out" / "toy_report.json").read_text())
    assert report["name"] == "toy"
    assert report["passed"] is True
    manifest = json.loads((tmp_path / "out" / "run.json").read_text())
    assert manifest["tool"] == "vanet-chain"


def test_outputs_are_byte_identical_across_writes(tmp_path):
    payload = make_output_payload()
    first = write_scenario_outputs(payload, tmp_path / "a")
    second = write_scenario_outputs(payload, tmp_path / "b")
    for left, right in zip(first, second):
        assert left.read_bytes() == right.read_bytes()
