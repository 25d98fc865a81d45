import json
import pathlib

import pytest

import edgemkt

TINY = json.loads((pathlib.Path(__file__).resolve().parents[2] / "tests" / "data" / "tiny_config.json").read_text())


def test_pipeline_names():
    assert edgemkt.pipeline_names() == ["FUSION", "FUSION_NoPG", "FUSION_Random", "FUSION_NoST", "PurOnline"]


def test_default_parameter_count():
    assert edgemkt.default_parameter_count() == 11146


def test_scenario_is_deterministic():
    a = edgemkt.generate_scenario(TINY, seed=4)
    b = edgemkt.generate_scenario(TINY, seed=4)
    assert a == b
    assert len(a["ess"]) == 4


def test_run_summary():
    out = edgemkt.run("FUSION", TINY, seed=3, trials=2)
    assert len(out["trials"]) == 2
    assert out["summary"]["trials"] == 2
    welfare = [t["welfare"] for t in out["trials"]]
    assert out["summary"]["welfare_mean"] == pytest.approx(sum(welfare) / 2)


def test_sweep_matches_golden_file():
    golden = pathlib.Path(__file__).resolve().parents[2] / "tests" / "data" / "golden_sweep.csv"
    assert edgemkt.sweep_csv("es_count", [3, 4], TINY, trials=2, seed=11) == golden.read_text()


def test_online_reaches_equilibrium():
    out = edgemkt.online(TINY, seed=2)
    assert out["converged"]
    assert out["nash_equilibrium"]


def test_exact_potential_is_ordinal():
    rep = edgemkt.check_ordinal(500, 1)
    assert rep["samples"] == 500
    assert rep["exact_potential_violations"] == 0
    assert rep["sandwich_violations"] == 0


def test_bad_config_raises():
    with pytest.raises(ValueError):
        edgemkt.run("FUSION", {"brd": {"epsilon": "x"}})
    with pytest.raises(ValueError):
        edgemkt.run("NOPE", TINY)
