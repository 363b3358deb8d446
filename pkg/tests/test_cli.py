import json
import os
import subprocess
import sys

import pytest

from zclosure.cli import Instance, load_instance, run_pipeline, verify_corpus

CORPUS = os.path.join(os.path.dirname(__file__), "..", "src", "zclosure", "corpus")


def _run_cli(*args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "zclosure.cli", *args],
        capture_output=True,
        text=True,
        env=env,
    )


def _corpus_path(name):
    return os.path.join(CORPUS, name)


def test_run_reports_expected_fields():
    proc = _run_cli("run", _corpus_path("simple_reach.json"))
    assert proc.returncode == 0, proc.stderr
    report = json.loads(proc.stdout)
    for key in ("mode", "degree", "eta_used", "generators", "oracle_checked",
                "oracle_max_len", "timings"):
        assert key in report
    assert report["generators"] == ["x11 - 1"]
    assert report["oracle_checked"] is True


def test_run_is_byte_deterministic_modulo_timings():
    out = []
    for _ in range(2):
        proc = _run_cli("run", _corpus_path("dyck_reach.json"))
        assert proc.returncode == 0
        report = json.loads(proc.stdout)
        report.pop("timings")
        out.append(json.dumps(report, sort_keys=True))
    assert out[0] == out[1]


def test_instance_round_trip(tmp_path):
    inst = load_instance(_corpus_path("anbndyck_reach.json"))
    doc = inst.to_doc()
    path = tmp_path / "roundtrip.json"
    path.write_text(json.dumps(doc))
    again = load_instance(str(path))
    assert again.mp == inst.mp
    assert again.mode == inst.mode
    assert again.degree == inst.degree
    assert again.to_doc() == doc


def test_schema_rejection_cites_normalization(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "dimension": 1, "alphabet": ["a"], "phi": {"a": [["2"]]},
        "omega": {"a": 2}, "mode": "cover", "degree": 1,
    }))
    proc = _run_cli("run", str(path))
    assert proc.returncode == 2
    err = json.loads(proc.stderr)
    assert err["error"] == "schema"
    assert "normalize" in err["message"]


def test_reach_default_eta_exits_infeasible(tmp_path):
    path = tmp_path / "reach_default.json"
    path.write_text(json.dumps({
        "dimension": 2, "alphabet": ["a", "b"],
        "phi": {"a": [["1", "1"], ["0", "1"]], "b": [["1", "0"], ["1", "1"]]},
        "omega": {"a": 1, "b": -1}, "mode": "reach", "degree": 2,
    }))
    proc = _run_cli("run", str(path))
    assert proc.returncode == 3
    err = json.loads(proc.stderr)
    assert err["error"] == "infeasible"
    assert "eta_override" in err["message"]


def test_cover_d2_default_eta_exits_infeasible(tmp_path):
    # the states x Veronese budget refuses the 1026-state run at the default
    # threshold, pointing at eta_override
    path = tmp_path / "cover_default.json"
    path.write_text(json.dumps({
        "dimension": 2, "alphabet": ["a", "b"],
        "phi": {"a": [["1", "1"], ["0", "1"]], "b": [["1", "0"], ["1", "1"]]},
        "omega": {"a": 1, "b": -1}, "mode": "cover", "degree": 2,
    }))
    proc = _run_cli("run", str(path))
    assert proc.returncode == 3
    err = json.loads(proc.stderr)
    assert "budget" in err["message"] and "eta_override" in err["message"]


def test_truncated_oracle_exits_disagreement(tmp_path):
    path = tmp_path / "tight.json"
    path.write_text(json.dumps({
        "dimension": 2, "alphabet": ["a", "b"],
        "phi": {"a": [["1", "1"], ["0", "1"]], "b": [["1", "0"], ["1", "1"]]},
        "omega": {"a": 1, "b": -1}, "mode": "reach", "degree": 2,
        "eta_override": 2,
        "caps": {"oracle_len": 2, "oracle_extend": 2},
    }))
    proc = _run_cli("run", str(path))
    assert proc.returncode == 4
    assert json.loads(proc.stderr)["error"] == "oracle-disagreement"


def test_env_caps_override(tmp_path):
    proc = _run_cli(
        "run", _corpus_path("simple_reach.json"),
        env_extra={"CLOSURE_CAP_BUDGET": "1"},
    )
    assert proc.returncode == 3


def test_eta_override_flag(tmp_path):
    path = tmp_path / "no_eta.json"
    path.write_text(json.dumps({
        "dimension": 1, "alphabet": ["a", "b"],
        "phi": {"a": [["2"]], "b": [["1/2"]]},
        "omega": {"a": 1, "b": -1}, "mode": "reach", "degree": 1,
    }))
    assert _run_cli("run", str(path)).returncode == 3  # default eta refuses
    proc = _run_cli("run", str(path), "--eta-override", "2")
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["eta_used"] == 2


def test_tree_and_automaton_and_oracle_commands():
    proc = _run_cli("tree", _corpus_path("dyck_reach.json"), "--word", "aabb")
    assert proc.returncode == 0 and "height" in proc.stdout
    proc = _run_cli("tree", _corpus_path("dyck_reach.json"), "--word", "a,a,b,b",
                    "--json")
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["span"] == [0, 4] and len(doc["children"]) >= 2

    # zero_balanced_d1 runs at the default threshold: 17 counters plus sink
    proc = _run_cli("automaton", _corpus_path("zero_balanced_d1.json"),
                    "--which", "cover")
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert len(doc["states"]) == 18

    proc = _run_cli("oracle", _corpus_path("simple_reach.json"), "--max-len", "6")
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["generators"] == ["x11 - 1"]


def test_verify_corpus_empty_directory(tmp_path):
    assert verify_corpus(str(tmp_path)) == []
    proc = _run_cli("verify-corpus", "--corpus-dir", str(tmp_path))
    assert proc.returncode == 0 and proc.stdout.strip() == ""


def test_verify_corpus_flags_corrupted_expectation(tmp_path):
    with open(_corpus_path("simple_reach.json")) as fh:
        doc = json.load(fh)
    doc["expected_generators"] = ["x11 - 2"]  # deliberately wrong
    (tmp_path / "corrupt.json").write_text(json.dumps(doc))
    entries = verify_corpus(str(tmp_path))
    assert [e["status"] for e in entries] == ["FAIL"]
    proc = _run_cli("verify-corpus", "--corpus-dir", str(tmp_path))
    assert proc.returncode == 1


def test_run_pipeline_accepts_regular_mode(tmp_path):
    doc = {
        "dimension": 2, "alphabet": ["a", "b"],
        "phi": {"a": [["1", "1"], ["0", "1"]], "b": [["1", "0"], ["1", "1"]]},
        "omega": {"a": 1, "b": -1}, "mode": "regular", "degree": 1,
        "nfa": {
            "states": ["q"], "initial": ["q"], "accepting": ["q"],
            "transitions": [["q", "a", "q"], ["q", "b", "q"]],
        },
    }
    report = run_pipeline(Instance(doc))
    assert report["mode"] == "regular"
    assert report["generators"] == []


def test_missing_nfa_for_regular_mode_is_schema_error():
    doc = {
        "dimension": 1, "alphabet": ["a"], "phi": {"a": [["2"]]},
        "omega": {"a": 1}, "mode": "regular", "degree": 1,
    }
    from zclosure.errors import SchemaError

    with pytest.raises(SchemaError):
        Instance(doc)
