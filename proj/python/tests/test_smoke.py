import json

import pytest

import hubsim


def test_scenario_round_trip(tmp_path):
    s = hubsim.make_scenario("M2", seed=3, difficulty="hard")
    assert s["seed"] == 3
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(s))
    assert hubsim.load_scenario(str(path)) == s


def test_invalid_scenario_is_rejected():
    s = hubsim.make_scenario("M1")
    s["params"]["quorum_commit"] = 0.9
    with pytest.raises(ValueError):
        hubsim.validate_scenario(s)


def test_clutter_reference_values():
    assert round(hubsim.global_clutter(0, 0, 0, 0, "Collective"), 4) == 24.2704
    assert round(hubsim.global_clutter(0, 0, 0, 0, "IA"), 4) == 26.7395
    assert round(hubsim.global_clutter(2, 3, 1, 1, "Collective"), 4) == 27.5748


def test_probe_schedule():
    assert hubsim.schedule_probes(0.0) == [50, 110, 170, 230, 290, 350]


def test_headless_run_and_replay(tmp_path):
    s = hubsim.make_scenario("M3", seed=5)
    out = hubsim.run(s, policy="greedy-best", report=True)
    result = out["result"]
    assert len(result["probes"]) == 12
    assert result["decisions"]
    assert "Decision time" in out["report"]

    log = tmp_path / "trial.events.jsonl"
    hubsim.write_log(str(log), s, policy="greedy-best")
    rep = hubsim.replay(str(log))
    assert rep["events_identical"] and rep["metrics_identical"]
    assert rep["result"]["overall"] == result["overall"]


def test_replay_of_truncated_log_names_last_seq(tmp_path):
    log = tmp_path / "trial.events.jsonl"
    hubsim.write_log(str(log), hubsim.make_scenario("M1", seed=2))
    lines = log.read_text().splitlines()
    log.write_text("\n".join(lines[:50]) + "\n" + lines[50][:10])
    with pytest.raises(hubsim.LogError, match="last valid seq 49"):
        hubsim.replay(str(log))


def test_engine_steps_and_accepts_commands():
    e = hubsim.Engine(hubsim.make_scenario("M3", seed=3))
    e.run(5)
    e.submit_command({"kind": "investigate", "collective": "I", "target": 99})
    events = e.step()
    results = [ev for ev in events if ev["type"] == "CommandResult"]
    assert len(results) == 1
    assert results[0]["verdict"]["accepted"] is False
    snap = e.snapshot()
    assert len(snap["collectives"]) == 4
    assert e.tick == 6


def test_session_protocol():
    session = hubsim.Session(hubsim.make_scenario("M2", seed=1, difficulty="easy"))
    hello, snapshot = session.connect()[:2]
    assert hello["type"] == "hello" and hello["v"] == hubsim.PROTOCOL_VERSION
    assert snapshot["type"] == "snapshot"
    replies = session.handle({"v": 1, "type": "bogus"})
    assert replies[0]["type"] == "error"
    diffs = [m for _ in range(5) for m in session.tick() if m["type"] == "diff"]
    assert diffs and diffs[-1]["frame"] == session.frame
    session.disconnect()
    assert not session.running


def test_batch_aggregates_seeds():
    out = hubsim.batch(hubsim.make_scenario("M1", difficulty="easy"), seed_start=1, seeds=2)
    assert len(out["batch"]["trials"]) == 2
