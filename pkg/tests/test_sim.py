import copy
import json

import pytest
from hypothesis import given, settings, strategies as st

from zkbridge.errors import AlreadyConsumed, InvalidScenario
from zkbridge.sim import (
    PROPERTIES,
    ScenarioSpec,
    TraceReport,
    World,
    adversarial_scenario,
    catalog_names,
    catalog_scenario,
    check_properties,
    failing_properties,
    load_scenario,
    run_scenario,
)
from zkbridge.sim.scenario import ActionSpec, MessageSpec


def statuses(report):
    return {k: v["status"] for k, v in report.verdicts.items() if k != "summary"}


def test_catalog_contents():
    assert {"happy_path", "race3", "replay", "forge", "legacy_frontrun", "reorg", "receipts"} <= set(catalog_names())


@pytest.mark.parametrize("name", ["happy_path", "race3", "replay", "forge", "reorg", "receipts"])
def test_catalog_scenarios_have_no_violations(name):
    report = run_scenario(catalog_scenario(name), 42)
    assert failing_properties(report.verdicts, include_legacy=True) == []
    assert report.verdicts["summary"]["quiescent"]


def test_happy_path():
    report = run_scenario(catalog_scenario("happy_path"), 0)
    s = statuses(report)
    assert s["replay_safety"] == s["idempotence"] == s["liveness"] == "pass"
    assert report.verdicts["summary"]["consumer_count"] == 1


def test_replay_scenario_counts():
    report = run_scenario(catalog_scenario("replay"), 42)
    summary = report.verdicts["summary"]
    assert summary["portal_successes"] == 1
    assert summary["portal_errors"] == {"AlreadyConsumed": 5}


def test_forge_scenario_no_forged_success():
    report = run_scenario(catalog_scenario("forge"), 42)
    ok = [c for c in report.of_type("portal_call") if c["outcome"] == "ok"]
    assert all(c["actor"] != "adversary" for c in ok)
    assert report.verdicts["summary"]["portal_errors"].get("WrongOrigin", 0) >= 1
    assert report.verdicts["summary"]["portal_errors"].get("InvalidVaa", 0) >= 1


def test_legacy_frontrun_flags_violation():
    report = run_scenario(catalog_scenario("legacy_frontrun"), 42)
    v = report.verdicts["no_front_running"]
    assert v["status"] == "violated" and v["legacy_only"]
    w = v["witnesses"][0]
    assert w["enqueued"][1] != w["payload_derived"][1]
    # legacy-only findings do not fail the normative check
    assert "no_front_running" not in failing_properties(report.verdicts)
    assert "no_front_running" in failing_properties(report.verdicts, include_legacy=True)


def test_empty_trace_is_vacuous():
    spec = ScenarioSpec(name="empty", messages=[], tick_budget=3)
    report = run_scenario(spec, 0)
    s = statuses(report)
    assert s.pop("liveness") == "n/a"
    assert set(s.values()) == {"pass"}
    assert all(report.verdicts[p]["checked"] == 0 for p in s)


def test_unfair_run_liveness_not_applicable():
    spec = catalog_scenario("happy_path")
    spec.fair = False
    assert run_scenario(spec, 0).verdicts["liveness"]["status"] == "n/a"


# --- determinism and trace format ---------------------------------------------

@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_same_seed_same_trace(seed):
    spec = adversarial_scenario(seed)
    assert run_scenario(spec, seed).to_jsonl() == run_scenario(spec, seed).to_jsonl()


def test_different_seeds_differ():
    spec = catalog_scenario("happy_path")
    assert run_scenario(spec, 1).to_jsonl() != run_scenario(spec, 2).to_jsonl()


def test_jsonl_round_trip():
    report = run_scenario(catalog_scenario("race3"), 5)
    text = report.to_jsonl()
    lines = text.splitlines()
    assert json.loads(lines[0])["type"] == "header"
    assert json.loads(lines[-1])["type"] == "verdicts"
    again = TraceReport.from_jsonl(text)
    assert again.to_jsonl() == text
    assert check_properties(again) == report.verdicts


# --- checker catches doctored traces --------------------------------------------

def doctored(name, edit, seed=42):
    report = run_scenario(catalog_scenario(name), seed)
    t = TraceReport.from_jsonl(report.to_jsonl())
    edit(t.events)
    return check_properties(t)


def test_checker_flags_double_success():
    def edit(events):
        ok = next(e for e in events if e["type"] == "portal_call" and e["outcome"] == "ok")
        events.append({**ok, "call_id": 999})
    assert doctored("happy_path", edit)["replay_safety"]["status"] == "violated"


def test_checker_flags_wrong_commitment():
    def edit(events):
        enq = next(e for e in events if e["type"] == "InboxEnqueued")
        enq["c"] = "0x" + "11" * 32
    v = doctored("happy_path", edit)
    assert v["parameter_binding"]["status"] == "violated"
    assert v["no_front_running"]["status"] == "violated" and not v["no_front_running"]["legacy_only"]


def test_checker_flags_state_change_on_failure():
    def edit(events):
        bad = next(e for e in events if e["type"] == "portal_call" and e["outcome"] == "error")
        bad["post_digest"] = "0x" + "00" * 64
    assert doctored("replay", edit)["atomicity"]["status"] == "violated"


def test_checker_flags_early_emission():
    def edit(events):
        e = next(e for e in events if e["type"] == "vaa_emitted")
        e["slot"] = e["post_slot"]
    assert doctored("happy_path", edit)["finality_alignment"]["status"] == "violated"


def test_checker_flags_unsigned_acceptance():
    def edit(events):
        from zkbridge.codec import Vaa, decode_vaa, encode_vaa

        ok = next(e for e in events if e["type"] == "portal_call" and e["outcome"] == "ok")
        v = decode_vaa(bytes.fromhex(ok["vaa"][2:]))
        ok["vaa"] = "0x" + encode_vaa(Vaa(v.body, v.signatures[:3])).hex()
    assert doctored("happy_path", edit)["authenticity"]["status"] == "violated"


def test_checker_flags_double_aztec_consumption():
    def edit(events):
        ok = next(e for e in events if e["type"] == "aztec_consume" and e["outcome"] == "ok")
        events.append({**ok, "call_id": 999, "count_after": ok["count_after"] + 1})
    v = doctored("happy_path", edit)
    assert v["single_consumption"]["status"] == "violated"
    assert v["idempotence"]["status"] == "violated"


def test_checker_flags_wrong_secret():
    def edit(events):
        ok = next(e for e in events if e["type"] == "aztec_consume" and e["outcome"] == "ok")
        ok["secret"] = "0x" + "00" * 31 + "05"
    assert doctored("happy_path", edit)["knowledge_gating"]["status"] == "violated"


def test_checker_flags_missing_consumption():
    def edit(events):
        events[:] = [e for e in events if not (e["type"] == "aztec_consume" and e["outcome"] == "ok")]
    assert doctored("happy_path", edit)["liveness"]["status"] == "violated"


# --- direct replay on Aztec -------------------------------------------------

def test_aztec_replay_after_run():
    world = World(catalog_scenario("happy_path"), 0)
    report = world.run()
    ok = next(e for e in report.of_type("aztec_consume") if e["outcome"] == "ok")
    leaf = world.aztec.leaves[ok["leaf_index"]]
    with pytest.raises(AlreadyConsumed):
        world.consume_on_aztec("adversary", leaf.content, ok["leaf_index"], int(ok["secret"], 16))
    assert world.aztec.consumer.count == 1
    assert world.events[-1]["error"] == "AlreadyConsumed" and world.events[-1]["count_after"] == 1


# --- scenario parsing ---------------------------------------------------------------

def test_scenario_dict_round_trip():
    spec = adversarial_scenario(3)
    assert ScenarioSpec.from_dict(json.loads(json.dumps(spec.to_dict()))) == spec


@pytest.mark.parametrize(
    "bad",
    [
        {"guardians": 0},
        {"messages": [{"finality": "soft"}]},
        {"adversary": {"actions": [{"kind": "Teleport"}]}},
        {"adversary": {"actions": [{"kind": "DuplicateSubmit"}]}},
        {"adversary": {"random": {"rate": 2}}},
        {"finality": {"confirmed_delay": 9, "finalized_delay": 3}},
        {"messages": [{"m": "zz"}]},
        {"unknown_field": 1},
    ],
)
def test_invalid_scenarios(bad):
    with pytest.raises(InvalidScenario):
        ScenarioSpec.from_dict(bad)


def test_load_scenario_from_file(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(catalog_scenario("race3").to_dict()))
    assert load_scenario(p) == catalog_scenario("race3")
    with pytest.raises(InvalidScenario):
        load_scenario("no_such_catalog_entry")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(InvalidScenario):
        load_scenario(tmp_path / "bad.json")


def test_property_names_are_fixed():
    report = run_scenario(catalog_scenario("happy_path"), 0)
    assert set(report.verdicts) == set(PROPERTIES) | {"summary"}


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_small_adversarial_family_is_safe(seed):
    report = run_scenario(adversarial_scenario(seed), seed)
    assert failing_properties(report.verdicts, include_legacy=True) == []
