import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from zkbridge.codec import decode_vaa
from zkbridge.crypto import secret_hash
from zkbridge.errors import MissingEnqueueEvent
from zkbridge.relayer import Relayer, RelayerConfig, TaskKind, derive_consume_task

import helpers


class StubWorld:
    def __init__(self, legacy=False):
        self.portal, self.aztec = helpers.portal(legacy=legacy)
        self.origin_identity = (1, helpers.ORIGIN)
        self.receipt_identity = (2, self.portal.config.receipt_emitter)
        self.receipts_enabled = False
        self.rng = random.Random(0)

    def rng_bytes(self, n):
        return self.rng.randbytes(n)

    def submit(self, actor, raw, secret_hash=None):
        if secret_hash is None:
            return self.portal.consume(raw)
        return self.portal.consume_with_secret(raw, secret_hash)

    def consume_on_aztec(self, actor, c, leaf_index, secret, sequence=None):
        return self.aztec.consume_from_inbox(c, leaf_index, secret)


# --- backoff -------------------------------------------------------------------

def test_default_backoff_schedule():
    cfg = RelayerConfig()
    assert [cfg.backoff(i) for i in range(7)] == [1, 2, 4, 8, 16, 16, 16]


def test_fractional_multiplier_rounds_up():
    cfg = RelayerConfig(base_backoff=1, backoff_multiplier=Fraction(3, 2), backoff_cap=100)
    assert [cfg.backoff(i) for i in range(4)] == [1, 2, 3, 4]


@given(st.integers(1, 5), st.fractions(1, 4), st.integers(0, 40), st.integers(0, 30))
def test_backoff_bounded_and_monotone(base, mult, extra, attempt):
    cfg = RelayerConfig(base_backoff=base, backoff_multiplier=mult, backoff_cap=base + extra)
    assert base <= cfg.backoff(attempt) <= cfg.backoff_cap
    assert cfg.backoff(attempt) <= cfg.backoff(attempt + 1)


@pytest.mark.parametrize("kw", [{"base_backoff": 0}, {"max_retries": 0}, {"backoff_multiplier": 0.5},
                                {"backoff_cap": 0}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        RelayerConfig(**kw)


# --- derive_consume_task -------------------------------------------------------

def test_derive_consume_task_copies_event():
    p, _ = helpers.portal()
    raw = helpers.raw_vaa(s=7)
    res = p.consume(raw)
    task = derive_consume_task(decode_vaa(raw), 7, p.events, tick=3)
    assert task.kind is TaskKind.CONSUME_ON_AZTEC
    assert (task.payload["c"], task.payload["leaf_index"]) == (res.c, res.leaf_index)
    assert secret_hash(task.payload["secret"]) == p.events[-1].secret_hash
    assert task.next_eligible_tick == 3


def test_derive_consume_task_missing():
    p, _ = helpers.portal()
    with pytest.raises(MissingEnqueueEvent):
        derive_consume_task(decode_vaa(helpers.raw_vaa()), 7, p.events)


# --- step ------------------------------------------------------------------------

def honest(i=0, secrets=None, **kw):
    return Relayer(i, RelayerConfig(**kw), secrets={0: 7} if secrets is None else secrets)


def test_submit_then_retry_then_consume():
    w = StubWorld()
    r = honest()
    r.deliver(decode_vaa(helpers.raw_vaa(s=7)), w, 0)
    (out,) = r.step(w, 0)
    assert out["outcome"] == "success" and out["task_kind"] == "SubmitVaa"
    assert r.step(w, 0) == []  # follow-up waits one tick
    (out,) = r.step(w, 1)
    assert out == {"relayer_id": 0, "task_kind": "ConsumeOnAztec", "attempt": 0, "error": "NotYetIncluded",
                   "outcome": "retry", "next_eligible_tick": 2}
    w.aztec.rollup_tick()
    (out,) = r.step(w, 2)
    assert out["outcome"] == "success" and out["attempt"] == 1
    assert w.aztec.consumer.count == 1 and r.idle()


def test_retries_exhaust():
    w = StubWorld()
    r = honest(max_retries=3)
    r.deliver(decode_vaa(helpers.raw_vaa(s=7)), w, 0)
    outcomes = []
    for t in range(200):
        outcomes += r.step(w, t)
    consume = [o for o in outcomes if o["task_kind"] == "ConsumeOnAztec"]
    assert [o["outcome"] for o in consume] == ["retry", "retry", "exhausted"]
    gaps = [b["next_eligible_tick"] - a["next_eligible_tick"] for a, b in zip(consume, consume[1:-1])]
    assert all(g <= 16 for g in gaps)


def test_two_relayers_race():
    w = StubWorld()
    rs = [honest(0), honest(1)]
    vaa = decode_vaa(helpers.raw_vaa(s=7))
    for r in rs:
        r.deliver(vaa, w, 0)
    outs = [o for r in rs for o in r.step(w, 0)]
    assert sorted(o["outcome"] for o in outs) == ["dropped", "success"]
    assert [o.get("error") for o in outs if o["outcome"] == "dropped"] == ["AlreadyConsumed"]
    w.aztec.rollup_tick()
    outs = [o for r in rs for o in r.step(w, 1)]
    assert sorted(o["outcome"] for o in outs) == ["dropped", "success"]
    assert w.aztec.consumer.count == 1


def test_forged_vaa_dropped_without_follow_up():
    w = StubWorld()
    r = honest()
    r.deliver(decode_vaa(helpers.raw_vaa(s=7)), w, 0)
    r.tasks[0].payload["vaa"] = r.tasks[0].payload["vaa"][:-1] + b"\x00"
    (out,) = r.step(w, 0)
    assert out["outcome"] == "dropped" and out["error"] == "InvalidVaa"
    assert r.idle()


def test_dishonest_relayer_never_consumes():
    w = StubWorld()
    r = Relayer(0, RelayerConfig(honest=False))
    r.deliver(decode_vaa(helpers.raw_vaa()), w, 0)
    r.step(w, 0)
    assert r.idle() and len(w.portal.consumed) == 1


def test_unrelated_emitter_ignored():
    w = StubWorld()
    r = honest()
    r.deliver(decode_vaa(helpers.raw_vaa(emitter=helpers.OTHER)), w, 0)
    assert r.idle()


def test_legacy_honest_relayer_uses_true_secret_hash():
    w = StubWorld(legacy=True)
    r = Relayer(0, RelayerConfig(), secrets={0: 7}, legacy=True)
    r.deliver(decode_vaa(helpers.raw_vaa(s=7)), w, 0)
    r.step(w, 0)
    assert w.aztec.leaves[0].secret_hash == secret_hash(7)


def test_legacy_dishonest_relayer_picks_secret_hash():
    w = StubWorld(legacy=True)
    r = Relayer(0, RelayerConfig(honest=False), legacy=True)
    r.deliver(decode_vaa(helpers.raw_vaa(s=7)), w, 0)
    r.step(w, 0)
    assert w.aztec.leaves[0].secret_hash != secret_hash(7)
