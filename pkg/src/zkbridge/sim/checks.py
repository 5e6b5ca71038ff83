"""Safety and liveness verdicts computed from a trace's event log alone.

Nothing here touches live simulator objects: every property is recomputed
from the logged bytes (VAAs, payloads, digests), so a saved JSONL trace can
be re-checked independently of the run that produced it.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from typing import Any, Dict, List

from ..codec import decode_vaa, vaa_body_hash
from ..crypto import GuardianSet, commitment, domain_tag, field_to_bytes, secret_hash, verify_quorum
from ..errors import MalformedVaa
from ..portal import legacy_commitment

PROPERTIES = (
    "replay_safety",
    "authenticity",
    "finality_alignment",
    "parameter_binding",
    "no_front_running",
    "single_consumption",
    "idempotence",
    "knowledge_gating",
    "atomicity",
    "receipt_integrity",
    "liveness",
)
MAX_WITNESSES = 5


def _b(x: str) -> bytes:
    return bytes.fromhex(x[2:] if x.startswith("0x") else x)


def _hex(b: bytes) -> str:
    return "0x" + b.hex()


class _Verdict:
    def __init__(self, applicable: bool = True):
        self.applicable = applicable
        self.checked = 0
        self.witnesses: List[Dict[str, Any]] = []
        self.violations = 0
        self.legacy_violations = 0

    def check(self, ok: bool, witness: Dict[str, Any] | None = None, legacy: bool = False) -> None:
        self.checked += 1
        if ok:
            return
        self.violations += 1
        self.legacy_violations += bool(legacy)
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append({**(witness or {}), "legacy": legacy})

    def result(self) -> Dict[str, Any]:
        if not self.applicable:
            status = "n/a"
        else:
            status = "violated" if self.violations else "pass"
        return {
            "status": status,
            "checked": self.checked,
            "violations": self.violations,
            "legacy_only": bool(self.violations) and self.violations == self.legacy_violations,
            "witnesses": self.witnesses,
        }


def _by_type(events):
    out = defaultdict(list)
    for e in events:
        out[e["type"]].append(e)
    return out


def check_properties(trace) -> Dict[str, Any]:
    header = trace.header
    ev = _by_type(trace.events)
    gset = GuardianSet(index=header["guardian_set"]["index"], keys=tuple(_b(k) for k in header["guardian_set"]["keys"]))
    origin = (header["origin"]["chain"], _b(header["origin"]["emitter"]))
    delays = {1: header["finality"]["confirmed_delay"], 32: header["finality"]["finalized_delay"]}

    calls = ev["portal_call"]
    ok_calls = [c for c in calls if c["outcome"] == "ok"]
    consumed_ev = {e["call_id"]: e for e in ev["VaaConsumed"]}
    enqueued = ev["InboxEnqueued"]
    leaf_enqueue = {e["leaf_index"]: e for e in enqueued}
    aztec_ok = [a for a in ev["aztec_consume"] if a["outcome"] == "ok"]
    emitted = {e["h"]: e for e in ev["vaa_emitted"]}
    verdicts: Dict[str, Any] = {}

    # replay safety: at most one successful Portal consumption per h
    v = _Verdict()
    per_h = Counter(c["h"] for c in ok_calls)
    for h, n in per_h.items():
        v.check(n <= 1, {"h": h, "successes": n})
    verdicts["replay_safety"] = v.result()

    # authenticity: accepted VAAs carry a quorum and the configured origin
    v = _Verdict()
    for c in ok_calls:
        try:
            vaa = decode_vaa(_b(c["vaa"]))
        except MalformedVaa:
            v.check(False, {"call_id": c["call_id"], "reason": "undecodable"})
            continue
        body = vaa.body
        signed = body.guardian_set_index == gset.index and verify_quorum(vaa_body_hash(body), vaa.signatures, gset)
        same_origin = (body.emitter_chain, body.emitter_address) == origin
        v.check(signed and same_origin, {"call_id": c["call_id"], "signed": signed, "origin_ok": same_origin})
    verdicts["authenticity"] = v.result()

    # finality alignment
    v = _Verdict()
    orphaned_confirmed = 0
    for e in ev["vaa_emitted"]:
        delay = delays.get(e["consistency_level"])
        v.check(delay is not None and e["slot"] >= e["post_slot"] + delay,
                {"h": e["h"], "slot": e["slot"], "post_slot": e["post_slot"]})
    for c in ok_calls:
        src = emitted.get(c["h"])
        ok = src is not None and c["tick"] >= src["post_slot"] + delays.get(src["consistency_level"], 1 << 62)
        v.check(ok, {"call_id": c["call_id"], "h": c["h"], "reason": "accepted before finality or never attested"})
    for r in ev["reorg"]:
        for m in r["reverted"]:
            if m["attested"] and m["finality"] == "finalized":
                v.check(False, {"sequence": m["sequence"], "reason": "finalized attestation reverted"})
            elif m["attested"]:
                orphaned_confirmed += 1
    verdicts["finality_alignment"] = v.result()

    # parameter binding: normative enqueues recomputed from the logged payload
    v = _Verdict(applicable=True)
    for e in enqueued:
        if e["path"] != "normative":
            continue
        payload = _b(consumed_ev[e["call_id"]]["payload"])
        dom = domain_tag(origin[0], origin[1], e["seq"])
        ok = (
            len(payload) >= 32
            and _b(e["c"]) == field_to_bytes(commitment(dom, payload[32:]))
            and _b(e["secret_hash"]) == payload[:32]
        )
        v.check(ok, {"h": e["h"], "leaf_index": e["leaf_index"]})
    verdicts["parameter_binding"] = v.result()

    # no front-running: each h has one enqueued pair, equal to the body-derived pair
    v = _Verdict()
    pairs = defaultdict(set)
    for e in enqueued:
        pairs[e["h"]].add((e["c"], e["secret_hash"]))
        payload = _b(consumed_ev[e["call_id"]]["payload"])
        legacy = e["path"] == "legacy"
        if legacy:
            expected_c = field_to_bytes(legacy_commitment(payload))
        else:
            expected_c = field_to_bytes(commitment(domain_tag(origin[0], origin[1], e["seq"]), payload[32:]))
        expected_sh = payload[:32] if len(payload) >= 32 else None
        ok = _b(e["c"]) == expected_c and expected_sh is not None and _b(e["secret_hash"]) == expected_sh
        v.check(
            ok,
            {
                "h": e["h"],
                "enqueued": [e["c"], e["secret_hash"]],
                "payload_derived": [_hex(expected_c), _hex(expected_sh) if expected_sh else None],
            },
            legacy=legacy,
        )
    for h, ps in pairs.items():
        v.check(len(ps) <= 1, {"h": h, "distinct_pairs": sorted(map(list, ps))})
    verdicts["no_front_running"] = v.result()

    # single consumption on Aztec
    v = _Verdict()
    per_leaf = Counter(a["leaf_index"] for a in aztec_ok)
    for leaf, n in per_leaf.items():
        v.check(n <= 1, {"leaf_index": leaf, "consumptions": n})
    prev = 0
    for a in ev["aztec_consume"]:
        expected = prev + 1 if a["outcome"] == "ok" else prev
        v.check(a["count_after"] == expected, {"call_id": a["call_id"], "count_after": a["count_after"]})
        prev = a["count_after"]
    verdicts["single_consumption"] = v.result()

    # idempotence per origin sequence
    v = _Verdict()
    enq_per_seq = Counter(e["seq"] for e in enqueued)
    for seq, n in enq_per_seq.items():
        v.check(n <= 1, {"sequence": seq, "enqueues": n})
    cons_per_seq = Counter(leaf_enqueue[a["leaf_index"]]["seq"] for a in aztec_ok if a["leaf_index"] in leaf_enqueue)
    for seq, n in cons_per_seq.items():
        v.check(n <= 1, {"sequence": seq, "consumptions": n})
    verdicts["idempotence"] = v.result()

    # knowledge gating: successful consumptions used a preimage of the leaf's secretHash
    v = _Verdict()
    for a in aztec_ok:
        leaf = leaf_enqueue.get(a["leaf_index"])
        s = a["secret"]
        ok = leaf is not None and isinstance(s, str) and secret_hash(int(s, 16)) == _b(leaf["secret_hash"])
        v.check(ok, {"call_id": a["call_id"], "leaf_index": a["leaf_index"]})
    verdicts["knowledge_gating"] = v.result()

    # atomicity: failed transitions leave digests unchanged and emit nothing
    v = _Verdict()
    effect_calls = {e["call_id"] for e in ev["VaaConsumed"]} | {e["call_id"] for e in enqueued}
    for c in calls + ev["aztec_consume"]:
        if c["outcome"] == "ok":
            continue
        ok = c["pre_digest"] == c["post_digest"] and c["call_id"] not in effect_calls
        v.check(ok, {"call_id": c["call_id"], "type": c["type"]})
    verdicts["atomicity"] = v.result()

    # receipts: what Solana records matches what the Portal consumed
    v = _Verdict()
    by_seq = {e["seq"]: e for e in enqueued}
    for r in ev["receipt_record"]:
        if r["outcome"] != "ok":
            continue
        raw = _b(r["receipt"])
        seq = int.from_bytes(raw[35:43], "big")
        src = by_seq.get(seq)
        ok = (
            src is not None
            and raw[0] == 1
            and int.from_bytes(raw[1:3], "big") == origin[0]
            and raw[3:35] == origin[1]
            and raw[43:75] == _b(src["c"])
            and r["orig_sequence"] == seq
        )
        v.check(ok, {"call_id": r["call_id"], "orig_sequence": seq})
    verdicts["receipt_integrity"] = v.result()

    # liveness: under fairness, every live message is consumed at the Portal and on Aztec
    live_seqs = [p["sequence"] for p in ev["origin_post"] if p.get("live") and _b(p["emitter"]) == origin[1]]
    reverted = {m["sequence"] for r in ev["reorg"] for m in r["reverted"] if not m["attested"]}
    applicable = bool(header.get("fair")) and header.get("honest_secret_holders", 0) > 0 and bool(live_seqs)
    v = _Verdict(applicable=applicable)
    if applicable:
        portal_ok_seqs = {e["seq"] for e in enqueued}
        consumed_seqs = set(cons_per_seq)
        for seq in live_seqs:
            if seq in reverted:
                continue
            enq = by_seq.get(seq)
            legacy = enq is not None and enq["path"] == "legacy"
            v.check(
                seq in portal_ok_seqs and seq in consumed_seqs,
                {"sequence": seq, "portal": seq in portal_ok_seqs, "aztec": seq in consumed_seqs},
                legacy=legacy,
            )
    verdicts["liveness"] = v.result()

    errors_seen = Counter(c.get("error") for c in calls if c["outcome"] != "ok")
    end = ev["end"][-1] if ev["end"] else {}
    verdicts["summary"] = {
        "portal_successes": len(ok_calls),
        "portal_errors": dict(sorted(errors_seen.items())),
        "enqueues": len(enqueued),
        "aztec_consumptions": len(aztec_ok),
        "consumer_count": end.get("consumer_count", len(aztec_ok)),
        "orphaned_confirmed": orphaned_confirmed,
        "receipts_recorded": sum(1 for r in ev["receipt_record"] if r["outcome"] == "ok"),
        "quiescent": end.get("quiescent"),
        "final_tick": end.get("tick"),
    }
    return verdicts


def failing_properties(verdicts: Dict[str, Any], include_legacy: bool = False) -> List[str]:
    """Names of violated properties, skipping legacy-only witnesses by default."""
    out = []
    for name in PROPERTIES:
        v = verdicts.get(name)
        if v and v["status"] == "violated" and (include_legacy or not v["legacy_only"]):
            out.append(name)
    return out
