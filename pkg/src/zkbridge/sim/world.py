"""Deterministic discrete-event harness composing origin, guardians, Portal,
Aztec, relayers and a rushing adversary.

One origin slot per scheduler tick. Within a tick the order is fixed:
origin posts, guardian emission, adversary pre-emption, delivery to
relayers, relayer steps, then (every ``rollup_every`` ticks) a rollup.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

from .. import errors
from ..aztec import AztecState
from ..codec import Vaa, decode_vaa, encode_receipt, encode_vaa, vaa_body_hash
from ..crypto import BN254_R, devnet_keys, field_to_bytes, keccak256, secret_hash
from ..guardians import FinalityPolicy, GuardianNode
from ..origin import SOLANA_CHAIN_ID, Finality, OriginState, PostedMessage
from ..portal import ETHEREUM_CHAIN_ID, Portal, PortalConfig
from ..relayer import Relayer, RelayerConfig
from .checks import check_properties
from .scenario import TARGETED_KINDS, ActionSpec, ScenarioSpec

ORIGIN_EMITTER = keccak256(b"zkcb/origin-emitter-pda")
ROGUE_EMITTER = keccak256(b"zkcb/rogue-emitter")
L2_INSTANCE = keccak256(b"zkcb/aztec-l2-instance")
PORTAL_ADDRESS = "0x" + keccak256(b"zkcb/portal")[12:].hex()
ADVERSARY = "adversary"


def jsonable(v: Any) -> Any:
    if isinstance(v, (bytes, bytearray)):
        return "0x" + bytes(v).hex()
    if isinstance(v, enum.Enum):
        return v.value if not isinstance(v, enum.IntEnum) else v.name.lower()
    if isinstance(v, dict):
        return {k: jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    return v


def dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


@dataclass
class TraceReport:
    header: Dict[str, Any]
    events: List[Dict[str, Any]]
    verdicts: Dict[str, Any] = field(default_factory=dict)

    def to_jsonl(self) -> str:
        lines = [dumps(self.header)] + [dumps(e) for e in self.events]
        lines.append(dumps({"type": "verdicts", **self.verdicts}))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "TraceReport":
        records = [json.loads(line) for line in text.splitlines() if line.strip()]
        if not records or records[0].get("type") != "header":
            raise errors.InvalidScenario("trace must start with a header record")
        header, body = records[0], records[1:]
        verdicts = {}
        if body and body[-1].get("type") == "verdicts":
            verdicts = dict(body.pop())
            verdicts.pop("type")
        return cls(header, body, verdicts)

    def of_type(self, kind: str) -> List[Dict[str, Any]]:
        return [e for e in self.events if e["type"] == kind]


@dataclass
class _Inflight:
    deliver_at: int
    vaa: Vaa
    dropped: bool = False
    delayed: bool = False


class World:
    def __init__(self, spec: ScenarioSpec, seed: int):
        self.spec = spec.validate()
        self.seed = seed
        self.rng = random.Random(seed)
        policy = FinalityPolicy(spec.confirmed_delay, spec.finalized_delay)
        self.guardians = GuardianNode(devnet_keys(spec.guardians), policy=policy)
        gset = self.guardians.set
        self.origin = OriginState(emitter_address=ORIGIN_EMITTER, guardian_set=gset)
        self.rogue = OriginState(emitter_address=ROGUE_EMITTER, guardian_set=gset)
        self.aztec = AztecState()
        self.portal = Portal(
            PortalConfig(
                emitter_chain=SOLANA_CHAIN_ID,
                emitter=ORIGIN_EMITTER,
                guardian_set=gset,
                l2_instance=L2_INSTANCE,
                address=PORTAL_ADDRESS,
                legacy_enabled=spec.legacy_enabled,
            ),
            inbox=self.aztec,
        )
        self.aztec.set_portal_once(PORTAL_ADDRESS)

        self.secrets: Dict[int, int] = {}
        self.relayers = [
            Relayer(
                relayer_id=i,
                config=RelayerConfig(
                    max_retries=r.max_retries,
                    base_backoff=r.base_backoff,
                    backoff_multiplier=r.backoff_multiplier,
                    backoff_cap=r.backoff_cap,
                    honest=r.honest,
                ),
                secrets=self.secrets if r.holds_secrets and r.honest else None,
                legacy=r.legacy,
            )
            for i, r in enumerate(spec.relayers)
        ]
        self.events: List[Dict[str, Any]] = []
        self.tick = 0
        self.msg_seq: Dict[int, int] = {}
        self.vaas_by_seq: Dict[int, Vaa] = {}
        self.inflight: List[_Inflight] = []
        self.rogue_ready: List[Vaa] = []
        self.pending_actions = sorted(spec.actions, key=lambda a: a.tick)
        self.reorder = False
        self._call = 0

    # identities the relayers route on
    @property
    def origin_identity(self) -> Tuple[int, bytes]:
        return (SOLANA_CHAIN_ID, ORIGIN_EMITTER)

    @property
    def receipt_identity(self) -> Tuple[int, bytes]:
        return (ETHEREUM_CHAIN_ID, self.portal.config.receipt_emitter)

    @property
    def receipts_enabled(self) -> bool:
        return self.spec.receipts

    def rng_bytes(self, n: int) -> bytes:
        return self.rng.randbytes(n)

    def log(self, record_type: str, /, **fields) -> Dict[str, Any]:
        rec = {"type": record_type, "tick": self.tick, **jsonable(fields)}
        self.events.append(rec)
        return rec

    def header(self) -> Dict[str, Any]:
        spec = self.spec
        gset = self.guardians.set
        honest_holders = [r for r in self.relayers if r.config.honest and r.secrets is not None]
        return jsonable(
            {
                "type": "header",
                "scenario": spec.name,
                "seed": self.seed,
                "origin": {"chain": SOLANA_CHAIN_ID, "emitter": ORIGIN_EMITTER},
                "portal": {
                    "address": PORTAL_ADDRESS,
                    "l2_instance": L2_INSTANCE,
                    "rollup_version": self.portal.config.rollup_version,
                    "legacy_enabled": spec.legacy_enabled,
                    "receipt_chain": ETHEREUM_CHAIN_ID,
                    "receipt_emitter": self.portal.config.receipt_emitter,
                },
                "guardian_set": {"index": gset.index, "keys": list(gset.keys)},
                "finality": {"confirmed_delay": spec.confirmed_delay, "finalized_delay": spec.finalized_delay},
                "fair": spec.fair,
                "relayers": len(self.relayers),
                "honest_secret_holders": len(honest_holders),
                "rollup_every": spec.rollup_every,
                "tick_budget": spec.tick_budget,
                "receipts": spec.receipts,
            }
        )

    # ---- wrapped transitions, each logged with pre/post state digests ----

    def _next_call(self) -> int:
        self._call += 1
        return self._call

    def submit(self, actor: str, raw: bytes, secret_hash: Optional[bytes] = None):
        call_id = self._next_call()
        path = "normative" if secret_hash is None else "legacy"
        pre = self.portal.digest() + self.aztec.digest()
        n_events = len(self.portal.events)
        rec: Dict[str, Any] = {"call_id": call_id, "actor": actor, "path": path, "vaa": raw}
        try:
            rec["h"] = vaa_body_hash(decode_vaa(raw).body)
        except errors.MalformedVaa:
            pass
        if secret_hash is not None:
            rec["secret_hash"] = secret_hash
        try:
            if secret_hash is None:
                result = self.portal.consume(raw)
            else:
                result = self.portal.consume_with_secret(raw, secret_hash)
        except errors.BridgeError as e:
            self.log("portal_call", **rec, outcome="error", error=type(e).__name__, pre_digest=pre,
                     post_digest=self.portal.digest() + self.aztec.digest())
            raise
        self.log("portal_call", **rec, outcome="ok", pre_digest=pre,
                 post_digest=self.portal.digest() + self.aztec.digest())
        for ev in self.portal.events[n_events:]:
            self.events.append({"tick": self.tick, "call_id": call_id, **ev.to_json()})
        return result

    def consume_on_aztec(self, actor: str, c: int, leaf_index: int, secret: int, sequence: Optional[int] = None):
        call_id = self._next_call()
        pre = self.aztec.digest()
        rec = {
            "call_id": call_id,
            "actor": actor,
            "leaf_index": leaf_index,
            "content": field_to_bytes(c) if 0 <= c < BN254_R else c,
            "secret": field_to_bytes(secret) if 0 <= secret < BN254_R else secret,
        }
        if sequence is not None:
            rec["sequence"] = sequence
        try:
            leaf = self.aztec.consume_from_inbox(c, leaf_index, secret)
        except errors.BridgeError as e:
            self.log("aztec_consume", **rec, outcome="error", error=type(e).__name__,
                     count_after=self.aztec.consumer.count, pre_digest=pre, post_digest=self.aztec.digest())
            raise
        self.log("aztec_consume", **rec, outcome="ok", count_after=self.aztec.consumer.count,
                 pre_digest=pre, post_digest=self.aztec.digest())
        return leaf

    def publish_receipt(self, actor: str, h: bytes):
        cons = self.portal.consumptions[h]
        receipt = self.portal.publish_receipt(h, result_hash=keccak256(b"zkcb/result" + field_to_bytes(cons.c)))
        msg = PostedMessage(
            batch_id=0,
            payload=encode_receipt(receipt),
            finality_flag=Finality.CONFIRMED,
            sequence=self.portal.next_receipt_sequence(),
            post_slot=self.tick,
        )
        self.guardians.observe(msg, ETHEREUM_CHAIN_ID, self.portal.config.receipt_emitter)
        self.log("receipt_published", actor=actor, h=h, sequence=msg.sequence, receipt=msg.payload)
        return receipt

    def record_receipt(self, actor: str, account, key: int):
        call_id = self._next_call()
        rec = {"call_id": call_id, "actor": actor, "orig_sequence": key, "owner": account.owner,
               "h": vaa_body_hash(account.vaa.body)}
        try:
            recorded = self.origin.record_receipt_from_vaa(account, key, current_slot=self.tick)
        except errors.BridgeError as e:
            self.log("receipt_record", **rec, outcome="error", error=type(e).__name__)
            raise
        self.log("receipt_record", **rec, outcome="ok", receipt=encode_receipt(recorded.receipt))
        return recorded

    # ---- per-tick phases ----

    def _post_messages(self, tick: int) -> None:
        for idx, m in enumerate(self.spec.messages):
            if m.tick != tick:
                continue
            live = m.payload is None
            secret = m.secret
            if live and secret is None:
                secret = self.rng.randrange(1, BN254_R)
            payload = m.payload if m.payload is not None else secret_hash(secret) + m.m
            msg = self.origin.post_wormhole_message(m.batch_id, payload, m.finality, tick)
            self.msg_seq[idx] = msg.sequence
            if secret is not None:
                self.secrets[msg.sequence] = secret
            self.guardians.observe(msg, SOLANA_CHAIN_ID, ORIGIN_EMITTER)
            self.log(
                "origin_post",
                emitter_chain=SOLANA_CHAIN_ID,
                emitter=ORIGIN_EMITTER,
                message=idx,
                sequence=msg.sequence,
                batch_id=m.batch_id,
                finality=msg.finality_flag,
                slot=tick,
                payload=payload,
                live=live,
            )

    def _emit(self, tick: int) -> None:
        for vaa in self.guardians.emit_ready_vaas(tick):
            b = vaa.body
            ident = (b.emitter_chain, b.emitter_address)
            self.log(
                "vaa_emitted",
                emitter_chain=b.emitter_chain,
                emitter=b.emitter_address,
                sequence=b.sequence,
                consistency_level=b.consistency_level,
                post_slot=b.timestamp,
                slot=tick,
                h=vaa.hash,
                vaa=encode_vaa(vaa),
            )
            if ident == self.origin_identity:
                self.vaas_by_seq[b.sequence] = vaa
                self.inflight.append(_Inflight(tick, vaa))
            elif ident == self.receipt_identity:
                self.inflight.append(_Inflight(tick, vaa))
            elif ident == (SOLANA_CHAIN_ID, ROGUE_EMITTER):
                self.rogue_ready.append(vaa)

    def _adversary(self, tick: int) -> None:
        still = []
        for a in self.pending_actions:
            if a.tick > tick:
                still.append(a)
                continue
            if a.kind in TARGETED_KINDS:
                vaa = self.vaas_by_seq.get(self.msg_seq.get(a.target, -1))
                if vaa is None:
                    still.append(a)
                    continue
                self._act(a, vaa)
            else:
                self._act(a, None)
        self.pending_actions = still

        for vaa in self.rogue_ready:
            self._attempt(lambda v=vaa: self.submit(ADVERSARY, encode_vaa(v)))
        self.rogue_ready = []

        rnd = self.spec.random_adversary
        if rnd.rate and rnd.kinds and self.rng.random() < rnd.rate:
            self._random_action(tick, rnd.kinds)

    def _random_action(self, tick: int, kinds) -> None:
        kind = self.rng.choice(list(kinds))
        vaa = None
        if kind in TARGETED_KINDS:
            if not self.vaas_by_seq:
                return
            seq = self.rng.choice(sorted(self.vaas_by_seq))
            vaa = self.vaas_by_seq[seq]
        q = self.guardians.set.quorum
        a = ActionSpec(
            kind=kind,
            tick=tick,
            count=self.rng.randint(1, 3),
            secret_hash=self.rng.randbytes(32),
            emitter=self.rng.randbytes(32),
            index=self.rng.randrange(1 << 16),
            value=self.rng.randrange(256),
            depth=self.rng.randint(1, 8),
            delay=self.rng.randint(1, 4),
            keep=self.rng.choice([0, q - 1]),
        )
        self._act(a, vaa)

    def _attempt(self, fn) -> None:
        try:
            fn()
        except errors.BridgeError:
            pass

    def _act(self, a: ActionSpec, vaa: Optional[Vaa]) -> None:
        info: Dict[str, Any] = {"kind": a.kind}
        if vaa is not None:
            info["target_h"] = vaa.hash
            info["target_sequence"] = vaa.body.sequence
        kind = a.kind
        if kind == "DuplicateSubmit":
            info["count"] = a.count
            self.log("adversary", **info)
            for _ in range(a.count):
                self._attempt(lambda: self.submit(ADVERSARY, encode_vaa(vaa)))
        elif kind == "FrontRunWithSecret":
            sh = a.secret_hash if a.secret_hash is not None else self.rng.randbytes(32)
            self.log("adversary", **info, secret_hash=sh)
            self._attempt(lambda: self.submit(ADVERSARY, encode_vaa(vaa), secret_hash=sh))
        elif kind == "ForgeEmitter":
            emitter = a.emitter if a.emitter is not None else ROGUE_EMITTER
            if emitter == vaa.body.emitter_address:
                emitter = emitter[:-1] + bytes([emitter[-1] ^ 1])
            forged = Vaa(replace(vaa.body, emitter_address=emitter), vaa.signatures)
            self.log("adversary", **info, emitter=emitter, forged_h=forged.hash)
            self._attempt(lambda: self.submit(ADVERSARY, encode_vaa(forged)))
        elif kind == "UnsignedVaa":
            keep = a.keep or 0
            stripped = Vaa(vaa.body, vaa.signatures[:keep])
            self.log("adversary", **info, kept_signatures=keep)
            self._attempt(lambda: self.submit(ADVERSARY, encode_vaa(stripped)))
        elif kind == "TamperPayload":
            payload = bytearray(vaa.body.payload)
            if payload:
                i = a.index % len(payload)
                payload[i] = a.value if a.value != payload[i] else a.value ^ 0xFF
            else:
                payload.append(a.value)
            tampered = Vaa(replace(vaa.body, payload=bytes(payload)), vaa.signatures)
            self.log("adversary", **info, tampered_h=tampered.hash)
            self._attempt(lambda: self.submit(ADVERSARY, encode_vaa(tampered)))
        elif kind == "DropDelivery":
            h = vaa.hash
            hit = [f for f in self.inflight if f.vaa.hash == h and not f.dropped]
            for f in hit:
                if not self.spec.fair:
                    f.dropped = True
                elif not f.delayed:
                    # a fair network only delays, once
                    f.deliver_at += a.delay
                    f.delayed = True
            self.log("adversary", **info, affected=len(hit), permanent=not self.spec.fair)
        elif kind == "ReorderQueue":
            self.reorder = True
            for r in self.relayers:
                self.rng.shuffle(r.tasks)
            self.log("adversary", **info)
        elif kind == "RogueOrigin":
            msg = self.rogue.post_wormhole_message(0, self.rng.randbytes(32) + b"rogue", Finality.CONFIRMED, self.tick)
            self.guardians.observe(msg, SOLANA_CHAIN_ID, ROGUE_EMITTER)
            self.log("adversary", **info)
            self.log("origin_post", emitter_chain=SOLANA_CHAIN_ID, emitter=ROGUE_EMITTER, sequence=msg.sequence,
                     batch_id=0, finality=msg.finality_flag, slot=self.tick, payload=msg.payload, live=False)
        elif kind == "ReorgSlots":
            self._reorg(a.depth)
        else:
            raise errors.InvalidScenario(kind)

    def _reorg(self, depth: int) -> None:
        reverted = self.origin.revert_slots(self.tick, depth, self.spec.finalized_delay)
        pending = self.guardians.drop_reverted(reverted, SOLANA_CHAIN_ID, ORIGIN_EMITTER)
        self.log(
            "reorg",
            depth=depth,
            slot=self.tick,
            reverted=[
                {
                    "sequence": m.sequence,
                    "finality": m.finality_flag,
                    "post_slot": m.post_slot,
                    "attested": m.sequence in self.vaas_by_seq,
                }
                for m in reverted
            ],
            dropped_pending=[m.sequence for m in pending],
        )

    def _deliver(self, tick: int) -> None:
        due = [f for f in self.inflight if f.deliver_at <= tick and not f.dropped]
        self.inflight = [f for f in self.inflight if f.deliver_at > tick and not f.dropped]
        for f in due:
            for r in self.relayers:
                r.deliver(f.vaa, self, tick)

    def _relayers_step(self, tick: int) -> None:
        n = len(self.relayers)
        order = [self.relayers[(tick + i) % n] for i in range(n)] if n else []
        if self.reorder:
            self.rng.shuffle(order)
            self.reorder = False
        for r in order:
            for outcome in r.step(self, tick):
                self.log("task", **outcome)

    def _rollup(self, tick: int) -> None:
        included = self.aztec.rollup_tick()
        self.log("rollup_tick", block=self.aztec.current_block, included=included)

    def _quiescent(self, tick: int) -> bool:
        if any(m.tick > tick for m in self.spec.messages):
            return False
        if self.guardians.pending or self.inflight or self.rogue_ready:
            return False
        if any(not r.idle() for r in self.relayers):
            return False
        if any(a.tick > tick for a in self.pending_actions):
            return False
        return self.aztec.pending_frontier == len(self.aztec.leaves)

    def run(self) -> TraceReport:
        header = self.header()
        quiescent = False
        for tick in range(self.spec.tick_budget):
            self.tick = tick
            self._post_messages(tick)
            self._emit(tick)
            self._adversary(tick)
            self._deliver(tick)
            self._relayers_step(tick)
            if (tick + 1) % self.spec.rollup_every == 0:
                self._rollup(tick)
            if self._quiescent(tick):
                quiescent = True
                break
        self.log(
            "end",
            quiescent=quiescent,
            consumer_count=self.aztec.consumer.count,
            receipts_recorded=sorted(self.origin.receipts),
        )
        report = TraceReport(header, self.events)
        report.verdicts = check_properties(report)
        return report


def run_scenario(scenario: ScenarioSpec, seed: int) -> TraceReport:
    return World(scenario, seed).run()
