"""Off-chain relayer: ferries VAAs, retries Aztec consumption with backoff."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from . import errors
from .codec import Vaa, decode_receipt, decode_vaa, encode_vaa, vaa_body_hash
from .crypto import secret_hash
from .errors import MissingEnqueueEvent
from .origin import WORMHOLE_CORE_OWNER, PostedVaaAccount
from .portal import PortalEvent

# failures worth retrying; everything else drops the task
RETRYABLE = (errors.NotYetIncluded,)


class TaskKind(str, enum.Enum):
    SUBMIT_VAA = "SubmitVaa"
    CONSUME_ON_AZTEC = "ConsumeOnAztec"
    RECORD_RECEIPT = "RecordReceipt"


@dataclass(frozen=True)
class RelayerConfig:
    max_retries: int = 10
    base_backoff: int = 1
    backoff_multiplier: Fraction = Fraction(2)
    backoff_cap: int = 16
    honest: bool = True

    def __post_init__(self):
        object.__setattr__(self, "backoff_multiplier", Fraction(self.backoff_multiplier))
        if self.base_backoff < 1 or self.max_retries < 1:
            raise ValueError("base_backoff and max_retries must be >= 1")
        if self.backoff_multiplier < 1:
            raise ValueError("backoff_multiplier must be >= 1")
        if self.backoff_cap < self.base_backoff:
            raise ValueError("backoff_cap must be >= base_backoff")

    def backoff(self, attempt: int) -> int:
        """Gap before retry number ``attempt + 1``."""
        return min(self.backoff_cap, math.ceil(self.base_backoff * self.backoff_multiplier**attempt))


@dataclass
class RelayerTask:
    kind: TaskKind
    payload: Dict[str, Any]
    attempt: int = 0
    next_eligible_tick: int = 0


def derive_consume_task(vaa: Vaa, secret: int, portal_events: Sequence[PortalEvent], tick: int = 0) -> RelayerTask:
    h = vaa_body_hash(vaa.body)
    for ev in portal_events:
        if ev.kind == "InboxEnqueued" and ev.h == h:
            return RelayerTask(
                TaskKind.CONSUME_ON_AZTEC,
                {"h": h, "sequence": ev.seq, "c": ev.c, "leaf_index": ev.leaf_index, "secret": secret},
                next_eligible_tick=tick,
            )
    raise MissingEnqueueEvent("0x" + h.hex())


@dataclass
class Relayer:
    """A scheduler-driven actor.

    ``world`` must provide ``portal``, ``submit``, ``consume_on_aztec``,
    ``record_receipt``, ``publish_receipt`` and the origin/portal emitter
    identities; see :class:`zkbridge.sim.world.World`.
    """

    relayer_id: int
    config: RelayerConfig = field(default_factory=RelayerConfig)
    secrets: Optional[Dict[int, int]] = None
    legacy: bool = False
    tasks: List[RelayerTask] = field(default_factory=list)

    def deliver(self, vaa: Vaa, world, tick: int) -> None:
        body = vaa.body
        if (body.emitter_chain, body.emitter_address) == world.origin_identity:
            self.tasks.append(RelayerTask(TaskKind.SUBMIT_VAA, {"vaa": encode_vaa(vaa)}, next_eligible_tick=tick))
        elif (body.emitter_chain, body.emitter_address) == world.receipt_identity and self.config.honest:
            self.tasks.append(RelayerTask(TaskKind.RECORD_RECEIPT, {"vaa": vaa}, next_eligible_tick=tick))

    def idle(self) -> bool:
        return not self.tasks

    def step(self, world, tick: int) -> List[dict]:
        due = [t for t in self.tasks if t.next_eligible_tick <= tick]
        if not due:
            return []
        self.tasks = [t for t in self.tasks if t.next_eligible_tick > tick]
        outcomes = []
        for task in due:
            outcomes.append(self._run(task, world, tick))
        return outcomes

    def _run(self, task: RelayerTask, world, tick: int) -> dict:
        record = {
            "relayer_id": self.relayer_id,
            "task_kind": task.kind.value,
            "attempt": task.attempt,
        }
        try:
            self._execute(task, world, tick)
        except errors.BridgeError as e:
            record["error"] = type(e).__name__
            if isinstance(e, RETRYABLE) and task.attempt + 1 < self.config.max_retries:
                task.next_eligible_tick = tick + self.config.backoff(task.attempt)
                task.attempt += 1
                self.tasks.append(task)
                record["outcome"] = "retry"
                record["next_eligible_tick"] = task.next_eligible_tick
            else:
                record["outcome"] = "exhausted" if isinstance(e, RETRYABLE) else "dropped"
                self._after_failure(task, e, world, tick)
        else:
            record["outcome"] = "success"
        return record

    def _execute(self, task: RelayerTask, world, tick: int) -> None:
        if task.kind is TaskKind.SUBMIT_VAA:
            raw = task.payload["vaa"]
            if self.legacy:
                world.submit(self.actor, raw, secret_hash=self._legacy_secret_hash(raw, world))
            else:
                world.submit(self.actor, raw)
            self._follow_up(raw, world, tick)
        elif task.kind is TaskKind.CONSUME_ON_AZTEC:
            p = task.payload
            world.consume_on_aztec(self.actor, p["c"], p["leaf_index"], p["secret"], sequence=p["sequence"])
            if world.receipts_enabled:
                world.publish_receipt(self.actor, p["h"])
        elif task.kind is TaskKind.RECORD_RECEIPT:
            vaa = task.payload["vaa"]
            receipt = decode_receipt(vaa.body.payload)
            world.record_receipt(self.actor, PostedVaaAccount(WORMHOLE_CORE_OWNER, vaa), receipt.orig_sequence)

    def _after_failure(self, task: RelayerTask, exc: Exception, world, tick: int) -> None:
        # someone else won the submission race; still drive Aztec consumption
        if task.kind is TaskKind.SUBMIT_VAA and isinstance(exc, errors.AlreadyConsumed):
            self._follow_up(task.payload["vaa"], world, tick)

    def _follow_up(self, raw: bytes, world, tick: int) -> None:
        if not self.config.honest or self.secrets is None:
            return
        vaa = decode_vaa(raw)
        secret = self.secrets.get(vaa.body.sequence)
        if secret is None:
            return
        try:
            task = derive_consume_task(vaa, secret, world.portal.events, tick + 1)
        except MissingEnqueueEvent:
            return
        self.tasks.append(task)

    def _legacy_secret_hash(self, raw: bytes, world) -> bytes:
        vaa = decode_vaa(raw)
        secret = (self.secrets or {}).get(vaa.body.sequence)
        if self.config.honest and secret is not None:
            return secret_hash(secret)
        return world.rng_bytes(32)

    @property
    def actor(self) -> str:
        return f"relayer-{self.relayer_id}"
