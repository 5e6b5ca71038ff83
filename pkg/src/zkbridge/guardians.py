"""Honest guardian network: observes posted messages, signs after finality."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Set, Tuple

from .codec import Vaa, VaaBody, vaa_signing_digest
from .crypto import GuardianKeyPair, GuardianSet, sign_digest
from .origin import Finality, PostedMessage


@dataclass(frozen=True)
class FinalityPolicy:
    confirmed_delay: int = 2
    finalized_delay: int = 32

    def __post_init__(self):
        if not 0 <= self.confirmed_delay <= self.finalized_delay:
            raise ValueError("need 0 <= confirmed_delay <= finalized_delay")

    def delay(self, flag) -> int:
        flag = Finality.parse(flag)
        return self.confirmed_delay if flag is Finality.CONFIRMED else self.finalized_delay


@dataclass
class Observation:
    message: PostedMessage
    emitter_chain: int
    emitter_address: bytes

    @property
    def key(self) -> Tuple[int, bytes, int]:
        return (self.emitter_chain, self.emitter_address, self.message.sequence)


@dataclass
class GuardianNode:
    keys: List[GuardianKeyPair]
    set_index: int = 0
    policy: FinalityPolicy = field(default_factory=FinalityPolicy)
    observed: List[Observation] = field(default_factory=list)
    seen: Set[Tuple[int, bytes, int]] = field(default_factory=set)
    set: GuardianSet = field(init=False)

    def __post_init__(self):
        self.set = GuardianSet.from_keypairs(self.keys, index=self.set_index)

    @classmethod
    def from_keys(cls, keys: Sequence[GuardianKeyPair], **kw) -> "GuardianNode":
        return cls(keys=list(keys), **kw)

    def observe(self, msg: PostedMessage, emitter_chain: int, emitter_address: bytes) -> bool:
        """Queue ``msg`` for signing. Returns False for a repeated (emitter, sequence)."""
        obs = Observation(msg, emitter_chain, bytes(emitter_address))
        if obs.key in self.seen:
            return False
        self.seen.add(obs.key)
        self.observed.append(obs)
        return True

    def ready_slot(self, msg: PostedMessage) -> int:
        return msg.post_slot + self.policy.delay(msg.finality_flag)

    def emit_ready_vaas(self, current_slot: int) -> List[Vaa]:
        ready = [o for o in self.observed if self.ready_slot(o.message) <= current_slot]
        if not ready:
            return []
        self.observed = [o for o in self.observed if self.ready_slot(o.message) > current_slot]
        return [self.sign(o) for o in ready]

    def sign(self, obs: Observation) -> Vaa:
        msg = obs.message
        body = VaaBody(
            guardian_set_index=self.set.index,
            timestamp=msg.post_slot,
            nonce=msg.batch_id,
            emitter_chain=obs.emitter_chain,
            emitter_address=obs.emitter_address,
            sequence=msg.sequence,
            consistency_level=int(msg.finality_flag),
            payload=msg.payload,
        )
        return Vaa(body=body, signatures=self.sign_body(body))

    def sign_body(self, body: VaaBody, signers: Sequence[int] | None = None):
        digest = vaa_signing_digest(body)
        indices = range(len(self.keys)) if signers is None else sorted(signers)
        return tuple((i, sign_digest(digest, self.keys[i])) for i in indices)

    def drop_reverted(self, reverted: Sequence[PostedMessage], emitter_chain: int, emitter_address: bytes) -> List[PostedMessage]:
        """Forget pending observations whose origin slot was rolled back."""
        gone: Dict[Tuple[int, bytes, int], PostedMessage] = {
            (emitter_chain, emitter_address, m.sequence): m for m in reverted
        }
        dropped = [o.message for o in self.observed if o.key in gone]
        self.observed = [o for o in self.observed if o.key not in gone]
        return dropped

    @property
    def pending(self) -> int:
        return len(self.observed)
