"""Simulated Solana program: message posting and receipt recording."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .codec import MAX_PAYLOAD, RECEIPT_VERSION, ReceiptPayload, Vaa, decode_receipt, vaa_body_hash
from .crypto import GuardianSet, verify_quorum
from .errors import (
    DuplicateReceipt,
    InvalidVaa,
    MalformedReceipt,
    OriginNotAllowlisted,
    PayloadTooLarge,
    SequenceKeyMismatch,
    UnsupportedVersion,
    WrongAccountOwner,
)

SOLANA_CHAIN_ID = 1
WORMHOLE_CORE_OWNER = "wormhole-core"


class Finality(enum.IntEnum):
    """Values double as the VAA consistency level."""

    CONFIRMED = 1
    FINALIZED = 32

    @classmethod
    def parse(cls, value) -> "Finality":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            return cls[value.upper()]
        return cls(value)


@dataclass(frozen=True)
class PostedMessage:
    batch_id: int
    payload: bytes
    finality_flag: Finality
    sequence: int
    post_slot: int


@dataclass(frozen=True)
class PostedVaaAccount:
    owner: str
    vaa: Vaa


@dataclass(frozen=True)
class RecordedReceipt:
    receipt: ReceiptPayload
    recorded_at: int


@dataclass
class OriginState:
    emitter_address: bytes
    guardian_set: GuardianSet
    emitter_chain: int = SOLANA_CHAIN_ID
    allowlist: Optional[Tuple[int, bytes]] = None
    wormhole_core_owner: str = WORMHOLE_CORE_OWNER
    v0_1_0_compat: bool = False
    next_sequence: int = 0
    receipts: Dict[int, RecordedReceipt] = field(default_factory=dict)
    posted: List[PostedMessage] = field(default_factory=list)
    reverted: List[PostedMessage] = field(default_factory=list)

    def __post_init__(self):
        if len(self.emitter_address) != 32:
            raise ValueError("emitter address must be 32 bytes")
        if self.allowlist is None:
            self.allowlist = (self.emitter_chain, self.emitter_address)

    def post_wormhole_message(
        self, batch_id: int, payload: bytes, finality_flag, current_slot: int
    ) -> PostedMessage:
        if len(payload) > MAX_PAYLOAD:
            raise PayloadTooLarge(f"payload of {len(payload)} bytes exceeds {MAX_PAYLOAD}")
        msg = PostedMessage(
            batch_id=batch_id,
            payload=bytes(payload),
            finality_flag=Finality.parse(finality_flag),
            sequence=self.next_sequence,
            post_slot=current_slot,
        )
        self.next_sequence += 1
        self.posted.append(msg)
        return msg

    def revert_slots(self, current_slot: int, depth: int, finalized_delay: int) -> List[PostedMessage]:
        """Roll back the last ``depth`` slots, never past the finalized frontier.

        The sequence counter is not rolled back, so sequences stay unique
        across forks.
        """
        cutoff = max(current_slot - depth, current_slot - finalized_delay)
        dropped = [m for m in self.posted if m.post_slot > cutoff]
        self.posted = [m for m in self.posted if m.post_slot <= cutoff]
        self.reverted.extend(dropped)
        return dropped

    def record_receipt_from_vaa(
        self, account: PostedVaaAccount, pda_sequence_key: int, current_slot: int = 0
    ) -> RecordedReceipt:
        strict = not self.v0_1_0_compat
        if strict and account.owner != self.wormhole_core_owner:
            raise WrongAccountOwner(account.owner)
        vaa = account.vaa
        if vaa.body.guardian_set_index != self.guardian_set.index or not verify_quorum(
            vaa_body_hash(vaa.body), vaa.signatures, self.guardian_set
        ):
            raise InvalidVaa("receipt VAA fails quorum verification")
        try:
            receipt = decode_receipt(vaa.body.payload)
        except MalformedReceipt:
            if strict:
                raise
            raise InvalidVaa("receipt payload is malformed")
        if strict:
            if (receipt.orig_emitter_chain, receipt.orig_emitter) != self.allowlist:
                raise OriginNotAllowlisted(
                    f"({receipt.orig_emitter_chain}, 0x{receipt.orig_emitter.hex()})"
                )
            if receipt.orig_sequence != pda_sequence_key:
                raise SequenceKeyMismatch(f"{receipt.orig_sequence} != {pda_sequence_key}")
            if receipt.version != RECEIPT_VERSION:
                raise UnsupportedVersion(f"receipt version {receipt.version}")
        if pda_sequence_key in self.receipts:
            raise DuplicateReceipt(str(pda_sequence_key))
        rec = RecordedReceipt(receipt=receipt, recorded_at=current_slot)
        self.receipts[pda_sequence_key] = rec
        return rec
