"""EVM Portal: verify a VAA, enforce the replay lock, enqueue to Aztec.

Every check runs before any mutation, so a failing call leaves the
consumed set, the inbox and the event log untouched.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

from .aztec import AztecState
from .codec import RECEIPT_VERSION, ReceiptPayload, Vaa, decode_vaa, parse_bound_payload, vaa_body_hash
from .crypto import (
    Digest32,
    FieldElement,
    GuardianSet,
    commitment,
    domain_tag,
    field_to_bytes,
    keccak256,
    to_field,
    verify_quorum,
)
from .errors import AlreadyConsumed, InvalidVaa, LegacyDisabled, MalformedVaa, UnknownConsumption, WrongOrigin

ETHEREUM_CHAIN_ID = 2
ZERO32 = bytes(32)


class Path(str, enum.Enum):
    NORMATIVE = "normative"
    LEGACY = "legacy"


@dataclass(frozen=True)
class PortalConfig:
    emitter_chain: int
    emitter: bytes
    guardian_set: GuardianSet
    l2_instance: bytes = ZERO32
    rollup_version: int = 1
    address: str = "0x" + "00" * 19 + "70"
    legacy_enabled: bool = False

    @property
    def receipt_emitter(self) -> bytes:
        """The Portal's own 32-byte emitter identity for receipt VAAs."""
        return bytes(12) + bytes.fromhex(self.address[2:])


@dataclass(frozen=True)
class PortalEvent:
    kind: str  # "VaaConsumed" | "InboxEnqueued"
    h: bytes
    seq: int
    aztec_key: bytes
    path: Path
    payload: Optional[bytes] = None
    c: Optional[FieldElement] = None
    leaf_index: Optional[int] = None
    secret_hash: Optional[bytes] = None
    zero_secret_hash: bool = False

    def to_json(self) -> dict:
        out = {"type": self.kind}
        for k, v in asdict(self).items():
            if k == "kind" or v is None or (k == "zero_secret_hash" and not v):
                continue
            if isinstance(v, bytes):
                v = "0x" + v.hex()
            elif k == "c":
                v = "0x" + field_to_bytes(v).hex()
            elif isinstance(v, Path):
                v = v.value
            out[k] = v
        return out


@dataclass(frozen=True)
class EnqueueResult:
    h: bytes
    sequence: int
    c: FieldElement
    secret_hash: bytes
    aztec_key: bytes
    leaf_index: int
    path: Path
    events: Tuple[PortalEvent, ...]


@dataclass(frozen=True)
class Consumption:
    """What the Portal remembers about an accepted VAA, for receipts."""

    emitter_chain: int
    emitter: bytes
    sequence: int
    c: FieldElement
    secret_hash: bytes
    aztec_key: bytes
    leaf_index: int


def aztec_key(l2_instance: bytes, rollup_version: int, c: FieldElement, secret_hash: bytes, leaf_index: int) -> bytes:
    return keccak256(
        l2_instance
        + rollup_version.to_bytes(4, "big")
        + field_to_bytes(c)
        + secret_hash
        + leaf_index.to_bytes(32, "big")
    )


def legacy_commitment(payload: bytes) -> FieldElement:
    # legacy path: whole payload, no domain tag
    return to_field(keccak256(payload))


@dataclass
class Portal:
    config: PortalConfig
    inbox: AztecState
    consumed: set = field(default_factory=set)
    consumptions: Dict[bytes, Consumption] = field(default_factory=dict)
    events: List[PortalEvent] = field(default_factory=list)
    receipt_sequence: int = 0

    def verify(self, encoded_vaa: bytes) -> Vaa:
        """Decode, check quorum and origin; raise on the first failure."""
        try:
            vaa = decode_vaa(encoded_vaa)
        except MalformedVaa as e:
            raise InvalidVaa(f"malformed: {e}") from e
        gset = self.config.guardian_set
        if vaa.body.guardian_set_index != gset.index:
            raise InvalidVaa(f"unknown guardian set {vaa.body.guardian_set_index}")
        if not verify_quorum(vaa_body_hash(vaa.body), vaa.signatures, gset):
            raise InvalidVaa("quorum verification failed")
        if (vaa.body.emitter_chain, vaa.body.emitter_address) != (self.config.emitter_chain, self.config.emitter):
            raise WrongOrigin(f"({vaa.body.emitter_chain}, 0x{vaa.body.emitter_address.hex()})")
        return vaa

    def consume(self, encoded_vaa: bytes) -> EnqueueResult:
        vaa = self.verify(encoded_vaa)
        h = vaa_body_hash(vaa.body)
        if h in self.consumed:
            raise AlreadyConsumed("0x" + h.hex())
        bound = parse_bound_payload(vaa.body.payload)
        dom = domain_tag(vaa.body.emitter_chain, vaa.body.emitter_address, vaa.body.sequence)
        c = commitment(dom, bound.m)
        return self._apply(vaa, h, c, bound.secret_hash, Path.NORMATIVE)

    def consume_with_secret(self, encoded_vaa: bytes, secret_hash: Digest32) -> EnqueueResult:
        """Deprecated entry point: the caller supplies ``secret_hash``."""
        if not self.config.legacy_enabled:
            raise LegacyDisabled("consume_with_secret is disabled")
        if len(secret_hash) != 32:
            raise ValueError("secret_hash must be 32 bytes")
        vaa = self.verify(encoded_vaa)
        h = vaa_body_hash(vaa.body)
        if h in self.consumed:
            raise AlreadyConsumed("0x" + h.hex())
        c = legacy_commitment(vaa.body.payload)
        return self._apply(vaa, h, c, bytes(secret_hash), Path.LEGACY)

    def _apply(self, vaa: Vaa, h: bytes, c: FieldElement, secret_hash: bytes, path: Path) -> EnqueueResult:
        cfg = self.config
        self.consumed.add(h)
        recipient = (cfg.l2_instance, cfg.rollup_version)
        leaf = self.inbox.inbox_enqueue(c, secret_hash, cfg.address, recipient)
        key = aztec_key(cfg.l2_instance, cfg.rollup_version, c, secret_hash, leaf)
        seq = vaa.body.sequence
        events = (
            PortalEvent("VaaConsumed", h=h, seq=seq, aztec_key=key, path=path, payload=vaa.body.payload),
            PortalEvent(
                "InboxEnqueued",
                h=h,
                seq=seq,
                aztec_key=key,
                path=path,
                c=c,
                leaf_index=leaf,
                secret_hash=secret_hash,
                zero_secret_hash=secret_hash == ZERO32,
            ),
        )
        self.events.extend(events)
        self.consumptions[h] = Consumption(
            vaa.body.emitter_chain, vaa.body.emitter_address, seq, c, secret_hash, key, leaf
        )
        return EnqueueResult(h, seq, c, secret_hash, key, leaf, path, events)

    def publish_receipt(
        self,
        h: bytes,
        result_hash: bytes,
        aztec_key: Optional[bytes] = None,
        leaf_index: Optional[int] = None,
        secret_hash: Optional[bytes] = None,
    ) -> ReceiptPayload:
        rec = self.consumptions.get(h)
        if rec is None:
            raise UnknownConsumption("0x" + h.hex())
        return ReceiptPayload(
            version=RECEIPT_VERSION,
            orig_emitter_chain=rec.emitter_chain,
            orig_emitter=rec.emitter,
            orig_sequence=rec.sequence,
            c=field_to_bytes(rec.c),
            aztec_key=rec.aztec_key if aztec_key is None else aztec_key,
            leaf_index=rec.leaf_index if leaf_index is None else leaf_index,
            secret_hash=rec.secret_hash if secret_hash is None else secret_hash,
            result_hash=result_hash,
        )

    def next_receipt_sequence(self) -> int:
        seq = self.receipt_sequence
        self.receipt_sequence += 1
        return seq

    def digest(self) -> bytes:
        return keccak256(b"".join(sorted(self.consumed)) + len(self.events).to_bytes(8, "big"))
