"""Wire formats: VAAs, the bound ``secretHash || m`` payload and receipts.

The VAA layout follows Wormhole v1::

    header: version u8 | guardian_set_index u32 | n_sigs u8 | n * (index u8 | sig[65])
            | payload_length u32
    body:   timestamp u32 | nonce u32 | emitter_chain u16 | emitter[32]
            | sequence u64 | consistency_level u8 | payload

Only the body part is hashed and signed; the body matches Wormhole v1
byte for byte. ``payload_length`` is extra framing so that truncated or
padded buffers are rejected. All integers are big-endian.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Tuple

from .crypto import Digest32, keccak256, signing_digest
from .errors import MalformedReceipt, MalformedVaa, PayloadTooShort, UnsupportedVersion

MAX_PAYLOAD = 64 * 1024
VAA_VERSION = 1
RECEIPT_VERSION = 1
RECEIPT_LENGTH = 1 + 2 + 32 + 8 + 32 + 32 + 32 + 32 + 32
SIG_LENGTH = 65

_HEADER = struct.Struct(">BIB")
_SIG_ENTRY = 1 + SIG_LENGTH
_PAYLOAD_LEN = struct.Struct(">I")
_BODY_FIXED = struct.Struct(">IIH32sQB")
_RECEIPT = struct.Struct(">BH32sQ32s32s32s32s32s")

assert _RECEIPT.size == RECEIPT_LENGTH


def _check_uint(name: str, value: int, bits: int, exc=ValueError):
    if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value < (1 << bits):
        raise exc(f"{name} must fit in uint{bits}, got {value!r}")


def _check_bytes32(name: str, value: bytes, exc=ValueError):
    if not isinstance(value, (bytes, bytearray)) or len(value) != 32:
        raise exc(f"{name} must be 32 bytes")


@dataclass(frozen=True)
class VaaBody:
    version: int = VAA_VERSION
    guardian_set_index: int = 0
    timestamp: int = 0
    nonce: int = 0
    emitter_chain: int = 0
    emitter_address: bytes = bytes(32)
    sequence: int = 0
    consistency_level: int = 0
    payload: bytes = b""

    def __post_init__(self):
        if self.version != VAA_VERSION:
            raise MalformedVaa(f"unsupported VAA version {self.version!r}")
        _check_uint("guardian_set_index", self.guardian_set_index, 32, MalformedVaa)
        _check_uint("timestamp", self.timestamp, 32, MalformedVaa)
        _check_uint("nonce", self.nonce, 32, MalformedVaa)
        _check_uint("emitter_chain", self.emitter_chain, 16, MalformedVaa)
        _check_bytes32("emitter_address", self.emitter_address, MalformedVaa)
        _check_uint("sequence", self.sequence, 64, MalformedVaa)
        _check_uint("consistency_level", self.consistency_level, 8, MalformedVaa)
        if len(self.payload) > MAX_PAYLOAD:
            raise MalformedVaa(f"payload exceeds {MAX_PAYLOAD} bytes")
        object.__setattr__(self, "emitter_address", bytes(self.emitter_address))
        object.__setattr__(self, "payload", bytes(self.payload))


@dataclass(frozen=True)
class Vaa:
    body: VaaBody
    signatures: Tuple[Tuple[int, bytes], ...] = field(default_factory=tuple)

    def __post_init__(self):
        sigs = tuple((i, bytes(s)) for i, s in self.signatures)
        if len(sigs) > 255:
            raise MalformedVaa("too many signatures")
        last = -1
        for index, sig in sigs:
            _check_uint("guardian index", index, 8, MalformedVaa)
            if index <= last:
                raise MalformedVaa("guardian indices must be strictly increasing")
            if len(sig) != SIG_LENGTH:
                raise MalformedVaa("signature must be 65 bytes")
            last = index
        object.__setattr__(self, "signatures", sigs)

    @property
    def hash(self) -> Digest32:
        return vaa_body_hash(self.body)


def serialize_body(body: VaaBody) -> bytes:
    """The signed portion of a VAA."""
    return (
        _BODY_FIXED.pack(
            body.timestamp,
            body.nonce,
            body.emitter_chain,
            body.emitter_address,
            body.sequence,
            body.consistency_level,
        )
        + body.payload
    )


def vaa_body_hash(body: VaaBody) -> Digest32:
    return keccak256(serialize_body(body))


def vaa_signing_digest(body: VaaBody) -> Digest32:
    return signing_digest(vaa_body_hash(body))


def encode_vaa(v: Vaa) -> bytes:
    out = bytearray(_HEADER.pack(v.body.version, v.body.guardian_set_index, len(v.signatures)))
    for index, sig in v.signatures:
        out.append(index)
        out += sig
    out += _PAYLOAD_LEN.pack(len(v.body.payload))
    out += serialize_body(v.body)
    return bytes(out)


def decode_vaa(b: bytes) -> Vaa:
    b = bytes(b)
    if len(b) < _HEADER.size:
        raise MalformedVaa("truncated header")
    version, gsi, n_sigs = _HEADER.unpack_from(b, 0)
    if version != VAA_VERSION:
        raise MalformedVaa(f"unsupported VAA version {version}")
    off = _HEADER.size
    if len(b) < off + n_sigs * _SIG_ENTRY + _PAYLOAD_LEN.size + _BODY_FIXED.size:
        raise MalformedVaa("truncated VAA")
    sigs = []
    for _ in range(n_sigs):
        sigs.append((b[off], b[off + 1 : off + _SIG_ENTRY]))
        off += _SIG_ENTRY
    (payload_len,) = _PAYLOAD_LEN.unpack_from(b, off)
    off += _PAYLOAD_LEN.size
    if payload_len > MAX_PAYLOAD:
        raise MalformedVaa(f"payload exceeds {MAX_PAYLOAD} bytes")
    if len(b) != off + _BODY_FIXED.size + payload_len:
        raise MalformedVaa("buffer length does not match declared payload length")
    ts, nonce, chain, emitter, seq, cl = _BODY_FIXED.unpack_from(b, off)
    payload = b[off + _BODY_FIXED.size :]
    body = VaaBody(
        version=version,
        guardian_set_index=gsi,
        timestamp=ts,
        nonce=nonce,
        emitter_chain=chain,
        emitter_address=emitter,
        sequence=seq,
        consistency_level=cl,
        payload=payload,
    )
    return Vaa(body=body, signatures=tuple(sigs))


@dataclass(frozen=True)
class BoundPayload:
    secret_hash: Digest32
    m: bytes = b""

    def __post_init__(self):
        _check_bytes32("secret_hash", self.secret_hash)


def encode_bound_payload(p: BoundPayload) -> bytes:
    return bytes(p.secret_hash) + bytes(p.m)


def parse_bound_payload(b: bytes) -> BoundPayload:
    if len(b) < 32:
        raise PayloadTooShort(f"bound payload needs at least 32 bytes, got {len(b)}")
    return BoundPayload(secret_hash=bytes(b[:32]), m=bytes(b[32:]))


@dataclass(frozen=True)
class ReceiptPayload:
    orig_emitter_chain: int
    orig_emitter: bytes
    orig_sequence: int
    c: bytes
    aztec_key: bytes
    leaf_index: int
    secret_hash: bytes
    result_hash: bytes
    version: int = RECEIPT_VERSION

    def __post_init__(self):
        _check_uint("version", self.version, 8)
        _check_uint("orig_emitter_chain", self.orig_emitter_chain, 16)
        _check_uint("orig_sequence", self.orig_sequence, 64)
        _check_uint("leaf_index", self.leaf_index, 256)
        for name in ("orig_emitter", "c", "aztec_key", "secret_hash", "result_hash"):
            _check_bytes32(name, getattr(self, name))


def encode_receipt(r: ReceiptPayload) -> bytes:
    return _RECEIPT.pack(
        r.version,
        r.orig_emitter_chain,
        r.orig_emitter,
        r.orig_sequence,
        r.c,
        r.aztec_key,
        r.leaf_index.to_bytes(32, "big"),
        r.secret_hash,
        r.result_hash,
    )


def decode_receipt(b: bytes, require_version: int | None = None) -> ReceiptPayload:
    if len(b) != RECEIPT_LENGTH:
        raise MalformedReceipt(f"receipt must be {RECEIPT_LENGTH} bytes, got {len(b)}")
    version, chain, emitter, seq, c, key, leaf, sh, rh = _RECEIPT.unpack(bytes(b))
    if require_version is not None and version != require_version:
        raise UnsupportedVersion(f"receipt version {version}")
    return ReceiptPayload(
        version=version,
        orig_emitter_chain=chain,
        orig_emitter=emitter,
        orig_sequence=seq,
        c=c,
        aztec_key=key,
        leaf_index=int.from_bytes(leaf, "big"),
        secret_hash=sh,
        result_hash=rh,
    )
