"""Hashing, BN254 field reduction, commitments and guardian signatures.

Byte strings stand in for 32-byte digests and plain ints for field
elements; helpers here validate widths where it matters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import coincurve
from Crypto.Hash import keccak as _keccak

# BN254 (alt_bn128) scalar field modulus.
BN254_R = 21888242871839275222246405745257275088548364400416034343698204186575808495617

# secp256k1 group order, for key derivation.
SECP256K1_N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141

DOMAIN_TAG_PREFIX = b"ZKCB/v1"

Digest32 = bytes
FieldElement = int
GuardianSignature = bytes  # 65 bytes: r || s || recovery id


def keccak256(data: bytes) -> Digest32:
    h = _keccak.new(digest_bits=256)
    h.update(data)
    return h.digest()


def to_field(d: Digest32) -> FieldElement:
    """Reduce a 32-byte big-endian string into the BN254 scalar field."""
    if len(d) != 32:
        raise ValueError(f"to_field expects 32 bytes, got {len(d)}")
    return int.from_bytes(d, "big") % BN254_R


def field_to_bytes(f: FieldElement) -> bytes:
    if not 0 <= f < BN254_R:
        raise ValueError("field element out of range")
    return f.to_bytes(32, "big")


def domain_tag(emitter_chain: int, emitter_address: bytes, sequence: int) -> Digest32:
    """keccak256("ZKCB/v1" || chain u16 BE || emitter[32] || sequence u64 BE)."""
    if len(emitter_address) != 32:
        raise ValueError("emitter address must be 32 bytes")
    if not 0 <= emitter_chain < 1 << 16 or not 0 <= sequence < 1 << 64:
        raise ValueError("chain id or sequence out of range")
    return keccak256(
        DOMAIN_TAG_PREFIX
        + emitter_chain.to_bytes(2, "big")
        + emitter_address
        + sequence.to_bytes(8, "big")
    )


def commitment(dom: Digest32, m: bytes) -> FieldElement:
    return to_field(keccak256(dom + m))


def secret_hash(s: FieldElement) -> Digest32:
    # Keccak over the 32-byte field encoding; swap this out to match an
    # Aztec-native secret hash.
    return keccak256(field_to_bytes(s))


def eth_address(public_key: coincurve.PublicKey) -> bytes:
    return keccak256(public_key.format(compressed=False)[1:])[12:]


@dataclass(frozen=True)
class GuardianKeyPair:
    secret_key: bytes
    public_key: bytes  # 20-byte address recovered from signatures

    @classmethod
    def from_secret(cls, secret_key: bytes) -> "GuardianKeyPair":
        pk = coincurve.PrivateKey(secret_key)
        return cls(secret_key=secret_key, public_key=eth_address(pk.public_key))

    @classmethod
    def derive(cls, label: bytes, index: int) -> "GuardianKeyPair":
        """Deterministic key for simulations and golden vectors."""
        k = int.from_bytes(keccak256(label + index.to_bytes(4, "big")), "big")
        k = k % (SECP256K1_N - 1) + 1
        return cls.from_secret(k.to_bytes(32, "big"))


def devnet_keys(n: int, label: bytes = b"zkcb-devnet-guardian") -> list[GuardianKeyPair]:
    return [GuardianKeyPair.derive(label, i) for i in range(n)]


@dataclass(frozen=True)
class GuardianSet:
    index: int
    keys: Tuple[bytes, ...]

    def __post_init__(self):
        object.__setattr__(self, "keys", tuple(self.keys))
        if len(set(self.keys)) != len(self.keys):
            raise ValueError("guardian keys must be distinct")
        if not self.keys:
            raise ValueError("guardian set is empty")

    @property
    def quorum(self) -> int:
        return len(self.keys) * 2 // 3 + 1

    @classmethod
    def from_keypairs(cls, keypairs: Sequence[GuardianKeyPair], index: int = 0) -> "GuardianSet":
        return cls(index=index, keys=tuple(k.public_key for k in keypairs))


def sign_digest(d: Digest32, key: GuardianKeyPair) -> GuardianSignature:
    return coincurve.PrivateKey(key.secret_key).sign_recoverable(d, hasher=None)


def recover(d: Digest32, sig: GuardianSignature) -> Optional[bytes]:
    """Address that produced ``sig`` over ``d``, or None if unrecoverable."""
    if len(d) != 32 or len(sig) != 65 or sig[64] > 3:
        return None
    try:
        pub = coincurve.PublicKey.from_signature_and_message(sig, d, hasher=None)
    except Exception:
        return None
    return eth_address(pub)


def signing_digest(body_digest: Digest32) -> Digest32:
    """Guardians sign the hash of the body hash."""
    return keccak256(body_digest)


def verify_quorum(
    body_digest: Digest32,
    sigs: Sequence[Tuple[int, GuardianSignature]],
    gset: GuardianSet,
) -> bool:
    if len(sigs) < gset.quorum:
        return False
    digest = signing_digest(body_digest)
    last = -1
    for index, sig in sigs:
        if not isinstance(index, int) or index <= last or index >= len(gset.keys):
            return False
        last = index
        if recover(digest, sig) != gset.keys[index]:
            return False
    return True
