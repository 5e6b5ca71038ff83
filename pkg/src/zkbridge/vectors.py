"""Golden test vectors: generation and bit-exact re-verification.

File format: a JSON array of ``{"op", "inputs", "output"}`` where every
input and the output are hex strings (fixed-width big-endian for integers).
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Callable, Dict, List

from .codec import (
    BoundPayload,
    ReceiptPayload,
    Vaa,
    VaaBody,
    decode_receipt,
    decode_vaa,
    encode_bound_payload,
    encode_receipt,
    encode_vaa,
    parse_bound_payload,
    vaa_body_hash,
)
from .crypto import BN254_R, commitment, devnet_keys, domain_tag, keccak256, secret_hash, to_field
from .guardians import GuardianNode

SHIPPED = "golden_vectors.json"


def _h(b: bytes) -> str:
    return b.hex()


def _u(n: int, width: int) -> str:
    return n.to_bytes(width, "big").hex()


def _b(s: str) -> bytes:
    return bytes.fromhex(s[2:] if s.startswith("0x") else s)


def _i(s: str) -> int:
    return int.from_bytes(_b(s), "big")


def _vaa_from_inputs(x: Dict[str, str]) -> Vaa:
    raw = _b(x["signatures"])
    sigs = tuple((raw[i], raw[i + 1 : i + 66]) for i in range(0, len(raw), 66))
    body = VaaBody(
        version=_i(x["version"]),
        guardian_set_index=_i(x["guardian_set_index"]),
        timestamp=_i(x["timestamp"]),
        nonce=_i(x["nonce"]),
        emitter_chain=_i(x["emitter_chain"]),
        emitter_address=_b(x["emitter_address"]),
        sequence=_i(x["sequence"]),
        consistency_level=_i(x["consistency_level"]),
        payload=_b(x["payload"]),
    )
    return Vaa(body, sigs)


def _receipt_from_inputs(x: Dict[str, str]) -> ReceiptPayload:
    return ReceiptPayload(
        version=_i(x["version"]),
        orig_emitter_chain=_i(x["orig_emitter_chain"]),
        orig_emitter=_b(x["orig_emitter"]),
        orig_sequence=_i(x["orig_sequence"]),
        c=_b(x["c"]),
        aztec_key=_b(x["aztec_key"]),
        leaf_index=_i(x["leaf_index"]),
        secret_hash=_b(x["secret_hash"]),
        result_hash=_b(x["result_hash"]),
    )


def _encode_vaa_checked(x):
    out = encode_vaa(_vaa_from_inputs(x))
    if encode_vaa(decode_vaa(out)) != out:
        raise AssertionError("VAA does not round-trip")
    return out


def _encode_receipt_checked(x):
    out = encode_receipt(_receipt_from_inputs(x))
    if encode_receipt(decode_receipt(out)) != out:
        raise AssertionError("receipt does not round-trip")
    return out


def _encode_bound_checked(x):
    out = encode_bound_payload(BoundPayload(_b(x["secret_hash"]), _b(x["m"])))
    if encode_bound_payload(parse_bound_payload(out)) != out:
        raise AssertionError("bound payload does not round-trip")
    return out


OPS: Dict[str, Callable[[Dict[str, str]], bytes]] = {
    "keccak256": lambda x: keccak256(_b(x["data"])),
    "to_field": lambda x: to_field(_b(x["d"])).to_bytes(32, "big"),
    "domain_tag": lambda x: domain_tag(_i(x["emitter_chain"]), _b(x["emitter_address"]), _i(x["sequence"])),
    "commitment": lambda x: commitment(_b(x["dom"]), _b(x["m"])).to_bytes(32, "big"),
    "secret_hash": lambda x: secret_hash(_i(x["s"])),
    "encode_vaa": _encode_vaa_checked,
    "vaa_body_hash": lambda x: vaa_body_hash(decode_vaa(_b(x["vaa"])).body),
    "encode_bound_payload": _encode_bound_checked,
    "encode_receipt": _encode_receipt_checked,
}


def _vector(op: str, **inputs: str) -> Dict:
    return {"op": op, "inputs": inputs, "output": _h(OPS[op](inputs))}


def generate() -> List[Dict]:
    one = bytes(31) + b"\x01"
    dom0 = domain_tag(1, one, 0)
    out = [
        _vector("keccak256", data=""),
        _vector("keccak256", data=_h(b"abc")),
        _vector("keccak256", data=_h(bytes(range(256)) * 2)),
        _vector("to_field", d=_u(0, 32)),
        _vector("to_field", d=_u(BN254_R - 1, 32)),
        _vector("to_field", d=_u(BN254_R, 32)),
        _vector("to_field", d=_u(BN254_R + 1, 32)),
        _vector("to_field", d=_u(2**256 - 1, 32)),
        _vector("domain_tag", emitter_chain=_u(1, 2), emitter_address=_h(one), sequence=_u(0, 8)),
        _vector("domain_tag", emitter_chain=_u(1, 2), emitter_address=_h(one), sequence=_u(1, 8)),
        _vector("commitment", dom=_h(dom0), m=""),
        _vector("commitment", dom=_h(dom0), m=_h(b"hello")),
        _vector("secret_hash", s=_u(0, 32)),
        _vector("secret_hash", s=_u(1, 32)),
        _vector("secret_hash", s=_u(BN254_R - 1, 32)),
    ]

    node = GuardianNode(devnet_keys(19))
    payload = secret_hash(1) + b"hello"
    body = VaaBody(
        guardian_set_index=0,
        timestamp=1_700_000_000,
        nonce=7,
        emitter_chain=1,
        emitter_address=keccak256(b"zkcb/origin-emitter-pda"),
        sequence=42,
        consistency_level=32,
        payload=payload,
    )
    vaa = Vaa(body, node.sign_body(body))
    sigs = b"".join(bytes([i]) + s for i, s in vaa.signatures)
    out.append(
        _vector(
            "encode_vaa",
            version=_u(body.version, 1),
            guardian_set_index=_u(body.guardian_set_index, 4),
            timestamp=_u(body.timestamp, 4),
            nonce=_u(body.nonce, 4),
            emitter_chain=_u(body.emitter_chain, 2),
            emitter_address=_h(body.emitter_address),
            sequence=_u(body.sequence, 8),
            consistency_level=_u(body.consistency_level, 1),
            payload=_h(body.payload),
            signatures=_h(sigs),
        )
    )
    out.append(_vector("vaa_body_hash", vaa=_h(encode_vaa(vaa))))
    out.append(_vector("encode_bound_payload", secret_hash=_h(secret_hash(1)), m=_h(b"hello")))
    out.append(
        _vector(
            "encode_receipt",
            version=_u(1, 1),
            orig_emitter_chain=_u(1, 2),
            orig_emitter=_h(body.emitter_address),
            orig_sequence=_u(42, 8),
            c=_u(commitment(domain_tag(1, body.emitter_address, 42), b"hello"), 32),
            aztec_key=_h(keccak256(b"aztec-key")),
            leaf_index=_u(3, 32),
            secret_hash=_h(secret_hash(1)),
            result_hash=_h(keccak256(b"result")),
        )
    )
    return out


def verify(vectors: List[Dict]) -> List[str]:
    """Recompute every vector; return a description of each mismatch."""
    problems = []
    for i, v in enumerate(vectors):
        op = v.get("op")
        fn = OPS.get(op)
        if fn is None:
            problems.append(f"#{i}: unknown op {op!r}")
            continue
        try:
            got = _h(fn(v["inputs"]))
        except Exception as e:  # a vector that cannot even be computed is a mismatch
            problems.append(f"#{i} {op}: {type(e).__name__}: {e}")
            continue
        want = v["output"].lower().removeprefix("0x")
        if got != want:
            problems.append(f"#{i} {op}: expected {want}, got {got}")
    return problems


def load_shipped() -> List[Dict]:
    return json.loads((resources.files("zkbridge.data") / SHIPPED).read_text())


def dumps(vectors: List[Dict]) -> str:
    return json.dumps(vectors, indent=2) + "\n"
