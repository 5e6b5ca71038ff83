"""Builders shared across test modules."""

from zkbridge.aztec import AztecState
from zkbridge.codec import Vaa, VaaBody, encode_bound_payload, BoundPayload, encode_vaa
from zkbridge.crypto import devnet_keys, keccak256, secret_hash
from zkbridge.guardians import GuardianNode
from zkbridge.portal import Portal, PortalConfig

ORIGIN = keccak256(b"tests/origin")
OTHER = keccak256(b"tests/other-origin")
L2 = keccak256(b"tests/l2")

_NODES = {}


def node(n=19):
    if n not in _NODES:
        _NODES[n] = GuardianNode(devnet_keys(n))
    return _NODES[n]


def body(payload=b"", sequence=0, emitter=ORIGIN, chain=1, consistency=1, gsi=0, **kw):
    return VaaBody(
        guardian_set_index=gsi,
        emitter_chain=chain,
        emitter_address=emitter,
        sequence=sequence,
        consistency_level=consistency,
        payload=payload,
        **kw,
    )


def signed(b, n=19, signers=None):
    return Vaa(b, node(n).sign_body(b, signers))


def bound(s=7, m=b"hello"):
    return encode_bound_payload(BoundPayload(secret_hash(s), m))


def raw_vaa(s=7, m=b"hello", sequence=0, **kw):
    return encode_vaa(signed(body(bound(s, m), sequence=sequence, **kw)))


def portal(n=19, legacy=False, set_portal=True):
    aztec = AztecState()
    cfg = PortalConfig(emitter_chain=1, emitter=ORIGIN, guardian_set=node(n).set, l2_instance=L2,
                       legacy_enabled=legacy)
    if set_portal:
        aztec.set_portal_once(cfg.address)
    return Portal(cfg, inbox=aztec), aztec
