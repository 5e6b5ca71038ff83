"""Hypothesis strategies for wire types."""

from hypothesis import strategies as st

from zkbridge.codec import MAX_PAYLOAD, BoundPayload, ReceiptPayload, Vaa, VaaBody


def uint(bits):
    return st.integers(0, (1 << bits) - 1)


b32 = st.binary(min_size=32, max_size=32)

vaa_bodies = st.builds(
    VaaBody,
    guardian_set_index=uint(32),
    timestamp=uint(32),
    nonce=uint(32),
    emitter_chain=uint(16),
    emitter_address=b32,
    sequence=uint(64),
    consistency_level=uint(8),
    payload=st.binary(max_size=300),
)

signature_lists = st.lists(
    st.tuples(uint(8), st.binary(min_size=65, max_size=65)), max_size=20, unique_by=lambda t: t[0]
).map(lambda xs: tuple(sorted(xs)))

vaas = st.builds(Vaa, vaa_bodies, signature_lists)

bound_payloads = st.builds(BoundPayload, b32, st.binary(max_size=300))

receipts = st.builds(
    ReceiptPayload,
    orig_emitter_chain=uint(16),
    orig_emitter=b32,
    orig_sequence=uint(64),
    c=b32,
    aztec_key=b32,
    leaf_index=uint(256),
    secret_hash=b32,
    result_hash=b32,
    version=uint(8),
)

__all__ = ["vaa_bodies", "vaas", "bound_payloads", "receipts", "b32", "uint", "MAX_PAYLOAD"]
