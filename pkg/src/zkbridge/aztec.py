"""Simulated Aztec L1->L2 inbox, rollup inclusion and the consumer contract."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .crypto import FieldElement, keccak256, secret_hash
from .errors import (
    AlreadyConsumed,
    BadSecret,
    ContentMismatch,
    NoSuchLeaf,
    NotYetIncluded,
    PortalAlreadySet,
    SenderMismatch,
)


@dataclass
class InboxLeaf:
    content: FieldElement
    secret_hash: bytes
    sender: str
    recipient: Tuple[bytes, int]
    leaf_index: int
    included_in_block: Optional[int] = None
    consumed: bool = False


@dataclass
class ConsumerState:
    portal_addr: Optional[str] = None
    last_content: FieldElement = 0
    last_leaf: int = 0
    last_secret: FieldElement = 0
    count: int = 0


@dataclass
class AztecState:
    leaves: List[InboxLeaf] = field(default_factory=list)
    current_block: int = 0
    pending_frontier: int = 0
    consumer: ConsumerState = field(default_factory=ConsumerState)

    def inbox_enqueue(
        self, c: FieldElement, secret_hash: bytes, sender: str, recipient: Tuple[bytes, int]
    ) -> int:
        index = len(self.leaves)
        self.leaves.append(
            InboxLeaf(content=c, secret_hash=bytes(secret_hash), sender=sender, recipient=recipient, leaf_index=index)
        )
        return index

    def rollup_tick(self) -> List[int]:
        """Advance one block, including every pending leaf. Returns their indices."""
        self.current_block += 1
        included = list(range(self.pending_frontier, len(self.leaves)))
        for i in included:
            self.leaves[i].included_in_block = self.current_block
        self.pending_frontier = len(self.leaves)
        return included

    def set_portal_once(self, addr: str) -> None:
        if self.consumer.portal_addr is not None:
            raise PortalAlreadySet(self.consumer.portal_addr)
        self.consumer.portal_addr = addr

    def consume_from_inbox(self, content_hash: FieldElement, leaf_index: int, secret: FieldElement) -> InboxLeaf:
        # cheap checks first, the secret hash last
        if not 0 <= leaf_index < len(self.leaves):
            raise NoSuchLeaf(str(leaf_index))
        leaf = self.leaves[leaf_index]
        if leaf.included_in_block is None:
            raise NotYetIncluded(str(leaf_index))
        if leaf.consumed:
            raise AlreadyConsumed(f"leaf {leaf_index}")
        if leaf.content != content_hash:
            raise ContentMismatch(str(leaf_index))
        if self.consumer.portal_addr is None or leaf.sender != self.consumer.portal_addr:
            raise SenderMismatch(leaf.sender)
        try:
            ok = secret_hash(secret) == leaf.secret_hash
        except ValueError:
            ok = False
        if not ok:
            raise BadSecret(str(leaf_index))

        leaf.consumed = True
        c = self.consumer
        c.last_content = content_hash
        c.last_leaf = leaf_index
        c.last_secret = secret
        c.count += 1
        return leaf

    def digest(self) -> bytes:
        """Fingerprint of the whole state, for atomicity checks."""
        c = self.consumer
        return keccak256(
            repr(
                (
                    [(l.content, l.secret_hash, l.sender, l.included_in_block, l.consumed) for l in self.leaves],
                    self.current_block,
                    self.pending_frontier,
                    (c.portal_addr, c.last_content, c.last_leaf, c.last_secret, c.count),
                )
            ).encode()
        )
