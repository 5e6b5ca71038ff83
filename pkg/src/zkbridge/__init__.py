"""Executable model of a Solana -> Wormhole -> EVM Portal -> Aztec bridge."""

__version__ = "0.1.0"
