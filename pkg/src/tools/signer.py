from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

from src.core.refusal import RefusalError
from src.tools.hashing import Digest32, keccak256

SIGNATURE_LENGTH = 65


@runtime_checkable
class SignerInterface(Protocol):
    """Anything that turns a 32-byte digest into deterministic signature bytes (a wallet)."""

    def sign(self, digest: Digest32) -> bytes: ...


@dataclass(frozen=True)
class DeterministicTestSigner:
    """
    Stand-in for eth_signTypedData_v4. Produces a 65-byte blob (the r||s||v shape):
    b0 = keccak256(seed || digest), b1 = keccak256(b0), b2 = keccak256(b1),
    signature = (b0 || b1 || b2)[:65].
    Not a real ECDSA signature; it only supplies stable entropy per (seed, digest).
    """
    seed: bytes

    def __post_init__(self) -> None:
        if not self.seed:
            raise RefusalError(
                code="REFUSE_SIGNER_SEED_EMPTY",
                user_message="Test signer needs a non-empty seed.",
                why="The seed is the signer's identity; an empty seed collapses all signers into one.",
                missing=["seed"],
            )

    def sign(self, digest: Digest32) -> bytes:
        if len(digest) != 32:
            raise RefusalError(
                code="REFUSE_DIGEST_LENGTH",
                user_message=f"Signer expects a 32-byte digest, got {len(digest)} bytes.",
                why="Typed-data signing operates on a keccak256 struct hash.",
            )
        b0 = keccak256(self.seed + digest)
        b1 = keccak256(b0)
        b2 = keccak256(b1)
        return (b0 + b1 + b2)[:SIGNATURE_LENGTH]
