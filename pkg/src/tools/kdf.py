from __future__ import annotations

import logging
from dataclasses import dataclass

from src.core.codec import hex_bytes, parse_hex_bytes
from src.core.protocol_config import KDF_TYPE_STRING
from src.core.refusal import RefusalError
from src.tools.curve import Point, generator_g, scalar_mul
from src.tools.fields import Fl
from src.tools.hashing import Digest32, keccak256
from src.tools.signer import SignerInterface

logger = logging.getLogger(__name__)

KDF_MSG_TYPEHASH = keccak256(KDF_TYPE_STRING.encode("ascii"))


@dataclass(frozen=True)
class EthAddress:
    raw: bytes

    def __post_init__(self) -> None:
        if len(self.raw) != 20:
            raise RefusalError(
                code="REFUSE_ADDRESS_LENGTH",
                user_message=f"Ethereum address must be 20 bytes, got {len(self.raw)}.",
                why="Addresses are the low 20 bytes of an account identifier.",
                details={"length": len(self.raw)},
            )

    @classmethod
    def from_hex(cls, text: str) -> "EthAddress":
        return cls(parse_hex_bytes(text, length=20, name="address"))

    def hex(self) -> str:
        return hex_bytes(self.raw)

    def __str__(self) -> str:
        return self.hex()


@dataclass(frozen=True)
class KeyPair:
    """babyJubJub key pair; construction checks pk == sk * G."""
    sk: Fl
    pk: Point

    def __post_init__(self) -> None:
        if not self.sk:
            raise RefusalError(
                code="REFUSE_DEGENERATE_PRIVATE_KEY",
                user_message="Private key must be nonzero.",
                why="A zero key maps every public key to the identity.",
            )
        if scalar_mul(self.sk, generator_g()) != self.pk:
            raise RefusalError(
                code="REFUSE_KEY_PAIR_MISMATCH",
                user_message="Public key does not match the private key.",
                why="Key pairs must satisfy P = sk * G.",
                details={"pk": self.pk.to_json()},
            )

    def __repr__(self) -> str:
        return f"KeyPair(pk={self.pk.to_json()})"


def keypair_from_private_key(sk: Fl) -> KeyPair:
    return KeyPair(sk=sk, pk=scalar_mul(sk, generator_g()))


def kdf_struct_hash(cweth_address: EthAddress) -> Digest32:
    """keccak256(abi.encode(KDF_MSG_TYPEHASH, cWETHAddress)); 64-byte preimage."""
    return keccak256(KDF_MSG_TYPEHASH + bytes(12) + cweth_address.raw)


def derive_private_key(signature: bytes) -> Fl:
    """privateKey = keccak256(keccak256(signature)) mod l."""
    if not signature:
        raise RefusalError(
            code="REFUSE_EMPTY_SIGNATURE",
            user_message="Cannot derive a key from an empty signature.",
            why="The signature is the only entropy source of the key derivation.",
            missing=["signature"],
        )
    sk = Fl(int.from_bytes(keccak256(keccak256(signature)), "big"))
    if not sk:
        raise RefusalError(
            code="REFUSE_DEGENERATE_PRIVATE_KEY",
            user_message="Signature hashes to the zero key.",
            why="A zero private key is invalid; treat the signature as unusable.",
        )
    return sk


def derive_keypair(signer: SignerInterface, cweth_address: EthAddress) -> KeyPair:
    digest = kdf_struct_hash(cweth_address)
    signature = signer.sign(digest)
    keypair = keypair_from_private_key(derive_private_key(signature))
    logger.debug("derived key pair for contract %s", cweth_address.hex())
    return keypair
