from __future__ import annotations

from functools import lru_cache

from src.core.protocol_config import DOMAIN_TAGS
from src.tools.hashing import keccak256
from src.tools.kdf import EthAddress, KeyPair, derive_keypair
from src.tools.signer import DeterministicTestSigner


def actor_address(seed: bytes, name: str) -> EthAddress:
    return EthAddress(keccak256(DOMAIN_TAGS.actor_address + seed + name.encode("utf-8"))[12:])


def actor_signer(seed: bytes, name: str) -> DeterministicTestSigner:
    return DeterministicTestSigner(keccak256(DOMAIN_TAGS.actor_signer + seed + name.encode("utf-8")))


@lru_cache(maxsize=256)
def actor_keypair(seed: bytes, name: str, cweth_address: EthAddress) -> KeyPair:
    return derive_keypair(actor_signer(seed, name), cweth_address)
