from __future__ import annotations

import secrets
from typing import Literal, Protocol

from src.core.protocol_config import DOMAIN_TAGS
from src.tools.fields import Fl, Fq, L, Q
from src.tools.hashing import keccak256


class NonceSource(Protocol):
    counter: int

    def next_fl(self) -> Fl: ...

    def next_fq(self) -> Fq: ...


class SeededNonceSource:
    """
    Counter-mode Keccak generator. Draw i is
    (keccak256(tag || seed || i || 0) || keccak256(tag || seed || i || 1)) mod m,
    redrawn when zero. 512 bits keep the modular bias negligible.
    """

    def __init__(self, seed: bytes, counter: int = 0) -> None:
        self.seed = bytes(seed)
        self.counter = counter

    def _draw(self, modulus: int) -> int:
        while True:
            block = DOMAIN_TAGS.nonce + self.seed + self.counter.to_bytes(8, "big")
            self.counter += 1
            wide = keccak256(block + b"\x00") + keccak256(block + b"\x01")
            value = int.from_bytes(wide, "big") % modulus
            if value:
                return value

    def next_fl(self) -> Fl:
        return Fl(self._draw(L))

    def next_fq(self) -> Fq:
        return Fq(self._draw(Q))


class SystemNonceSource:
    """OS entropy; the counter still advances so the persisted draw count stays monotonic."""

    def __init__(self, counter: int = 0) -> None:
        self.counter = counter

    def next_fl(self) -> Fl:
        self.counter += 1
        return Fl(secrets.randbelow(L - 1) + 1)

    def next_fq(self) -> Fq:
        self.counter += 1
        return Fq(secrets.randbelow(Q - 1) + 1)


def nonce_source_for(rng_seed: bytes, rng_counter: int, mode: Literal["seeded", "system"] = "seeded") -> NonceSource:
    if mode == "system":
        return SystemNonceSource(rng_counter)
    return SeededNonceSource(rng_seed, rng_counter)
