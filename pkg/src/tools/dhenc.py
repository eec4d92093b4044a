from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Tuple

from src.core.codec import hex32, parse_hex32
from src.core.guardrails import refuse_if_amount_out_of_range, refuse_if_overspend
from src.core.protocol_config import AMOUNT_POLICY
from src.core.refusal import RefusalError
from src.tools.curve import Point, generator_g, scalar_mul
from src.tools.fields import Fl, Fq, Q
from src.tools.hashing import poseidon2


@dataclass(frozen=True)
class DhEntry:
    sender_pk: Point
    nonce: Fq

    def to_json(self) -> Dict[str, Any]:
        return {"senderPublicKey": self.sender_pk.to_json(), "nonce": hex32(self.nonce.value)}

    @classmethod
    def from_json(cls, doc: Dict[str, Any]) -> "DhEntry":
        return cls(
            sender_pk=Point.from_json(doc.get("senderPublicKey"), "senderPublicKey"),
            nonce=Fq(parse_hex32(doc.get("nonce"), modulus=Q, name="nonce")),
        )


@dataclass(frozen=True)
class DhBalance:
    """
    Encrypted balance plus the (sender key, nonce) list needed to strip its masks.
    An empty entry list means the zero balance.
    """
    encrypted: Fq
    entries: Tuple[DhEntry, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries and self.encrypted:
            raise RefusalError(
                code="REFUSE_DH_BALANCE_INCONSISTENT",
                user_message="Encrypted balance has no entries but a nonzero ciphertext.",
                why="Without entries no mask can be removed; the empty balance must encrypt to 0.",
                details={"encryptedBalance": hex32(self.encrypted.value)},
            )

    @classmethod
    def empty(cls) -> "DhBalance":
        return cls(Fq(0), ())

    def is_empty(self) -> bool:
        return not self.entries

    def append(self, ciphertext: Fq, entry: DhEntry) -> "DhBalance":
        return DhBalance(aggregate_encrypted(self.encrypted, ciphertext), self.entries + (entry,))

    def merge(self, other: "DhBalance") -> "DhBalance":
        return DhBalance(aggregate_encrypted(self.encrypted, other.encrypted), self.entries + other.entries)

    def to_json(self) -> Dict[str, Any]:
        return {
            "encryptedBalance": hex32(self.encrypted.value),
            "entries": [e.to_json() for e in self.entries],
        }

    @classmethod
    def from_json(cls, doc: Any) -> "DhBalance":
        if not isinstance(doc, dict) or "encryptedBalance" not in doc:
            raise RefusalError(
                code="REFUSE_DH_BALANCE_ENCODING",
                user_message="Cannot decode encrypted balance.",
                why="Expected {'encryptedBalance': hex, 'entries': [...]}.",
                missing=["encryptedBalance"],
            )
        return cls(
            encrypted=Fq(parse_hex32(doc["encryptedBalance"], modulus=Q, name="encryptedBalance")),
            entries=tuple(DhEntry.from_json(e) for e in doc.get("entries", [])),
        )


@lru_cache(maxsize=4096)
def _shared_point(sk: Fl, pk_other: Point) -> Point:
    return scalar_mul(sk, pk_other)


def shared_key(sk: Fl, pk_other: Point) -> Fq:
    """K_x: x-coordinate of sk * pk_other (equal on both sides of the exchange)."""
    if pk_other.is_identity():
        raise RefusalError(
            code="REFUSE_DEGENERATE_SHARED_KEY",
            user_message="Cannot derive a shared key with the identity point.",
            why="sk * identity is the identity for every sk, so the mask would be public.",
        )
    if not sk:
        raise RefusalError(
            code="REFUSE_DEGENERATE_PRIVATE_KEY",
            user_message="Cannot derive a shared key with a zero private key.",
            why="A zero key yields the identity point for every counterparty.",
        )
    return _shared_point(sk, pk_other).x


def mask(k_x: Fq, n: Fq) -> Fq:
    return k_x + poseidon2(k_x, n)


def masked_value(value: int, sk: Fl, pk: Point, n: Fq) -> Fq:
    """value + mask(shared_key(sk, pk), n) mod q, with no range policy."""
    return Fq(value) + mask(shared_key(sk, pk), n)


def encrypt_amount(a: int, sk_s: Fl, pk_r: Point, n: Fq) -> Fq:
    refuse_if_amount_out_of_range(a, "amount")
    return masked_value(a, sk_s, pk_r, n)


def aggregate_encrypted(acc: Fq, a_enc: Fq) -> Fq:
    return acc + a_enc


def decrypt_balance(sk: Fl, bal: DhBalance) -> int:
    residue = bal.encrypted
    for entry in bal.entries:
        residue = residue - mask(shared_key(sk, entry.sender_pk), entry.nonce)
    if residue.value >= AMOUNT_POLICY.upper_bound:
        raise RefusalError(
            code="REFUSE_BALANCE_CORRUPTED",
            user_message="Decrypted balance is outside the amount range.",
            why="Honest flows never produce it; the key is wrong or the stored balance is inconsistent.",
            details={"entries": len(bal.entries)},
        )
    return residue.value


def encrypt_new_sender_balance(b_s: int, a: int, sk: Fl, n: Fq) -> Fq:
    """(b_s - a) re-encrypted under the self DH key sk * (sk * G)."""
    refuse_if_amount_out_of_range(b_s, "balance")
    refuse_if_amount_out_of_range(a, "amount")
    refuse_if_overspend(b_s, a)
    return masked_value(b_s - a, sk, scalar_mul(sk, generator_g()), n)


def sender_reset(b_s: int, a: int, sk: Fl, n: Fq) -> DhBalance:
    """The single-entry balance that replaces the sender's list after a spend."""
    own_pk = scalar_mul(sk, generator_g())
    return DhBalance(encrypt_new_sender_balance(b_s, a, sk, n), (DhEntry(own_pk, n),))
