from __future__ import annotations

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Any, Dict, Mapping, Optional, Tuple

from src.core.refusal import RefusalError
from src.tools.curve import Point
from src.tools.dhenc import DhBalance
from src.tools.elgamal import Commitment
from src.tools.fields import Fq
from src.tools.kdf import EthAddress


@dataclass(frozen=True)
class AccountBalance:
    """
    Four views of one account: pending/actual x commitment/DH-encrypted.
    Transfers land in pending; spends and deposits act on actual.
    """
    pending_commitment: Commitment = field(default_factory=Commitment.identity)
    actual_commitment: Commitment = field(default_factory=Commitment.identity)
    pending_dh: DhBalance = field(default_factory=DhBalance.empty)
    actual_dh: DhBalance = field(default_factory=DhBalance.empty)

    def pending_is_empty(self) -> bool:
        return self.pending_dh.is_empty() and self.pending_commitment == Commitment.identity()

    def to_json(self) -> Dict[str, Any]:
        return {
            "pending_commitment": self.pending_commitment.to_json(),
            "actual_commitment": self.actual_commitment.to_json(),
            "pending_dh": self.pending_dh.to_json(),
            "actual_dh": self.actual_dh.to_json(),
        }

    @classmethod
    def from_json(cls, doc: Any) -> "AccountBalance":
        if not isinstance(doc, dict):
            raise RefusalError(
                code="REFUSE_STATE_CORRUPT",
                user_message="Account entry is not an object.",
                why="Each account stores two commitments and two encrypted balances.",
            )
        missing = [k for k in ("pending_commitment", "actual_commitment", "pending_dh", "actual_dh") if k not in doc]
        if missing:
            raise RefusalError(
                code="REFUSE_STATE_CORRUPT",
                user_message="Account entry is missing fields.",
                why="Each account stores two commitments and two encrypted balances.",
                missing=missing,
            )
        return cls(
            pending_commitment=Commitment.from_json(doc["pending_commitment"], "pending_commitment"),
            actual_commitment=Commitment.from_json(doc["actual_commitment"], "actual_commitment"),
            pending_dh=DhBalance.from_json(doc["pending_dh"]),
            actual_dh=DhBalance.from_json(doc["actual_dh"]),
        )


def _frozen(mapping: Mapping) -> Mapping:
    return MappingProxyType(dict(mapping))


@dataclass(frozen=True)
class LedgerState:
    """
    Contract storage. Accounts are keyed by the x-coordinate of the owner's public key;
    registered_keys binds each address to one immutable key.
    Transitions never mutate a state; they build a new one.
    """
    accounts: Mapping[Fq, AccountBalance]
    registered_keys: Mapping[EthAddress, Point]
    total_wrapped: int
    rng_seed: bytes
    rng_counter: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "accounts", _frozen(self.accounts))
        object.__setattr__(self, "registered_keys", _frozen(self.registered_keys))
        if len(self.rng_seed) != 32:
            raise RefusalError(
                code="REFUSE_STATE_CORRUPT",
                user_message="Ledger RNG seed must be 32 bytes.",
                why="The nonce generator is keyed by a 32-byte seed.",
                details={"length": len(self.rng_seed)},
            )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LedgerState):
            return NotImplemented
        return (
            dict(self.accounts) == dict(other.accounts)
            and dict(self.registered_keys) == dict(other.registered_keys)
            and self.total_wrapped == other.total_wrapped
            and self.rng_seed == other.rng_seed
            and self.rng_counter == other.rng_counter
        )

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def genesis(cls, rng_seed: bytes) -> "LedgerState":
        return cls(accounts={}, registered_keys={}, total_wrapped=0, rng_seed=bytes(rng_seed))

    # ---------------------------
    # Lookups
    # ---------------------------
    def registered_key(self, addr: EthAddress) -> Optional[Point]:
        return self.registered_keys.get(addr)

    def key_of(self, addr: EthAddress) -> Point:
        pk = self.registered_keys.get(addr)
        if pk is None:
            raise RefusalError(
                code="REFUSE_UNKNOWN_ACCOUNT",
                user_message=f"Address {addr.hex()} has no registered key.",
                why="An address is registered by its first deposit.",
                missing=[f"registered_keys[{addr.hex()}]"],
            )
        return pk

    def balance_of(self, pk: Point) -> AccountBalance:
        return self.accounts.get(pk.x, AccountBalance())

    def account_of(self, addr: EthAddress) -> Tuple[Point, AccountBalance]:
        pk = self.key_of(addr)
        return pk, self.balance_of(pk)

    # ---------------------------
    # Copy-on-write updates
    # ---------------------------
    def with_account(self, pk: Point, balance: AccountBalance) -> "LedgerState":
        accounts = dict(self.accounts)
        accounts[pk.x] = balance
        return replace(self, accounts=accounts)

    def with_registration(self, addr: EthAddress, pk: Point) -> "LedgerState":
        keys = dict(self.registered_keys)
        keys[addr] = pk
        return replace(self, registered_keys=keys)

    def with_rng_counter(self, counter: int) -> "LedgerState":
        return replace(self, rng_counter=counter)

    def with_total_wrapped(self, total: int) -> "LedgerState":
        return replace(self, total_wrapped=total)
