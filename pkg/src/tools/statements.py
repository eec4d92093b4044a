from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, List, Tuple

from src.core.codec import hex32, parse_hex32
from src.core.guardrails import amount_in_range, refuse_if_invalid_public_key
from src.core.refusal import RefusalError
from src.tools.curve import Point, generator_g, scalar_mul
from src.tools.dhenc import masked_value
from src.tools.elgamal import Commitment, twist, verify_opening
from src.tools.fields import Fl, Fq, L, Q
from src.tools.kdf import EthAddress

logger = logging.getLogger(__name__)


class Violation(str, Enum):
    K1_KEY_MISMATCH = "K1_KEY_MISMATCH"
    K2_BALANCE_OPENING = "K2_BALANCE_OPENING"
    K3_AMOUNT_COMMITMENT = "K3_AMOUNT_COMMITMENT"
    K4_BALANCE_ENCRYPTION = "K4_BALANCE_ENCRYPTION"
    K5_RANGE = "K5_RANGE"

    T1_KEY_MISMATCH = "T1_KEY_MISMATCH"
    T2_OVERSPEND = "T2_OVERSPEND"
    T3_SENDER_COMMITMENT = "T3_SENDER_COMMITMENT"
    T4_RECEIVER_COMMITMENT = "T4_RECEIVER_COMMITMENT"
    T5_SENDER_BALANCE_ENCRYPTION = "T5_SENDER_BALANCE_ENCRYPTION"
    T6_RECEIVER_AMOUNT_ENCRYPTION = "T6_RECEIVER_AMOUNT_ENCRYPTION"

    W1_KEY_MISMATCH = "W1_KEY_MISMATCH"
    W2_OVERSPEND = "W2_OVERSPEND"
    W3_AMOUNT_COMMITMENT = "W3_AMOUNT_COMMITMENT"
    W4_BALANCE_ENCRYPTION = "W4_BALANCE_ENCRYPTION"


@dataclass(frozen=True)
class VerificationReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def accepted(self) -> bool:
        return not self.violations

    @property
    def codes(self) -> List[str]:
        return [v.value for v in self.violations]

    def to_json(self) -> Dict[str, Any]:
        return {"accepted": self.accepted, "violations": self.codes}


# ---------------------------
# JSON helpers
# ---------------------------
def _fq(doc: Dict[str, Any], key: str) -> Fq:
    return Fq(parse_hex32(doc.get(key), modulus=Q, name=key))


def _fl(doc: Dict[str, Any], key: str) -> Fl:
    return Fl(parse_hex32(doc.get(key), modulus=L, name=key))


def _amount(doc: Dict[str, Any], key: str) -> int:
    return parse_hex32(doc.get(key), name=key)


def _public_key(doc: Dict[str, Any], key: str) -> Point:
    point = Point.from_json(doc.get(key), key)
    refuse_if_invalid_public_key(point, key)
    return point


def _require_keys(doc: Any, kind: str, keys: Tuple[str, ...]) -> Dict[str, Any]:
    if not isinstance(doc, dict):
        raise RefusalError(
            code="REFUSE_STATEMENT_ENCODING",
            user_message=f"Cannot decode {kind}: expected a JSON object.",
            why="Statements and witnesses are serialized as objects with hex fields.",
        )
    missing = [k for k in keys if k not in doc]
    if missing:
        raise RefusalError(
            code="REFUSE_STATEMENT_ENCODING",
            user_message=f"Cannot decode {kind}: fields are missing.",
            why="Every public and private signal must be present.",
            missing=missing,
        )
    return doc


# ---------------------------
# Deposit
# ---------------------------
@dataclass(frozen=True)
class DepositStatement:
    pk: Point
    amount: int
    balance_commitment: Commitment
    amount_commitment: Commitment
    new_encrypted_balance: Fq
    encryption_nonce: Fq

    FIELDS = ("pk", "amount", "balance_commitment", "amount_commitment", "new_encrypted_balance", "encryption_nonce")

    def to_json(self) -> Dict[str, Any]:
        return {
            "pk": self.pk.to_json(),
            "amount": hex32(self.amount),
            "balance_commitment": self.balance_commitment.to_json(),
            "amount_commitment": self.amount_commitment.to_json(),
            "new_encrypted_balance": hex32(self.new_encrypted_balance.value),
            "encryption_nonce": hex32(self.encryption_nonce.value),
        }

    @classmethod
    def from_json(cls, doc: Any) -> "DepositStatement":
        doc = _require_keys(doc, "deposit statement", cls.FIELDS)
        return cls(
            pk=_public_key(doc, "pk"),
            amount=_amount(doc, "amount"),
            balance_commitment=Commitment.from_json(doc["balance_commitment"], "balance_commitment"),
            amount_commitment=Commitment.from_json(doc["amount_commitment"], "amount_commitment"),
            new_encrypted_balance=_fq(doc, "new_encrypted_balance"),
            encryption_nonce=_fq(doc, "encryption_nonce"),
        )


@dataclass(frozen=True)
class DepositWitness:
    sk: Fl
    prior_balance: int
    commitment_nonce: Fl

    FIELDS = ("sk", "prior_balance", "commitment_nonce")

    def to_json(self) -> Dict[str, Any]:
        return {
            "sk": hex32(self.sk.value),
            "prior_balance": hex32(self.prior_balance),
            "commitment_nonce": hex32(self.commitment_nonce.value),
        }

    @classmethod
    def from_json(cls, doc: Any) -> "DepositWitness":
        doc = _require_keys(doc, "deposit witness", cls.FIELDS)
        return cls(sk=_fl(doc, "sk"), prior_balance=_amount(doc, "prior_balance"),
                   commitment_nonce=_fl(doc, "commitment_nonce"))


# ---------------------------
# Transfer
# ---------------------------
@dataclass(frozen=True)
class TransferStatement:
    sender_pk: Point
    receiver_pk: Point
    sender_balance_commitment: Commitment
    sender_amount_commitment: Commitment
    receiver_amount_commitment: Commitment
    new_sender_encrypted_balance: Fq
    sender_nonce: Fq
    receiver_encrypted_amount: Fq
    receiver_nonce: Fq

    FIELDS = (
        "sender_pk", "receiver_pk", "sender_balance_commitment", "sender_amount_commitment",
        "receiver_amount_commitment", "new_sender_encrypted_balance", "sender_nonce",
        "receiver_encrypted_amount", "receiver_nonce",
    )

    def to_json(self) -> Dict[str, Any]:
        return {
            "sender_pk": self.sender_pk.to_json(),
            "receiver_pk": self.receiver_pk.to_json(),
            "sender_balance_commitment": self.sender_balance_commitment.to_json(),
            "sender_amount_commitment": self.sender_amount_commitment.to_json(),
            "receiver_amount_commitment": self.receiver_amount_commitment.to_json(),
            "new_sender_encrypted_balance": hex32(self.new_sender_encrypted_balance.value),
            "sender_nonce": hex32(self.sender_nonce.value),
            "receiver_encrypted_amount": hex32(self.receiver_encrypted_amount.value),
            "receiver_nonce": hex32(self.receiver_nonce.value),
        }

    @classmethod
    def from_json(cls, doc: Any) -> "TransferStatement":
        doc = _require_keys(doc, "transfer statement", cls.FIELDS)
        return cls(
            sender_pk=_public_key(doc, "sender_pk"),
            receiver_pk=_public_key(doc, "receiver_pk"),
            sender_balance_commitment=Commitment.from_json(doc["sender_balance_commitment"], "sender_balance_commitment"),
            sender_amount_commitment=Commitment.from_json(doc["sender_amount_commitment"], "sender_amount_commitment"),
            receiver_amount_commitment=Commitment.from_json(doc["receiver_amount_commitment"], "receiver_amount_commitment"),
            new_sender_encrypted_balance=_fq(doc, "new_sender_encrypted_balance"),
            sender_nonce=_fq(doc, "sender_nonce"),
            receiver_encrypted_amount=_fq(doc, "receiver_encrypted_amount"),
            receiver_nonce=_fq(doc, "receiver_nonce"),
        )


@dataclass(frozen=True)
class TransferWitness:
    sk_s: Fl
    sender_balance: int
    amount: int
    sender_commit_nonce: Fl
    receiver_commit_nonce: Fl

    FIELDS = ("sk_s", "sender_balance", "amount", "sender_commit_nonce", "receiver_commit_nonce")

    def to_json(self) -> Dict[str, Any]:
        return {
            "sk_s": hex32(self.sk_s.value),
            "sender_balance": hex32(self.sender_balance),
            "amount": hex32(self.amount),
            "sender_commit_nonce": hex32(self.sender_commit_nonce.value),
            "receiver_commit_nonce": hex32(self.receiver_commit_nonce.value),
        }

    @classmethod
    def from_json(cls, doc: Any) -> "TransferWitness":
        doc = _require_keys(doc, "transfer witness", cls.FIELDS)
        return cls(
            sk_s=_fl(doc, "sk_s"),
            sender_balance=_amount(doc, "sender_balance"),
            amount=_amount(doc, "amount"),
            sender_commit_nonce=_fl(doc, "sender_commit_nonce"),
            receiver_commit_nonce=_fl(doc, "receiver_commit_nonce"),
        )


# ---------------------------
# Withdraw
# ---------------------------
@dataclass(frozen=True)
class WithdrawStatement:
    pk: Point
    receiver_address: EthAddress
    amount: int
    balance_commitment: Commitment
    amount_commitment: Commitment
    new_encrypted_balance: Fq
    encryption_nonce: Fq

    FIELDS = ("pk", "receiver_address", "amount", "balance_commitment", "amount_commitment",
              "new_encrypted_balance", "encryption_nonce")

    def to_json(self) -> Dict[str, Any]:
        return {
            "pk": self.pk.to_json(),
            "receiver_address": self.receiver_address.hex(),
            "amount": hex32(self.amount),
            "balance_commitment": self.balance_commitment.to_json(),
            "amount_commitment": self.amount_commitment.to_json(),
            "new_encrypted_balance": hex32(self.new_encrypted_balance.value),
            "encryption_nonce": hex32(self.encryption_nonce.value),
        }

    @classmethod
    def from_json(cls, doc: Any) -> "WithdrawStatement":
        doc = _require_keys(doc, "withdraw statement", cls.FIELDS)
        return cls(
            pk=_public_key(doc, "pk"),
            receiver_address=EthAddress.from_hex(doc["receiver_address"]),
            amount=_amount(doc, "amount"),
            balance_commitment=Commitment.from_json(doc["balance_commitment"], "balance_commitment"),
            amount_commitment=Commitment.from_json(doc["amount_commitment"], "amount_commitment"),
            new_encrypted_balance=_fq(doc, "new_encrypted_balance"),
            encryption_nonce=_fq(doc, "encryption_nonce"),
        )


@dataclass(frozen=True)
class WithdrawWitness:
    sk: Fl
    balance: int
    commitment_nonce: Fl

    FIELDS = ("sk", "balance", "commitment_nonce")

    def to_json(self) -> Dict[str, Any]:
        return {
            "sk": hex32(self.sk.value),
            "balance": hex32(self.balance),
            "commitment_nonce": hex32(self.commitment_nonce.value),
        }

    @classmethod
    def from_json(cls, doc: Any) -> "WithdrawWitness":
        doc = _require_keys(doc, "withdraw witness", cls.FIELDS)
        return cls(sk=_fl(doc, "sk"), balance=_amount(doc, "balance"), commitment_nonce=_fl(doc, "commitment_nonce"))


# ---------------------------
# Constraint evaluation
# ---------------------------
def _holds(constraint: Callable[[], bool]) -> bool:
    # an unsatisfiable witness (e.g. zero key) is a violation, not a crash
    try:
        return bool(constraint())
    except (RefusalError, ValueError, ArithmeticError):
        return False


def _evaluate(checks: List[Tuple[Violation, Callable[[], bool]]]) -> VerificationReport:
    violations = tuple(code for code, check in checks if not _holds(check))
    if violations:
        logger.debug("constraints violated: %s", ",".join(v.value for v in violations))
    return VerificationReport(violations)


def _owns(pk: Point, sk: Fl) -> bool:
    return bool(sk) and scalar_mul(sk, generator_g()) == pk


def _self_key(sk: Fl) -> Point:
    return scalar_mul(sk, generator_g())


def verify_deposit(st: DepositStatement, w: DepositWitness) -> VerificationReport:
    return _evaluate([
        (Violation.K1_KEY_MISMATCH, lambda: _owns(st.pk, w.sk)),
        (Violation.K2_BALANCE_OPENING, lambda: verify_opening(st.balance_commitment, w.prior_balance, w.sk)),
        (Violation.K3_AMOUNT_COMMITMENT,
         lambda: st.amount_commitment == twist(st.amount, w.commitment_nonce, st.pk)),
        (Violation.K4_BALANCE_ENCRYPTION,
         lambda: st.new_encrypted_balance
         == masked_value(w.prior_balance + st.amount, w.sk, _self_key(w.sk), st.encryption_nonce)),
        (Violation.K5_RANGE,
         lambda: amount_in_range(st.amount)
         and amount_in_range(w.prior_balance)
         and amount_in_range(w.prior_balance + st.amount)),
    ])


def verify_transfer(st: TransferStatement, w: TransferWitness) -> VerificationReport:
    return _evaluate([
        (Violation.T1_KEY_MISMATCH, lambda: _owns(st.sender_pk, w.sk_s)),
        (Violation.T2_OVERSPEND,
         lambda: amount_in_range(w.sender_balance)
         and amount_in_range(w.amount)
         and w.sender_balance >= w.amount
         and verify_opening(st.sender_balance_commitment, w.sender_balance, w.sk_s)),
        (Violation.T3_SENDER_COMMITMENT,
         lambda: st.sender_amount_commitment == twist(-w.amount, w.sender_commit_nonce, st.sender_pk)),
        (Violation.T4_RECEIVER_COMMITMENT,
         lambda: st.receiver_amount_commitment == twist(w.amount, w.receiver_commit_nonce, st.receiver_pk)),
        (Violation.T5_SENDER_BALANCE_ENCRYPTION,
         lambda: st.new_sender_encrypted_balance
         == masked_value(w.sender_balance - w.amount, w.sk_s, _self_key(w.sk_s), st.sender_nonce)),
        (Violation.T6_RECEIVER_AMOUNT_ENCRYPTION,
         lambda: st.receiver_encrypted_amount == masked_value(w.amount, w.sk_s, st.receiver_pk, st.receiver_nonce)),
    ])


def verify_withdraw(st: WithdrawStatement, w: WithdrawWitness) -> VerificationReport:
    # receiver_address is bound by statement membership only
    return _evaluate([
        (Violation.W1_KEY_MISMATCH, lambda: _owns(st.pk, w.sk)),
        (Violation.W2_OVERSPEND,
         lambda: amount_in_range(w.balance)
         and amount_in_range(st.amount)
         and w.balance >= st.amount
         and verify_opening(st.balance_commitment, w.balance, w.sk)),
        (Violation.W3_AMOUNT_COMMITMENT,
         lambda: st.amount_commitment == twist(-st.amount, w.commitment_nonce, st.pk)),
        (Violation.W4_BALANCE_ENCRYPTION,
         lambda: st.new_encrypted_balance
         == masked_value(w.balance - st.amount, w.sk, _self_key(w.sk), st.encryption_nonce)),
    ])
