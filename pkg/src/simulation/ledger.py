from __future__ import annotations

import logging
from typing import Tuple

from src.core.codec import hex32, wei
from src.core.guardrails import refuse_if_amount_out_of_range, refuse_if_invalid_public_key
from src.core.refusal import RefusalError
from src.simulation.account import AccountBalance, LedgerState
from src.tools.curve import Point
from src.tools.dhenc import DhBalance, DhEntry, decrypt_balance
from src.tools.elgamal import Commitment, aggregate
from src.tools.kdf import EthAddress, KeyPair
from src.tools.statements import (
    DepositStatement,
    DepositWitness,
    TransferStatement,
    TransferWitness,
    VerificationReport,
    WithdrawStatement,
    WithdrawWitness,
    verify_deposit,
    verify_transfer,
    verify_withdraw,
)

logger = logging.getLogger(__name__)


def _short(pk: Point) -> str:
    return hex32(pk.x.value)[:18]


# ---------------------------
# Preconditions shared by the transitions
# ---------------------------
def require_key_match(registered: Point, claimed: Point, addr: EthAddress) -> None:
    if registered != claimed:
        raise RefusalError(
            code="REFUSE_KEY_MISMATCH",
            user_message=f"Public key does not match the key registered for {addr.hex()}.",
            why="An address is bound to one babyJubJub key at its first deposit and it never changes.",
            details={"registered": registered.to_json(), "claimed": claimed.to_json()},
        )


def registered_receiver(state: LedgerState, addr: EthAddress) -> Point:
    pk = state.registered_key(addr)
    if pk is None:
        raise RefusalError(
            code="REFUSE_UNREGISTERED_RECEIVER",
            user_message=f"Receiver {addr.hex()} has no registered key.",
            why="Amount commitments and encryptions are built for the receiver's key; without it a transfer is meaningless.",
            missing=[f"registered_keys[{addr.hex()}]"],
        )
    return pk


def refuse_if_self_transfer(sender_pk: Point, receiver_pk: Point) -> None:
    if sender_pk == receiver_pk:
        raise RefusalError(
            code="REFUSE_SELF_TRANSFER",
            user_message="Sender and receiver are the same account.",
            why="A transfer statement requires two distinct keys.",
        )


def _require_fresh(current: Commitment, claimed: Commitment, operation: str) -> None:
    if current != claimed:
        raise RefusalError(
            code="REFUSE_STALE_COMMITMENT",
            user_message=f"{operation} was proven against an outdated balance commitment.",
            why="The statement must reference the account's current actual commitment; anything else is stale or replayed.",
            details={"current": current.to_json(), "claimed": claimed.to_json()},
        )


def _require_accepted(report: VerificationReport, operation: str) -> None:
    if not report.accepted:
        raise RefusalError(
            code="REFUSE_PROOF_REJECTED",
            user_message=f"{operation} proof was rejected by the verifier.",
            why="Every constraint of the circuit must hold for the (statement, witness) pair.",
            details={"violations": report.codes},
        )


def _register(state: LedgerState, addr: EthAddress, pk: Point) -> LedgerState:
    refuse_if_invalid_public_key(pk, "public_key")
    for other_addr, other_pk in state.registered_keys.items():
        if other_pk.x == pk.x:
            raise RefusalError(
                code="REFUSE_KEY_ALREADY_REGISTERED",
                user_message=f"Public key is already registered to {other_addr.hex()}.",
                why="Balances are keyed by the public key's x-coordinate; two addresses cannot share it.",
                details={"pk": pk.to_json()},
            )
    return state.with_registration(addr, pk)


# ---------------------------
# Transitions
# ---------------------------
def deposit(
    state: LedgerState,
    addr: EthAddress,
    pk: Point,
    amount: int,
    statement: DepositStatement,
    witness: DepositWitness,
) -> LedgerState:
    """
    Wrap `amount` into the actual balance of `addr`. The first deposit registers pk.
    post: actual commitment += amount commitment; actual DH balance reset to the
    statement's single entry; total_wrapped += amount.
    """
    refuse_if_amount_out_of_range(amount, "amount")
    require_key_match(pk, statement.pk, addr)
    if statement.amount != amount:
        raise RefusalError(
            code="REFUSE_AMOUNT_MISMATCH",
            user_message="Deposit statement commits to a different amount than the value sent.",
            why="The public deposit amount is bound to msg.value.",
            details={"amount": wei(amount), "statement_amount": wei(statement.amount)},
        )
    refuse_if_amount_out_of_range(state.total_wrapped + amount, "total_wrapped")

    registered = state.registered_key(addr)
    if registered is None:
        next_state = _register(state, addr, pk)
    else:
        require_key_match(registered, pk, addr)
        next_state = state

    balance = state.balance_of(pk)
    _require_fresh(balance.actual_commitment, statement.balance_commitment, "Deposit")
    _require_accepted(verify_deposit(statement, witness), "Deposit")

    updated = AccountBalance(
        pending_commitment=balance.pending_commitment,
        actual_commitment=aggregate(balance.actual_commitment, statement.amount_commitment),
        pending_dh=balance.pending_dh,
        actual_dh=DhBalance(statement.new_encrypted_balance, (DhEntry(pk, statement.encryption_nonce),)),
    )
    logger.info("deposit addr=%s pk=%s amount=%d", addr.hex(), _short(pk), amount)
    return next_state.with_account(pk, updated).with_total_wrapped(state.total_wrapped + amount)


def transfer(
    state: LedgerState,
    sender_addr: EthAddress,
    receiver_addr: EthAddress,
    statement: TransferStatement,
    witness: TransferWitness,
    auto_rollover: bool = False,
) -> LedgerState:
    """
    Debit the sender's actual balance, credit the receiver's pending balance.
    With auto_rollover the sender's own pending is folded in after the debit.
    """
    sender_pk, sender = state.account_of(sender_addr)
    require_key_match(sender_pk, statement.sender_pk, sender_addr)
    receiver_pk = registered_receiver(state, receiver_addr)
    require_key_match(receiver_pk, statement.receiver_pk, receiver_addr)
    refuse_if_self_transfer(sender_pk, receiver_pk)

    _require_fresh(sender.actual_commitment, statement.sender_balance_commitment, "Transfer")
    _require_accepted(verify_transfer(statement, witness), "Transfer")

    debited = AccountBalance(
        pending_commitment=sender.pending_commitment,
        actual_commitment=aggregate(sender.actual_commitment, statement.sender_amount_commitment),
        pending_dh=sender.pending_dh,
        actual_dh=DhBalance(statement.new_sender_encrypted_balance, (DhEntry(sender_pk, statement.sender_nonce),)),
    )
    receiver = state.balance_of(receiver_pk)
    credited = AccountBalance(
        pending_commitment=aggregate(receiver.pending_commitment, statement.receiver_amount_commitment),
        actual_commitment=receiver.actual_commitment,
        pending_dh=receiver.pending_dh.append(
            statement.receiver_encrypted_amount, DhEntry(sender_pk, statement.receiver_nonce)
        ),
        actual_dh=receiver.actual_dh,
    )
    # amounts stay confidential; log parties only
    logger.info("transfer from=%s to=%s", _short(sender_pk), _short(receiver_pk))
    result = state.with_account(sender_pk, debited).with_account(receiver_pk, credited)
    if auto_rollover:
        result = rollover(result, sender_addr)
    return result


def withdraw(
    state: LedgerState,
    addr: EthAddress,
    statement: WithdrawStatement,
    witness: WithdrawWitness,
) -> LedgerState:
    pk, balance = state.account_of(addr)
    require_key_match(pk, statement.pk, addr)
    _require_fresh(balance.actual_commitment, statement.balance_commitment, "Withdraw")
    _require_accepted(verify_withdraw(statement, witness), "Withdraw")
    if statement.amount > state.total_wrapped:
        raise RefusalError(
            code="REFUSE_TOTAL_WRAPPED_UNDERFLOW",
            user_message="Withdrawal exceeds the total wrapped supply.",
            why="The contract can never pay out more ETH than it holds; this signals corrupted state.",
            details={"amount": wei(statement.amount), "total_wrapped": wei(state.total_wrapped)},
        )

    updated = AccountBalance(
        pending_commitment=balance.pending_commitment,
        actual_commitment=aggregate(balance.actual_commitment, statement.amount_commitment),
        pending_dh=balance.pending_dh,
        actual_dh=DhBalance(statement.new_encrypted_balance, (DhEntry(pk, statement.encryption_nonce),)),
    )
    logger.info(
        "withdraw addr=%s pk=%s amount=%d to=%s",
        addr.hex(), _short(pk), statement.amount, statement.receiver_address.hex(),
    )
    return state.with_account(pk, updated).with_total_wrapped(state.total_wrapped - statement.amount)


def rollover(state: LedgerState, addr: EthAddress) -> LedgerState:
    """Move pending into actual (both representations). Empty pending is a no-op."""
    pk, balance = state.account_of(addr)
    if balance.pending_is_empty():
        return state
    updated = AccountBalance(
        pending_commitment=Commitment.identity(),
        actual_commitment=aggregate(balance.actual_commitment, balance.pending_commitment),
        pending_dh=DhBalance.empty(),
        actual_dh=balance.actual_dh.merge(balance.pending_dh),
    )
    logger.info("rollover pk=%s entries=%d", _short(pk), len(balance.pending_dh.entries))
    return state.with_account(pk, updated)


# ---------------------------
# Views
# ---------------------------
def public_account(state: LedgerState, addr: EthAddress) -> AccountBalance:
    """What anyone can read from contract storage for `addr`."""
    return state.account_of(addr)[1]


def decrypt_account(keypair: KeyPair, state: LedgerState, addr: EthAddress) -> Tuple[int, int]:
    """Owner-side view: (pending, actual) plaintext balances."""
    pk, balance = state.account_of(addr)
    require_key_match(pk, keypair.pk, addr)
    return decrypt_balance(keypair.sk, balance.pending_dh), decrypt_balance(keypair.sk, balance.actual_dh)
