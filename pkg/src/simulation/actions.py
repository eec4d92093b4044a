"""
User-level actions over a LedgerState: what one CLI command or one scenario
line does. Each action returns the next state plus a JSON-ready record
(statement, verification report, public state delta). Rejections raise
RefusalError and leave the input state untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Iterable, Literal, Optional, Tuple

from src.core.codec import hex32, hex_bytes, wei
from src.core.refusal import RefusalError
from src.simulation import ledger
from src.simulation.account import LedgerState
from src.simulation.actors import actor_address, actor_keypair
from src.simulation.calldata import deposit_calldata, transfer_calldata, withdraw_calldata
from src.simulation.nonces import nonce_source_for
from src.simulation.prover import ProofBundle, build_deposit, build_transfer, build_withdraw
from src.tools.curve import Point
from src.tools.kdf import EthAddress, KeyPair

NonceMode = Literal["seeded", "system"]


@dataclass(frozen=True)
class ActionContext:
    cweth_address: EthAddress
    nonce_mode: NonceMode = "seeded"


@dataclass(frozen=True)
class ActionResult:
    state: LedgerState
    record: Dict[str, Any]


def _actor(state: LedgerState, ctx: ActionContext, name: str) -> Tuple[EthAddress, KeyPair]:
    return actor_address(state.rng_seed, name), actor_keypair(state.rng_seed, name, ctx.cweth_address)


def _delta(before: LedgerState, after: LedgerState, keys: Iterable[Point]) -> Dict[str, Any]:
    accounts = {}
    for pk in keys:
        if before.balance_of(pk) != after.balance_of(pk):
            accounts[hex32(pk.x.value)] = after.balance_of(pk).to_json()
    return {
        "total_wrapped": {"before": wei(before.total_wrapped), "after": wei(after.total_wrapped)},
        "accounts": accounts,
        "new_registrations": {
            addr.hex(): pk.to_json()
            for addr, pk in after.registered_keys.items()
            if addr not in before.registered_keys
        },
    }


def _expect_kind(bundle: ProofBundle, kind: str) -> None:
    if bundle.kind != kind:
        raise RefusalError(
            code="REFUSE_PROOF_BUNDLE_KIND",
            user_message=f"Expected a {kind} proof bundle, got {bundle.kind}.",
            why="A bundle can only be applied by the operation it was built for.",
            details={"expected": kind, "actual": bundle.kind},
        )


def _bundle_record(name: str, bundle: ProofBundle) -> Dict[str, Any]:
    return {"op": f"prove-{bundle.kind}", "actor": name, "bundle": bundle.to_json(), "report": bundle.verify().to_json()}


# ---------------------------
# Keys and proofs
# ---------------------------
def keygen(seed: bytes, ctx: ActionContext, name: str) -> Dict[str, Any]:
    keypair = actor_keypair(seed, name, ctx.cweth_address)
    return {
        "op": "keygen",
        "actor": name,
        "address": actor_address(seed, name).hex(),
        "cweth_address": ctx.cweth_address.hex(),
        "sk": hex32(keypair.sk.value),
        "pk": keypair.pk.to_json(),
    }


def _build_deposit(state: LedgerState, ctx: ActionContext, name: str, amount: int) -> Tuple[LedgerState, ProofBundle]:
    addr, keypair = _actor(state, ctx, name)
    rng = nonce_source_for(state.rng_seed, state.rng_counter, ctx.nonce_mode)
    bundle = build_deposit(keypair, state, addr, amount, rng)
    return state.with_rng_counter(rng.counter), bundle


def _build_transfer(
    state: LedgerState, ctx: ActionContext, sender: str, receiver: str, amount: int
) -> Tuple[LedgerState, ProofBundle]:
    sender_addr, keypair = _actor(state, ctx, sender)
    rng = nonce_source_for(state.rng_seed, state.rng_counter, ctx.nonce_mode)
    bundle = build_transfer(keypair, state, sender_addr, actor_address(state.rng_seed, receiver), amount, rng)
    return state.with_rng_counter(rng.counter), bundle


def _build_withdraw(
    state: LedgerState, ctx: ActionContext, name: str, amount: int, to: Optional[EthAddress]
) -> Tuple[LedgerState, ProofBundle]:
    addr, keypair = _actor(state, ctx, name)
    rng = nonce_source_for(state.rng_seed, state.rng_counter, ctx.nonce_mode)
    bundle = build_withdraw(keypair, state, addr, amount, to or addr, rng)
    return state.with_rng_counter(rng.counter), bundle


def prove_deposit(state: LedgerState, ctx: ActionContext, name: str, amount: int) -> ActionResult:
    proven, bundle = _build_deposit(state, ctx, name, amount)
    return ActionResult(proven, _bundle_record(name, bundle))


def prove_transfer(state: LedgerState, ctx: ActionContext, sender: str, receiver: str, amount: int) -> ActionResult:
    proven, bundle = _build_transfer(state, ctx, sender, receiver, amount)
    return ActionResult(proven, _bundle_record(sender, bundle))


def prove_withdraw(
    state: LedgerState, ctx: ActionContext, name: str, amount: int, to: Optional[EthAddress] = None
) -> ActionResult:
    proven, bundle = _build_withdraw(state, ctx, name, amount, to)
    return ActionResult(proven, _bundle_record(name, bundle))


# ---------------------------
# Transitions
# ---------------------------
def deposit(
    state: LedgerState, ctx: ActionContext, name: str, amount: int, bundle: Optional[ProofBundle] = None
) -> ActionResult:
    addr = actor_address(state.rng_seed, name)
    proven = state
    if bundle is None:
        proven, bundle = _build_deposit(state, ctx, name, amount)
    _expect_kind(bundle, "deposit")
    statement = bundle.statement
    after = ledger.deposit(proven, addr, statement.pk, amount, statement, bundle.witness)
    return ActionResult(after, {
        "op": "deposit",
        "actor": name,
        "address": addr.hex(),
        "amount": wei(amount),
        "statement": statement.to_json(),
        "calldata": deposit_calldata(statement),
        "report": bundle.verify().to_json(),
        "delta": _delta(state, after, [statement.pk]),
    })


def transfer(
    state: LedgerState,
    ctx: ActionContext,
    sender: str,
    receiver: str,
    amount: int,
    auto_rollover: bool = False,
    bundle: Optional[ProofBundle] = None,
) -> ActionResult:
    sender_addr = actor_address(state.rng_seed, sender)
    receiver_addr = actor_address(state.rng_seed, receiver)
    proven = state
    if bundle is None:
        proven, bundle = _build_transfer(state, ctx, sender, receiver, amount)
    _expect_kind(bundle, "transfer")
    statement = bundle.statement
    after = ledger.transfer(proven, sender_addr, receiver_addr, statement, bundle.witness, auto_rollover=auto_rollover)
    return ActionResult(after, {
        "op": "transfer",
        "from": sender,
        "to": receiver,
        "auto_rollover": auto_rollover,
        "statement": statement.to_json(),
        "calldata": transfer_calldata(statement, receiver_addr.hex()),
        "report": bundle.verify().to_json(),
        "delta": _delta(state, after, [statement.sender_pk, statement.receiver_pk]),
    })


def withdraw(
    state: LedgerState,
    ctx: ActionContext,
    name: str,
    amount: int,
    to: Optional[EthAddress] = None,
    bundle: Optional[ProofBundle] = None,
) -> ActionResult:
    addr = actor_address(state.rng_seed, name)
    proven = state
    if bundle is None:
        proven, bundle = _build_withdraw(state, ctx, name, amount, to)
    _expect_kind(bundle, "withdraw")
    statement = bundle.statement
    if statement.amount != amount:
        raise RefusalError(
            code="REFUSE_AMOUNT_MISMATCH",
            user_message="Withdraw statement is for a different amount than requested.",
            why="The withdrawal amount is a public call argument and must match the statement.",
            details={"amount": wei(amount), "statement_amount": wei(statement.amount)},
        )
    after = ledger.withdraw(proven, addr, statement, bundle.witness)
    return ActionResult(after, {
        "op": "withdraw",
        "actor": name,
        "address": addr.hex(),
        "amount": wei(amount),
        "statement": statement.to_json(),
        "calldata": withdraw_calldata(statement),
        "report": bundle.verify().to_json(),
        "delta": _delta(state, after, [statement.pk]),
    })


def rollover(state: LedgerState, ctx: ActionContext, name: str) -> ActionResult:
    addr = actor_address(state.rng_seed, name)
    after = ledger.rollover(state, addr)
    return ActionResult(after, {"op": "rollover", "actor": name, "delta": _delta(state, after, [state.key_of(addr)])})


# ---------------------------
# Views
# ---------------------------
def balances(state: LedgerState, ctx: ActionContext, name: str) -> Tuple[int, int]:
    addr, keypair = _actor(state, ctx, name)
    return ledger.decrypt_account(keypair, state, addr)


def decrypt(state: LedgerState, ctx: ActionContext, name: str) -> Dict[str, Any]:
    pending, actual = balances(state, ctx, name)
    return {
        "op": "decrypt",
        "actor": name,
        "address": actor_address(state.rng_seed, name).hex(),
        "pending": wei(pending),
        "actual": wei(actual),
    }


def show(state: LedgerState, ctx: ActionContext, name: str) -> Dict[str, Any]:
    addr = actor_address(state.rng_seed, name)
    return {
        "op": "show",
        "actor": name,
        "address": addr.hex(),
        "pk": state.key_of(addr).to_json(),
        "account": ledger.public_account(state, addr).to_json(),
        "total_wrapped": wei(state.total_wrapped),
        "rng_seed": hex_bytes(state.rng_seed),
    }
