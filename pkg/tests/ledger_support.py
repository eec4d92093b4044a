"""Small drivers over prover + ledger so tests read as protocol steps."""

from typing import Optional

from src.simulation import ledger
from src.simulation.account import LedgerState
from src.simulation.nonces import SeededNonceSource
from src.simulation.prover import ProofBundle, build_deposit, build_transfer, build_withdraw
from src.tools.kdf import EthAddress, KeyPair

GENESIS_SEED = bytes(range(32))


def address(i: int) -> EthAddress:
    return EthAddress(bytes([0xA0 + i]) * 20)


def genesis() -> LedgerState:
    return LedgerState.genesis(GENESIS_SEED)


def _rng(state: LedgerState) -> SeededNonceSource:
    return SeededNonceSource(state.rng_seed, state.rng_counter)


def prove_deposit(state: LedgerState, kp: KeyPair, addr: EthAddress, amount: int):
    rng = _rng(state)
    bundle = build_deposit(kp, state, addr, amount, rng)
    return state.with_rng_counter(rng.counter), bundle


def prove_transfer(state: LedgerState, kp: KeyPair, sender: EthAddress, receiver: EthAddress, amount: int):
    rng = _rng(state)
    bundle = build_transfer(kp, state, sender, receiver, amount, rng)
    return state.with_rng_counter(rng.counter), bundle


def prove_withdraw(state: LedgerState, kp: KeyPair, addr: EthAddress, amount: int,
                   to: Optional[EthAddress] = None):
    rng = _rng(state)
    bundle = build_withdraw(kp, state, addr, amount, to or addr, rng)
    return state.with_rng_counter(rng.counter), bundle


def deposit(state: LedgerState, kp: KeyPair, addr: EthAddress, amount: int) -> LedgerState:
    state, bundle = prove_deposit(state, kp, addr, amount)
    return ledger.deposit(state, addr, kp.pk, amount, bundle.statement, bundle.witness)


def transfer(state: LedgerState, kp: KeyPair, sender: EthAddress, receiver: EthAddress, amount: int,
             auto_rollover: bool = False) -> LedgerState:
    state, bundle = prove_transfer(state, kp, sender, receiver, amount)
    return ledger.transfer(state, sender, receiver, bundle.statement, bundle.witness, auto_rollover=auto_rollover)


def withdraw(state: LedgerState, kp: KeyPair, addr: EthAddress, amount: int) -> LedgerState:
    state, bundle = prove_withdraw(state, kp, addr, amount)
    return ledger.withdraw(state, addr, bundle.statement, bundle.witness)


def apply(state: LedgerState, addr: EthAddress, bundle: ProofBundle, receiver: Optional[EthAddress] = None):
    if bundle.kind == "deposit":
        return ledger.deposit(state, addr, bundle.statement.pk, bundle.statement.amount,
                              bundle.statement, bundle.witness)
    if bundle.kind == "transfer":
        return ledger.transfer(state, addr, receiver, bundle.statement, bundle.witness)
    return ledger.withdraw(state, addr, bundle.statement, bundle.witness)
