"""Random multi-party runs checked step by step against the cleartext oracle."""

import pytest

from src.core.refusal import RefusalError
from src.simulation import ledger
from src.simulation.persistence import dump_state
from src.tools.elgamal import verify_opening
from tests import ledger_support as ls
from tests.plaintext_oracle import PlaintextOracle

OPERATIONS = 200


def _check_accounts(state, oracle, actors):
    for kp, addr in actors:
        if state.registered_key(addr) is None:
            continue
        pending, actual = ledger.decrypt_account(kp, state, addr)
        assert (pending, actual) == oracle.get(addr)
        account = ledger.public_account(state, addr)
        assert verify_opening(account.pending_commitment, pending, kp.sk)
        assert verify_opening(account.actual_commitment, actual, kp.sk)
    assert state.total_wrapped == oracle.total()


def _assert_sender_reset(state, kp, addr):
    entries = ledger.public_account(state, addr).actual_dh.entries
    assert len(entries) == 1
    assert entries[0].sender_pk == kp.pk


def test_random_operations_match_plaintext_oracle(rng, keypairs):
    actors = [(kp, ls.address(i)) for i, kp in enumerate(keypairs)]
    state, oracle = ls.genesis(), PlaintextOracle()

    for step in range(OPERATIONS):
        kp, addr = rng.choice(actors)
        registered = state.registered_key(addr) is not None
        pending, actual = oracle.get(addr)
        op = rng.choice(["deposit", "transfer", "transfer", "withdraw", "rollover"]) if registered else "deposit"

        if op == "deposit":
            amount = rng.randrange(0, 10**18)
            state = ls.deposit(state, kp, addr, amount)
            oracle.deposit(addr, amount)
            _assert_sender_reset(state, kp, addr)
        elif op == "transfer":
            others = [(k, a) for k, a in actors if a != addr and state.registered_key(a) is not None]
            if not others:
                continue
            _, receiver = rng.choice(others)
            amount = rng.randrange(0, actual + 1)
            auto = rng.random() < 0.2
            state = ls.transfer(state, kp, addr, receiver, amount, auto_rollover=auto)
            oracle.transfer(addr, receiver, amount, auto_rollover=auto)
            if not auto or pending == 0:
                _assert_sender_reset(state, kp, addr)
        elif op == "withdraw":
            amount = rng.randrange(0, actual + 1)
            state = ls.withdraw(state, kp, addr, amount)
            oracle.withdraw(addr, amount)
            _assert_sender_reset(state, kp, addr)
        else:
            state = ledger.rollover(state, addr)
            oracle.rollover(addr)

        _check_accounts(state, oracle, actors)

    assert oracle.total() == state.total_wrapped


def test_rejected_operations_leave_state_identical(rng, keypairs):
    alice, bob = keypairs[0], keypairs[1]
    state = ls.deposit(ls.genesis(), alice, ls.address(0), 50)
    state = ls.deposit(state, bob, ls.address(1), 0)
    snapshot = dump_state(state)

    attempts = [
        lambda: ls.transfer(state, alice, ls.address(0), ls.address(1), 51),
        lambda: ls.withdraw(state, bob, ls.address(1), 1),
        lambda: ls.transfer(state, alice, ls.address(0), ls.address(4), 1),
        lambda: ls.deposit(state, bob, ls.address(0), 1),
        lambda: ledger.rollover(state, ls.address(3)),
    ]
    for attempt in attempts:
        with pytest.raises(RefusalError):
            attempt()
        assert dump_state(state) == snapshot


def test_twenty_transfers_from_three_senders_sum_in_pending(rng, keypairs):
    receiver_kp, receiver = keypairs[4], ls.address(4)
    senders = [(keypairs[i], ls.address(i)) for i in range(3)]
    state = ls.genesis()
    for kp, addr in senders:
        state = ls.deposit(state, kp, addr, 10**6)
    state = ls.deposit(state, receiver_kp, receiver, 0)

    total = 0
    for _ in range(20):
        kp, addr = rng.choice(senders)
        amount = rng.randrange(0, 1000)
        state = ls.transfer(state, kp, addr, receiver, amount)
        total += amount
    assert ledger.decrypt_account(receiver_kp, state, receiver) == (total, 0)
    assert len(ledger.public_account(state, receiver).pending_dh.entries) == 20
