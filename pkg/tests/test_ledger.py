from dataclasses import replace

import pytest

from src.core.refusal import RefusalError
from src.simulation import ledger
from src.simulation.persistence import dump_state
from src.tools.elgamal import Commitment, verify_opening
from src.tools.fields import Fl
from src.tools.kdf import keypair_from_private_key
from tests import ledger_support as ls

ALICE, BOB, CAROL = ls.address(0), ls.address(1), ls.address(2)


@pytest.fixture
def alice(keypairs):
    return keypairs[0]


@pytest.fixture
def bob(keypairs):
    return keypairs[1]


@pytest.fixture
def alice_and_bob(alice, bob):
    state = ls.deposit(ls.genesis(), alice, ALICE, 100)
    return ls.deposit(state, bob, BOB, 0)


def _balances(state, kp, addr):
    return ledger.decrypt_account(kp, state, addr)


def _assert_refused(code, fn, *args, **kwargs):
    with pytest.raises(RefusalError) as e:
        fn(*args, **kwargs)
    assert e.value.code == code, e.value.to_dict()
    return e.value


# ---------------------------
# deposit
# ---------------------------
def test_first_deposit_credits_actual_balance(alice):
    state = ls.deposit(ls.genesis(), alice, ALICE, 100)
    assert _balances(state, alice, ALICE) == (0, 100)
    assert state.total_wrapped == 100
    assert state.registered_key(ALICE) == alice.pk


def test_fresh_account_decrypts_to_zero(alice):
    state = ls.deposit(ls.genesis(), alice, ALICE, 0)
    assert _balances(state, alice, ALICE) == (0, 0)


def test_zero_deposit_only_refreshes_the_mask(alice):
    state = ls.deposit(ls.genesis(), alice, ALICE, 100)
    after = ls.deposit(state, alice, ALICE, 0)
    before_account = ledger.public_account(state, ALICE)
    after_account = ledger.public_account(after, ALICE)
    assert _balances(after, alice, ALICE) == (0, 100)
    assert after.total_wrapped == 100
    assert after_account.actual_dh != before_account.actual_dh


def test_deposit_with_different_key_for_registered_address_is_refused(alice, bob):
    state = ls.deposit(ls.genesis(), alice, ALICE, 100)
    proven, bundle = ls.prove_deposit(state, bob, BOB, 5)
    _assert_refused(
        "REFUSE_KEY_MISMATCH",
        ledger.deposit, proven, ALICE, bob.pk, 5, bundle.statement, bundle.witness,
    )


def test_same_key_cannot_register_two_addresses(alice):
    state = ls.deposit(ls.genesis(), alice, ALICE, 1)
    _assert_refused("REFUSE_KEY_ALREADY_REGISTERED", ls.deposit, state, alice, BOB, 1)


def test_deposit_amount_must_match_statement(alice):
    proven, bundle = ls.prove_deposit(ls.genesis(), alice, ALICE, 10)
    _assert_refused(
        "REFUSE_AMOUNT_MISMATCH",
        ledger.deposit, proven, ALICE, alice.pk, 11, bundle.statement, bundle.witness,
    )


def test_deposit_sender_reset(alice, bob):
    state = ls.deposit(ls.genesis(), alice, ALICE, 100)
    state = ls.deposit(state, bob, BOB, 0)
    state = ls.transfer(state, bob, BOB, ALICE, 0)
    state = ledger.rollover(state, ALICE)
    assert len(ledger.public_account(state, ALICE).actual_dh.entries) == 2
    state = ls.deposit(state, alice, ALICE, 5)
    entries = ledger.public_account(state, ALICE).actual_dh.entries
    assert len(entries) == 1 and entries[0].sender_pk == alice.pk


# ---------------------------
# transfer
# ---------------------------
def test_alice_sends_forty_to_bob(alice_and_bob, alice, bob):
    state = ls.transfer(alice_and_bob, alice, ALICE, BOB, 40)
    assert _balances(state, alice, ALICE) == (0, 60)
    assert _balances(state, bob, BOB) == (40, 0)
    assert state.total_wrapped == 100

    sender_entries = ledger.public_account(state, ALICE).actual_dh.entries
    assert len(sender_entries) == 1 and sender_entries[0].sender_pk == alice.pk
    receiver_entries = ledger.public_account(state, BOB).pending_dh.entries
    assert [e.sender_pk for e in receiver_entries] == [alice.pk]


def test_zero_transfer_adds_a_pending_entry(alice_and_bob, alice, bob):
    state = ls.transfer(alice_and_bob, alice, ALICE, BOB, 0)
    assert _balances(state, alice, ALICE) == (0, 100)
    assert _balances(state, bob, BOB) == (0, 0)
    assert len(ledger.public_account(state, BOB).pending_dh.entries) == 1


def test_transfer_commitments_stay_consistent(alice_and_bob, alice, bob):
    state = ls.transfer(alice_and_bob, alice, ALICE, BOB, 40)
    assert verify_opening(ledger.public_account(state, ALICE).actual_commitment, 60, alice.sk)
    assert verify_opening(ledger.public_account(state, BOB).pending_commitment, 40, bob.sk)


def test_stale_proof_after_own_rollover_is_refused(alice_and_bob, alice, bob):
    state = ls.transfer(alice_and_bob, bob, BOB, ALICE, 0)
    state = ls.deposit(state, bob, BOB, 20)
    state = ls.transfer(state, bob, BOB, ALICE, 20)
    proven, bundle = ls.prove_transfer(state, alice, ALICE, BOB, 30)
    rolled = ledger.rollover(proven, ALICE)
    _assert_refused(
        "REFUSE_STALE_COMMITMENT",
        ledger.transfer, rolled, ALICE, BOB, bundle.statement, bundle.witness,
    )


def test_replayed_transfer_is_refused(alice_and_bob, alice):
    proven, bundle = ls.prove_transfer(alice_and_bob, alice, ALICE, BOB, 10)
    once = ledger.transfer(proven, ALICE, BOB, bundle.statement, bundle.witness)
    _assert_refused("REFUSE_STALE_COMMITMENT", ledger.transfer, once, ALICE, BOB, bundle.statement, bundle.witness)


def test_overspend_is_refused_before_statement_creation(alice_and_bob, alice):
    _assert_refused("REFUSE_INSUFFICIENT_BALANCE", ls.prove_transfer, alice_and_bob, alice, ALICE, BOB, 101)


def test_pending_funds_cannot_be_spent_before_rollover(alice_and_bob, alice, bob):
    state = ls.transfer(alice_and_bob, alice, ALICE, BOB, 40)
    _assert_refused("REFUSE_INSUFFICIENT_BALANCE", ls.prove_transfer, state, bob, BOB, ALICE, 1)


def test_self_transfer_is_refused(alice_and_bob, alice):
    _assert_refused("REFUSE_SELF_TRANSFER", ls.prove_transfer, alice_and_bob, alice, ALICE, ALICE, 1)


def test_transfer_to_unregistered_receiver_is_refused(alice_and_bob, alice):
    _assert_refused("REFUSE_UNREGISTERED_RECEIVER", ls.prove_transfer, alice_and_bob, alice, ALICE, CAROL, 1)


def test_statement_for_another_receiver_is_refused(alice_and_bob, alice, keypairs):
    state = ls.deposit(alice_and_bob, keypairs[2], CAROL, 0)
    proven, bundle = ls.prove_transfer(state, alice, ALICE, BOB, 10)
    _assert_refused("REFUSE_KEY_MISMATCH", ledger.transfer, proven, ALICE, CAROL, bundle.statement, bundle.witness)


def test_rejected_proof_lists_violations_and_leaves_state_untouched(alice_and_bob, alice):
    proven, bundle = ls.prove_transfer(alice_and_bob, alice, ALICE, BOB, 10)
    tampered = replace(bundle.statement, receiver_encrypted_amount=bundle.statement.receiver_encrypted_amount + 1)
    snapshot = dump_state(proven)
    err = _assert_refused("REFUSE_PROOF_REJECTED", ledger.transfer, proven, ALICE, BOB, tampered, bundle.witness)
    assert err.details["violations"] == ["T6_RECEIVER_AMOUNT_ENCRYPTION"]
    assert dump_state(proven) == snapshot


def test_auto_rollover_folds_sender_pending_after_debit(alice_and_bob, alice, bob):
    state = ls.transfer(alice_and_bob, alice, ALICE, BOB, 40)
    state = ledger.rollover(state, BOB)
    state = ls.transfer(state, bob, BOB, ALICE, 15)
    assert _balances(state, alice, ALICE) == (15, 60)
    state = ls.transfer(state, alice, ALICE, BOB, 10, auto_rollover=True)
    assert _balances(state, alice, ALICE) == (0, 65)
    assert _balances(state, bob, BOB) == (10, 25)


# ---------------------------
# withdraw
# ---------------------------
def test_withdraw_full_balance(alice):
    state = ls.deposit(ls.genesis(), alice, ALICE, 100)
    state = ls.withdraw(state, alice, ALICE, 100)
    assert _balances(state, alice, ALICE) == (0, 0)
    assert state.total_wrapped == 0


def test_withdraw_thirty_of_sixty(alice_and_bob, alice):
    state = ls.transfer(alice_and_bob, alice, ALICE, BOB, 40)
    state = ls.withdraw(state, alice, ALICE, 30)
    assert _balances(state, alice, ALICE) == (0, 30)
    assert state.total_wrapped == 70


def test_withdraw_with_overspending_witness_reports_w2(alice):
    state = ls.deposit(ls.genesis(), alice, ALICE, 100)
    proven, bundle = ls.prove_withdraw(state, alice, ALICE, 100)
    forged = replace(bundle.statement, amount=101)
    err = _assert_refused("REFUSE_PROOF_REJECTED", ledger.withdraw, proven, ALICE, forged, bundle.witness)
    assert "W2_OVERSPEND" in err.details["violations"]


def test_withdraw_cannot_exceed_total_wrapped(alice):
    state = ls.deposit(ls.genesis(), alice, ALICE, 100)
    proven, bundle = ls.prove_withdraw(state, alice, ALICE, 100)
    corrupted = proven.with_total_wrapped(50)
    _assert_refused("REFUSE_TOTAL_WRAPPED_UNDERFLOW", ledger.withdraw, corrupted, ALICE, bundle.statement, bundle.witness)


def test_withdraw_receiver_defaults_to_owner(alice):
    state = ls.deposit(ls.genesis(), alice, ALICE, 10)
    _, bundle = ls.prove_withdraw(state, alice, ALICE, 10)
    assert bundle.statement.receiver_address == ALICE
    _, bundle = ls.prove_withdraw(state, alice, ALICE, 10, to=CAROL)
    assert bundle.statement.receiver_address == CAROL


# ---------------------------
# rollover
# ---------------------------
def test_rollover_of_empty_pending_is_a_no_op(alice_and_bob):
    assert ledger.rollover(alice_and_bob, BOB) is alice_and_bob


def test_bob_rollover_moves_pending_to_actual(alice_and_bob, alice, bob):
    state = ls.transfer(alice_and_bob, alice, ALICE, BOB, 40)
    state = ledger.rollover(state, BOB)
    assert _balances(state, bob, BOB) == (0, 40)
    account = ledger.public_account(state, BOB)
    assert account.pending_commitment == Commitment.identity()
    assert account.pending_dh.is_empty()
    assert verify_opening(account.actual_commitment, 40, bob.sk)


def test_rollover_twice_is_idempotent(alice_and_bob, alice):
    state = ls.transfer(alice_and_bob, alice, ALICE, BOB, 40)
    once = ledger.rollover(state, BOB)
    assert ledger.rollover(once, BOB) == once


def test_rollover_of_unknown_account_is_refused():
    _assert_refused("REFUSE_UNKNOWN_ACCOUNT", ledger.rollover, ls.genesis(), CAROL)


# ---------------------------
# views
# ---------------------------
def test_decrypt_with_wrong_key_is_refused(alice_and_bob):
    intruder = keypair_from_private_key(Fl(987654321))
    _assert_refused("REFUSE_KEY_MISMATCH", ledger.decrypt_account, intruder, alice_and_bob, ALICE)


def test_transitions_do_not_mutate_their_input(alice_and_bob, alice):
    snapshot = dump_state(alice_and_bob)
    ls.transfer(alice_and_bob, alice, ALICE, BOB, 40)
    ledger.rollover(alice_and_bob, BOB)
    assert dump_state(alice_and_bob) == snapshot
