from src.simulation import actions
from src.simulation.account import LedgerState
from src.simulation.actions import ActionContext
from src.simulation.actors import actor_address, actor_keypair
from src.simulation.calldata import deposit_calldata, transfer_calldata, withdraw_calldata
from src.simulation.prover import ProofBundle

SEED = bytes([7]) * 32


def _ctx(cweth_address):
    return ActionContext(cweth_address=cweth_address)


def test_actor_identity_is_deterministic_per_seed(cweth_address):
    assert actor_address(SEED, "alice") == actor_address(SEED, "alice")
    assert actor_address(SEED, "alice") != actor_address(SEED, "bob")
    assert actor_address(SEED, "alice") != actor_address(bytes(32), "alice")
    assert actor_keypair(SEED, "alice", cweth_address).pk != actor_keypair(SEED, "bob", cweth_address).pk


def test_actions_advance_the_nonce_counter(cweth_address):
    state = LedgerState.genesis(SEED)
    result = actions.deposit(state, _ctx(cweth_address), "alice", 10)
    assert result.state.rng_counter == 2
    assert state.rng_counter == 0


def test_prove_does_not_touch_balances(cweth_address):
    ctx = _ctx(cweth_address)
    state = actions.deposit(LedgerState.genesis(SEED), ctx, "alice", 10).state
    proven = actions.prove_withdraw(state, ctx, "alice", 4)
    assert proven.state.accounts == state.accounts
    assert proven.state.rng_counter > state.rng_counter
    assert proven.record["report"]["accepted"] is True
    assert proven.record["bundle"]["kind"] == "withdraw"


def test_calldata_mirrors_contract_arguments(cweth_address):
    ctx = _ctx(cweth_address)
    state = actions.deposit(LedgerState.genesis(SEED), ctx, "alice", 10).state
    state = actions.deposit(state, ctx, "bob", 0).state

    dep = ProofBundle.from_json(actions.prove_deposit(state, ctx, "alice", 1).record["bundle"])
    doc = deposit_calldata(dep.statement)
    assert doc["value"] == "1"
    assert set(doc) == {"function", "value", "publicKey", "amountCommitmentData", "balanceEncryptionData"}

    tr = ProofBundle.from_json(actions.prove_transfer(state, ctx, "alice", "bob", 3).record["bundle"])
    doc = transfer_calldata(tr.statement, actor_address(SEED, "bob").hex())
    assert set(doc["amountEncryptionData"]) == {
        "newEncryptedBalance", "senderEncryptionNonce", "receiverEncryptedAmount", "receiverEncryptionNonce",
    }

    wd = ProofBundle.from_json(actions.prove_withdraw(state, ctx, "alice", 2).record["bundle"])
    doc = withdraw_calldata(wd.statement)
    assert doc["amount"] == "2"
    assert doc["receiver"] == actor_address(SEED, "alice").hex()


def test_decrypt_and_show_views(cweth_address):
    ctx = _ctx(cweth_address)
    state = actions.deposit(LedgerState.genesis(SEED), ctx, "alice", 10).state
    assert actions.balances(state, ctx, "alice") == (0, 10)
    assert actions.decrypt(state, ctx, "alice")["actual"] == "10"
    view = actions.show(state, ctx, "alice")
    assert view["total_wrapped"] == "10"
    assert view["address"] == actor_address(SEED, "alice").hex()
