from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Literal, Union

from src.core.guardrails import refuse_if_amount_out_of_range, refuse_if_overspend
from src.core.refusal import RefusalError
from src.simulation.account import LedgerState
from src.simulation.ledger import refuse_if_self_transfer, registered_receiver, require_key_match
from src.simulation.nonces import NonceSource
from src.tools.dhenc import decrypt_balance, encrypt_amount, encrypt_new_sender_balance
from src.tools.elgamal import commit_amount_receiver, commit_amount_sender
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

ProofKind = Literal["deposit", "transfer", "withdraw"]
Statement = Union[DepositStatement, TransferStatement, WithdrawStatement]
Witness = Union[DepositWitness, TransferWitness, WithdrawWitness]

_CODECS = {
    "deposit": (DepositStatement, DepositWitness, verify_deposit),
    "transfer": (TransferStatement, TransferWitness, verify_transfer),
    "withdraw": (WithdrawStatement, WithdrawWitness, verify_withdraw),
}


@dataclass(frozen=True)
class ProofBundle:
    """
    Public statement plus witness. With the transparent verifier the witness
    IS the proof; a SNARK backend would replace it with a proof object.
    """
    kind: ProofKind
    statement: Statement
    witness: Witness

    def verify(self) -> VerificationReport:
        return _CODECS[self.kind][2](self.statement, self.witness)  # type: ignore[operator]

    def to_json(self) -> Dict[str, Any]:
        return {"kind": self.kind, "statement": self.statement.to_json(), "witness": self.witness.to_json()}

    @classmethod
    def from_json(cls, doc: Any, expected_kind: ProofKind | None = None) -> "ProofBundle":
        kind = doc.get("kind") if isinstance(doc, dict) else None
        if kind not in _CODECS or (expected_kind is not None and kind != expected_kind):
            raise RefusalError(
                code="REFUSE_PROOF_BUNDLE_KIND",
                user_message=f"Proof bundle kind {kind!r} does not fit this operation.",
                why="A bundle must carry kind deposit, transfer or withdraw matching the command.",
                missing=["kind"],
                details={"expected": expected_kind},
            )
        statement_cls, witness_cls, _ = _CODECS[kind]
        return cls(
            kind=kind,
            statement=statement_cls.from_json(doc.get("statement")),
            witness=witness_cls.from_json(doc.get("witness")),
        )


def build_deposit(
    keypair: KeyPair,
    state: LedgerState,
    addr: EthAddress,
    amount: int,
    rng: NonceSource,
) -> ProofBundle:
    refuse_if_amount_out_of_range(amount, "amount")
    registered = state.registered_key(addr)
    if registered is not None:
        require_key_match(registered, keypair.pk, addr)

    balance = state.balance_of(keypair.pk)
    prior = decrypt_balance(keypair.sk, balance.actual_dh)
    refuse_if_amount_out_of_range(prior + amount, "balance after deposit")

    r = rng.next_fl()
    n = rng.next_fq()
    statement = DepositStatement(
        pk=keypair.pk,
        amount=amount,
        balance_commitment=balance.actual_commitment,
        amount_commitment=commit_amount_receiver(amount, r, keypair.pk),
        new_encrypted_balance=encrypt_new_sender_balance(prior + amount, 0, keypair.sk, n),
        encryption_nonce=n,
    )
    witness = DepositWitness(sk=keypair.sk, prior_balance=prior, commitment_nonce=r)
    return ProofBundle("deposit", statement, witness)


def build_transfer(
    keypair: KeyPair,
    state: LedgerState,
    sender_addr: EthAddress,
    receiver_addr: EthAddress,
    amount: int,
    rng: NonceSource,
) -> ProofBundle:
    refuse_if_amount_out_of_range(amount, "amount")
    sender_pk, sender = state.account_of(sender_addr)
    require_key_match(sender_pk, keypair.pk, sender_addr)
    receiver_pk = registered_receiver(state, receiver_addr)
    refuse_if_self_transfer(sender_pk, receiver_pk)

    balance = decrypt_balance(keypair.sk, sender.actual_dh)
    refuse_if_overspend(balance, amount)

    r_s = rng.next_fl()
    r_r = rng.next_fl()
    n_s = rng.next_fq()
    n_r = rng.next_fq()
    statement = TransferStatement(
        sender_pk=sender_pk,
        receiver_pk=receiver_pk,
        sender_balance_commitment=sender.actual_commitment,
        sender_amount_commitment=commit_amount_sender(amount, r_s, sender_pk),
        receiver_amount_commitment=commit_amount_receiver(amount, r_r, receiver_pk),
        new_sender_encrypted_balance=encrypt_new_sender_balance(balance, amount, keypair.sk, n_s),
        sender_nonce=n_s,
        receiver_encrypted_amount=encrypt_amount(amount, keypair.sk, receiver_pk, n_r),
        receiver_nonce=n_r,
    )
    witness = TransferWitness(
        sk_s=keypair.sk,
        sender_balance=balance,
        amount=amount,
        sender_commit_nonce=r_s,
        receiver_commit_nonce=r_r,
    )
    return ProofBundle("transfer", statement, witness)


def build_withdraw(
    keypair: KeyPair,
    state: LedgerState,
    addr: EthAddress,
    amount: int,
    receiver_address: EthAddress,
    rng: NonceSource,
) -> ProofBundle:
    refuse_if_amount_out_of_range(amount, "amount")
    pk, account = state.account_of(addr)
    require_key_match(pk, keypair.pk, addr)

    balance = decrypt_balance(keypair.sk, account.actual_dh)
    refuse_if_overspend(balance, amount)

    r = rng.next_fl()
    n = rng.next_fq()
    statement = WithdrawStatement(
        pk=pk,
        receiver_address=receiver_address,
        amount=amount,
        balance_commitment=account.actual_commitment,
        amount_commitment=commit_amount_sender(amount, r, pk),
        new_encrypted_balance=encrypt_new_sender_balance(balance, amount, keypair.sk, n),
        encryption_nonce=n,
    )
    witness = WithdrawWitness(sk=keypair.sk, balance=balance, commitment_nonce=r)
    return ProofBundle("withdraw", statement, witness)
