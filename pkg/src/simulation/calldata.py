"""
Contract-call views of the three statements.

Field names follow the contract's function arguments (publicKey,
amountCommitmentData, balanceEncryptionData, amountEncryptionData). This is a
structural mirror for inspection; it is not ABI-encoded bytes.
"""

from __future__ import annotations

from typing import Any, Dict

from src.core.codec import hex32, wei
from src.tools.statements import DepositStatement, TransferStatement, WithdrawStatement


def deposit_calldata(st: DepositStatement) -> Dict[str, Any]:
    return {
        "function": "deposit",
        "value": wei(st.amount),
        "publicKey": st.pk.to_json(),
        "amountCommitmentData": {
            "commitmentC": st.amount_commitment.C.to_json(),
            "commitmentD": st.amount_commitment.D.to_json(),
        },
        "balanceEncryptionData": {
            "encryptedBalance": hex32(st.new_encrypted_balance.value),
            "encryptionNonce": hex32(st.encryption_nonce.value),
        },
    }


def transfer_calldata(st: TransferStatement, receiver: str) -> Dict[str, Any]:
    # four named fields of amountEncryptionData
    return {
        "function": "transfer",
        "receiver": receiver,
        "amountCommitmentData": {
            "senderCommitmentC": st.sender_amount_commitment.C.to_json(),
            "senderCommitmentD": st.sender_amount_commitment.D.to_json(),
            "receiverCommitmentC": st.receiver_amount_commitment.C.to_json(),
            "receiverCommitmentD": st.receiver_amount_commitment.D.to_json(),
        },
        "amountEncryptionData": {
            "newEncryptedBalance": hex32(st.new_sender_encrypted_balance.value),
            "senderEncryptionNonce": hex32(st.sender_nonce.value),
            "receiverEncryptedAmount": hex32(st.receiver_encrypted_amount.value),
            "receiverEncryptionNonce": hex32(st.receiver_nonce.value),
        },
    }


def withdraw_calldata(st: WithdrawStatement) -> Dict[str, Any]:
    return {
        "function": "withdraw",
        "amount": wei(st.amount),
        "receiver": st.receiver_address.hex(),
        "amountCommitmentData": {
            "commitmentC": st.amount_commitment.C.to_json(),
            "commitmentD": st.amount_commitment.D.to_json(),
        },
        "balanceEncryptionData": {
            "newEncryptedBalance": hex32(st.new_encrypted_balance.value),
            "encryptionNonce": hex32(st.encryption_nonce.value),
        },
    }
