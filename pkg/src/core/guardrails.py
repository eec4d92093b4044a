from __future__ import annotations

from typing import TYPE_CHECKING

from src.core.codec import wei
from src.core.protocol_config import AMOUNT_POLICY
from src.core.refusal import RefusalError

if TYPE_CHECKING:
    from src.tools.curve import Point


def amount_in_range(value: int) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and 0 <= value < AMOUNT_POLICY.upper_bound


def refuse_if_amount_out_of_range(value: int, name: str = "amount") -> None:
    """
    Amounts live in [0, 2^96) wei. Anything else cannot be committed or encrypted.
    """
    if not amount_in_range(value):
        raise RefusalError(
            code="REFUSE_AMOUNT_OUT_OF_RANGE",
            user_message=f"Cannot use {name}={value}: amounts must be integers in [0, 2^{AMOUNT_POLICY.bits}).",
            why=(
                "The amount bound keeps every feasible aggregate far below both field moduli, "
                "so committed and encrypted sums never wrap."
            ),
            missing=[f"0 <= {name} < 2^{AMOUNT_POLICY.bits}"],
            details={name: str(value)},
        )


def refuse_if_overspend(balance: int, amount: int) -> None:
    if amount > balance:
        raise RefusalError(
            code="REFUSE_INSUFFICIENT_BALANCE",
            user_message=f"Cannot spend {amount}: decrypted balance is only {balance}.",
            why="A spend must not exceed the sender's actual balance; the proof would be rejected.",
            missing=["amount <= balance"],
            details={"balance": wei(balance), "amount": wei(amount)},
        )


def refuse_if_invalid_public_key(pk: "Point", name: str = "public_key") -> None:
    """
    Public keys must be non-identity points of the prime-order subgroup.
    """
    from src.tools.curve import in_subgroup

    if pk.is_identity():
        raise RefusalError(
            code="REFUSE_DEGENERATE_PUBLIC_KEY",
            user_message=f"Cannot accept {name}: it is the identity point.",
            why="The identity has no private key and makes every shared key degenerate.",
            details={name: pk.to_json()},
        )
    if not in_subgroup(pk):
        raise RefusalError(
            code="REFUSE_POINT_NOT_IN_SUBGROUP",
            user_message=f"Cannot accept {name}: it is outside the prime-order subgroup.",
            why="Small-order components would leak key bits and break commitment binding.",
            details={name: pk.to_json()},
        )
