from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List

from src.core.guardrails import amount_in_range, refuse_if_amount_out_of_range
from src.core.refusal import RefusalError
from src.tools.curve import IDENTITY, Point, generator_g, generator_h, in_subgroup, point_add, scalar_mul
from src.tools.fields import Fl


@dataclass(frozen=True)
class Commitment:
    """
    Twisted ElGamal pair: C = b*H + r*G hides the value, D = r*P lets the
    holder of sk open it without r (C = b*H + sk^-1 * D).
    """
    C: Point
    D: Point

    @classmethod
    def identity(cls) -> "Commitment":
        return cls(IDENTITY, IDENTITY)

    def validate(self) -> None:
        for name, point in (("C", self.C), ("D", self.D)):
            if not in_subgroup(point):
                raise RefusalError(
                    code="REFUSE_POINT_NOT_IN_SUBGROUP",
                    user_message=f"Commitment component {name} is outside the prime-order subgroup.",
                    why="Commitments are only binding inside the prime-order subgroup.",
                    details={name: point.to_json()},
                )

    def to_json(self) -> Dict[str, List[str]]:
        return {"C": self.C.to_json(), "D": self.D.to_json()}

    @classmethod
    def from_json(cls, doc: object, name: str = "commitment") -> "Commitment":
        if not isinstance(doc, dict) or "C" not in doc or "D" not in doc:
            raise RefusalError(
                code="REFUSE_COMMITMENT_ENCODING",
                user_message=f"Cannot decode {name}: expected {{'C': [x, y], 'D': [x, y]}}.",
                why="Commitments are serialized as two points.",
                missing=[f"{name}.C", f"{name}.D"],
            )
        commitment = cls(Point.from_json(doc["C"], f"{name}.C"), Point.from_json(doc["D"], f"{name}.D"))
        commitment.validate()
        return commitment


def twist(value: int, r: Fl, pk: Point) -> Commitment:
    """
    Unchecked commitment algebra: (value*H + r*G, r*pk). value may be negative.
    Range policy is enforced by the commit_* wrappers and by the verifier's range constraints.
    """
    return Commitment(
        C=point_add(scalar_mul(value, generator_h()), scalar_mul(r, generator_g())),
        D=scalar_mul(r, pk),
    )


def commit_balance(b: int, r: Fl, pk: Point) -> Commitment:
    refuse_if_amount_out_of_range(b, "balance")
    return twist(b, r, pk)


def commit_amount_receiver(a: int, r: Fl, pk_r: Point) -> Commitment:
    refuse_if_amount_out_of_range(a, "amount")
    return twist(a, r, pk_r)


def commit_amount_sender(a: int, r: Fl, pk_s: Point) -> Commitment:
    """C = r*G - a*H, D = r*pk_s: debits a when aggregated onto a balance."""
    refuse_if_amount_out_of_range(a, "amount")
    return twist(-a, r, pk_s)


def aggregate(c1: Commitment, c2: Commitment) -> Commitment:
    return Commitment(point_add(c1.C, c2.C), point_add(c1.D, c2.D))


def verify_opening(c: Commitment, b: int, sk: Fl) -> bool:
    """True iff c.C == b*H + sk^-1 * c.D; out-of-range b never opens."""
    if not sk or not amount_in_range(b):
        return False
    expected = point_add(scalar_mul(b, generator_h()), scalar_mul(sk.inverse(), c.D))
    return c.C == expected
