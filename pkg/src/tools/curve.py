from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple, Union

from src.core.codec import hex32, parse_hex32
from src.core.protocol_config import BABYJUBJUB, DOMAIN_TAGS, HASH_TO_CURVE_MAX_ATTEMPTS
from src.core.refusal import RefusalError
from src.tools.fields import Fl, Fq, L, Q
from src.tools.hashing import keccak256

A = BABYJUBJUB.a
D = BABYJUBJUB.d
COFACTOR = BABYJUBJUB.cofactor

Scalar = Union[Fl, int]


def is_on_curve(x: int, y: int) -> bool:
    xx, yy = x * x % Q, y * y % Q
    return (A * xx + yy - 1 - D * xx % Q * yy) % Q == 0


@dataclass(frozen=True, slots=True)
class Point:
    """
    Affine point on babyJubJub. Construction refuses coordinates that do not
    satisfy the curve equation, so every Point in the system is on the curve.
    """
    x: Fq
    y: Fq

    def __post_init__(self) -> None:
        if not is_on_curve(self.x.value, self.y.value):
            raise RefusalError(
                code="REFUSE_POINT_OFF_CURVE",
                user_message="Point is not on the babyJubJub curve.",
                why="Curve arithmetic is only defined for points satisfying a*x^2 + y^2 = 1 + d*x^2*y^2.",
                details={"x": hex32(self.x.value), "y": hex32(self.y.value)},
            )

    @classmethod
    def from_ints(cls, x: int, y: int) -> "Point":
        return cls(Fq(x), Fq(y))

    def is_identity(self) -> bool:
        return self.x.value == 0 and self.y.value == 1

    def __add__(self, other: "Point") -> "Point":
        return point_add(self, other)

    def __neg__(self) -> "Point":
        return negate(self)

    def __sub__(self, other: "Point") -> "Point":
        return point_add(self, negate(other))

    def __rmul__(self, scalar: Scalar) -> "Point":
        return scalar_mul(scalar, self)

    def to_bytes(self) -> bytes:
        return self.x.to_bytes() + self.y.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Point":
        if len(data) != 64:
            raise RefusalError(
                code="REFUSE_POINT_ENCODING",
                user_message=f"Cannot decode point: expected 64 bytes, got {len(data)}.",
                why="Points are encoded as big-endian x || big-endian y.",
            )
        return cls(Fq.from_bytes(data[:32]), Fq.from_bytes(data[32:]))

    def to_json(self) -> List[str]:
        return [hex32(self.x.value), hex32(self.y.value)]

    @classmethod
    def from_json(cls, doc: object, name: str = "point") -> "Point":
        if not isinstance(doc, (list, tuple)) or len(doc) != 2:
            raise RefusalError(
                code="REFUSE_POINT_ENCODING",
                user_message=f"Cannot decode {name}: expected [x, y].",
                why="Points are serialized as a two-element list of hex words.",
                missing=[name],
            )
        return cls.from_ints(
            parse_hex32(doc[0], modulus=Q, name=f"{name}.x"),
            parse_hex32(doc[1], modulus=Q, name=f"{name}.y"),
        )


IDENTITY = Point(Fq(0), Fq(1))


# ---------------------------
# Raw integer arithmetic
# ---------------------------
def _affine_add(x1: int, y1: int, x2: int, y2: int) -> Tuple[int, int]:
    k = D * x1 % Q * x2 % Q * y1 % Q * y2 % Q
    x3 = (x1 * y2 + y1 * x2) * pow(1 + k, -1, Q) % Q
    y3 = (y1 * y2 - A * x1 * x2) * pow(1 - k, -1, Q) % Q
    return x3, y3


def _projective_add(p1: Tuple[int, int, int], p2: Tuple[int, int, int]) -> Tuple[int, int, int]:
    # add-2008-bbjlp; complete on this curve (a square, d non-square)
    x1, y1, z1 = p1
    x2, y2, z2 = p2
    a = z1 * z2 % Q
    b = a * a % Q
    c = x1 * x2 % Q
    d = y1 * y2 % Q
    e = D * c % Q * d % Q
    f = (b - e) % Q
    g = (b + e) % Q
    x3 = a * f % Q * ((x1 + y1) * (x2 + y2) - c - d) % Q
    y3 = a * g % Q * (d - A * c) % Q
    z3 = f * g % Q
    return x3, y3, z3


def _scalar_mul_raw(k: int, x: int, y: int) -> Tuple[int, int]:
    acc = (0, 1, 1)
    base = (x, y, 1)
    while k:
        if k & 1:
            acc = _projective_add(acc, base)
        base = _projective_add(base, base)
        k >>= 1
    z_inv = pow(acc[2], -1, Q)
    return acc[0] * z_inv % Q, acc[1] * z_inv % Q


# ---------------------------
# Group operations
# ---------------------------
def point_add(p1: Point, p2: Point) -> Point:
    """Complete twisted Edwards addition; identity is (0, 1)."""
    return Point.from_ints(*_affine_add(p1.x.value, p1.y.value, p2.x.value, p2.y.value))


def negate(p: Point) -> Point:
    return Point(-p.x, p.y)


def scalar_mul(s: Scalar, p: Point) -> Point:
    """
    s-fold addition of p. Accepts Fl or a plain integer so that the subgroup
    order itself (which reduces to 0 in Fl) can be applied. Negative integers
    multiply the negated point.
    """
    k = s.value if isinstance(s, Fl) else int(s)
    if k < 0:
        return scalar_mul(-k, negate(p))
    if k == 0 or p.is_identity():
        return IDENTITY
    return Point.from_ints(*_scalar_mul_raw(k, p.x.value, p.y.value))


def in_subgroup(p: Point) -> bool:
    return scalar_mul(L, p).is_identity()


# ---------------------------
# Generators
# ---------------------------
@lru_cache(maxsize=1)
def full_order_generator() -> Point:
    return Point.from_ints(*BABYJUBJUB.full_order_generator)


@lru_cache(maxsize=1)
def generator_g() -> Point:
    """Base point of the prime-order subgroup (= 8 * full-order generator)."""
    return Point.from_ints(*BABYJUBJUB.base_point)


def hash_to_subgroup(tag: bytes) -> Tuple[int, Point]:
    """
    Try-and-increment: y = keccak256(tag || counter_be32) mod q, solve the curve
    equation for x (smaller root), clear the cofactor, and accept the first
    non-identity point of prime order. Returns (counter, point).
    """
    for counter in range(HASH_TO_CURVE_MAX_ATTEMPTS):
        y = Fq(int.from_bytes(keccak256(tag + counter.to_bytes(4, "big")), "big"))
        denominator = A - D * y * y
        if not denominator:
            continue
        root = ((1 - y * y) * denominator.inverse()).sqrt()
        if root is None:
            continue
        x = root if root.value <= (Q - 1) // 2 else -root
        candidate = scalar_mul(COFACTOR, Point(x, y))
        if candidate.is_identity() or not in_subgroup(candidate):
            continue
        return counter, candidate
    raise RefusalError(
        code="REFUSE_HASH_TO_CURVE_EXHAUSTED",
        user_message="Hash-to-curve found no subgroup point.",
        why="Each attempt succeeds with probability about 1/4; exhausting the budget means the tag is unusable.",
        details={"tag": tag.hex(), "attempts": HASH_TO_CURVE_MAX_ATTEMPTS},
    )


@lru_cache(maxsize=1)
def generator_h() -> Point:
    """Second generator with no known discrete log relative to G."""
    return hash_to_subgroup(DOMAIN_TAGS.generator_h)[1]
