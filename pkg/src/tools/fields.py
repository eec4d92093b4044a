from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Optional, TypeVar, Union

from src.core.protocol_config import BABYJUBJUB
from src.core.refusal import RefusalError

Q = BABYJUBJUB.field_modulus
L = BABYJUBJUB.subgroup_order

F = TypeVar("F", bound="_FieldElement")


class _FieldElement:
    """
    Shared arithmetic for the two prime fields. Subclasses fix MODULUS.
    Plain ints are coerced; mixing Fq with Fl is unsupported (TypeError).
    """
    __slots__ = ()
    MODULUS: ClassVar[int]
    value: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", int(self.value) % self.MODULUS)

    def _coerce(self, other: object) -> Optional[int]:
        if type(other) is type(self):
            return other.value  # type: ignore[attr-defined]
        if isinstance(other, int) and not isinstance(other, bool):
            return other
        return None

    def __add__(self: F, other: Union[F, int]) -> F:
        v = self._coerce(other)
        return NotImplemented if v is None else type(self)(self.value + v)

    __radd__ = __add__

    def __sub__(self: F, other: Union[F, int]) -> F:
        v = self._coerce(other)
        return NotImplemented if v is None else type(self)(self.value - v)

    def __rsub__(self: F, other: Union[F, int]) -> F:
        v = self._coerce(other)
        return NotImplemented if v is None else type(self)(v - self.value)

    def __mul__(self: F, other: Union[F, int]) -> F:
        v = self._coerce(other)
        return NotImplemented if v is None else type(self)(self.value * v)

    __rmul__ = __mul__

    def __neg__(self: F) -> F:
        return type(self)(-self.value)

    def __pow__(self: F, exponent: int) -> F:
        return type(self)(pow(self.value, exponent, self.MODULUS))

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def inverse(self: F) -> F:
        if self.value == 0:
            raise RefusalError(
                code="REFUSE_FIELD_ZERO_INVERSE",
                user_message=f"Cannot invert zero in {type(self).__name__}.",
                why="Zero has no multiplicative inverse in a prime field.",
            )
        return type(self)(pow(self.value, -1, self.MODULUS))

    def to_bytes(self) -> bytes:
        return self.value.to_bytes(32, "big")

    @classmethod
    def from_bytes(cls: type[F], data: bytes) -> F:
        if len(data) != 32:
            raise RefusalError(
                code="REFUSE_FIELD_ENCODING",
                user_message=f"Cannot decode {cls.__name__}: expected 32 bytes, got {len(data)}.",
                why="Field elements are encoded as 32 bytes big-endian.",
            )
        value = int.from_bytes(data, "big")
        if value >= cls.MODULUS:
            raise RefusalError(
                code="REFUSE_FIELD_ENCODING",
                user_message=f"Cannot decode {cls.__name__}: value is not below the modulus.",
                why="Only canonical encodings are accepted.",
            )
        return cls(value)


@dataclass(frozen=True, slots=True)
class Fq(_FieldElement):
    """Coordinate field of babyJubJub (also the modulus of the DH encryption layer)."""
    value: int
    MODULUS: ClassVar[int] = Q

    def is_square(self) -> bool:
        return self.value == 0 or pow(self.value, (Q - 1) // 2, Q) == 1

    def sqrt(self) -> Optional["Fq"]:
        """Tonelli-Shanks. Returns one root, or None for a non-residue."""
        n = self.value
        if n == 0:
            return Fq(0)
        if not self.is_square():
            return None
        s, odd = 0, Q - 1
        while odd % 2 == 0:
            s += 1
            odd //= 2
        z = 2
        while pow(z, (Q - 1) // 2, Q) != Q - 1:
            z += 1
        m, c = s, pow(z, odd, Q)
        t, root = pow(n, odd, Q), pow(n, (odd + 1) // 2, Q)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % Q
                i += 1
            b = pow(c, 1 << (m - i - 1), Q)
            m, c = i, b * b % Q
            t, root = t * c % Q, root * b % Q
        return Fq(root)


@dataclass(frozen=True, slots=True)
class Fl(_FieldElement):
    """Scalar field: order of the prime subgroup (keys and commitment nonces)."""
    value: int
    MODULUS: ClassVar[int] = L
