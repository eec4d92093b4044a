from __future__ import annotations

from typing import Any, Optional

from src.core.refusal import RefusalError


def hex32(value: int) -> str:
    """Encode a non-negative integer below 2^256 as 0x + 64 hex digits."""
    if value < 0 or value >> 256:
        raise RefusalError(
            code="REFUSE_HEX_OUT_OF_RANGE",
            user_message="Cannot encode value as a 32-byte word.",
            why="All field elements and amounts are serialized as 32-byte big-endian words.",
            details={"value": str(value)},
        )
    return f"0x{value:064x}"


def parse_hex32(text: Any, *, modulus: Optional[int] = None, name: str = "value") -> int:
    """
    Parse a 0x-prefixed hex word. With a modulus, non-canonical encodings
    (value >= modulus) are refused rather than reduced.
    """
    if not isinstance(text, str) or not text.startswith("0x") or len(text) > 66 or len(text) < 3:
        raise RefusalError(
            code="REFUSE_HEX_MALFORMED",
            user_message=f"Cannot parse {name}: expected a 0x-prefixed hex word.",
            why="Serialized numbers must be 0x-prefixed hex of at most 32 bytes.",
            missing=[name],
            details={"value": repr(text)[:80]},
        )
    try:
        value = int(text, 16)
    except ValueError:
        raise RefusalError(
            code="REFUSE_HEX_MALFORMED",
            user_message=f"Cannot parse {name}: not valid hex.",
            why="Serialized numbers must be 0x-prefixed hex of at most 32 bytes.",
            missing=[name],
            details={"value": text[:80]},
        ) from None
    if modulus is not None and value >= modulus:
        raise RefusalError(
            code="REFUSE_HEX_NOT_CANONICAL",
            user_message=f"Cannot accept {name}: value is not reduced below its modulus.",
            why="Field elements must be serialized in canonical form.",
            details={"value": text},
        )
    return value


def hex_bytes(data: bytes) -> str:
    return "0x" + bytes(data).hex()


def parse_hex_bytes(text: Any, *, length: Optional[int] = None, name: str = "bytes") -> bytes:
    if not isinstance(text, str) or not text.startswith("0x"):
        raise RefusalError(
            code="REFUSE_HEX_MALFORMED",
            user_message=f"Cannot parse {name}: expected 0x-prefixed hex.",
            why="Byte strings are serialized as 0x-prefixed hex.",
            missing=[name],
            details={"value": repr(text)[:80]},
        )
    try:
        raw = bytes.fromhex(text[2:])
    except ValueError:
        raise RefusalError(
            code="REFUSE_HEX_MALFORMED",
            user_message=f"Cannot parse {name}: not valid hex.",
            why="Byte strings are serialized as 0x-prefixed hex.",
            missing=[name],
            details={"value": text[:80]},
        ) from None
    if length is not None and len(raw) != length:
        raise RefusalError(
            code="REFUSE_HEX_LENGTH",
            user_message=f"Cannot accept {name}: expected {length} bytes, got {len(raw)}.",
            why="Fixed-width values must have their exact byte length.",
            details={"expected": length, "actual": len(raw)},
        )
    return raw


def wei(value: int) -> str:
    """Decimal string form of an amount; amounts reach 2^96, past 64-bit JSON integers."""
    return str(int(value))
