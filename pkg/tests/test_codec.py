import pytest

from src.core.codec import hex32, hex_bytes, parse_hex32, parse_hex_bytes, wei
from src.core.refusal import RefusalError


def test_hex32_is_fixed_width():
    assert hex32(0) == "0x" + "0" * 64
    assert hex32(255) == "0x" + "0" * 62 + "ff"


def test_hex32_refuses_negative_and_oversized():
    for value in (-1, 1 << 256):
        with pytest.raises(RefusalError) as e:
            hex32(value)
        assert e.value.code == "REFUSE_HEX_OUT_OF_RANGE"


@pytest.mark.parametrize("text", [None, 5, "ff", "0x", "0xzz", "0x" + "1" * 65])
def test_parse_hex32_refuses_malformed(text):
    with pytest.raises(RefusalError) as e:
        parse_hex32(text)
    assert e.value.code == "REFUSE_HEX_MALFORMED"


def test_parse_hex32_enforces_canonical_form():
    assert parse_hex32("0x0a", modulus=11) == 10
    with pytest.raises(RefusalError) as e:
        parse_hex32("0x0b", modulus=11)
    assert e.value.code == "REFUSE_HEX_NOT_CANONICAL"


def test_hex_bytes_length_check():
    assert parse_hex_bytes(hex_bytes(b"\x01\x02"), length=2) == b"\x01\x02"
    with pytest.raises(RefusalError) as e:
        parse_hex_bytes("0x0102", length=3)
    assert e.value.code == "REFUSE_HEX_LENGTH"


def test_wei_is_decimal():
    assert wei(2**96 - 1) == "79228162514264337593543950335"
