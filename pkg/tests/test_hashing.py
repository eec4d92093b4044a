import pytest

from src.core.refusal import RefusalError
from src.tools.fields import Fq, Q
from src.tools.hashing import keccak256, load_poseidon_params, poseidon2, poseidon_permutation


def _h(text: str) -> int:
    return int(text, 16)


# ---------------------------
# Keccak-256
# ---------------------------
def test_keccak_empty_string_vector():
    assert keccak256(b"").hex() == "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470"


def test_keccak_known_answers(load_fixture):
    vectors = load_fixture("keccak_kat.json")
    assert len(vectors) >= 5
    for v in vectors:
        data = bytes.fromhex(v["input"][2:])
        assert "0x" + keccak256(data).hex() == v["digest"], len(data)


def test_keccak_is_not_fips_sha3():
    import hashlib

    assert keccak256(b"abc") != hashlib.sha3_256(b"abc").digest()


def test_keccak_deterministic_and_32_bytes():
    assert keccak256(b"abc") == keccak256(b"abc")
    assert len(keccak256(b"x" * 200)) == 32


def test_keccak_avalanche(rng):
    for _ in range(50):
        data = bytearray(rng.randbytes(rng.randrange(1, 300)))
        flipped = bytearray(data)
        i = rng.randrange(len(data))
        flipped[i] ^= 1 << rng.randrange(8)
        assert keccak256(bytes(data)) != keccak256(bytes(flipped))


# ---------------------------
# Poseidon
# ---------------------------
def test_poseidon_known_answers(load_fixture):
    vectors = load_fixture("poseidon_kat.json")
    assert len(vectors) >= 5
    for v in vectors:
        assert poseidon2(Fq(_h(v["a"])), Fq(_h(v["b"]))).value == _h(v["out"])


def test_poseidon_zero_zero_and_one_two():
    assert poseidon2(Fq(0), Fq(0)).value == 0x2098F5FB9E239EAB3CEAC3F27B81E481DC3124D55FFED523A839EE8446B64864
    assert poseidon2(Fq(1), Fq(2)).value == 0x115CC0F5E7D690413DF64C6B9662E9CF2A3617F2743245519E19607A4417189A


def test_poseidon_is_deterministic_and_in_field(rng):
    for _ in range(20):
        a, b = Fq(rng.randrange(Q)), Fq(rng.randrange(Q))
        out = poseidon2(a, b)
        assert out == poseidon2(a, b)
        assert 0 <= out.value < Q


def test_poseidon_params_shape():
    params = load_poseidon_params()
    assert (params.t, params.full_rounds, params.partial_rounds, params.alpha) == (3, 8, 57, 5)
    assert len(params.round_constants) == 195


def test_poseidon_permutation_refuses_wrong_width():
    with pytest.raises(RefusalError) as e:
        poseidon_permutation((Fq(0), Fq(1)), load_poseidon_params())
    assert e.value.code == "REFUSE_POSEIDON_WIDTH"


def test_missing_poseidon_asset_is_refused(tmp_path):
    with pytest.raises(RefusalError) as e:
        load_poseidon_params(tmp_path / "absent.json")
    assert e.value.code == "REFUSE_POSEIDON_PARAMS"
