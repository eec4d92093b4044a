import pytest

from src.core.refusal import RefusalError
from src.tools.curve import Point, generator_g, scalar_mul
from src.tools.fields import Fl, L
from src.tools.hashing import keccak256
from src.tools.kdf import (
    KDF_MSG_TYPEHASH,
    EthAddress,
    KeyPair,
    derive_keypair,
    derive_private_key,
    kdf_struct_hash,
    keypair_from_private_key,
)
from src.tools.signer import DeterministicTestSigner, SignerInterface


def test_typehash_matches_fixture(load_fixture):
    assert "0x" + KDF_MSG_TYPEHASH.hex() == load_fixture("kdf_vectors.json")["typehash"]


def test_struct_hash_of_zero_address(load_fixture):
    expected = load_fixture("kdf_vectors.json")["zero_address_struct_hash"]
    assert "0x" + kdf_struct_hash(EthAddress(bytes(20))).hex() == expected


def test_private_key_of_single_byte_signature(load_fixture):
    expected = int(load_fixture("kdf_vectors.json")["private_key_of_signature_0x01"], 16)
    assert derive_private_key(b"\x01").value == expected


def test_private_key_is_double_keccak_of_signature_mod_l():
    signature = bytes(range(65))
    digest = keccak256(keccak256(signature))
    assert derive_private_key(signature) == Fl(int.from_bytes(digest, "big") % L)


def test_test_signer_end_to_end(load_fixture):
    vec = load_fixture("kdf_vectors.json")["test_signer"]
    signer = DeterministicTestSigner(bytes.fromhex(vec["seed"][2:]))
    cweth = EthAddress.from_hex(vec["cweth_address"])

    digest = kdf_struct_hash(cweth)
    assert "0x" + digest.hex() == vec["struct_hash"]
    signature = signer.sign(digest)
    assert len(signature) == 65
    assert "0x" + signature.hex() == vec["signature"]

    keypair = derive_keypair(signer, cweth)
    assert keypair.sk.value == int(vec["sk"], 16)
    assert keypair.pk == Point.from_json(vec["pk"])


def test_derivation_is_deterministic_and_contract_bound():
    signer = DeterministicTestSigner(b"alice")
    a = EthAddress.from_hex("0x000000000000000000000000000000000000cafe")
    b = EthAddress.from_hex("0x000000000000000000000000000000000000beef")
    assert derive_keypair(signer, a) == derive_keypair(signer, a)
    assert derive_keypair(signer, a).pk != derive_keypair(signer, b).pk
    assert derive_keypair(DeterministicTestSigner(b"bob"), a).pk != derive_keypair(signer, a).pk


def test_derived_key_is_reduced_and_matches_public_key():
    keypair = derive_keypair(DeterministicTestSigner(b"carol"), EthAddress(bytes(20)))
    assert 0 < keypair.sk.value < L
    assert keypair.pk == scalar_mul(keypair.sk, generator_g())


def test_test_signer_satisfies_signer_interface():
    assert isinstance(DeterministicTestSigner(b"x"), SignerInterface)


def test_empty_signature_is_refused():
    with pytest.raises(RefusalError) as e:
        derive_private_key(b"")
    assert e.value.code == "REFUSE_EMPTY_SIGNATURE"


def test_signer_refuses_empty_seed_and_short_digest():
    with pytest.raises(RefusalError) as e:
        DeterministicTestSigner(b"")
    assert e.value.code == "REFUSE_SIGNER_SEED_EMPTY"
    with pytest.raises(RefusalError) as e:
        DeterministicTestSigner(b"x").sign(b"short")
    assert e.value.code == "REFUSE_DIGEST_LENGTH"


def test_key_pair_checks_consistency():
    with pytest.raises(RefusalError) as e:
        KeyPair(sk=Fl(5), pk=scalar_mul(6, generator_g()))
    assert e.value.code == "REFUSE_KEY_PAIR_MISMATCH"
    with pytest.raises(RefusalError) as e:
        keypair_from_private_key(Fl(0))
    assert e.value.code == "REFUSE_DEGENERATE_PRIVATE_KEY"


def test_address_length_is_enforced():
    with pytest.raises(RefusalError) as e:
        EthAddress(bytes(19))
    assert e.value.code == "REFUSE_ADDRESS_LENGTH"
    with pytest.raises(RefusalError):
        EthAddress.from_hex("0x1234")
