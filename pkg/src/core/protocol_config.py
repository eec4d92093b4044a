from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class CurveSpec:
    """
    babyJubJub in twisted Edwards form: a*x^2 + y^2 = 1 + d*x^2*y^2 over F_q.
    Values as published in EIP-2494; q is the BN254 scalar-field modulus.
    """
    name: str
    a: int
    d: int
    field_modulus: int
    subgroup_order: int
    cofactor: int
    base_point: tuple[int, int]
    full_order_generator: tuple[int, int]


@dataclass(frozen=True)
class AmountPolicy:
    """
    Frozen amount domain: every committed or encrypted amount lives in [0, 2^bits).
    """
    bits: int
    unit: str = "wei"

    @property
    def upper_bound(self) -> int:
        return 1 << self.bits


@dataclass(frozen=True)
class DomainTags:
    """Byte prefixes that separate the keccak-derived values from each other."""
    generator_h: bytes
    nonce: bytes
    actor_address: bytes
    actor_signer: bytes


# Single source of truth for protocol constants
BABYJUBJUB = CurveSpec(
    name="babyJubJub",
    a=168700,
    d=168696,
    field_modulus=21888242871839275222246405745257275088548364400416034343698204186575808495617,
    subgroup_order=2736030358979909402780800718157159386076813972158567259200215660948447373041,
    cofactor=8,
    base_point=(
        5299619240641551281634865583518297030282874472190772894086521144482721001553,
        16950150798460657717958625567821834550301663161624707787222815936182638968203,
    ),
    full_order_generator=(
        995203441582195749578291179787384436505546430278305826713579947235728471134,
        5472060717959818805561601436314318772137091100104008585924551046643952123905,
    ),
)

AMOUNT_POLICY = AmountPolicy(bits=96)

DOMAIN_TAGS = DomainTags(
    generator_h=b"cWETH:H",
    nonce=b"cWETH:nonce",
    actor_address=b"cWETH:actor:",
    actor_signer=b"cWETH:signer:",
)

KDF_TYPE_STRING = "KDF(address cWETHAddress)"

# Attempts before hash-to-curve gives up (each succeeds with probability ~1/4).
HASH_TO_CURVE_MAX_ATTEMPTS = 256

PROJECT_ROOT = Path(__file__).resolve().parents[2]
POSEIDON_PARAMS_PATH = PROJECT_ROOT / "data" / "poseidon_t3_x5_254.json"

STATE_FORMAT_VERSION = 1
