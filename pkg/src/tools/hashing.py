from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import NewType, Sequence, Tuple

import orjson
from Crypto.Hash import keccak as _keccak

from src.core.codec import parse_hex32
from src.core.protocol_config import POSEIDON_PARAMS_PATH
from src.core.refusal import RefusalError
from src.tools.fields import Fq, Q

logger = logging.getLogger(__name__)

Digest32 = NewType("Digest32", bytes)


def keccak256(data: bytes) -> Digest32:
    """Ethereum Keccak-256 (original padding, not FIPS SHA3-256)."""
    h = _keccak.new(digest_bits=256)
    h.update(bytes(data))
    return Digest32(h.digest())


@dataclass(frozen=True)
class PoseidonParams:
    t: int
    full_rounds: int
    partial_rounds: int
    alpha: int
    round_constants: Tuple[Fq, ...]
    mds_matrix: Tuple[Tuple[Fq, ...], ...]

    def validate(self) -> None:
        expected = (self.full_rounds + self.partial_rounds) * self.t
        if len(self.round_constants) != expected:
            raise RefusalError(
                code="REFUSE_POSEIDON_PARAMS",
                user_message="Poseidon parameters have the wrong number of round constants.",
                why="Every round adds t constants.",
                details={"expected": expected, "actual": len(self.round_constants)},
            )
        if len(self.mds_matrix) != self.t or any(len(row) != self.t for row in self.mds_matrix):
            raise RefusalError(
                code="REFUSE_POSEIDON_PARAMS",
                user_message="Poseidon MDS matrix is not t x t.",
                why="The linear layer mixes the full state.",
                details={"t": self.t},
            )
        if self.full_rounds % 2:
            raise RefusalError(
                code="REFUSE_POSEIDON_PARAMS",
                user_message="Poseidon full rounds must be even.",
                why="Full rounds are split evenly around the partial rounds.",
                details={"full_rounds": self.full_rounds},
            )
        if not _is_invertible([[e.value for e in row] for row in self.mds_matrix]):
            raise RefusalError(
                code="REFUSE_POSEIDON_PARAMS",
                user_message="Poseidon MDS matrix is singular.",
                why="A singular linear layer destroys the permutation property.",
            )

    def to_json(self) -> dict:
        return {
            "field_modulus": f"0x{Q:064x}",
            "t": self.t,
            "full_rounds": self.full_rounds,
            "partial_rounds": self.partial_rounds,
            "alpha": self.alpha,
            "round_constants": [f"0x{c.value:064x}" for c in self.round_constants],
            "mds_matrix": [[f"0x{e.value:064x}" for e in row] for row in self.mds_matrix],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PoseidonParams":
        if parse_hex32(doc.get("field_modulus"), name="field_modulus") != Q:
            raise RefusalError(
                code="REFUSE_POSEIDON_PARAMS",
                user_message="Poseidon parameters were generated for a different field.",
                why="The hash must run over the babyJubJub coordinate field.",
                details={"field_modulus": doc.get("field_modulus")},
            )
        params = cls(
            t=int(doc["t"]),
            full_rounds=int(doc["full_rounds"]),
            partial_rounds=int(doc["partial_rounds"]),
            alpha=int(doc["alpha"]),
            round_constants=tuple(
                Fq(parse_hex32(c, modulus=Q, name="round_constant")) for c in doc["round_constants"]
            ),
            mds_matrix=tuple(
                tuple(Fq(parse_hex32(e, modulus=Q, name="mds")) for e in row) for row in doc["mds_matrix"]
            ),
        )
        params.validate()
        return params


def _is_invertible(matrix: list[list[int]]) -> bool:
    rows = [list(r) for r in matrix]
    n = len(rows)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] % Q), None)
        if pivot is None:
            return False
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = pow(rows[col][col], -1, Q)
        for r in range(col + 1, n):
            factor = rows[r][col] * inv % Q
            rows[r] = [(x - factor * y) % Q for x, y in zip(rows[r], rows[col])]
    return True


@lru_cache(maxsize=4)
def load_poseidon_params(path: Path = POSEIDON_PARAMS_PATH) -> PoseidonParams:
    try:
        doc = orjson.loads(Path(path).read_bytes())
    except FileNotFoundError:
        raise RefusalError(
            code="REFUSE_POSEIDON_PARAMS",
            user_message="Poseidon parameter asset is missing.",
            why="Round constants are shipped as data; regenerate with src.tools.poseidon_params.",
            missing=[str(path)],
        ) from None
    except orjson.JSONDecodeError as e:
        raise RefusalError(
            code="REFUSE_POSEIDON_PARAMS",
            user_message="Poseidon parameter asset is not valid JSON.",
            why="Round constants are shipped as data; regenerate with src.tools.poseidon_params.",
            details={"path": str(path), "error": str(e)},
        ) from None
    params = PoseidonParams.from_json(doc)
    logger.debug("loaded poseidon params t=%d R_F=%d R_P=%d", params.t, params.full_rounds, params.partial_rounds)
    return params


def poseidon_permutation(state: Sequence[Fq], params: PoseidonParams) -> Tuple[Fq, ...]:
    if len(state) != params.t:
        raise RefusalError(
            code="REFUSE_POSEIDON_WIDTH",
            user_message=f"Poseidon state must have {params.t} elements.",
            why="The permutation is defined for a fixed state width.",
            details={"width": len(state)},
        )
    t = params.t
    alpha = params.alpha
    constants = [c.value for c in params.round_constants]
    mds = [[e.value for e in row] for row in params.mds_matrix]
    half_full = params.full_rounds // 2
    total = params.full_rounds + params.partial_rounds

    s = [e.value for e in state]
    for rnd in range(total):
        s = [(x + constants[rnd * t + i]) % Q for i, x in enumerate(s)]
        if rnd < half_full or rnd >= half_full + params.partial_rounds:
            s = [pow(x, alpha, Q) for x in s]
        else:
            s[0] = pow(s[0], alpha, Q)
        s = [sum(m * x for m, x in zip(row, s)) % Q for row in mds]
    return tuple(Fq(x) for x in s)


def poseidon2(a: Fq, b: Fq) -> Fq:
    """Two-input Poseidon: permutation of (0, a, b), first lane."""
    return poseidon_permutation((Fq(0), a, b), load_poseidon_params())[0]
