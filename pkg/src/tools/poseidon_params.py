"""
poseidon_params.py

Regenerates the Poseidon parameter asset shipped in data/.

Goal:
- Seed an 80-bit Grain LFSR with (field type, S-box type, field bits, t, R_F, R_P)
- Draw round constants in self-shrinking mode, rejecting values >= q
- Draw 2t further elements for a Cauchy MDS matrix M[i][j] = 1 / (x_i + y_j)
- Save everything as 0x-prefixed hex (data/poseidon_t3_x5_254.json)

Run:
    python -m src.tools.poseidon_params
"""

from __future__ import annotations

from pathlib import Path
from typing import List

import orjson

from src.core.protocol_config import POSEIDON_PARAMS_PATH
from src.tools.fields import Fq, Q
from src.tools.hashing import PoseidonParams

FIELD_BITS = 254
FIELD_TYPE_PRIME = 1
SBOX_POWER = 0
ALPHA = 5
WARMUP_STEPS = 160


class GrainLfsr:
    """Grain LFSR in self-shrinking mode, as used by the Poseidon reference parameter script."""

    TAPS = (62, 51, 38, 23, 13, 0)

    def __init__(self, field_type: int, sbox_type: int, field_bits: int, t: int,
                 full_rounds: int, partial_rounds: int) -> None:
        self.state: List[int] = (
            _bits(field_type, 2)
            + _bits(sbox_type, 4)
            + _bits(field_bits, 12)
            + _bits(t, 12)
            + _bits(full_rounds, 10)
            + _bits(partial_rounds, 10)
            + [1] * 30
        )
        for _ in range(WARMUP_STEPS):
            self._step()

    def _step(self) -> int:
        bit = 0
        for tap in self.TAPS:
            bit ^= self.state[tap]
        self.state.pop(0)
        self.state.append(bit)
        return bit

    def next_bit(self) -> int:
        # pairs (b, c): emit c only when b == 1
        while self._step() == 0:
            self._step()
        return self._step()

    def next_int(self, bits: int) -> int:
        value = 0
        for _ in range(bits):
            value = (value << 1) | self.next_bit()
        return value


def _bits(value: int, width: int) -> List[int]:
    return [(value >> (width - 1 - i)) & 1 for i in range(width)]


def generate_poseidon_params(t: int = 3, full_rounds: int = 8, partial_rounds: int = 57) -> PoseidonParams:
    grain = GrainLfsr(FIELD_TYPE_PRIME, SBOX_POWER, FIELD_BITS, t, full_rounds, partial_rounds)

    constants: List[int] = []
    while len(constants) < (full_rounds + partial_rounds) * t:
        candidate = grain.next_int(FIELD_BITS)
        if candidate < Q:
            constants.append(candidate)

    while True:
        draws = [grain.next_int(FIELD_BITS) % Q for _ in range(2 * t)]
        if len(set(draws)) == len(draws):
            break
    xs, ys = draws[:t], draws[t:]
    mds = tuple(tuple(Fq(pow(x + y, -1, Q)) for y in ys) for x in xs)

    params = PoseidonParams(
        t=t,
        full_rounds=full_rounds,
        partial_rounds=partial_rounds,
        alpha=ALPHA,
        round_constants=tuple(Fq(c) for c in constants),
        mds_matrix=mds,
    )
    params.validate()
    return params


def main(out_path: Path = POSEIDON_PARAMS_PATH) -> None:
    params = generate_poseidon_params()
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_bytes(orjson.dumps(params.to_json(), option=orjson.OPT_INDENT_2) + b"\n")

    print(f"Round constants: {len(params.round_constants)}")
    print(f"MDS: {params.t}x{params.t}")
    print(f"Saved: {out_path}")


if __name__ == "__main__":
    main()
