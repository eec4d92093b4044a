from __future__ import annotations

import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator

import orjson

from src.core.codec import hex32, hex_bytes, parse_hex32, parse_hex_bytes
from src.core.guardrails import refuse_if_invalid_public_key
from src.core.protocol_config import STATE_FORMAT_VERSION
from src.core.refusal import RefusalError
from src.simulation.account import AccountBalance, LedgerState
from src.tools.curve import Point
from src.tools.fields import Fq, Q
from src.tools.kdf import EthAddress

logger = logging.getLogger(__name__)

DUMP_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2


def state_to_document(state: LedgerState) -> Dict[str, Any]:
    return {
        "version": STATE_FORMAT_VERSION,
        "accounts": {hex32(x.value): bal.to_json() for x, bal in state.accounts.items()},
        "registered_keys": {addr.hex(): pk.to_json() for addr, pk in state.registered_keys.items()},
        "total_wrapped": hex32(state.total_wrapped),
        "rng_seed": hex_bytes(state.rng_seed),
        "rng_counter": hex32(state.rng_counter),
    }


def state_from_document(doc: Any) -> LedgerState:
    if not isinstance(doc, dict):
        raise RefusalError(
            code="REFUSE_STATE_CORRUPT",
            user_message="State file does not contain a JSON object.",
            why="The ledger state is a single versioned JSON document.",
        )
    if doc.get("version") != STATE_FORMAT_VERSION:
        raise RefusalError(
            code="REFUSE_STATE_VERSION",
            user_message=f"State file version {doc.get('version')!r} is not supported.",
            why=f"This build reads state format version {STATE_FORMAT_VERSION} only.",
            details={"version": doc.get("version")},
        )
    missing = [k for k in ("accounts", "registered_keys", "total_wrapped", "rng_seed", "rng_counter") if k not in doc]
    if missing:
        raise RefusalError(
            code="REFUSE_STATE_CORRUPT",
            user_message="State file is missing fields.",
            why="Every field of the ledger state must be present.",
            missing=missing,
        )

    not_objects = [k for k in ("accounts", "registered_keys") if not isinstance(doc[k], dict)]
    if not_objects:
        raise RefusalError(
            code="REFUSE_STATE_CORRUPT",
            user_message="State file fields are not JSON objects.",
            why="accounts and registered_keys map hex keys to entries.",
            details={"fields": not_objects},
        )

    registered = {
        EthAddress.from_hex(addr): Point.from_json(pk, f"registered_keys[{addr}]")
        for addr, pk in doc["registered_keys"].items()
    }
    for addr, pk in registered.items():
        refuse_if_invalid_public_key(pk, f"registered_keys[{addr.hex()}]")
    accounts = {
        Fq(parse_hex32(x, modulus=Q, name="account key")): AccountBalance.from_json(bal)
        for x, bal in doc["accounts"].items()
    }
    registered_x = {pk.x for pk in registered.values()}
    orphans = [hex32(x.value) for x in accounts if x not in registered_x]
    if orphans:
        raise RefusalError(
            code="REFUSE_STATE_CORRUPT",
            user_message="State file has accounts without a registered key.",
            why="Every account key must be the x-coordinate of a registered public key.",
            details={"accounts": orphans},
        )
    return LedgerState(
        accounts=accounts,
        registered_keys=registered,
        total_wrapped=parse_hex32(doc["total_wrapped"], name="total_wrapped"),
        rng_seed=parse_hex_bytes(doc["rng_seed"], length=32, name="rng_seed"),
        rng_counter=parse_hex32(doc["rng_counter"], name="rng_counter"),
    )


def dump_state(state: LedgerState) -> bytes:
    return orjson.dumps(state_to_document(state), option=DUMP_OPTIONS) + b"\n"


def save_state(state: LedgerState, path: Path) -> None:
    """Write to a temp file in the same directory, then os.replace."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(dump_state(state))
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    logger.debug("saved state to %s (accounts=%d)", path, len(state.accounts))


def load_state(path: Path) -> LedgerState:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise RefusalError(
            code="REFUSE_STATE_MISSING",
            user_message=f"No ledger state at {path}.",
            why="Run `init` first; every other command operates on an existing state.",
            missing=[str(path)],
        ) from None
    try:
        doc = orjson.loads(raw)
    except orjson.JSONDecodeError as e:
        raise RefusalError(
            code="REFUSE_STATE_CORRUPT",
            user_message=f"State file {path} is not valid JSON.",
            why="The ledger state is a single versioned JSON document.",
            details={"error": str(e)},
        ) from None
    return state_from_document(doc)


def lock_path_for(path: Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".lock")


@contextmanager
def state_lock(path: Path) -> Iterator[None]:
    """Single-writer guard: `<state>.lock` is created exclusively and removed on exit."""
    lock = lock_path_for(path)
    lock.parent.mkdir(parents=True, exist_ok=True)
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise RefusalError(
            code="REFUSE_STATE_LOCKED",
            user_message=f"State {path} is locked by another writer.",
            why="Ledger transitions are strictly serial; remove a stale lock file only if no other process runs.",
            details={"lock": str(lock)},
        ) from None
    try:
        os.write(fd, str(os.getpid()).encode("ascii"))
        os.close(fd)
        yield
    finally:
        lock.unlink(missing_ok=True)
