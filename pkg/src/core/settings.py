from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Literal

from dotenv import load_dotenv
from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.core.refusal import RefusalError

DEFAULT_SEED = "0x" + "00" * 32
DEFAULT_CWETH_ADDRESS = "0x000000000000000000000000000000000000cafe"


def _require_hex(value: str, length: int, name: str) -> str:
    if not value.startswith("0x") or len(value) != 2 + 2 * length:
        raise ValueError(f"{name} must be 0x-prefixed hex of {length} bytes")
    bytes.fromhex(value[2:])
    return value.lower()


class Settings(BaseSettings):
    """
    Runtime configuration. Read from CWETH_* environment variables (and a local
    .env). Protocol constants are NOT configurable; they live in protocol_config.
    """
    model_config = SettingsConfigDict(env_prefix="CWETH_", extra="ignore")

    state_path: Path = Field(
        default=Path("data") / "cweth_state.json",
        description="Ledger state document the CLI treats as the chain.",
    )
    seed: str = Field(default=DEFAULT_SEED, description="32-byte hex seed used by `init`.")
    cweth_address: str = Field(
        default=DEFAULT_CWETH_ADDRESS,
        description="20-byte contract address the key-derivation message is bound to.",
    )
    nonce_mode: Literal["seeded", "system"] = Field(
        default="seeded",
        description="seeded = reproducible nonces from the state's generator; system = OS entropy.",
    )
    log_level: str = Field(default="WARNING")

    @field_validator("seed")
    @classmethod
    def _seed_is_32_bytes(cls, value: str) -> str:
        return _require_hex(value, 32, "seed")

    @field_validator("cweth_address")
    @classmethod
    def _address_is_20_bytes(cls, value: str) -> str:
        return _require_hex(value, 20, "cweth_address")

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level {value!r}")
        return level


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    load_dotenv()
    try:
        return Settings()
    except ValidationError as e:
        raise RefusalError(
            code="REFUSE_SETTINGS_INVALID",
            user_message="Cannot start because the CWETH_* configuration is invalid.",
            why="Settings are validated once at startup so every command sees the same values.",
            missing=[".".join(str(p) for p in err["loc"]) for err in e.errors()],
            details={"errors": [err["msg"] for err in e.errors()]},
        ) from None
