from __future__ import annotations

from typing import Annotated, Any, List, Literal, Optional, Set, Union

import orjson
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, ValidationError, field_validator

from src.core.protocol_config import AMOUNT_POLICY
from src.core.refusal import RefusalError

ActorName = Annotated[str, Field(min_length=1, max_length=64, pattern=r"^[A-Za-z0-9_.-]+$")]


def _decimal_amount(value: Any) -> Any:
    # wei amounts past 2^64 do not fit a JSON integer; scripts may write them as decimal strings
    if isinstance(value, str) and value.isascii() and value.isdigit():
        return int(value)
    return value


Amount = Annotated[
    int,
    BeforeValidator(_decimal_amount),
    Field(strict=True, ge=0, lt=AMOUNT_POLICY.upper_bound),
    PlainSerializer(str, when_used="json"),
]


class _Command(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    def actors(self) -> List[str]:
        return [getattr(self, "actor")]


class KeygenCommand(_Command):
    op: Literal["keygen"]
    actor: ActorName


class DepositCommand(_Command):
    op: Literal["deposit"]
    actor: ActorName
    amount: Amount


class TransferCommand(_Command):
    op: Literal["transfer"]
    sender: ActorName = Field(alias="from")
    receiver: ActorName = Field(alias="to")
    amount: Amount
    auto_rollover: bool = False

    def actors(self) -> List[str]:
        return [self.sender, self.receiver]


class WithdrawCommand(_Command):
    op: Literal["withdraw"]
    actor: ActorName
    amount: Amount
    to: Optional[str] = Field(default=None, description="0x-prefixed 20-byte receiver address")

    @field_validator("to")
    @classmethod
    def _address_shape(cls, value: Optional[str]) -> Optional[str]:
        if value is None:
            return value
        if not value.startswith("0x") or len(value) != 42:
            raise ValueError("to must be a 0x-prefixed 20-byte address")
        bytes.fromhex(value[2:])
        return value.lower()


class RolloverCommand(_Command):
    op: Literal["rollover"]
    actor: ActorName


class DecryptCommand(_Command):
    op: Literal["decrypt"]
    actor: ActorName


class AssertBalanceCommand(_Command):
    op: Literal["assert-balance"]
    actor: ActorName
    pending: Optional[Amount] = None
    actual: Optional[Amount] = None


ScenarioCommand = Annotated[
    Union[
        KeygenCommand,
        DepositCommand,
        TransferCommand,
        WithdrawCommand,
        RolloverCommand,
        DecryptCommand,
        AssertBalanceCommand,
    ],
    Field(discriminator="op"),
]


class ScenarioScript(BaseModel):
    """
    Reproducible multi-party script: one seed, an ordered command list.
    Actors must be introduced by `keygen` before any other command names them.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: str
    commands: List[ScenarioCommand] = Field(default_factory=list)

    @field_validator("seed")
    @classmethod
    def _seed_shape(cls, value: str) -> str:
        if not value.startswith("0x") or len(value) != 66:
            raise ValueError("seed must be 0x-prefixed hex of 32 bytes")
        bytes.fromhex(value[2:])
        return value.lower()

    def seed_bytes(self) -> bytes:
        return bytes.fromhex(self.seed[2:])

    def validate_actors(self) -> None:
        # ---------------------------
        # Actor introduction check
        # ---------------------------
        introduced: Set[str] = set()
        for step, command in enumerate(self.commands):
            if isinstance(command, KeygenCommand):
                introduced.add(command.actor)
                continue
            unknown = [a for a in command.actors() if a not in introduced]
            if unknown:
                raise RefusalError(
                    code="REFUSE_SCENARIO_UNKNOWN_ACTOR",
                    user_message=f"Step {step} ({command.op}) names actors before their keygen: {', '.join(unknown)}.",
                    why="Scripts introduce every actor with `keygen` so key derivation is explicit and ordered.",
                    missing=[f"keygen {a}" for a in unknown],
                    details={"step": step},
                )

    @classmethod
    def parse(cls, raw: bytes) -> "ScenarioScript":
        try:
            script = cls.model_validate(orjson.loads(raw))
        except orjson.JSONDecodeError as e:
            raise RefusalError(
                code="REFUSE_SCENARIO_INVALID",
                user_message="Scenario script is not valid JSON.",
                why="Scripts are JSON documents: {\"seed\": hex, \"commands\": [...]}.",
                details={"error": str(e)},
            ) from None
        except ValidationError as e:
            raise RefusalError(
                code="REFUSE_SCENARIO_INVALID",
                user_message="Scenario script does not match the command schema.",
                why="Every command needs a known op, valid actor names, and amounts in [0, 2^96).",
                missing=[".".join(str(p) for p in err["loc"]) for err in e.errors()],
                details={"errors": [err["msg"] for err in e.errors()]},
            ) from None
        script.validate_actors()
        return script
