from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

from src.core.codec import wei
from src.core.refusal import RefusalError
from src.core.scenario import (
    AssertBalanceCommand,
    DecryptCommand,
    DepositCommand,
    KeygenCommand,
    RolloverCommand,
    ScenarioCommand,
    ScenarioScript,
    TransferCommand,
    WithdrawCommand,
)
from src.simulation import actions
from src.simulation.account import LedgerState
from src.simulation.actions import ActionContext
from src.tools.kdf import EthAddress

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AssertionOutcome:
    step: int
    actor: str
    expected: Dict[str, int]
    observed: Dict[str, int]

    @property
    def passed(self) -> bool:
        return all(self.observed[k] == v for k, v in self.expected.items())

    def to_json(self) -> Dict[str, Any]:
        return {
            "step": self.step,
            "actor": self.actor,
            "expected": {k: wei(v) for k, v in self.expected.items()},
            "observed": {k: wei(v) for k, v in self.observed.items()},
            "passed": self.passed,
        }


@dataclass(frozen=True)
class ScenarioReport:
    seed: str
    steps: Tuple[Dict[str, Any], ...]
    assertions: Tuple[AssertionOutcome, ...]
    final_state: LedgerState

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_json(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "passed": self.passed,
            "steps": list(self.steps),
            "assertions": [a.to_json() for a in self.assertions],
            "total_wrapped": wei(self.final_state.total_wrapped),
        }


def _summarize(step: int, record: Dict[str, Any]) -> Dict[str, Any]:
    # statements and calldata stay out of the report; the state file holds the result
    summary = {k: v for k, v in record.items() if k not in ("statement", "calldata", "delta", "sk")}
    summary["step"] = step
    return summary


def _execute(state: LedgerState, ctx: ActionContext, command: ScenarioCommand) -> Tuple[LedgerState, Dict[str, Any]]:
    if isinstance(command, KeygenCommand):
        return state, actions.keygen(state.rng_seed, ctx, command.actor)
    if isinstance(command, DepositCommand):
        result = actions.deposit(state, ctx, command.actor, command.amount)
    elif isinstance(command, TransferCommand):
        result = actions.transfer(
            state, ctx, command.sender, command.receiver, command.amount, auto_rollover=command.auto_rollover
        )
    elif isinstance(command, WithdrawCommand):
        to = EthAddress.from_hex(command.to) if command.to else None
        result = actions.withdraw(state, ctx, command.actor, command.amount, to=to)
    elif isinstance(command, RolloverCommand):
        result = actions.rollover(state, ctx, command.actor)
    elif isinstance(command, DecryptCommand):
        return state, actions.decrypt(state, ctx, command.actor)
    else:
        raise TypeError(f"unhandled scenario command {command.op}")
    return result.state, result.record


def run_scenario(script: ScenarioScript, cweth_address: EthAddress) -> ScenarioReport:
    """
    Execute every command against a fresh state seeded by the script.
    Assertions are collected; the first refused command aborts with context.
    """
    ctx = ActionContext(cweth_address=cweth_address, nonce_mode="seeded")
    state = LedgerState.genesis(script.seed_bytes())
    steps: List[Dict[str, Any]] = []
    outcomes: List[AssertionOutcome] = []

    for step, command in enumerate(script.commands):
        try:
            if isinstance(command, AssertBalanceCommand):
                pending, actual = actions.balances(state, ctx, command.actor)
                expected: Dict[str, int] = {}
                if command.pending is not None:
                    expected["pending"] = command.pending
                if command.actual is not None:
                    expected["actual"] = command.actual
                outcome = AssertionOutcome(
                    step=step,
                    actor=command.actor,
                    expected=expected,
                    observed={"pending": pending, "actual": actual},
                )
                outcomes.append(outcome)
                steps.append({"step": step, "op": command.op, "actor": command.actor, "passed": outcome.passed})
                continue
            state, record = _execute(state, ctx, command)
        except RefusalError as e:
            raise RefusalError(
                code="REFUSE_SCENARIO_STEP_FAILED",
                user_message=f"Scenario step {step} ({command.op}) was refused: {e.user_message}",
                why="A scenario stops at its first hard failure so later steps never run on an unexpected state.",
                details={"step": step, "command": command.model_dump(by_alias=True, mode="json"), "cause": e.to_dict()},
            ) from e
        steps.append(_summarize(step, record))

    report = ScenarioReport(
        seed=script.seed,
        steps=tuple(steps),
        assertions=tuple(outcomes),
        final_state=state,
    )
    logger.info("scenario finished steps=%d assertions=%d passed=%s", len(steps), len(outcomes), report.passed)
    return report

