"""
cli.py

Scenario-driving command line over the confidential ledger.

Run:
    python -m src.ui.cli --state data/cweth_state.json init
    python -m src.ui.cli deposit alice 100
    python -m src.ui.cli transfer alice bob 40
    python -m src.ui.cli rollover bob
    python -m src.ui.cli decrypt bob

Output is JSON-lines on stdout (one record per command). Exit codes:
0 ok, 1 refusal, 2 usage error, 3 internal error, 4 scenario assertions failed.
"""

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import click
import orjson

from src.core.codec import hex_bytes, parse_hex_bytes, wei
from src.core.refusal import RefusalError
from src.core.scenario import ScenarioScript
from src.core.settings import get_settings
from src.simulation import actions
from src.simulation.account import LedgerState
from src.simulation.actions import ActionContext, ActionResult
from src.simulation.persistence import dump_state, load_state, save_state, state_lock
from src.simulation.prover import ProofBundle
from src.simulation.run_scenario import run_scenario
from src.tools.kdf import EthAddress

logger = logging.getLogger(__name__)

EXIT_REFUSED = 1
EXIT_INTERNAL = 3
EXIT_ASSERTIONS_FAILED = 4


@dataclass(frozen=True)
class AppContext:
    state_path: Path
    seed: Optional[bytes]
    pretty: bool
    actions: ActionContext

    def emit(self, record: Dict[str, Any]) -> None:
        click.echo(_dumps(record, self.pretty))


def _dumps(record: Dict[str, Any], pretty: bool) -> str:
    option = orjson.OPT_SORT_KEYS | (orjson.OPT_INDENT_2 if pretty else 0)
    return orjson.dumps(record, option=option).decode("utf-8")


class RefusalAwareGroup(click.Group):
    """Maps refusals and unexpected errors to one JSON error line plus an exit code."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except (click.exceptions.ClickException, click.exceptions.Exit, click.exceptions.Abort):
            raise
        except RefusalError as e:
            click.echo(_dumps(e.to_dict(), _pretty(ctx)))
            ctx.exit(EXIT_REFUSED)
        except Exception as e:
            logger.debug("internal error", exc_info=True)
            click.echo(_dumps({
                "error": "internal",
                "code": "INTERNAL_ERROR",
                "user_message": f"{type(e).__name__}: {e}",
                "why": "Unexpected failure; rerun with --log-level DEBUG for details.",
                "missing": [],
                "details": {},
            }, _pretty(ctx)))
            ctx.exit(EXIT_INTERNAL)


def _pretty(ctx: click.Context) -> bool:
    app = ctx.find_object(AppContext)
    return bool(app and app.pretty)


def _load_bundle(path: Optional[Path], kind: str) -> Optional[ProofBundle]:
    if path is None:
        return None
    try:
        doc = orjson.loads(path.read_bytes())
    except orjson.JSONDecodeError as e:
        raise RefusalError(
            code="REFUSE_PROOF_BUNDLE_INVALID",
            user_message=f"Proof file {path} is not valid JSON.",
            why="A proof bundle is {\"kind\", \"statement\", \"witness\"} as written by `prove`.",
            details={"error": str(e)},
        ) from None
    return ProofBundle.from_json(doc, kind)


def _apply(app: AppContext, transition: Callable[[LedgerState], ActionResult]) -> None:
    with state_lock(app.state_path):
        state = load_state(app.state_path)
        result = transition(state)
        save_state(result.state, app.state_path)
    app.emit(result.record)


def _read(app: AppContext, view: Callable[[LedgerState], Dict[str, Any]]) -> None:
    app.emit(view(load_state(app.state_path)))


def _write_json(path: Path, doc: Dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(orjson.dumps(doc, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2) + b"\n")


# ---------------------------
# Group
# ---------------------------
@click.group(cls=RefusalAwareGroup)
@click.option("--state", "state_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Ledger state file (default: CWETH_STATE_PATH or data/cweth_state.json).")
@click.option("--seed", default=None, help="32-byte hex seed for `init` (and `keygen` without a state).")
@click.option("--cweth-address", default=None, help="20-byte hex contract address bound into key derivation.")
@click.option("--pretty", is_flag=True, help="Indent JSON output.")
@click.option("--log-level", default=None, help="Logging level for stderr (default: CWETH_LOG_LEVEL).")
@click.pass_context
def cli(ctx: click.Context, state_path: Optional[Path], seed: Optional[str], cweth_address: Optional[str],
        pretty: bool, log_level: Optional[str]) -> None:
    """cWETH confidential ledger simulator."""
    settings = get_settings()
    logging.basicConfig(
        level=(log_level or settings.log_level).upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = AppContext(
        state_path=state_path or settings.state_path,
        seed=parse_hex_bytes(seed, length=32, name="seed") if seed else None,
        pretty=pretty,
        actions=ActionContext(
            cweth_address=EthAddress.from_hex(cweth_address or settings.cweth_address),
            nonce_mode=settings.nonce_mode,
        ),
    )


# ---------------------------
# State lifecycle
# ---------------------------
@cli.command()
@click.option("--force", is_flag=True, help="Overwrite an existing state file.")
@click.pass_obj
def init(app: AppContext, force: bool) -> None:
    """Create an empty ledger state."""
    if app.state_path.exists() and not force:
        raise RefusalError(
            code="REFUSE_STATE_EXISTS",
            user_message=f"State file {app.state_path} already exists.",
            why="init would discard the existing chain; pass --force to overwrite.",
            details={"state": str(app.state_path)},
        )
    seed = app.seed or bytes.fromhex(get_settings().seed[2:])
    state = LedgerState.genesis(seed)
    with state_lock(app.state_path):
        save_state(state, app.state_path)
    app.emit({"op": "init", "state": str(app.state_path), "total_wrapped": wei(0), "rng_seed": hex_bytes(seed)})


@cli.command()
@click.argument("actor")
@click.pass_obj
def keygen(app: AppContext, actor: str) -> None:
    """Derive an actor's address and babyJubJub key pair."""
    seed = app.seed if app.seed is not None else load_state(app.state_path).rng_seed
    app.emit(actions.keygen(seed, app.actions, actor))


# ---------------------------
# Transitions
# ---------------------------
amount_argument = click.argument("amount", type=click.IntRange(min=0))
proof_option = click.option("--proof", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
                            help="Apply this proof bundle instead of building one.")


@cli.command()
@click.argument("actor")
@amount_argument
@proof_option
@click.pass_obj
def deposit(app: AppContext, actor: str, amount: int, proof: Optional[Path]) -> None:
    """Wrap AMOUNT wei into ACTOR's actual balance."""
    bundle = _load_bundle(proof, "deposit")
    _apply(app, lambda s: actions.deposit(s, app.actions, actor, amount, bundle=bundle))


@cli.command()
@click.argument("sender")
@click.argument("receiver")
@amount_argument
@click.option("--auto-rollover", is_flag=True, help="Fold the sender's pending balance in after the debit.")
@proof_option
@click.pass_obj
def transfer(app: AppContext, sender: str, receiver: str, amount: int, auto_rollover: bool,
             proof: Optional[Path]) -> None:
    """Confidentially send AMOUNT from SENDER to RECEIVER's pending balance."""
    bundle = _load_bundle(proof, "transfer")
    _apply(app, lambda s: actions.transfer(s, app.actions, sender, receiver, amount,
                                           auto_rollover=auto_rollover, bundle=bundle))


@cli.command()
@click.argument("actor")
@amount_argument
@click.option("--to", "to", default=None, help="Receiver address of the unwrapped ETH (default: the actor).")
@proof_option
@click.pass_obj
def withdraw(app: AppContext, actor: str, amount: int, to: Optional[str], proof: Optional[Path]) -> None:
    """Unwrap AMOUNT wei from ACTOR's actual balance."""
    bundle = _load_bundle(proof, "withdraw")
    receiver = EthAddress.from_hex(to) if to else None
    _apply(app, lambda s: actions.withdraw(s, app.actions, actor, amount, to=receiver, bundle=bundle))


@cli.command()
@click.argument("actor")
@click.pass_obj
def rollover(app: AppContext, actor: str) -> None:
    """Move ACTOR's pending balance into the actual balance."""
    _apply(app, lambda s: actions.rollover(s, app.actions, actor))


# ---------------------------
# Views
# ---------------------------
@cli.command()
@click.argument("actor")
@click.pass_obj
def decrypt(app: AppContext, actor: str) -> None:
    """Decrypt ACTOR's pending and actual balances (owner view)."""
    _read(app, lambda s: actions.decrypt(s, app.actions, actor))


@cli.command()
@click.argument("actor")
@click.pass_obj
def show(app: AppContext, actor: str) -> None:
    """Print ACTOR's public account storage."""
    _read(app, lambda s: actions.show(s, app.actions, actor))


# ---------------------------
# Proof bundles
# ---------------------------
@cli.group()
def prove() -> None:
    """Build a proof bundle without applying it."""


out_option = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
                          help="Write the bundle to this file.")


def _prove(app: AppContext, out: Optional[Path], build: Callable[[LedgerState], ActionResult]) -> None:
    # nonces are consumed even if the bundle is never applied
    with state_lock(app.state_path):
        state = load_state(app.state_path)
        result = build(state)
        save_state(result.state, app.state_path)
    if out is not None:
        _write_json(out, result.record["bundle"])
    app.emit(result.record)


@prove.command("deposit")
@click.argument("actor")
@amount_argument
@out_option
@click.pass_obj
def prove_deposit(app: AppContext, actor: str, amount: int, out: Optional[Path]) -> None:
    _prove(app, out, lambda s: actions.prove_deposit(s, app.actions, actor, amount))


@prove.command("transfer")
@click.argument("sender")
@click.argument("receiver")
@amount_argument
@out_option
@click.pass_obj
def prove_transfer(app: AppContext, sender: str, receiver: str, amount: int, out: Optional[Path]) -> None:
    _prove(app, out, lambda s: actions.prove_transfer(s, app.actions, sender, receiver, amount))


@prove.command("withdraw")
@click.argument("actor")
@amount_argument
@click.option("--to", "to", default=None)
@out_option
@click.pass_obj
def prove_withdraw(app: AppContext, actor: str, amount: int, to: Optional[str], out: Optional[Path]) -> None:
    receiver = EthAddress.from_hex(to) if to else None
    _prove(app, out, lambda s: actions.prove_withdraw(s, app.actions, actor, amount, to=receiver))


# ---------------------------
# Scenarios
# ---------------------------
@cli.command()
@click.argument("script", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--report", "report_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Also write the report to this file.")
@click.option("--state-out", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Write the scenario's final ledger state to this file.")
@click.pass_obj
def run(app: AppContext, script: Path, report_path: Optional[Path], state_out: Optional[Path]) -> None:
    """Run a scenario script against a fresh state."""
    parsed = ScenarioScript.parse(script.read_bytes())
    report = run_scenario(parsed, app.actions.cweth_address)
    doc = report.to_json()
    if report_path is not None:
        _write_json(report_path, doc)
    if state_out is not None:
        state_out.parent.mkdir(parents=True, exist_ok=True)
        state_out.write_bytes(dump_state(report.final_state))
    app.emit({"op": "run", "script": str(script), **doc})
    if not report.passed:
        click.get_current_context().exit(EXIT_ASSERTIONS_FAILED)


if __name__ == "__main__":
    cli()
