# src/cli.py
# -----------------------------------------------------------
# Command-line front end.
# - python src/cli.py [-v] <group> <command> ...
# - Exactly one JSON document on stdout, diagnostics on stderr.
# - Exit codes: 0 found/winning/true, 1 not-found/losing/false,
#   2 unknown, bound exceeded or failed invariant,
#   3 input, format or any other domain error.
# -----------------------------------------------------------

from __future__ import annotations

import logging
import re
import sys
from typing import Any, Dict, List, Optional, Sequence

import click

import documents
from coloring import DEFAULT_MAX_M, DEFAULT_MAX_N, satisfies, solve
from errors import BoundExceeded, InputError, InvariantViolation, PreconditionError, ReductionError
from games import DEFAULT_MAX_LEN, VerdictKind, replay, verify_winning
from pcp import brute_force, check_solution, to_coloring_constraint
from reduction_game import GameArtifacts, GameAudit, build_game, coloring_from_strategy, single_answer
from traces import view

# ---------- Config ----------

PROG_NAME = "causal-games"
DEFAULT_PCP_MAX_LEN = 3

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_UNKNOWN = 2
EXIT_INPUT = 3

VERDICT_EXIT = {
    VerdictKind.WINNING: EXIT_OK,
    VerdictKind.LOSING: EXIT_NEGATIVE,
    VerdictKind.UNKNOWN: EXIT_UNKNOWN,
}

FILE = click.Path(exists=True, dir_okay=False)

log = logging.getLogger(__name__)


def _out(doc: Dict[str, Any], code: int = EXIT_OK) -> int:
    click.echo(documents.dumps(doc))
    return code


def _split(text: str) -> List[str]:
    return [t for t in re.split(r"[,\s]+", text.strip()) if t]


def _parse_seq(text: str) -> List[int]:
    try:
        return [int(t) for t in _split(text)]
    except ValueError:
        raise InputError(f"--seq expects comma-separated tile indices, got {text!r}") from None


# ---------- Root ----------

@click.group()
@click.option("-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG logging on stderr.")
def cli(verbose: int) -> None:
    """Traces, distributed games and the coloring reductions."""
    level = logging.WARNING if verbose == 0 else (logging.INFO if verbose == 1 else logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)


# ---------- trace ----------

@cli.group()
def trace() -> None:
    """Mazurkiewicz traces."""


@trace.command("normalize")
@click.argument("path", type=FILE)
def trace_normalize(path: str) -> int:
    u = documents.parse_trace(documents.load(path))
    return _out(documents.emit_trace(u))


@trace.command("view")
@click.option("--process", "process", required=True, help="Process whose causal view is taken.")
@click.argument("path", type=FILE)
def trace_view(process: str, path: str) -> int:
    u = documents.parse_trace(documents.load(path))
    p = documents.process_of(u.alphabet, process, "--process")
    return _out(documents.emit_trace(view(u, p)))


# ---------- pcp ----------

@cli.group()
def pcp() -> None:
    """Post correspondence instances."""


@pcp.command("check")
@click.argument("path", type=FILE)
@click.option("--seq", required=True, help="1-based tile indices, e.g. 1,2.")
def pcp_check(path: str, seq: str) -> int:
    inst = documents.parse_pcp(documents.load(path))
    indices = _parse_seq(seq)
    ok = check_solution(inst, indices)
    return _out(documents.verdict_document("true" if ok else "false", witness=indices), EXIT_OK if ok else EXIT_NEGATIVE)


@pcp.command("solve")
@click.argument("path", type=FILE)
@click.option("--max-len", type=click.IntRange(min=1), default=DEFAULT_PCP_MAX_LEN, show_default=True)
def pcp_solve(path: str, max_len: int) -> int:
    inst = documents.parse_pcp(documents.load(path))
    found = brute_force(inst, max_len)
    if found is None:
        return _out(documents.verdict_document("not-found", depth=max_len), EXIT_NEGATIVE)
    return _out(documents.verdict_document("found", witness=found, depth=max_len))


@pcp.command("to-bcp")
@click.argument("path", type=FILE)
def pcp_to_bcp(path: str) -> int:
    inst = documents.parse_pcp(documents.load(path))
    return _out(documents.emit_constraint(to_coloring_constraint(inst)))


# ---------- bcp ----------

@cli.group()
def bcp() -> None:
    """Bipartite coloring constraints."""


@bcp.command("check")
@click.argument("constraint_path", type=FILE)
@click.argument("coloring_path", type=FILE)
def bcp_check(constraint_path: str, coloring_path: str) -> int:
    k = documents.parse_constraint(documents.load(constraint_path))
    f = documents.parse_coloring(documents.load(coloring_path))
    report = satisfies(f, k)
    if report:
        return _out(documents.verdict_document("true"))
    return _out(
        documents.verdict_document("false", violation=documents.emit_violation(report.violation)),
        EXIT_NEGATIVE,
    )


@bcp.command("solve")
@click.argument("path", type=FILE)
@click.option("--max-n", type=click.IntRange(min=1), default=DEFAULT_MAX_N, show_default=True)
@click.option("--max-m", type=click.IntRange(min=1), default=DEFAULT_MAX_M, show_default=True)
def bcp_solve(path: str, max_n: int, max_m: int) -> int:
    k = documents.parse_constraint(documents.load(path))
    f = solve(k, max_n, max_m)
    if f is None:
        return _out(documents.verdict_document("not-found"), EXIT_NEGATIVE)
    return _out(documents.emit_coloring(f))


@bcp.command("to-game")
@click.argument("path", type=FILE)
def bcp_to_game(path: str) -> int:
    k = documents.parse_constraint(documents.load(path))
    return _out(documents.emit_game(build_game(k)))


# ---------- game ----------

@cli.group()
def game() -> None:
    """Distributed games and causal-memory strategies."""


def _load_game_and_strategy(game_path: str, strategy_path: str):
    g = documents.parse_game(documents.load(game_path))
    return g, documents.parse_strategy(documents.load(strategy_path), g)


@game.command("verify")
@click.argument("game_path", type=FILE)
@click.argument("strategy_path", type=FILE)
@click.option("--max-depth", type=click.IntRange(min=0), default=DEFAULT_MAX_LEN, show_default=True)
def game_verify(game_path: str, strategy_path: str, max_depth: int) -> int:
    g, strategy = _load_game_and_strategy(game_path, strategy_path)
    monitor = GameAudit(g) if isinstance(g, GameArtifacts) else None
    verdict = verify_winning(documents.game_of(g), strategy, max_depth, monitor)

    clauses: Optional[List[str]] = None
    if isinstance(g, GameArtifacts) and verdict.witness is not None:
        clauses = sorted({c.condition for c in g.witness_clauses(verdict.witness)})
    log.info("verdict %s after %d plays", verdict.kind.value, verdict.explored)
    return _out(documents.emit_verdict(verdict, clauses), VERDICT_EXIT[verdict.kind])


@game.command("extract-coloring")
@click.argument("game_path", type=FILE)
@click.argument("strategy_path", type=FILE)
@click.option("--max-depth", type=click.IntRange(min=0), default=DEFAULT_MAX_LEN, show_default=True)
def game_extract_coloring(game_path: str, strategy_path: str, max_depth: int) -> int:
    g, strategy = _load_game_and_strategy(game_path, strategy_path)
    if not isinstance(g, GameArtifacts):
        raise InputError("extract-coloring needs a coloring-game document")
    chosen = single_answer(g, strategy)
    verdict = verify_winning(g.game, chosen, max_depth)
    if not verdict.winning:
        return _out(documents.emit_verdict(verdict), VERDICT_EXIT[verdict.kind])
    f = coloring_from_strategy(g, chosen, max_depth)
    return _out(documents.emit_coloring(f))


@game.command("simulate")
@click.argument("game_path", type=FILE)
@click.argument("strategy_path", type=FILE)
@click.option("--interactive", type=click.Choice(["no"]), default="no", show_default=True)
@click.option("--script", default="", help="Letters to play, comma or space separated.")
def game_simulate(game_path: str, strategy_path: str, interactive: str, script: str) -> int:
    g, strategy = _load_game_and_strategy(game_path, strategy_path)
    dg = documents.game_of(g)
    letters = _split(script)
    try:
        u, state = replay(dg, strategy, letters)
    except PreconditionError as e:
        click.echo(f"not allowed: {e}", err=True)
        return _out(documents.verdict_document("false", witness=letters, reason=str(e)), EXIT_NEGATIVE)
    return _out(documents.emit_trace(u, state))


# ---------- Entry point ----------

def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, prog_name=PROG_NAME, standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_INPUT
    except click.exceptions.Abort:
        return EXIT_INPUT
    except BoundExceeded as e:
        click.echo(f"BoundExceeded: {e}", err=True)
        return EXIT_UNKNOWN
    except InvariantViolation as e:
        click.echo(f"InvariantViolation: {e}", err=True)
        return EXIT_UNKNOWN
    except ReductionError as e:
        click.echo(f"{type(e).__name__}: {e}", err=True)
        return EXIT_INPUT
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
