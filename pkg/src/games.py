# src/games.py
# -----------------------------------------------------------
# Distributed games on asynchronous automata.
# - Strategies decide per process from the causal view only.
# - σ-plays are explored breadth-first over canonical traces.
# - verify_winning: Winning / Losing(witness) / Unknown(bound).
# -----------------------------------------------------------

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from automata import AsyncAutomaton, GlobalState, enabled, run, step
from errors import InputError, InvariantViolation, MissingViewError, PreconditionError
from traces import Letter, Process, Trace

log = logging.getLogger(__name__)

# ---------- Config ----------

DEFAULT_MAX_LEN = 100

DEADLOCK_NON_FINAL = "deadlock-non-final"
LOSE_STATE = "lose-state"

Move = Tuple[Letter, GlobalState]
Monitor = Callable[[Trace, GlobalState, List[Move]], None]


# ---------- Data models ----------

@dataclass(frozen=True)
class DistributedGame:
    automaton: AsyncAutomaton
    controllable: FrozenSet[Letter]
    environment: FrozenSet[Letter]

    def __post_init__(self):
        object.__setattr__(self, "controllable", frozenset(self.controllable))
        object.__setattr__(self, "environment", frozenset(self.environment))
        letters = set(self.automaton.alphabet.letters)
        if self.controllable & self.environment:
            raise InputError(f"letters both controllable and environment: {sorted(self.controllable & self.environment)}")
        if self.controllable | self.environment != letters:
            missing = letters - (self.controllable | self.environment)
            extra = (self.controllable | self.environment) - letters
            raise InputError(f"controllable/environment must partition the alphabet (missing {sorted(missing)}, extra {sorted(extra)})")

    @property
    def alphabet(self):
        return self.automaton.alphabet


class Strategy(ABC):
    name = "strategy"
    params: Mapping[str, Any] = {}

    @abstractmethod
    def decide(self, process: Process, view: Trace) -> Iterable[Letter]:
        """Letters process `process` allows after its causal view `view`."""

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"


class TableStrategy(Strategy):
    name = "table"

    def __init__(self, table: Mapping[Process, Mapping[Tuple[Letter, ...], Iterable[Letter]]]):
        self.table = {p: {tuple(k): frozenset(v) for k, v in rows.items()} for p, rows in table.items()}

    def decide(self, process: Process, view: Trace) -> FrozenSet[Letter]:
        try:
            return self.table[process][view.word]
        except KeyError:
            raise MissingViewError(f"no entry for process {process!r} at view {view}") from None


class RuleStrategy(Strategy):
    def __init__(self, name: str, rule: Callable[[Process, Trace], Iterable[Letter]], params: Optional[Mapping[str, Any]] = None):
        self.name = name
        self.rule = rule
        self.params = dict(params or {})

    def decide(self, process: Process, view: Trace) -> Iterable[Letter]:
        return self.rule(process, view)


class BlockAll(Strategy):
    name = "block-all"

    def decide(self, process: Process, view: Trace) -> FrozenSet[Letter]:
        return frozenset()


class VerdictKind(str, Enum):
    WINNING = "winning"
    LOSING = "losing"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class VerificationVerdict:
    kind: VerdictKind
    depth: int
    explored: int
    witness: Optional[Trace] = None
    reason: Optional[str] = None
    maximal: FrozenSet[Trace] = field(default_factory=frozenset, repr=False)

    @property
    def winning(self) -> bool:
        return self.kind is VerdictKind.WINNING


@dataclass(frozen=True)
class SigmaPlays:
    plays: Dict[Trace, GlobalState] = field(repr=False)
    complete: bool
    maximal: FrozenSet[Trace] = field(repr=False)
    max_len: int

    def __len__(self) -> int:
        return len(self.plays)

    def __contains__(self, u: object) -> bool:
        return u in self.plays


# ---------- Engine ----------

def _decisions(game: DistributedGame, strategy: Strategy, u: Trace) -> Callable[[Process], FrozenSet[Letter]]:
    cache: Dict[Process, FrozenSet[Letter]] = {}
    env = game.environment

    def decision(p: Process) -> FrozenSet[Letter]:
        if p not in cache:
            try:
                chosen = frozenset(strategy.decide(p, u.view(p)))
            except MissingViewError:
                chosen = frozenset()
            allowed_p = chosen | env
            if not env <= allowed_p:
                raise InvariantViolation(f"environment letters not allowed by process {p!r}")
            cache[p] = allowed_p
        return cache[p]

    return decision


def _moves(game: DistributedGame, strategy: Strategy, u: Trace, g: GlobalState) -> List[Move]:
    domain = game.alphabet.domain
    env = game.environment
    decision = _decisions(game, strategy, u)
    return [
        (a, h)
        for a, h in enabled(game.automaton, g)
        if a in env or all(a in decision(p) for p in domain[a])
    ]


def allowed(game: DistributedGame, strategy: Strategy, u: Trace, state: Optional[GlobalState] = None) -> FrozenSet[Letter]:
    g = state if state is not None else run(game.automaton, u)
    if g is None:
        raise PreconditionError(f"{u} is not a play")
    return frozenset(a for a, _ in _moves(game, strategy, u, g))


def replay(game: DistributedGame, strategy: Strategy, letters: Sequence[Letter]) -> Tuple[Trace, GlobalState]:
    """Extend ε letter by letter; every letter must be σ-allowed."""
    u = Trace.empty(game.alphabet)
    g = game.automaton.initial_state()
    for i, a in enumerate(letters):
        game.alphabet.rank(a)
        moves = dict(_moves(game, strategy, u, g))
        if a not in moves:
            raise PreconditionError(f"letter {a!r} at position {i} is not allowed after {u}")
        u, g = u.append(a), moves[a]
    return u, g


def enumerate_sigma_plays(
    game: DistributedGame,
    strategy: Strategy,
    max_len: int = DEFAULT_MAX_LEN,
    monitor: Optional[Monitor] = None,
) -> SigmaPlays:
    if max_len < 0:
        raise InputError("max_len must be >= 0")
    root = Trace.empty(game.alphabet)
    plays: Dict[Trace, GlobalState] = {root: game.automaton.initial_state()}
    maximal = set()
    complete = True
    frontier = [root]

    for depth in range(max_len + 1):
        nxt: List[Trace] = []
        for u in frontier:
            g = plays[u]
            moves = _moves(game, strategy, u, g)
            if monitor is not None:
                monitor(u, g, moves)
            if not moves:
                maximal.add(u)
                continue
            if depth == max_len:
                complete = False
                continue
            for a, h in moves:
                w = u.append(a)
                known = plays.get(w)
                if known is None:
                    plays[w] = h
                    nxt.append(w)
                elif known != h:
                    raise InvariantViolation(f"two linearizations of {w} reach different states")
        frontier = nxt
        if not frontier:
            break

    log.info("explored %d σ-plays (%d maximal, complete=%s)", len(plays), len(maximal), complete)
    return SigmaPlays(plays=plays, complete=complete, maximal=frozenset(maximal), max_len=max_len)


def verify_winning(
    game: DistributedGame,
    strategy: Strategy,
    max_len: int = DEFAULT_MAX_LEN,
    monitor: Optional[Monitor] = None,
) -> VerificationVerdict:
    aut = game.automaton
    sigma = enumerate_sigma_plays(game, strategy, max_len, monitor)
    losers = [u for u in sigma.maximal if not aut.is_final(sigma.plays[u])]
    if losers:
        witness = min(losers, key=lambda u: game.alphabet.sort_key(u.word))
        reason = DEADLOCK_NON_FINAL if enabled(aut, sigma.plays[witness]) else LOSE_STATE
        log.info("strategy %s loses: %s (%s)", strategy.name, witness, reason)
        return VerificationVerdict(VerdictKind.LOSING, max_len, len(sigma), witness, reason)
    if not sigma.complete:
        return VerificationVerdict(VerdictKind.UNKNOWN, max_len, len(sigma))
    return VerificationVerdict(VerdictKind.WINNING, max_len, len(sigma), maximal=sigma.maximal)


def search_strategy(
    game: DistributedGame,
    candidates: Iterable[Strategy],
    max_len: int = DEFAULT_MAX_LEN,
) -> Optional[Strategy]:
    for i, candidate in enumerate(candidates):
        verdict = verify_winning(game, candidate, max_len)
        log.debug("candidate %d (%s): %s", i, candidate.name, verdict.kind.value)
        if verdict.winning:
            return candidate
    return None
