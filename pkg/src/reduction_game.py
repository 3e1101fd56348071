# src/reduction_game.py
# -----------------------------------------------------------
# The six-process game built from a coloring constraint.
# - Pools T and B, three processes each (T0 T1 T2, B0 B1 B2).
# - Increments I_X{l} (dom X_l, X_{l+1 mod 3}) are played in the
#   fixed cyclic order I_X0 I_X1 I_X2, enforced by turn flags.
# - The environment may CHECK a pair (T_l, B_l); the pair answers
#   a color, after which WIN (controllable) or LOSE (environment)
#   ends the play. LOSE is guarded by the clauses (a)-(f).
# - strategy_from_coloring / coloring_from_strategy turn a
#   coloring into a winning strategy and back.
# -----------------------------------------------------------

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from automata import AsyncAutomaton, GlobalState, enabled, run, step
from coloring import Color, Coloring, ColoringConstraint, satisfies
from errors import BoundExceeded, InputError, InvariantViolation, MissingViewError, PreconditionError, ProbeError
from games import (
    DEFAULT_MAX_LEN,
    DistributedGame,
    Move,
    Monitor,
    RuleStrategy,
    Strategy,
    _moves,
    replay,
    verify_winning,
)
from traces import DependencyAlphabet, Letter, Process, Trace

log = logging.getLogger(__name__)

# ---------- Config ----------

POOLS = ("T", "B")
PAIRS = (0, 1, 2)
PROBE_PAIR = 1
WIN = "WIN"
LOSE = "LOSE"
BUILTIN_GAME = "coloring-game"
BUILTIN_STRATEGY = "coloring-strategy"


class Phase(str, Enum):
    PLAYING = "playing"
    ENDED = "ended"
    CHECKED = "checked"
    ANSWERED = "answered"
    WON = "won"
    LOST = "lost"


class ActionKind(str, Enum):
    NONE = "none"
    INCREMENT = "increment"
    END = "end"
    CHECK = "check"
    ANSWER = "answer"
    WIN = "win"
    LOSE = "lose"


TERMINAL = (Phase.WON, Phase.LOST)


# ---------- Data models ----------

class ProcessLocalState(NamedTuple):
    pool: str
    index: int
    phase: Phase = Phase.PLAYING
    turn_flag: bool = False
    inc_mod4: int = 0
    inc_total_is_one: bool = False
    round_complete: bool = False
    last_action_kind: ActionKind = ActionKind.NONE
    has_ended: bool = False
    answer: Optional[Color] = None

    @property
    def process(self) -> str:
        return f"{self.pool}{self.index}"

    def label(self) -> str:
        text = f"{self.phase.value}/flag={int(self.turn_flag)}/inc%4={self.inc_mod4}"
        if self.answer is not None:
            text += f"/answer={self.answer}"
        return text


class ActionSpec(NamedTuple):
    kind: ActionKind
    pool: Optional[str] = None
    index: Optional[int] = None
    color: Optional[Color] = None


class LoseClause(NamedTuple):
    condition: str  # "a" .. "f"
    pairs: Tuple[int, ...]


def process_name(pool: str, index: int) -> str:
    return f"{pool}{index}"


def increment(pool: str, index: int) -> Letter:
    return f"I_{pool}{index}"


def end(pool: str, index: int) -> Letter:
    return f"END_{pool}{index}"


def check(index: int) -> Letter:
    return f"CHECK_{index}"


def answer(index: int, color: Color) -> Letter:
    return f"ANSWER_{index}_{color}"


def round_index(h: int) -> int:
    if h < 1:
        raise PreconditionError("round_index needs at least one increment")
    return (h - 1) // 2


def _parity(s: ProcessLocalState) -> int:
    # inc_mod4 in {1, 2} -> even round, {3, 0} -> odd round
    return 0 if s.inc_mod4 in (1, 2) else 1


class _LocalStates:
    """Q_p for the rule-based automaton, as a membership test."""

    def __init__(self, pool: str, index: int, final_only: bool = False):
        self.pool, self.index, self.final_only = pool, index, final_only

    def __contains__(self, q: object) -> bool:
        if not isinstance(q, ProcessLocalState) or (q.pool, q.index) != (self.pool, self.index):
            return False
        return q.phase is Phase.WON if self.final_only else True


# ---------- Transition rules ----------

StateMap = Dict[Tuple[str, int], ProcessLocalState]


def _incremented(s: ProcessLocalState) -> ProcessLocalState:
    count = (s.inc_mod4 + 1) % 4
    return s._replace(
        turn_flag=not s.turn_flag,
        inc_mod4=count,
        inc_total_is_one=s.last_action_kind is ActionKind.NONE,
        round_complete=count % 2 == 0,
        last_action_kind=ActionKind.INCREMENT,
    )


def lose_clauses_of(k: ColoringConstraint, states: StateMap) -> List[LoseClause]:
    """Every LOSE clause (a)-(f) that holds in `states`."""
    fired: List[LoseClause] = []
    answered = [
        l for l in PAIRS
        if states[("T", l)].phase is Phase.ANSWERED and states[("B", l)].phase is Phase.ANSWERED
    ]
    for l in answered:
        t, b = states[("T", l)], states[("B", l)]
        if t.inc_total_is_one and b.inc_total_is_one and t.answer not in k.initial:
            fired.append(LoseClause("a", (l,)))
        if t.has_ended and b.has_ended and t.answer not in k.final:
            fired.append(LoseClause("b", (l,)))
    for l_ahead, l in combinations(answered, 2):
        # l_ahead < l: in each pool X_{l_ahead} is in the same round or one round ahead
        c, c_ahead = states[("T", l)].answer, states[("T", l_ahead)].answer
        same_t = _parity(states[("T", l)]) == _parity(states[("T", l_ahead)])
        same_b = _parity(states[("B", l)]) == _parity(states[("B", l_ahead)])
        pair = (c, c_ahead)
        if same_t and same_b and c != c_ahead:
            fired.append(LoseClause("c", (l_ahead, l)))
        if not same_t and not same_b and pair in k.squares:
            fired.append(LoseClause("d", (l_ahead, l)))
        if not same_t and same_b and pair in k.upper:
            fired.append(LoseClause("e", (l_ahead, l)))
        if same_t and not same_b and pair in k.lower:
            fired.append(LoseClause("f", (l_ahead, l)))
    return fired


class _RoundRules:
    """Deterministic transition oracle of the six-process game."""

    def __init__(self, constraint: ColoringConstraint, catalog: Mapping[Letter, ActionSpec]):
        self.constraint = constraint
        self.catalog = catalog

    def __call__(self, letter: Letter, local: Tuple[ProcessLocalState, ...]) -> Optional[Tuple[ProcessLocalState, ...]]:
        spec = self.catalog[letter]
        states: StateMap = {(s.pool, s.index): s for s in local}
        handler = getattr(self, f"_on_{spec.kind.value}")
        updated = handler(spec, states)
        if updated is None:
            return None
        return tuple(updated.get((s.pool, s.index), s) for s in local)

    def _on_increment(self, spec: ActionSpec, states: StateMap) -> Optional[StateMap]:
        me, nxt = (spec.pool, spec.index), (spec.pool, (spec.index + 1) % 3)
        a, b = states[me], states[nxt]
        if a.phase is not Phase.PLAYING or b.phase is not Phase.PLAYING:
            return None
        if not a.turn_flag or b.turn_flag:
            return None
        return {me: _incremented(a), nxt: _incremented(b)}

    def _on_end(self, spec: ActionSpec, states: StateMap) -> Optional[StateMap]:
        me = (spec.pool, spec.index)
        s = states[me]
        if s.phase is not Phase.PLAYING or not s.round_complete:
            return None
        return {me: s._replace(phase=Phase.ENDED, has_ended=True, last_action_kind=ActionKind.END)}

    def _on_check(self, spec: ActionSpec, states: StateMap) -> Optional[StateMap]:
        out = {}
        for pool in POOLS:
            s = states[(pool, spec.index)]
            if s.phase not in (Phase.PLAYING, Phase.ENDED):
                return None
            if s.last_action_kind not in (ActionKind.INCREMENT, ActionKind.END):
                return None
            out[(pool, spec.index)] = s._replace(phase=Phase.CHECKED, last_action_kind=ActionKind.CHECK)
        return out

    def _on_answer(self, spec: ActionSpec, states: StateMap) -> Optional[StateMap]:
        out = {}
        for pool in POOLS:
            s = states[(pool, spec.index)]
            if s.phase is not Phase.CHECKED:
                return None
            out[(pool, spec.index)] = s._replace(
                phase=Phase.ANSWERED, answer=spec.color, last_action_kind=ActionKind.ANSWER
            )
        return out

    def _on_win(self, spec: ActionSpec, states: StateMap) -> Optional[StateMap]:
        if any(s.phase in TERMINAL for s in states.values()):
            return None
        all_ended = all(s.phase is Phase.ENDED for s in states.values())
        some_answered = any(
            states[("T", l)].phase is Phase.ANSWERED and states[("B", l)].phase is Phase.ANSWERED
            for l in PAIRS
        )
        if not (all_ended or some_answered):
            return None
        return {key: s._replace(phase=Phase.WON) for key, s in states.items()}

    def _on_lose(self, spec: ActionSpec, states: StateMap) -> Optional[StateMap]:
        if any(s.phase in TERMINAL for s in states.values()):
            return None
        if not lose_clauses_of(self.constraint, states):
            return None
        return {key: s._replace(phase=Phase.LOST) for key, s in states.items()}


# ---------- Game construction ----------

@dataclass(frozen=True)
class GameArtifacts:
    game: DistributedGame
    constraint: ColoringConstraint
    catalog: Dict[Letter, ActionSpec] = field(repr=False)

    @property
    def alphabet(self) -> DependencyAlphabet:
        return self.game.alphabet

    def letters_of(self, kind: ActionKind) -> List[Letter]:
        return [a for a, spec in self.catalog.items() if spec.kind is kind]

    def local_states(self, g: GlobalState) -> StateMap:
        return {(s.pool, s.index): s for s in g.components}

    def lose_clauses(self, g: GlobalState) -> List[LoseClause]:
        return lose_clauses_of(self.constraint, self.local_states(g))

    def witness_clauses(self, witness: Trace) -> List[LoseClause]:
        """Clauses the LOSE guard cited when `witness` ended with LOSE."""
        if not witness.word or witness.word[-1] != LOSE:
            return []
        # LOSE depends on every letter, so dropping it leaves a normal form
        g = run(self.game.automaton, Trace(self.alphabet, witness.word[:-1]))
        if g is None:
            raise PreconditionError(f"{witness} is not a play")
        return self.lose_clauses(g)

    def increment_counts(self, u: Trace) -> Counter:
        """Increments played by each process in u."""
        counts: Counter = Counter()
        domain = self.alphabet.domain
        for a in u.word:
            if self.catalog[a].kind is ActionKind.INCREMENT:
                counts.update(domain[a])
        return counts


def build_game(k: ColoringConstraint) -> GameArtifacts:
    if not k.colors:
        raise InputError("the coloring constraint has no colors")
    # answer letters embed str(color)
    names = Counter(str(c) for c in k.colors)
    clashes = sorted(name for name, count in names.items() if count > 1)
    if clashes:
        raise InputError(f"colors {clashes} share a name, answer letters would collide")

    catalog: Dict[Letter, ActionSpec] = {}
    domains: Dict[Letter, Tuple[str, ...]] = {}
    for pool in POOLS:
        for l in PAIRS:
            a = increment(pool, l)
            catalog[a] = ActionSpec(ActionKind.INCREMENT, pool, l)
            domains[a] = (process_name(pool, l), process_name(pool, (l + 1) % 3))
    for pool in POOLS:
        for l in PAIRS:
            a = end(pool, l)
            catalog[a] = ActionSpec(ActionKind.END, pool, l)
            domains[a] = (process_name(pool, l),)
    pair_domain = {l: (process_name("T", l), process_name("B", l)) for l in PAIRS}
    for l in PAIRS:
        catalog[check(l)] = ActionSpec(ActionKind.CHECK, None, l)
        domains[check(l)] = pair_domain[l]
    for l in PAIRS:
        for c in k.colors:
            catalog[answer(l, c)] = ActionSpec(ActionKind.ANSWER, None, l, c)
            domains[answer(l, c)] = pair_domain[l]
    everyone = tuple(process_name(p, l) for p in POOLS for l in PAIRS)
    catalog[WIN] = ActionSpec(ActionKind.WIN)
    catalog[LOSE] = ActionSpec(ActionKind.LOSE)
    domains[WIN] = domains[LOSE] = everyone

    alphabet = DependencyAlphabet(list(catalog), domains)
    states, initial, finals = {}, {}, {}
    for pool in POOLS:
        for l in PAIRS:
            p = process_name(pool, l)
            states[p] = _LocalStates(pool, l)
            finals[p] = _LocalStates(pool, l, final_only=True)
            initial[p] = ProcessLocalState(pool, l, turn_flag=(l == 0))
    automaton = AsyncAutomaton(alphabet, states, initial, finals, _RoundRules(k, catalog), name=BUILTIN_GAME)

    environment = frozenset([LOSE] + [check(l) for l in PAIRS])
    game = DistributedGame(automaton, frozenset(catalog) - environment, environment)
    log.info("built %s with %d actions over %d colors", BUILTIN_GAME, len(catalog), len(k.colors))
    return GameArtifacts(game, k, catalog)


# ---------- Strategies ----------

AnswerFn = Callable[[int, int, int], Color]


def _scheduled_increment(pool: str, index: int, h: int) -> Letter:
    """The increment process X_index takes part in after h increments."""
    own, previous = increment(pool, index), increment(pool, (index - 1) % 3)
    if index == 0:
        return own if h % 2 == 0 else previous
    return previous if h % 2 == 0 else own


def strategy_from_answers(
    artifacts: GameArtifacts,
    n: int,
    m: int,
    answer_fn: AnswerFn,
    name: str = "answers",
    params: Optional[Mapping] = None,
) -> RuleStrategy:
    """
    Play n (top) / m (bottom) rounds then END; after a check on pair l
    answer answer_fn(l, x, y) with x, y the round indices of T_l, B_l.
    """
    if n < 1 or m < 1:
        raise InputError("round budgets must be >= 1")
    catalog, domain = artifacts.catalog, artifacts.alphabet.domain
    colors = set(artifacts.constraint.colors)

    def rule(process: Process, view: Trace) -> FrozenSet[Letter]:
        pool, index = process[0], int(process[1:])
        budget = 2 * (n if pool == "T" else m)
        counts: Counter = Counter()
        own_last = ActionKind.NONE
        for a in view.word:
            spec = catalog[a]
            if spec.kind is ActionKind.INCREMENT:
                counts.update(domain[a])
            if process in domain[a]:
                own_last = spec.kind

        allowed = {WIN}
        if own_last is ActionKind.CHECK:
            x = round_index(counts[process_name("T", index)])
            y = round_index(counts[process_name("B", index)])
            color = answer_fn(index, x, y)
            if color not in colors:
                raise InputError(f"answer {color!r} is not a color of the constraint")
            allowed.add(answer(index, color))
        elif own_last in (ActionKind.NONE, ActionKind.INCREMENT):
            h = counts[process]
            if h < budget:
                allowed.add(_scheduled_increment(pool, index, h))
            elif h == budget:
                allowed.add(end(pool, index))
        return frozenset(allowed)

    return RuleStrategy(name, rule, params or {"n": n, "m": m})


def strategy_from_coloring(artifacts: GameArtifacts, f: Coloring) -> RuleStrategy:
    report = satisfies(f, artifacts.constraint)
    if not report:
        raise PreconditionError(f"coloring violates the constraint: {report.violation}")
    return strategy_from_answers(
        artifacts, f.n, f.m, lambda l, x, y: f[x, y], name=BUILTIN_STRATEGY, params={"coloring": f}
    )


def single_answer(artifacts: GameArtifacts, strategy: Strategy) -> RuleStrategy:
    """Keep only the least allowed answer after each check."""
    answers = set(artifacts.letters_of(ActionKind.ANSWER))
    rank, domain = artifacts.alphabet.rank, artifacts.alphabet.domain

    def rule(process: Process, view: Trace) -> FrozenSet[Letter]:
        try:
            chosen = frozenset(strategy.decide(process, view))
        except MissingViewError:
            return frozenset()
        offered = sorted((a for a in chosen & answers if process in domain[a]), key=rank)
        return (chosen - answers) | frozenset(offered[:1])

    return RuleStrategy(f"single-answer({strategy.name})", rule, strategy.params)


# ---------- Probes & extraction ----------

def _pool_prefix(pool: str, rounds: int) -> List[Letter]:
    cycle = [increment(pool, 0), increment(pool, 1), increment(pool, 2)]
    return cycle * rounds + cycle[:2]


def probe_play(x: int, y: int) -> List[Letter]:
    """A linearization of u_{x,y}: x (resp. y) rounds plus I_0 I_1 in each pool."""
    if x < 0 or y < 0:
        raise InputError("probe coordinates must be >= 0")
    return _pool_prefix("T", x) + _pool_prefix("B", y)


def _answers_after(artifacts: GameArtifacts, strategy: Strategy, letters: Sequence[Letter], pair: int) -> List[Color]:
    u, g = replay(artifacts.game, strategy, letters)
    return [
        artifacts.catalog[a].color
        for a, _ in _moves(artifacts.game, strategy, u, g)
        if artifacts.catalog[a].kind is ActionKind.ANSWER and artifacts.catalog[a].index == pair
    ]


def _single(answers: List[Color], what: str) -> Color:
    if not answers:
        raise ProbeError(f"no answer allowed after {what}")
    if len(answers) > 1:
        raise ProbeError(f"{len(answers)} answers allowed after {what}; wrap the strategy with single_answer()")
    return answers[0]


def probe(artifacts: GameArtifacts, strategy: Strategy, x: int, y: int) -> Color:
    letters = probe_play(x, y) + [check(PROBE_PAIR)]
    return _single(_answers_after(artifacts, strategy, letters, PROBE_PAIR), f"u_({x},{y}) CHECK_{PROBE_PAIR}")


def uninterrupted_play(artifacts: GameArtifacts, strategy: Strategy, max_len: int = DEFAULT_MAX_LEN) -> Tuple[Trace, GlobalState]:
    """Longest σ-play made of increments and ENDs only, least letter first."""
    kinds = (ActionKind.INCREMENT, ActionKind.END)
    u = Trace.empty(artifacts.alphabet)
    g = artifacts.game.automaton.initial_state()
    while True:
        moves = [(a, h) for a, h in _moves(artifacts.game, strategy, u, g) if artifacts.catalog[a].kind in kinds]
        if not moves:
            return u, g
        if len(u) >= max_len:
            raise BoundExceeded(f"uninterrupted play longer than {max_len}")
        a, g = moves[0]
        u = u.append(a)


def grid_size(artifacts: GameArtifacts, strategy: Strategy, max_len: int = DEFAULT_MAX_LEN) -> Tuple[int, int]:
    """Completed rounds of T1 and B1 in the maximal uninterrupted play."""
    u, _ = uninterrupted_play(artifacts, strategy, max_len)
    counts = artifacts.increment_counts(u)
    return counts[process_name("T", PROBE_PAIR)] // 2, counts[process_name("B", PROBE_PAIR)] // 2


def coloring_from_strategy(
    artifacts: GameArtifacts,
    strategy: Strategy,
    max_len: int = DEFAULT_MAX_LEN,
    monitor: Optional[Monitor] = None,
) -> Optional[Coloring]:
    verdict = verify_winning(artifacts.game, strategy, max_len, monitor)
    if not verdict.winning:
        log.info("no coloring: strategy %s is %s", strategy.name, verdict.kind.value)
        return None
    n, m = grid_size(artifacts, strategy, max_len)
    if n < 1 or m < 1:
        raise InvariantViolation(f"winning strategy completes no round ({n}x{m})")
    f = Coloring.from_function(n, m, lambda x, y: probe(artifacts, strategy, x, y))
    report = satisfies(f, artifacts.constraint)
    if not report:
        raise InvariantViolation(f"extracted coloring violates the constraint: {report.violation}")
    return f


# ---------- Check families ----------

def probe_check_plays(artifacts: GameArtifacts, pattern: str, x: int, y: int) -> Dict[str, Tuple[List[Letter], int]]:
    """
    The checks relating neighbouring cells: name -> (letters, checked pair).
    `final` takes (x, y) = (n-1, m-1).
    """
    base = probe_play(x, y)
    i_t2, i_b2 = increment("T", 2), increment("B", 2)
    plays = {
        "p1": (base + [check(1)], 1),
        "p2": (base + [i_t2, i_b2, check(2)], 2),
    }
    if pattern == "final":
        plays["p3"] = (base + [end("T", 1), end("B", 1), check(1)], 1)
        return plays
    shifts = {
        "square": ([increment("T", 0), increment("B", 0)], (x + 1, y + 1)),
        "upper": ([increment("T", 0)], (x + 1, y)),
        "lower": ([increment("B", 0)], (x, y + 1)),
    }
    if pattern not in shifts:
        raise InputError(f"unknown pattern {pattern!r}")
    extra, (x2, y2) = shifts[pattern]
    plays["p0'"] = (base + [i_t2, i_b2] + extra + [check(0)], 0)
    plays["p1'"] = (probe_play(x2, y2) + [check(1)], 1)
    return plays


class FamilyReport(NamedTuple):
    pattern: str
    cell: Tuple[int, int]
    answers: Dict[str, Color]
    consistent: bool


def audit_probe_families(artifacts: GameArtifacts, strategy: Strategy, n: int, m: int) -> List[FamilyReport]:
    """Replay every check family on an n x m budget and relate the answers."""
    k = artifacts.constraint
    reports: List[FamilyReport] = []

    def answers_of(pattern: str, x: int, y: int) -> Dict[str, Color]:
        return {
            name: _single(_answers_after(artifacts, strategy, letters, pair), f"{pattern} {name}")
            for name, (letters, pair) in probe_check_plays(artifacts, pattern, x, y).items()
        }

    got = answers_of("final", n - 1, m - 1)
    ok = got["p1"] == got["p2"] == got["p3"] and got["p3"] in k.final
    reports.append(FamilyReport("final", (n - 1, m - 1), got, ok))

    relations = {"square": (k.squares, n - 1, m - 1), "upper": (k.upper, n - 1, m), "lower": (k.lower, n, m - 1)}
    for pattern, (forbidden, nx, ny) in relations.items():
        for x in range(nx):
            for y in range(ny):
                got = answers_of(pattern, x, y)
                ok = (
                    got["p1"] == got["p2"]
                    and got["p0'"] == got["p1'"]
                    and (got["p2"], got["p0'"]) not in forbidden
                )
                reports.append(FamilyReport(pattern, (x, y), got, ok))
    return reports


# ---------- Exploration audit ----------

class GameAudit:
    """
    Exploration monitor for built games. Raises InvariantViolation on the
    first play breaking increment order, the CHECK guard, absorption of
    WIN/LOSE, or parity-vs-round agreement between answered pairs.
    """

    def __init__(self, artifacts: GameArtifacts, forbid_lose: bool = False):
        self.artifacts = artifacts
        self.forbid_lose = forbid_lose
        self.plays = 0
        self.clauses_seen: Counter = Counter()

    def __call__(self, u: Trace, g: GlobalState, moves: List[Move]) -> None:
        self.plays += 1
        arts = self.artifacts
        states = arts.local_states(g)
        counts = arts.increment_counts(u)
        self._increment_order(u, states, counts)
        self._check_guard(g, states)
        self._terminal(u, g, states)
        self._round_parity(u, states, counts)
        if self.forbid_lose or any(a == LOSE for a, _ in moves):
            fired = arts.lose_clauses(g)
            self.clauses_seen.update(c.condition for c in fired)
            if self.forbid_lose and fired:
                raise InvariantViolation(f"LOSE enabled after {u}: {fired}")

    def _increment_order(self, u: Trace, states: StateMap, counts: Counter) -> None:
        for pool in POOLS:
            played = [a for a in u.word if a.startswith(f"I_{pool}")]
            cycle = [increment(pool, l % 3) for l in range(len(played))]
            if played != cycle:
                raise InvariantViolation(f"pool {pool} increments out of order in {u}")
            for l in PAIRS:
                if states[(pool, l)].inc_mod4 != counts[process_name(pool, l)] % 4:
                    raise InvariantViolation(f"{pool}{l} increment counter drifted in {u}")

    def _check_guard(self, g: GlobalState, states: StateMap) -> None:
        aut = self.artifacts.game.automaton
        for l in PAIRS:
            pair = [states[(pool, l)] for pool in POOLS]
            expected = all(
                s.phase in (Phase.PLAYING, Phase.ENDED)
                and s.last_action_kind in (ActionKind.INCREMENT, ActionKind.END)
                for s in pair
            )
            if (step(aut, g, check(l)) is not None) != expected:
                raise InvariantViolation(f"CHECK_{l} guard disagrees with the pair's state")

    def _terminal(self, u: Trace, g: GlobalState, states: StateMap) -> None:
        if any(s.phase in TERMINAL for s in states.values()):
            if enabled(self.artifacts.game.automaton, g):
                raise InvariantViolation(f"transition enabled after WIN/LOSE in {u}")

    def _round_parity(self, u: Trace, states: StateMap, counts: Counter) -> None:
        answered = [
            l for l in PAIRS
            if all(states[(pool, l)].phase in (Phase.ANSWERED, Phase.WON, Phase.LOST) and states[(pool, l)].answer is not None for pool in POOLS)
        ]
        for l_ahead, l in combinations(answered, 2):
            for pool in POOLS:
                r_ahead = round_index(counts[process_name(pool, l_ahead)])
                r = round_index(counts[process_name(pool, l)])
                if r_ahead - r not in (0, 1):
                    raise InvariantViolation(f"{pool}{l_ahead} is {r_ahead - r} rounds ahead of {pool}{l} in {u}")
                same_parity = _parity(states[(pool, l_ahead)]) == _parity(states[(pool, l)])
                if same_parity != (r_ahead == r):
                    raise InvariantViolation(f"round parity of {pool}{l_ahead}/{pool}{l} disagrees with counts in {u}")
