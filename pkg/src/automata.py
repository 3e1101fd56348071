# src/automata.py
# -----------------------------------------------------------
# Deterministic asynchronous automata.
# - One local state per process; a letter reads and rewrites
#   only the states of the processes in its domain.
# - Transitions come from an oracle: either an explicit table
#   (TransitionTable) or any pure callable with the same shape
#   (the six-process game uses a rule-based one).
# -----------------------------------------------------------

from __future__ import annotations

import logging
from collections.abc import Set as AbstractSet
from dataclasses import dataclass
from typing import Any, Callable, Container, Dict, Hashable, Iterable, List, Mapping, Optional, Tuple

from errors import InputError, InvariantViolation
from traces import DependencyAlphabet, Letter, Process, Trace

log = logging.getLogger(__name__)

State = Hashable
TransitionOracle = Callable[[Letter, Tuple[State, ...]], Optional[Tuple[State, ...]]]


# ---------- Data models ----------

@dataclass(frozen=True)
class GlobalState:
    processes: Tuple[Process, ...]
    components: Tuple[State, ...]

    def __getitem__(self, p: Process) -> State:
        try:
            return self.components[self.processes.index(p)]
        except ValueError:
            raise InputError(f"unknown process {p!r}") from None

    def as_dict(self) -> Dict[Process, State]:
        return dict(zip(self.processes, self.components))

    def __repr__(self) -> str:
        body = ", ".join(f"{p}={q}" for p, q in zip(self.processes, self.components))
        return f"GlobalState({body})"


class TransitionTable:
    """Explicit deterministic table keyed by (letter, states of dom(letter))."""

    def __init__(self, rows: Iterable[Tuple[Letter, Tuple[State, ...], Tuple[State, ...]]] = ()):
        self._table: Dict[Tuple[Letter, Tuple[State, ...]], Tuple[State, ...]] = {}
        for letter, source, target in rows:
            self.add(letter, source, target)

    def add(self, letter: Letter, source: Iterable[State], target: Iterable[State]) -> None:
        key = (letter, tuple(source))
        target = tuple(target)
        if len(target) != len(key[1]):
            raise InputError(f"transition on {letter!r} changes the number of components")
        previous = self._table.get(key)
        if previous is not None and previous != target:
            raise InputError(f"two transitions on {letter!r} from {key[1]} (not deterministic)")
        self._table[key] = target

    def rows(self) -> List[Tuple[Letter, Tuple[State, ...], Tuple[State, ...]]]:
        return [(letter, source, target) for (letter, source), target in self._table.items()]

    def __call__(self, letter: Letter, local: Tuple[State, ...]) -> Optional[Tuple[State, ...]]:
        return self._table.get((letter, local))

    def __len__(self) -> int:
        return len(self._table)


class AsyncAutomaton:
    """
    States and finals are containers per process: plain sets for table
    automata, membership predicates for rule-based ones.
    """

    def __init__(
        self,
        alphabet: DependencyAlphabet,
        states: Mapping[Process, Container],
        initial: Mapping[Process, State],
        finals: Mapping[Process, Container],
        transitions: TransitionOracle,
        name: Optional[str] = None,
    ):
        processes = alphabet.processes
        for label, mapping in (("states", states), ("initial", initial), ("finals", finals)):
            if set(mapping) != set(processes):
                raise InputError(f"{label} must cover exactly the processes {list(processes)}")
        for p in processes:
            if initial[p] not in states[p]:
                raise InputError(f"initial state {initial[p]!r} of process {p!r} is not a state")
            if isinstance(finals[p], AbstractSet) and isinstance(states[p], AbstractSet):
                if not finals[p] <= states[p]:
                    raise InputError(f"final states of process {p!r} are not all states")

        self.alphabet = alphabet
        self.processes: Tuple[Process, ...] = processes
        self.states = dict(states)
        self.initial = dict(initial)
        self.finals = dict(finals)
        self.transitions = transitions
        self.name = name
        # component slots touched by each letter, in process order
        self.slots: Dict[Letter, Tuple[int, ...]] = {
            a: tuple(i for i, p in enumerate(processes) if p in alphabet.domain[a])
            for a in alphabet.letters
        }

    def initial_state(self) -> GlobalState:
        return GlobalState(self.processes, tuple(self.initial[p] for p in self.processes))

    def domain_order(self, a: Letter) -> Tuple[Process, ...]:
        return tuple(self.processes[i] for i in self.slots[a])

    def is_final(self, g: GlobalState) -> bool:
        return all(q in self.finals[p] for p, q in zip(self.processes, g.components))

    def __repr__(self) -> str:
        return f"AsyncAutomaton({self.name or 'anonymous'}, processes={list(self.processes)})"


# ---------- Operations ----------

def step(aut: AsyncAutomaton, g: GlobalState, a: Letter) -> Optional[GlobalState]:
    try:
        slots = aut.slots[a]
    except KeyError:
        raise InputError(f"unknown letter {a!r}") from None
    comps = g.components
    succ = aut.transitions(a, tuple(comps[i] for i in slots))
    if succ is None:
        return None
    if len(succ) != len(slots):
        raise InvariantViolation(f"oracle for {a!r} returned {len(succ)} states for {len(slots)} processes")
    updated: List[Any] = list(comps)
    for i, q in zip(slots, succ):
        updated[i] = q
    return GlobalState(g.processes, tuple(updated))


def run(aut: AsyncAutomaton, u: Trace) -> Optional[GlobalState]:
    if u.alphabet != aut.alphabet:
        raise InputError("trace and automaton use different alphabets")
    g: Optional[GlobalState] = aut.initial_state()
    for a in u.word:
        g = step(aut, g, a)
        if g is None:
            return None
    return g


def is_play(aut: AsyncAutomaton, u: Trace) -> bool:
    return run(aut, u) is not None


def enabled(aut: AsyncAutomaton, g: GlobalState) -> List[Tuple[Letter, GlobalState]]:
    """Every letter with a defined transition from g, in letter order."""
    out = []
    for a in aut.alphabet.letters:
        h = step(aut, g, a)
        if h is not None:
            out.append((a, h))
    return out


def enumerate_plays(aut: AsyncAutomaton, max_len: int) -> Dict[Trace, GlobalState]:
    """All plays of length <= max_len with their global state."""
    root = Trace.empty(aut.alphabet)
    plays = {root: aut.initial_state()}
    frontier = [root]
    for _ in range(max_len):
        nxt = []
        for u in frontier:
            for a, h in enabled(aut, plays[u]):
                w = u.append(a)
                if w not in plays:
                    plays[w] = h
                    nxt.append(w)
        frontier = nxt
    log.debug("enumerated %d plays of %r up to length %d", len(plays), aut, max_len)
    return plays
