# src/traces.py
# -----------------------------------------------------------
# Dependency alphabets and Mazurkiewicz traces.
# - Letters carry a nonempty set of processes (their domain);
#   two letters commute iff their domains are disjoint.
# - A Trace stores the lexicographically least linearization
#   of its class under the alphabet's declared letter order.
# -----------------------------------------------------------

from __future__ import annotations

from collections import Counter
from types import MappingProxyType
from typing import Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, NamedTuple, Sequence, Tuple

from errors import InputError, PreconditionError

Letter = str
Process = Hashable


def _process_key(p: Process):
    return (type(p).__name__, p)


# ---------- Alphabet ----------

class DependencyAlphabet:
    """Ordered letters with process domains. Dependency = intersecting domains."""

    __slots__ = ("letters", "domain", "processes", "_rank")

    def __init__(self, letters: Sequence[Letter], domain: Mapping[Letter, Iterable[Process]]):
        letters = tuple(letters)
        if len(set(letters)) != len(letters):
            raise InputError("alphabet declares a letter twice")
        unknown = set(domain) - set(letters)
        if unknown:
            raise InputError(f"domain given for undeclared letters {sorted(unknown)}")

        dom: Dict[Letter, FrozenSet[Process]] = {}
        for a in letters:
            if a not in domain:
                raise InputError(f"letter {a!r} has no domain")
            procs = frozenset(domain[a])
            if not procs:
                raise InputError(f"letter {a!r} has an empty domain")
            dom[a] = procs

        self.letters: Tuple[Letter, ...] = letters
        self.domain: Dict[Letter, FrozenSet[Process]] = dom
        self.processes: Tuple[Process, ...] = tuple(
            sorted(set().union(*dom.values()), key=_process_key)
        )
        self._rank = {a: i for i, a in enumerate(letters)}

    @classmethod
    def from_domains(cls, domains: Mapping[Letter, Iterable[Process]]) -> "DependencyAlphabet":
        """Letter order follows the mapping's insertion order."""
        return cls(list(domains), domains)

    def __contains__(self, a: object) -> bool:
        return a in self._rank

    @property
    def ranks(self) -> Mapping[Letter, int]:
        """Read-only letter -> position in the declared order."""
        return MappingProxyType(self._rank)

    def rank(self, a: Letter) -> int:
        try:
            return self._rank[a]
        except KeyError:
            raise InputError(f"unknown letter {a!r}") from None

    def dom(self, a: Letter) -> FrozenSet[Process]:
        try:
            return self.domain[a]
        except KeyError:
            raise InputError(f"unknown letter {a!r}") from None

    def dependent(self, a: Letter, b: Letter) -> bool:
        return not self.dom(a).isdisjoint(self.dom(b))

    def independent(self, a: Letter, b: Letter) -> bool:
        return not self.dependent(a, b)

    def check_word(self, word: Iterable[Letter]) -> Tuple[Letter, ...]:
        word = tuple(word)
        for a in word:
            if a not in self._rank:
                raise InputError(f"unknown letter {a!r}")
        return word

    def check_process(self, p: Process) -> Process:
        if p not in self.processes:
            raise InputError(f"unknown process {p!r}")
        return p

    def sort_key(self, word: Sequence[Letter]) -> Tuple[int, Tuple[int, ...]]:
        """Shortlex key, used to pick deterministic witnesses."""
        return (len(word), tuple(self._rank[a] for a in word))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, DependencyAlphabet):
            return NotImplemented
        return self.letters == other.letters and self.domain == other.domain

    def __hash__(self) -> int:
        return hash(self.letters)

    def __repr__(self) -> str:
        body = ", ".join(f"{a}:{sorted(self.domain[a], key=_process_key)}" for a in self.letters)
        return f"DependencyAlphabet({body})"


# ---------- Traces ----------

class Trace:
    """
    Immutable trace in normal form. The constructor trusts `word` to be
    canonical; build traces with normalize(), Trace.empty() or append().
    """

    __slots__ = ("alphabet", "word", "_hash")

    def __init__(self, alphabet: DependencyAlphabet, word: Tuple[Letter, ...]):
        self.alphabet = alphabet
        self.word = word
        self._hash = hash(word)

    @classmethod
    def empty(cls, alphabet: DependencyAlphabet) -> "Trace":
        return cls(alphabet, ())

    def append(self, a: Letter) -> "Trace":
        """u·a in normal form, without renormalizing u."""
        alphabet = self.alphabet
        rank = alphabet.rank(a)
        dom_a = alphabet.domain[a]
        w = self.word

        # a must stay after its last dependent letter
        start = 0
        for i in range(len(w) - 1, -1, -1):
            if not dom_a.isdisjoint(alphabet.domain[w[i]]):
                start = i + 1
                break

        ranks = alphabet.ranks
        j = start
        while j < len(w) and ranks[w[j]] <= rank:
            j += 1
        return Trace(alphabet, w[:j] + (a,) + w[j:])

    def view(self, p: Process) -> "Trace":
        return view(self, p)

    def __len__(self) -> int:
        return len(self.word)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.word)

    def __bool__(self) -> bool:
        return bool(self.word)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Trace):
            return NotImplemented
        return self.word == other.word and self.alphabet == other.alphabet

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return " ".join(self.word) if self.word else "ε"

    def __repr__(self) -> str:
        return f"Trace({self})"


class TraceStats(NamedTuple):
    length: int
    letters: Counter
    per_process: Dict[Process, int]
    domain: FrozenSet[Process]


def _same_alphabet(u: Trace, v: Trace) -> DependencyAlphabet:
    if u.alphabet != v.alphabet:
        raise InputError("traces are over different alphabets")
    return u.alphabet


# ---------- Operations ----------

def normalize(alphabet: DependencyAlphabet, word: Iterable[Letter]) -> Trace:
    """Greedy extraction of the least minimal letter, O(n²)."""
    remaining: List[Letter] = list(alphabet.check_word(word))
    domain, rank = alphabet.domain, alphabet.ranks
    out: List[Letter] = []
    while remaining:
        best = -1
        blocked: set = set()
        for i, b in enumerate(remaining):
            d = domain[b]
            if blocked.isdisjoint(d) and (best < 0 or rank[b] < rank[remaining[best]]):
                best = i
            blocked |= d
        out.append(remaining.pop(best))
    return Trace(alphabet, tuple(out))


def equivalent(alphabet: DependencyAlphabet, w1: Iterable[Letter], w2: Iterable[Letter]) -> bool:
    return normalize(alphabet, w1) == normalize(alphabet, w2)


def concat(u: Trace, v: Trace) -> Trace:
    _same_alphabet(u, v)
    out = u
    for a in v.word:
        out = out.append(a)
    return out


def _occurrence_split(u: Trace, v: Trace) -> Tuple[bool, List[Letter], List[Letter]]:
    """
    Split v's positions into the first |u|_a occurrences of every letter a
    (the candidate copy of u) and the rest. The flag tells whether the
    candidate set is downward closed in v.
    """
    need = Counter(u.word)
    domain = v.alphabet.domain
    taken: List[Letter] = []
    rest: List[Letter] = []
    blocked: set = set()
    closed = True
    for b in v.word:
        if need[b] > 0:
            need[b] -= 1
            taken.append(b)
            if not blocked.isdisjoint(domain[b]):
                closed = False
        else:
            rest.append(b)
            blocked |= domain[b]
    if +need:
        closed = False
    return closed, taken, rest


def is_prefix(u: Trace, v: Trace) -> bool:
    _same_alphabet(u, v)
    if len(u) > len(v):
        return False
    closed, taken, _ = _occurrence_split(u, v)
    # a downward-closed subsequence of a normal form is itself in normal form
    return closed and tuple(taken) == u.word


def residual(u: Trace, v: Trace) -> Trace:
    """The trace w with u·w = v."""
    if not is_prefix(u, v):
        raise PreconditionError(f"{u} is not a prefix of {v}")
    _, _, rest = _occurrence_split(u, v)
    return normalize(v.alphabet, rest)


def is_suffix(u: Trace, v: Trace) -> bool:
    alphabet = _same_alphabet(u, v)
    total, need = Counter(v.word), Counter(u.word)
    if any(need[a] > total[a] for a in need):
        return False
    skip = total - need
    seen: Counter = Counter()
    taken: List[Letter] = []
    touched: set = set()
    for b in v.word:
        seen[b] += 1
        if seen[b] > skip[b]:
            taken.append(b)
            touched |= alphabet.domain[b]
        elif not touched.isdisjoint(alphabet.domain[b]):
            return False
    return normalize(alphabet, taken) == u


def maxima(u: Trace) -> FrozenSet[Letter]:
    domain = u.alphabet.domain
    found = set()
    blocked: set = set()
    for b in reversed(u.word):
        if blocked.isdisjoint(domain[b]):
            found.add(b)
        blocked |= domain[b]
    return frozenset(found)


def is_prime(u: Trace) -> bool:
    return len(maxima(u)) == 1


def last(u: Trace) -> Letter:
    tops = maxima(u)
    if len(tops) != 1:
        raise PreconditionError(f"last() needs a prime trace, {u} has maxima {sorted(tops)}")
    return next(iter(tops))


def are_parallel(u: Trace, v: Trace) -> bool:
    _same_alphabet(u, v)
    if not (is_prime(u) and is_prime(v)):
        raise PreconditionError("are_parallel() needs two prime traces")
    if is_prefix(u, v) or is_prefix(v, u):
        return False
    # the only candidate for a common extension: u followed by v's extra events
    used = Counter(u.word)
    seen: Counter = Counter()
    w = u
    for b in v.word:
        seen[b] += 1
        if seen[b] > used[b]:
            w = w.append(b)
    return is_prefix(v, w)


def view(u: Trace, p: Process) -> Trace:
    """Causal past of process p: the least prefix holding every p-event."""
    alphabet = u.alphabet
    alphabet.check_process(p)
    procs = {p}
    keep: List[Letter] = []
    for b in reversed(u.word):
        d = alphabet.domain[b]
        if not procs.isdisjoint(d):
            keep.append(b)
            procs |= d
    keep.reverse()
    return Trace(alphabet, tuple(keep))


def stats(u: Trace) -> TraceStats:
    alphabet = u.alphabet
    per_process = {p: 0 for p in alphabet.processes}
    for b in u.word:
        for p in alphabet.domain[b]:
            per_process[p] += 1
    return TraceStats(
        length=len(u),
        letters=Counter(u.word),
        per_process=per_process,
        domain=frozenset(p for p, n in per_process.items() if n),
    )
