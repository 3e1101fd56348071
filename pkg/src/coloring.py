# src/coloring.py
# -----------------------------------------------------------
# Finite bipartite colorings f : [n] x [m] -> C.
# - Cells are stored x-major: cells[x * m + y] = f(x, y).
# - patterns(): squares (x,y)->(x+1,y+1), upper (x,y)->(x+1,y),
#   lower (x,y)->(x,y+1).
# - solve(): grid sizes by increasing n+m then n; arc
#   consistency, then backtracking in cell order with forward
#   checking on numpy boolean domains.
# -----------------------------------------------------------

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from errors import InputError

log = logging.getLogger(__name__)

# ---------- Config ----------

DEFAULT_MAX_N = 4
DEFAULT_MAX_M = 4

Color = Hashable
Pair = Tuple[Color, Color]

# successor offsets and the relation they are checked against
NEIGHBOURS = ((1, 0, "upper"), (0, 1, "lower"), (1, 1, "squares"))


# ---------- Data models ----------

@dataclass(frozen=True)
class ColoringConstraint:
    colors: Tuple[Color, ...]
    initial: FrozenSet[Color]
    final: FrozenSet[Color]
    squares: FrozenSet[Pair] = frozenset()
    upper: FrozenSet[Pair] = frozenset()
    lower: FrozenSet[Pair] = frozenset()
    provenance: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        colors = tuple(self.colors)
        if len(set(colors)) != len(colors):
            raise InputError("color set declares a color twice")
        object.__setattr__(self, "colors", colors)
        known = set(colors)
        for name in ("initial", "final"):
            values = frozenset(getattr(self, name))
            if not values <= known:
                raise InputError(f"{name} colors outside C: {sorted(map(str, values - known))}")
            object.__setattr__(self, name, values)
        for name in ("squares", "upper", "lower"):
            pairs = frozenset(tuple(p) for p in getattr(self, name))
            for pair in pairs:
                if len(pair) != 2 or not set(pair) <= known:
                    raise InputError(f"{name} pattern {pair!r} is not a pair of colors of C")
            object.__setattr__(self, name, pairs)

    def index(self) -> Dict[Color, int]:
        return {c: i for i, c in enumerate(self.colors)}

    def relation(self, name: str) -> FrozenSet[Pair]:
        return getattr(self, name)

    def ordered(self, values: Iterable[Color]) -> List[Color]:
        rank = self.index()
        return sorted(values, key=rank.__getitem__)

    def ordered_pairs(self, pairs: Iterable[Pair]) -> List[Pair]:
        rank = self.index()
        return sorted(pairs, key=lambda p: (rank[p[0]], rank[p[1]]))


@dataclass(frozen=True)
class Coloring:
    n: int
    m: int
    cells: Tuple[Color, ...]

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise InputError("a coloring needs n >= 1 and m >= 1")
        cells = tuple(self.cells)
        if len(cells) != self.n * self.m:
            raise InputError(f"expected {self.n * self.m} cells, got {len(cells)}")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_function(cls, n: int, m: int, fn: Callable[[int, int], Color]) -> "Coloring":
        return cls(n, m, tuple(fn(x, y) for x in range(n) for y in range(m)))

    def __getitem__(self, xy: Tuple[int, int]) -> Color:
        x, y = xy
        if not (0 <= x < self.n and 0 <= y < self.m):
            raise InputError(f"cell {xy} outside [{self.n}]x[{self.m}]")
        return self.cells[x * self.m + y]

    @property
    def grid(self) -> np.ndarray:
        grid = np.empty((self.n, self.m), dtype=object)
        for i, c in enumerate(self.cells):
            grid[divmod(i, self.m)] = c
        return grid

    def used_colors(self) -> FrozenSet[Color]:
        return frozenset(self.cells)


class Patterns(NamedTuple):
    squares: FrozenSet[Pair]
    upper: FrozenSet[Pair]
    lower: FrozenSet[Pair]


class Violation(NamedTuple):
    clause: str
    cells: Tuple[Tuple[int, int], ...]
    colors: Tuple[Color, ...]


@dataclass(frozen=True)
class Satisfaction:
    ok: bool
    violation: Optional[Violation] = None

    def __bool__(self) -> bool:
        return self.ok


# ---------- Patterns & satisfaction ----------

def _pairs(a: np.ndarray, b: np.ndarray) -> FrozenSet[Pair]:
    return frozenset(zip(a.ravel().tolist(), b.ravel().tolist()))


def patterns(f: Coloring) -> Patterns:
    g = f.grid
    return Patterns(
        squares=_pairs(g[:-1, :-1], g[1:, 1:]),
        upper=_pairs(g[:-1, :], g[1:, :]),
        lower=_pairs(g[:, :-1], g[:, 1:]),
    )


def satisfies(f: Coloring, k: ColoringConstraint) -> Satisfaction:
    outside = f.used_colors() - set(k.colors)
    if outside:
        raise InputError(f"coloring uses colors outside C: {sorted(map(str, outside))}")

    first, final = f[0, 0], f[f.n - 1, f.m - 1]
    if first not in k.initial:
        return Satisfaction(False, Violation("initial", ((0, 0),), (first,)))
    if final not in k.final:
        return Satisfaction(False, Violation("final", ((f.n - 1, f.m - 1),), (final,)))

    for name, dx, dy in (("squares", 1, 1), ("upper", 1, 0), ("lower", 0, 1)):
        forbidden = k.relation(name)
        if not forbidden:
            continue
        for x in range(f.n - dx):
            for y in range(f.m - dy):
                pair = (f[x, y], f[x + dx, y + dy])
                if pair in forbidden:
                    return Satisfaction(False, Violation(name, ((x, y), (x + dx, y + dy)), pair))
    return Satisfaction(True)


# ---------- Solver ----------

class _Compiled:
    """Boolean views of a constraint over color indices."""

    def __init__(self, k: ColoringConstraint):
        self.colors = k.colors
        d = len(k.colors)
        index = k.index()
        self.initial = np.zeros(d, dtype=bool)
        self.final = np.zeros(d, dtype=bool)
        self.initial[[index[c] for c in k.initial]] = True
        self.final[[index[c] for c in k.final]] = True
        self.ok: Dict[str, np.ndarray] = {}
        for name in ("squares", "upper", "lower"):
            ok = np.ones((d, d), dtype=bool)
            for a, b in k.relation(name):
                ok[index[a], index[b]] = False
            self.ok[name] = ok


def _initial_domains(comp: _Compiled, n: int, m: int) -> np.ndarray:
    domains = np.ones((n * m, len(comp.colors)), dtype=bool)
    domains[0] &= comp.initial
    domains[n * m - 1] &= comp.final
    return domains


def _arcs(n: int, m: int, comp: _Compiled) -> Dict[int, List[Tuple[int, np.ndarray]]]:
    """arcs[j] = [(i, M)] with M[a, b] true iff cell i = a is compatible with cell j = b."""
    arcs: Dict[int, List[Tuple[int, np.ndarray]]] = {i: [] for i in range(n * m)}
    for x in range(n):
        for y in range(m):
            i = x * m + y
            for dx, dy, name in NEIGHBOURS:
                if x + dx < n and y + dy < m:
                    j = (x + dx) * m + y + dy
                    ok = comp.ok[name]
                    arcs[j].append((i, ok))
                    arcs[i].append((j, ok.T))
    return arcs


def _arc_consistent(domains: np.ndarray, arcs: Dict[int, List[Tuple[int, np.ndarray]]]) -> bool:
    """AC-3 in place. False once some domain is wiped out."""
    queue = deque((i, j, ok) for j in arcs for i, ok in arcs[j])
    while queue:
        i, j, ok = queue.popleft()
        supported = ok[:, domains[j]].any(axis=1)
        revised = domains[i] & supported
        if (revised != domains[i]).any():
            domains[i] = revised
            if not revised.any():
                return False
            queue.extend((k, i, ok_k) for k, ok_k in arcs[i] if k != j)
    return True


def _backtrack(comp: _Compiled, n: int, m: int, domains: np.ndarray) -> Iterator[Tuple[int, ...]]:
    assignment: List[int] = []

    def extend(cell: int, domains: np.ndarray) -> Iterator[Tuple[int, ...]]:
        if cell == n * m:
            yield tuple(assignment)
            return
        x, y = divmod(cell, m)
        for c in np.flatnonzero(domains[cell]):
            pruned = domains.copy()
            pruned[cell] = False
            pruned[cell, c] = True
            consistent = True
            for dx, dy, name in NEIGHBOURS:
                if x + dx < n and y + dy < m:
                    j = (x + dx) * m + y + dy
                    pruned[j] &= comp.ok[name][c]
                    if not pruned[j].any():
                        consistent = False
                        break
            if consistent:
                assignment.append(int(c))
                yield from extend(cell + 1, pruned)
                assignment.pop()

    yield from extend(0, domains)


def iter_solutions(k: ColoringConstraint, n: int, m: int) -> Iterator[Coloring]:
    """Every satisfying n x m coloring, in the solver's order."""
    if n < 1 or m < 1:
        raise InputError("grid sizes must be >= 1")
    comp = _Compiled(k)
    domains = _initial_domains(comp, n, m)
    if not domains[0].any() or not domains[-1].any():
        return
    if not _arc_consistent(domains, _arcs(n, m, comp)):
        return
    for assignment in _backtrack(comp, n, m, domains):
        yield Coloring(n, m, tuple(comp.colors[c] for c in assignment))


def grid_sizes(n_max: int, m_max: int) -> List[Tuple[int, int]]:
    sizes = [(n, m) for n in range(1, n_max + 1) for m in range(1, m_max + 1)]
    return sorted(sizes, key=lambda nm: (nm[0] + nm[1], nm[0]))


def solve(k: ColoringConstraint, n_max: int = DEFAULT_MAX_N, m_max: int = DEFAULT_MAX_M) -> Optional[Coloring]:
    if n_max < 1 or m_max < 1:
        raise InputError("bounds must be >= 1")
    if not k.initial or not k.final:
        log.info("no coloring: empty initial or final color set")
        return None
    for n, m in grid_sizes(n_max, m_max):
        found = next(iter_solutions(k, n, m), None)
        if found is not None:
            log.info("found a %dx%d coloring", n, m)
            return found
        log.debug("no %dx%d coloring", n, m)
    return None


def all_colorings(colors: Sequence[Color], n: int, m: int) -> Iterator[Coloring]:
    """Raw |C|^(n·m) enumeration."""
    for cells in itertools.product(colors, repeat=n * m):
        yield Coloring(n, m, cells)
