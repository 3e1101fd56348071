# src/pcp.py
# -----------------------------------------------------------
# Post Correspondence instances and their encoding as a
# bipartite coloring constraint.
# - Tile indices are 1-based in every public signature and
#   document, 0-based inside TileLetterState.
# - SameLength / SameTile: brute-force oracles and checkers
#   for the local characterization of a PCP solution.
# - to_coloring_constraint(): color = (q_u, q_v, SameLength?,
#   SameTile?), pruned first, then the forbidden pairs are
#   expanded over the pruned colors.
# -----------------------------------------------------------

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Set, Tuple

from coloring import Coloring, ColoringConstraint
from errors import BoundExceeded, DecodeError, InputError, PreconditionError

log = logging.getLogger(__name__)

# ---------- Config ----------

SAME_LENGTH_ORACLE_LIMIT = 16  # max |u|·|v| for the subset oracles
FORBIDDEN_SYMBOLS = set(":|")  # used as separators in color labels

SAME_LENGTH = "L"
SAME_TILE = "T"
ABSENT = "-"

Cell = Tuple[int, int]


# ---------- Data models ----------

@dataclass(frozen=True)
class Tile:
    top: str
    bottom: str


@dataclass(frozen=True)
class PcpInstance:
    sigma: Tuple[str, ...]
    tiles: Tuple[Tile, ...]

    def __post_init__(self):
        sigma = tuple(self.sigma)
        tiles = tuple(self.tiles)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "tiles", tiles)
        for s in sigma:
            if len(s) != 1 or s in FORBIDDEN_SYMBOLS:
                raise InputError(f"symbol {s!r} must be a single character other than ':' and '|'")
        if not tiles:
            raise InputError("a PCP instance needs at least one tile")
        for i, tile in enumerate(tiles, 1):
            for side in ("top", "bottom"):
                word = getattr(tile, side)
                if not word:
                    raise InputError(f"tile {i} has an empty {side} word")
                stray = set(word) - set(sigma)
                if stray:
                    raise InputError(f"tile {i} {side} uses symbols outside the alphabet: {sorted(stray)}")

    @classmethod
    def of(cls, *pairs: Tuple[str, str]) -> "PcpInstance":
        """PcpInstance.of(("ab", "a"), ("a", "ba")) with the alphabet inferred."""
        symbols = sorted({s for top, bottom in pairs for s in top + bottom})
        return cls(tuple(symbols), tuple(Tile(t, b) for t, b in pairs))

    def check_seq(self, seq: Sequence[int]) -> Tuple[int, ...]:
        seq = tuple(seq)
        if not seq:
            raise InputError("index sequence must be nonempty")
        for i in seq:
            if not 1 <= i <= len(self.tiles):
                raise InputError(f"tile index {i} outside 1..{len(self.tiles)}")
        return seq

    def top_word(self, seq: Sequence[int]) -> str:
        return "".join(self.tiles[i - 1].top for i in self.check_seq(seq))

    def bottom_word(self, seq: Sequence[int]) -> str:
        return "".join(self.tiles[i - 1].bottom for i in self.check_seq(seq))


class TileLetterState(NamedTuple):
    letter: str
    tile_index: int  # 0-based
    tile_position: int
    initial_letter_flag: int
    initial_tile_flag: int

    def label(self) -> str:
        return (
            f"{self.letter}:{self.tile_index + 1}:{self.tile_position}:"
            f"{self.initial_letter_flag}{self.initial_tile_flag}"
        )


class ReductionColor(NamedTuple):
    top: TileLetterState
    bottom: TileLetterState
    same_length: bool
    same_tile: bool

    def label(self) -> str:
        return "|".join((
            self.top.label(),
            self.bottom.label(),
            SAME_LENGTH if self.same_length else ABSENT,
            SAME_TILE if self.same_tile else ABSENT,
        ))


def _parse_state(text: str) -> TileLetterState:
    letter, tile, pos, flags = text.split(":")
    if len(flags) != 2 or not set(flags) <= {"0", "1"}:
        raise ValueError(flags)
    return TileLetterState(letter, int(tile) - 1, int(pos), int(flags[0]), int(flags[1]))


def parse_color_label(label: str) -> ReductionColor:
    try:
        top, bottom, length, tile = label.split("|")
        if length not in (SAME_LENGTH, ABSENT) or tile not in (SAME_TILE, ABSENT):
            raise ValueError(label)
        return ReductionColor(_parse_state(top), _parse_state(bottom), length == SAME_LENGTH, tile == SAME_TILE)
    except ValueError:
        raise InputError(f"not a reduction color label: {label!r}") from None


# ---------- Solutions ----------

def check_solution(inst: PcpInstance, seq: Sequence[int]) -> bool:
    return inst.top_word(seq) == inst.bottom_word(seq)


def brute_force(inst: PcpInstance, max_len: int) -> Optional[List[int]]:
    """Shortest solution of length <= max_len, lexicographically first among those."""
    if max_len < 1:
        raise InputError("max_len must be >= 1")

    def search(seq: List[int], top: str, bottom: str, length: int) -> Optional[List[int]]:
        if len(seq) == length:
            return list(seq) if top == bottom else None
        for i, tile in enumerate(inst.tiles, 1):
            t, b = top + tile.top, bottom + tile.bottom
            if not (t.startswith(b) or b.startswith(t)):
                continue
            seq.append(i)
            found = search(seq, t, b, length)
            seq.pop()
            if found:
                return found
        return None

    for length in range(1, max_len + 1):
        found = search([], "", "", length)
        if found:
            return found
    return None


# ---------- SameLength ----------

def _check_cells(cells: Iterable[Cell], nu: int, nv: int) -> FrozenSet[Cell]:
    cells = frozenset(tuple(c) for c in cells)
    for x, y in cells:
        if not (0 <= x < nu and 0 <= y < nv):
            raise InputError(f"pair {(x, y)} outside [{nu}]x[{nv}]")
    return cells


def verify_same_length(cells: Iterable[Cell], u: str, v: str) -> bool:
    cells = _check_cells(cells, len(u), len(v))
    if (len(u) - 1, len(v) - 1) not in cells:
        return False
    if (0, 0) not in cells:
        return False
    for x, y in cells:
        if (x == 0 or y == 0) and (x, y) != (0, 0):
            return False
        if x > 0 and y > 0 and (x - 1, y - 1) not in cells:
            return False
        if u[x] != v[y]:
            return False
    return True


def _all_subsets(nu: int, nv: int) -> Iterator[FrozenSet[Cell]]:
    if nu * nv > SAME_LENGTH_ORACLE_LIMIT:
        raise BoundExceeded(f"|u|·|v| = {nu * nv} exceeds the oracle bound {SAME_LENGTH_ORACLE_LIMIT}")
    universe = [(x, y) for x in range(nu) for y in range(nv)]
    for r in range(len(universe) + 1):
        for subset in itertools.combinations(universe, r):
            yield frozenset(subset)


def exists_same_length(u: str, v: str) -> bool:
    return any(verify_same_length(s, u, v) for s in _all_subsets(len(u), len(v)))


def canonical_same_length(u: str, v: str) -> FrozenSet[Cell]:
    if len(u) != len(v):
        raise PreconditionError("the diagonal needs |u| = |v|")
    return frozenset((x, x) for x in range(len(u)))


# ---------- SameTile ----------

def _factorization(words: Sequence[str]) -> Tuple[List[int], List[int], List[int]]:
    """Per position: tile ordinal in the sequence, start offset of that tile; plus tile start offsets."""
    ordinal: List[int] = []
    starts: List[int] = []
    offset = 0
    for k, word in enumerate(words):
        starts.append(offset)
        ordinal.extend([k] * len(word))
        offset += len(word)
    tile_start = [starts[k] for k in ordinal]
    return ordinal, tile_start, starts


def verify_same_tile(cells: Iterable[Cell], inst: PcpInstance, top_seq: Sequence[int], bottom_seq: Sequence[int]) -> bool:
    top_seq, bottom_seq = inst.check_seq(top_seq), inst.check_seq(bottom_seq)
    u, v = inst.top_word(top_seq), inst.bottom_word(bottom_seq)
    cells = _check_cells(cells, len(u), len(v))
    u_ord, u_start, _ = _factorization([inst.tiles[i - 1].top for i in top_seq])
    v_ord, v_start, _ = _factorization([inst.tiles[i - 1].bottom for i in bottom_seq])
    first_u, first_v = len(inst.tiles[top_seq[0] - 1].top), len(inst.tiles[bottom_seq[0] - 1].bottom)

    if (len(u) - 1, len(v) - 1) not in cells or (0, 0) not in cells:
        return False
    for x, y in cells:
        if x > 0 and y > 0:
            new_u, new_v = u_start[x] == x, v_start[y] == y
            if new_u and new_v and (x - 1, y - 1) not in cells:
                return False
            if not new_u and (x - 1, y) not in cells:
                return False
            if not new_v and (x, y - 1) not in cells:
                return False
        if (x < first_u) != (y < first_v):
            return False
        if top_seq[u_ord[x]] != bottom_seq[v_ord[y]]:
            return False
    return True


def exists_same_tile(inst: PcpInstance, top_seq: Sequence[int], bottom_seq: Sequence[int]) -> bool:
    nu, nv = len(inst.top_word(top_seq)), len(inst.bottom_word(bottom_seq))
    return any(verify_same_tile(s, inst, top_seq, bottom_seq) for s in _all_subsets(nu, nv))


def canonical_same_tile(inst: PcpInstance, top_seq: Sequence[int], bottom_seq: Sequence[int]) -> FrozenSet[Cell]:
    """Pairs of positions followed by the same number of tiles on both sides."""
    top_seq, bottom_seq = inst.check_seq(top_seq), inst.check_seq(bottom_seq)
    u_ord, _, _ = _factorization([inst.tiles[i - 1].top for i in top_seq])
    v_ord, _, _ = _factorization([inst.tiles[i - 1].bottom for i in bottom_seq])
    k, l = len(top_seq) - 1, len(bottom_seq) - 1
    return frozenset(
        (x, y)
        for x, ox in enumerate(u_ord)
        for y, oy in enumerate(v_ord)
        if k - ox == l - oy
    )


# ---------- Reduction to a coloring constraint ----------

def tile_letter_states(inst: PcpInstance, side: str) -> List[TileLetterState]:
    states = []
    for i, tile in enumerate(inst.tiles):
        word = getattr(tile, side)
        for pos, letter in enumerate(word):
            for b0 in (0, 1):
                for b1 in (0, 1):
                    states.append(TileLetterState(letter, i, pos, b0, b1))
    return states


class _Side:
    """Tiling automaton and flag rules for one side (top along x, bottom along y)."""

    def __init__(self, inst: PcpInstance, side: str):
        self.length = [len(getattr(t, side)) for t in inst.tiles]

    def is_last(self, q: TileLetterState) -> bool:
        return q.tile_position == self.length[q.tile_index] - 1

    def follows(self, q: TileLetterState, q2: TileLetterState) -> bool:
        if self.is_last(q) and q2.tile_position == 0:
            return True
        return q2.tile_index == q.tile_index and q2.tile_position == q.tile_position + 1

    def flags_ok(self, q: TileLetterState, q2: TileLetterState) -> bool:
        if q2.initial_letter_flag:
            return False
        if q2.initial_tile_flag and not (q.initial_tile_flag and not self.is_last(q)):
            return False
        return True


def _pruned(color: ReductionColor) -> bool:
    top, bottom = color.top, color.bottom
    if color.same_length and (
        top.initial_letter_flag != bottom.initial_letter_flag or top.letter != bottom.letter
    ):
        return True
    if color.same_tile and (
        top.initial_tile_flag != bottom.initial_tile_flag or top.tile_index != bottom.tile_index
    ):
        return True
    return False


def reduction_colors(inst: PcpInstance) -> Tuple[List[ReductionColor], int]:
    """Pruned colors in a fixed order, and the size of the raw universe."""
    q_u, q_v = tile_letter_states(inst, "top"), tile_letter_states(inst, "bottom")
    raw = len(q_u) * len(q_v) * 4
    colors = [
        ReductionColor(a, b, sl, st)
        for a in q_u
        for b in q_v
        for sl in (True, False)
        for st in (True, False)
    ]
    return [c for c in colors if not _pruned(c)], raw


def _forbidden_upper(top: _Side, c: ReductionColor, c2: ReductionColor) -> bool:
    # (f(x,y), f(x+1,y)): the bottom state is constant along x
    if c.bottom != c2.bottom:
        return True
    if not top.follows(c.top, c2.top) or not top.flags_ok(c.top, c2.top):
        return True
    return not c.same_tile and c2.same_tile and c2.top.tile_position != 0


def _forbidden_lower(bottom: _Side, c: ReductionColor, c2: ReductionColor) -> bool:
    # (f(x,y), f(x,y+1)): the top state is constant along y
    if c.top != c2.top:
        return True
    if not bottom.follows(c.bottom, c2.bottom) or not bottom.flags_ok(c.bottom, c2.bottom):
        return True
    return not c.same_tile and c2.same_tile and c2.bottom.tile_position != 0


def _forbidden_square(c: ReductionColor, c2: ReductionColor) -> bool:
    if not c.same_length and c2.same_length:
        return True
    return (
        not c.same_tile
        and c2.same_tile
        and c2.top.tile_position == 0
        and c2.bottom.tile_position == 0
    )


def to_coloring_constraint(inst: PcpInstance) -> ColoringConstraint:
    colors, raw = reduction_colors(inst)
    top, bottom = _Side(inst, "top"), _Side(inst, "bottom")

    initial = [
        c for c in colors
        if c.same_length and c.same_tile
        and c.top.tile_position == 0 and c.bottom.tile_position == 0
        and c.top.initial_letter_flag and c.top.initial_tile_flag
        and c.bottom.initial_letter_flag and c.bottom.initial_tile_flag
    ]
    final = [
        c for c in colors
        if c.same_length and c.same_tile and top.is_last(c.top) and bottom.is_last(c.bottom)
    ]

    squares: Set[Tuple[str, str]] = set()
    upper: Set[Tuple[str, str]] = set()
    lower: Set[Tuple[str, str]] = set()
    labels = [c.label() for c in colors]
    for c, lc in zip(colors, labels):
        for c2, lc2 in zip(colors, labels):
            if _forbidden_square(c, c2):
                squares.add((lc, lc2))
            if _forbidden_upper(top, c, c2):
                upper.add((lc, lc2))
            if _forbidden_lower(bottom, c, c2):
                lower.add((lc, lc2))

    log.info("PCP constraint: %d raw colors, %d after pruning", raw, len(colors))
    return ColoringConstraint(
        colors=tuple(labels),
        initial=frozenset(c.label() for c in initial),
        final=frozenset(c.label() for c in final),
        squares=frozenset(squares),
        upper=frozenset(upper),
        lower=frozenset(lower),
        provenance={"source": "pcp", "raw_colors": raw, "pruned_colors": len(colors)},
    )


def decode_coloring(inst: PcpInstance, f: Coloring) -> Tuple[List[int], List[int]]:
    """Tile sequences read from the top states along x and the bottom states along y."""
    grid = [[parse_color_label(f[x, y]) for y in range(f.m)] for x in range(f.n)]
    f_u = [grid[x][0].top for x in range(f.n)]
    f_v = [grid[0][y].bottom for y in range(f.m)]
    for x in range(f.n):
        for y in range(f.m):
            if grid[x][y].top != f_u[x]:
                raise DecodeError(f"column {x} is not consistent at y={y}")
            if grid[x][y].bottom != f_v[y]:
                raise DecodeError(f"row {y} is not consistent at x={x}")

    top_seq = [q.tile_index + 1 for q in f_u if q.tile_position == 0]
    bottom_seq = [q.tile_index + 1 for q in f_v if q.tile_position == 0]
    if not top_seq or inst.top_word(top_seq) != "".join(q.letter for q in f_u):
        raise DecodeError("top states do not spell a factorization into tiles")
    if not bottom_seq or inst.bottom_word(bottom_seq) != "".join(q.letter for q in f_v):
        raise DecodeError("bottom states do not spell a factorization into tiles")
    if top_seq != bottom_seq or not check_solution(inst, top_seq):
        raise DecodeError(f"decoded sequences {top_seq} / {bottom_seq} are not a PCP solution")
    return top_seq, bottom_seq
