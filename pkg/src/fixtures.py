# src/fixtures.py
# -----------------------------------------------------------
# Named example inputs shared by the tests, the CLI examples
# and run_desk_checks.py.
# -----------------------------------------------------------

from __future__ import annotations

from typing import Dict, FrozenSet, List, NamedTuple, Tuple

from automata import AsyncAutomaton, TransitionTable
from coloring import Coloring, ColoringConstraint
from games import DistributedGame, RuleStrategy, TableStrategy
from pcp import PcpInstance
from reduction_game import AnswerFn
from traces import DependencyAlphabet, Trace

# ---------- Traces ----------

CHAIN_DOMAINS = {
    "{1,2}": {1, 2},
    "{2}": {2},
    "{2,3}": {2, 3},
    "{3}": {3},
    "{3,4}": {3, 4},
    "{4}": {4},
    "{4,5}": {4, 5},
}

CHAIN_WORDS = (
    ["{2}", "{3}", "{4,5}", "{2,3}", "{4}", "{1,2}", "{3,4}"],
    ["{4,5}", "{4}", "{2}", "{3}", "{2,3}", "{3,4}", "{1,2}"],
)


def chain_alphabet() -> DependencyAlphabet:
    """Letters named after their domains over processes 1..5."""
    return DependencyAlphabet.from_domains(CHAIN_DOMAINS)


# ---------- Colorings ----------

def corner_coloring() -> Coloring:
    """n=4, m=2: f(0,0)=G, f(3,1)=B, red elsewhere."""
    return Coloring(4, 2, ("G", "R", "R", "R", "R", "R", "R", "B"))


def corner_constraint() -> ColoringConstraint:
    forbidden = {("B", "G"), ("G", "B")}
    return ColoringConstraint(("G", "R", "B"), {"G", "R"}, {"B"}, forbidden, forbidden, forbidden)


def first_column_constraint() -> ColoringConstraint:
    """Cells colored 0 are exactly those with x = 0."""
    return ColoringConstraint(
        colors=("0", "+"),
        initial={"0"},
        final={"0", "+"},
        squares=set(),
        upper={("+", "0"), ("0", "0")},
        lower={("0", "+")},
    )


def sign_constraint(final_zero_only: bool = False) -> ColoringConstraint:
    """
    Unique solution: 0 on the diagonal, + below it (x > y), - above it.
    With final_zero_only the grid has to be square.
    """
    colors = ("0", "-", "+")
    every = {(a, b) for a in colors for b in colors}
    return ColoringConstraint(
        colors=colors,
        initial={"0"},
        final={"0"} if final_zero_only else set(colors),
        squares=every - {("0", "0"), ("-", "-"), ("+", "+")},
        upper=every - {("0", "+"), ("+", "+"), ("-", "0"), ("-", "-")},
        lower=every - {("0", "-"), ("-", "-"), ("+", "0"), ("+", "+")},
    )


def sign_coloring(n: int, m: int) -> Coloring:
    return Coloring.from_function(n, m, lambda x, y: "0" if x == y else ("+" if x > y else "-"))


def zero_detector_constraint() -> ColoringConstraint:
    """Product of the first-column constraint (on x) and its mirror image (on y)."""
    bits = ("0", "+")
    colors = tuple(a + b for a in bits for b in bits)
    upper, lower = set(), set()
    for c in colors:
        for d in colors:
            # along x: first component forced to +, second copied
            if (c[0], d[0]) in {("+", "0"), ("0", "0")} or c[1] != d[1]:
                upper.add((c, d))
            # along y: second component forced to +, first copied
            if (c[1], d[1]) in {("+", "0"), ("0", "0")} or c[0] != d[0]:
                lower.add((c, d))
    return ColoringConstraint(colors, {"00"}, set(colors), set(), upper, lower)


def zero_detector_coloring(n: int, m: int) -> Coloring:
    return Coloring.from_function(n, m, lambda x, y: ("0" if x == 0 else "+") + ("0" if y == 0 else "+"))


def single_color_constraint() -> ColoringConstraint:
    return ColoringConstraint(("c0",), {"c0"}, {"c0"})


class GameCase(NamedTuple):
    name: str
    constraint: ColoringConstraint
    coloring: Coloring


def converse_corpus() -> List[GameCase]:
    """Satisfiable constraints with witnesses of size at most 2x2 over at most two colors."""
    two = ("c0", "c1")
    return [
        GameCase("one-color-1x1", single_color_constraint(), Coloring(1, 1, ("c0",))),
        GameCase("one-color-2x2", single_color_constraint(), Coloring(2, 2, ("c0",) * 4)),
        GameCase(
            "corners-1x2",
            ColoringConstraint(two, {"c0"}, {"c1"}),
            Coloring(1, 2, ("c0", "c1")),
        ),
        GameCase(
            "first-column-2x2",
            first_column_constraint(),
            Coloring(2, 2, ("0", "0", "+", "+")),
        ),
        GameCase(
            "diagonal-2x2",
            ColoringConstraint(two, {"c0"}, set(two), squares={("c0", "c0")}),
            Coloring(2, 2, ("c0", "c0", "c0", "c1")),
        ),
    ]


# ---------- PCP ----------

def pcp_corpus() -> Dict[str, PcpInstance]:
    return {
        "a/a": PcpInstance.of(("a", "a")),
        "ab/a,a/ba": PcpInstance.of(("ab", "a"), ("a", "ba")),
        "ab/ba": PcpInstance.of(("ab", "ba")),
        "a/ab": PcpInstance.of(("a", "ab")),
    }


# ---------- Adversarial answers, one per LOSE clause ----------

class LosingCase(NamedTuple):
    constraint: ColoringConstraint
    n: int
    m: int
    answer_fn: AnswerFn


def losing_cases() -> Dict[str, LosingCase]:
    two = ("c0", "c1")

    def grid(cells: Dict[Tuple[int, int], str]) -> AnswerFn:
        return lambda l, x, y: cells.get((x, y), "c0")

    return {
        "a": LosingCase(ColoringConstraint(two, {"c1"}, set(two)), 1, 1, grid({})),
        "b": LosingCase(ColoringConstraint(two, set(two), {"c1"}), 1, 1, grid({})),
        "c": LosingCase(ColoringConstraint(two, set(two), set(two)), 1, 1, lambda l, x, y: "c0" if l == 1 else "c1"),
        "d": LosingCase(ColoringConstraint(two, set(two), set(two), squares={("c0", "c1")}), 2, 2, grid({(1, 1): "c1"})),
        "e": LosingCase(ColoringConstraint(two, set(two), set(two), upper={("c0", "c1")}), 2, 1, grid({(1, 0): "c1"})),
        "f": LosingCase(ColoringConstraint(two, set(two), set(two), lower={("c0", "c1")}), 1, 2, grid({(0, 1): "c1"})),
    }


# ---------- Small explicit games ----------

def two_process_game() -> DistributedGame:
    """
    L waits for the environment (a or b), then L and R synchronise on A or
    B. L reaches its final state iff the shared letter matches (a→A, b→B),
    otherwise it returns to its initial state. R learns the outcome from
    its view and either finishes or returns as well.
    """
    alphabet = DependencyAlphabet.from_domains({
        "a": {"L"}, "b": {"L"},
        "A": {"L", "R"}, "B": {"L", "R"},
        "rA_fin": {"R"}, "rA_back": {"R"}, "rB_fin": {"R"}, "rB_back": {"R"},
    })
    table = TransitionTable([
        ("a", ("l0",), ("la",)),
        ("b", ("l0",), ("lb",)),
        ("A", ("la", "r0"), ("l_fin", "rA")),
        ("A", ("lb", "r0"), ("l0", "rA")),
        ("B", ("lb", "r0"), ("l_fin", "rB")),
        ("B", ("la", "r0"), ("l0", "rB")),
        ("rA_fin", ("rA",), ("r_fin",)),
        ("rA_back", ("rA",), ("r0",)),
        ("rB_fin", ("rB",), ("r_fin",)),
        ("rB_back", ("rB",), ("r0",)),
    ])
    automaton = AsyncAutomaton(
        alphabet,
        states={"L": {"l0", "la", "lb", "l_fin"}, "R": {"r0", "rA", "rB", "r_fin"}},
        initial={"L": "l0", "R": "r0"},
        finals={"L": {"l_fin"}, "R": {"r_fin"}},
        transitions=table,
        name="two-process",
    )
    return DistributedGame(automaton, frozenset({"A", "B", "rA_fin", "rA_back", "rB_fin", "rB_back"}), frozenset({"a", "b"}))


def two_process_both_actions() -> TableStrategy:
    """R accepts A and B; L picks the letter matching the environment."""
    return TableStrategy({
        "L": {(): [], ("a",): ["A"], ("b",): ["B"]},
        "R": {(): ["A", "B"], ("a", "A"): ["rA_fin"], ("b", "B"): ["rB_fin"]},
    })


def two_process_only_b() -> RuleStrategy:
    """R accepts only B, so after `a` the pair keeps looping back to the start."""
    r_letters = {"A", "B", "rA_fin", "rA_back", "rB_fin", "rB_back"}

    def rule(process: str, view: Trace) -> FrozenSet[str]:
        w = view.word
        if process == "L":
            return frozenset({"B"}) if w and w[-1] in ("a", "b") else frozenset()
        own = [a for a in w if a in r_letters]
        if not own or own[-1] in ("rA_back", "rB_back"):
            return frozenset({"B"})
        if own[-1] == "B":
            seen = [a for a in w if a in ("a", "b")]
            return frozenset({"rB_back"}) if seen[-1] == "a" else frozenset({"rB_fin"})
        return frozenset()

    return RuleStrategy("only-b", rule)


def choice_game() -> DistributedGame:
    """One process: chk (environment), then ans0 leads to win and ans1 to lose."""
    alphabet = DependencyAlphabet.from_domains({
        "chk": {"P"}, "ans0": {"P"}, "ans1": {"P"}, "win": {"P"}, "lose": {"P"},
    })
    table = TransitionTable([
        ("chk", ("s0",), ("s1",)),
        ("ans0", ("s1",), ("s2",)),
        ("ans1", ("s1",), ("s3",)),
        ("win", ("s2",), ("W",)),
        ("lose", ("s3",), ("L",)),
    ])
    automaton = AsyncAutomaton(
        alphabet,
        states={"P": {"s0", "s1", "s2", "s3", "W", "L"}},
        initial={"P": "s0"},
        finals={"P": {"W"}},
        transitions=table,
        name="choice",
    )
    return DistributedGame(automaton, frozenset({"ans0", "ans1", "win"}), frozenset({"chk", "lose"}))


def choice_strategies() -> List[TableStrategy]:
    return [
        TableStrategy({"P": {(): [], ("chk",): ["ans1"], ("chk", "ans1"): []}}),
        TableStrategy({"P": {(): [], ("chk",): ["ans0"], ("chk", "ans0"): ["win"]}}),
    ]
