# test_reduction_game.py
# The six-process game: both directions of the coloring <-> strategy
# correspondence, the LOSE clauses and the structural audit.

import pytest

from automata import enabled
from coloring import Coloring, ColoringConstraint
from errors import BoundExceeded, InputError, PreconditionError, ProbeError
from fixtures import converse_corpus, corner_coloring, corner_constraint, losing_cases
from games import DEADLOCK_NON_FINAL, BlockAll, RuleStrategy, VerdictKind, replay, search_strategy, verify_winning
from reduction_game import (
    LOSE,
    WIN,
    ActionKind,
    GameAudit,
    Phase,
    audit_probe_families,
    build_game,
    check,
    coloring_from_strategy,
    grid_size,
    increment,
    probe_check_plays,
    probe,
    probe_play,
    round_index,
    single_answer,
    strategy_from_answers,
    strategy_from_coloring,
    uninterrupted_play,
)

CASES = {case.name: case for case in converse_corpus()}


@pytest.fixture(scope="module")
def one_color():
    return build_game(CASES["one-color-1x1"].constraint)


class TestConstruction:
    def test_six_processes_and_letter_names(self, one_color):
        alphabet = one_color.alphabet
        assert alphabet.processes == ("B0", "B1", "B2", "T0", "T1", "T2")
        assert alphabet.domain["I_T2"] == {"T2", "T0"}
        assert alphabet.domain["CHECK_1"] == {"T1", "B1"}
        assert alphabet.domain[WIN] == set(alphabet.processes)
        assert "ANSWER_0_c0" in alphabet

    def test_environment_letters(self, one_color):
        assert one_color.game.environment == {LOSE, "CHECK_0", "CHECK_1", "CHECK_2"}
        assert len(one_color.letters_of(ActionKind.INCREMENT)) == 6

    def test_increment_order_is_fixed(self, one_color):
        g = one_color.game.automaton.initial_state()
        assert [a for a, _ in enabled(one_color.game.automaton, g)] == ["I_T0", "I_B0"]

    def test_round_index(self):
        assert [round_index(h) for h in (1, 2, 3, 4, 5)] == [0, 0, 1, 1, 2]
        with pytest.raises(PreconditionError):
            round_index(0)

    def test_probe_play_shape(self):
        assert probe_play(0, 0) == ["I_T0", "I_T1", "I_B0", "I_B1"]
        assert probe_play(1, 0)[:5] == ["I_T0", "I_T1", "I_T2", "I_T0", "I_T1"]
        with pytest.raises(InputError):
            probe_play(-1, 0)

    def test_colors_with_clashing_names_are_rejected(self):
        with pytest.raises(InputError):
            build_game(ColoringConstraint((1, "1"), {1}, {1}))


class TestConverse:
    @pytest.mark.parametrize("name", sorted(CASES))
    def test_strategy_from_coloring_wins(self, name):
        case = CASES[name]
        arts = build_game(case.constraint)
        audit = GameAudit(arts, forbid_lose=True)
        verdict = verify_winning(arts.game, strategy_from_coloring(arts, case.coloring), 100, audit)
        assert verdict.kind is VerdictKind.WINNING
        assert audit.plays == verdict.explored
        assert not audit.clauses_seen

    def test_violating_coloring_is_rejected(self):
        arts = build_game(corner_constraint())
        with pytest.raises(PreconditionError):
            strategy_from_coloring(arts, Coloring(1, 1, ("B",)))

    def test_answers_outside_c_are_rejected(self, one_color):
        s = strategy_from_answers(one_color, 1, 1, lambda l, x, y: "nope")
        with pytest.raises(InputError):
            replay(one_color.game, s, probe_play(0, 0) + [check(1), "ANSWER_1_c0"])


class TestDirect:
    @pytest.mark.parametrize("name", sorted(CASES))
    def test_extraction_inverts_the_construction(self, name):
        case = CASES[name]
        arts = build_game(case.constraint)
        s = strategy_from_coloring(arts, case.coloring)
        assert grid_size(arts, s) == (case.coloring.n, case.coloring.m)
        assert coloring_from_strategy(arts, s, 100) == case.coloring

    @pytest.mark.parametrize("name", sorted(CASES))
    def test_check_families_relate_neighbouring_cells(self, name):
        case = CASES[name]
        arts = build_game(case.constraint)
        s = strategy_from_coloring(arts, case.coloring)
        reports = audit_probe_families(arts, s, case.coloring.n, case.coloring.m)
        assert all(r.consistent for r in reports)
        final = reports[0]
        assert final.pattern == "final"
        assert set(final.answers.values()) == {case.coloring[case.coloring.n - 1, case.coloring.m - 1]}

    def test_probe_reads_the_coloring(self):
        case = CASES["first-column-2x2"]
        arts = build_game(case.constraint)
        s = strategy_from_coloring(arts, case.coloring)
        assert [probe(arts, s, x, y) for x in range(2) for y in range(2)] == ["0", "0", "+", "+"]

    def test_probe_check_plays_check_the_expected_pairs(self, one_color):
        plays = probe_check_plays(one_color, "upper", 0, 0)
        assert set(plays) == {"p1", "p2", "p0'", "p1'"}
        assert plays["p0'"][1] == 0
        assert plays["p0'"][0][-2:] == [increment("T", 0), check(0)]
        assert set(probe_check_plays(one_color, "final", 0, 0)) == {"p1", "p2", "p3"}
        with pytest.raises(InputError):
            probe_check_plays(one_color, "diagonal", 0, 0)

    def test_several_answers_need_single_answer(self):
        case = CASES["corners-1x2"]
        arts = build_game(case.constraint)
        base = strategy_from_coloring(arts, case.coloring)
        answers = frozenset(arts.letters_of(ActionKind.ANSWER))
        greedy = RuleStrategy("all-answers", lambda p, v: frozenset(base.decide(p, v)) | answers)
        with pytest.raises(ProbeError):
            probe(arts, greedy, 0, 0)
        assert probe(arts, single_answer(arts, greedy), 0, 0) == "c0"

    def test_uninterrupted_play(self, one_color):
        s = strategy_from_coloring(one_color, Coloring(2, 1, ("c0", "c0")))
        u, g = uninterrupted_play(one_color, s)
        counts = one_color.increment_counts(u)
        assert counts["T1"] == 4 and counts["B1"] == 2
        assert all(q.phase is Phase.ENDED for q in g.components)
        with pytest.raises(BoundExceeded):
            uninterrupted_play(one_color, s, max_len=3)

    def test_losing_strategy_yields_no_coloring(self, one_color):
        assert coloring_from_strategy(one_color, BlockAll(), 50) is None

    def test_cheating_strategy_yields_no_coloring(self):
        case = losing_cases()["c"]
        arts = build_game(case.constraint)
        s = strategy_from_answers(arts, case.n, case.m, case.answer_fn, name="cheat-c")
        assert coloring_from_strategy(arts, s, 100) is None

    @pytest.mark.parametrize("x, y", [(1, 0), (3, 0), (0, 1), (0, 3)])
    def test_reading_outside_the_played_grid_is_rejected(self, one_color, x, y):
        s = strategy_from_coloring(one_color, Coloring(1, 1, ("c0",)))
        with pytest.raises(PreconditionError):
            probe(one_color, s, x, y)

    def test_search_picks_the_constant_coloring_that_wins(self):
        arts = build_game(ColoringConstraint(("c0", "c1"), {"c1"}, {"c1"}))
        candidates = [
            strategy_from_answers(arts, 1, 1, lambda l, x, y, c=c: c, name=c) for c in ("c0", "c1")
        ]
        assert search_strategy(arts.game, candidates, 100).name == "c1"
        assert search_strategy(arts.game, candidates[:1], 100) is None


class TestLosingConditions:
    def test_block_all_loses_at_epsilon(self, one_color):
        verdict = verify_winning(one_color.game, BlockAll(), 100, GameAudit(one_color))
        assert verdict.kind is VerdictKind.LOSING
        assert verdict.witness.word == ()
        assert verdict.reason == DEADLOCK_NON_FINAL

    @pytest.mark.parametrize("clause", ["a", "b", "c", "d", "e", "f"])
    def test_each_clause_catches_its_cheat(self, clause):
        case = losing_cases()[clause]
        arts = build_game(case.constraint)
        s = strategy_from_answers(arts, case.n, case.m, case.answer_fn, name=f"cheat-{clause}")
        audit = GameAudit(arts)
        verdict = verify_winning(arts.game, s, 100, audit)
        assert verdict.kind is VerdictKind.LOSING
        assert verdict.witness.word[-1] == LOSE
        assert {c.condition for c in arts.witness_clauses(verdict.witness)} == {clause}
        assert set(audit.clauses_seen) == {clause}

    def test_witness_clauses_of_a_non_losing_play(self, one_color):
        u, _ = replay(one_color.game, BlockAll(), [])
        assert one_color.witness_clauses(u) == []


@pytest.mark.slow
def test_corner_game_round_trip():
    arts = build_game(corner_constraint())
    s = strategy_from_coloring(arts, corner_coloring())
    verdict = verify_winning(arts.game, s, 100, GameAudit(arts, forbid_lose=True))
    assert verdict.winning
    assert coloring_from_strategy(arts, s, 100) == corner_coloring()
