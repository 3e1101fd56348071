# test_games.py
# Engine semantics on small explicit games.

import pytest

from automata import AsyncAutomaton, TransitionTable
from errors import InputError, InvariantViolation, MissingViewError, PreconditionError
from fixtures import (
    choice_game,
    choice_strategies,
    two_process_both_actions,
    two_process_game,
    two_process_only_b,
)
from games import (
    DEADLOCK_NON_FINAL,
    LOSE_STATE,
    BlockAll,
    DistributedGame,
    RuleStrategy,
    TableStrategy,
    VerdictKind,
    allowed,
    enumerate_sigma_plays,
    replay,
    search_strategy,
    verify_winning,
)
from traces import DependencyAlphabet, Trace, normalize


class TestDistributedGame:
    def test_letters_must_be_partitioned(self):
        aut = two_process_game().automaton
        letters = set(aut.alphabet.letters)
        with pytest.raises(InputError):
            DistributedGame(aut, letters, {"a"})
        with pytest.raises(InputError):
            DistributedGame(aut, letters - {"a", "b", "A"}, {"a", "b"})


class TestStrategies:
    def test_table_strategy_reports_missing_views(self):
        game = two_process_game()
        s = TableStrategy({"L": {(): []}})
        with pytest.raises(MissingViewError):
            s.decide("R", Trace.empty(game.alphabet))

    def test_environment_letters_are_always_allowed(self):
        game = two_process_game()
        assert allowed(game, BlockAll(), Trace.empty(game.alphabet)) == {"a", "b"}

    def test_allowed_needs_a_play(self):
        game = two_process_game()
        with pytest.raises(PreconditionError):
            allowed(game, BlockAll(), normalize(game.alphabet, ["A"]))

    def test_shared_letter_needs_every_process(self):
        game = two_process_game()
        only_l = RuleStrategy("only-l", lambda p, v: {"A", "B"} if p == "L" else set())
        u = normalize(game.alphabet, ["a"])
        assert allowed(game, only_l, u) == set()
        assert allowed(game, two_process_both_actions(), u) == {"A"}


class TestReplay:
    def test_replays_allowed_letters(self):
        game = two_process_game()
        u, g = replay(game, two_process_both_actions(), ["a", "A", "rA_fin"])
        assert u.word == ("a", "A", "rA_fin")
        assert game.automaton.is_final(g)

    def test_rejects_disallowed_letter(self):
        game = two_process_game()
        with pytest.raises(PreconditionError):
            replay(game, two_process_both_actions(), ["a", "B"])

    def test_rejects_unknown_letter(self):
        game = two_process_game()
        with pytest.raises(InputError):
            replay(game, BlockAll(), ["zz"])


class TestVerification:
    def test_both_actions_strategy_wins(self):
        verdict = verify_winning(two_process_game(), two_process_both_actions(), max_len=10)
        assert verdict.kind is VerdictKind.WINNING
        assert verdict.winning
        assert {u.word for u in verdict.maximal} == {("a", "A", "rA_fin"), ("b", "B", "rB_fin")}

    def test_only_b_strategy_never_terminates(self):
        game = two_process_game()
        for bound in (6, 12):
            verdict = verify_winning(game, two_process_only_b(), max_len=bound)
            assert verdict.kind is VerdictKind.UNKNOWN
            assert verdict.witness is None

    def test_block_all_deadlocks_after_first_environment_move(self):
        verdict = verify_winning(two_process_game(), BlockAll(), max_len=10)
        assert verdict.kind is VerdictKind.LOSING
        assert verdict.witness.word == ("a",)
        assert verdict.reason == DEADLOCK_NON_FINAL

    def test_losing_state_is_reported(self):
        bad, good = choice_strategies()
        verdict = verify_winning(choice_game(), bad, max_len=10)
        assert verdict.kind is VerdictKind.LOSING
        assert verdict.witness.word == ("chk", "ans1", "lose")
        assert verdict.reason == LOSE_STATE
        assert verify_winning(choice_game(), good, max_len=10).winning

    def test_search_returns_first_winning_candidate(self):
        bad, good = choice_strategies()
        assert search_strategy(choice_game(), [bad, good], max_len=10) is good
        assert search_strategy(choice_game(), [bad], max_len=10) is None

    def test_zero_bound_is_unknown_unless_epsilon_is_maximal(self):
        assert verify_winning(choice_game(), choice_strategies()[1], max_len=0).kind is VerdictKind.UNKNOWN

    def test_negative_bound_is_rejected(self):
        with pytest.raises(InputError):
            enumerate_sigma_plays(choice_game(), BlockAll(), max_len=-1)


class TestExploration:
    def test_sigma_plays_are_prefix_closed(self):
        game = two_process_game()
        sigma = enumerate_sigma_plays(game, two_process_both_actions(), max_len=10)
        assert sigma.complete
        for u in sigma.plays:
            for k in range(len(u.word)):
                assert normalize(game.alphabet, u.word[:k]) in sigma

    def test_monitor_sees_every_play(self):
        seen = []
        game = two_process_game()
        enumerate_sigma_plays(game, two_process_both_actions(), 10, monitor=lambda u, g, moves: seen.append(u))
        assert len(seen) == 7

    def test_monitor_can_abort(self):
        def monitor(u, g, moves):
            if len(u) == 2:
                raise InvariantViolation("stop")

        with pytest.raises(InvariantViolation):
            enumerate_sigma_plays(two_process_game(), two_process_both_actions(), 10, monitor=monitor)

    def test_self_loop_is_cut_at_the_bound(self):
        alphabet = DependencyAlphabet.from_domains({"a": {"P"}})
        aut = AsyncAutomaton(
            alphabet,
            states={"P": {"q"}},
            initial={"P": "q"},
            finals={"P": {"q"}},
            transitions=TransitionTable([("a", ("q",), ("q",))]),
        )
        game = DistributedGame(aut, frozenset({"a"}), frozenset())
        sigma = enumerate_sigma_plays(game, RuleStrategy("always-a", lambda p, v: {"a"}), 3)
        assert {u.word for u in sigma.plays} == {(), ("a",), ("a", "a"), ("a", "a", "a")}
        assert not sigma.complete
        assert not sigma.maximal

    @pytest.mark.parametrize(
        "game, strategy",
        [
            (two_process_game(), two_process_both_actions()),
            (choice_game(), choice_strategies()[1]),
        ],
        ids=["two-process", "choice"],
    )
    def test_plays_are_pairwise_inequivalent_normal_forms(self, game, strategy):
        sigma = enumerate_sigma_plays(game, strategy, 10)
        for u in sigma.plays:
            assert normalize(game.alphabet, u.word).word == u.word
        assert len({normalize(game.alphabet, u.word) for u in sigma.plays}) == len(sigma)


class TestVerdictStability:
    def test_larger_bound_keeps_a_winning_verdict(self):
        game = two_process_game()
        small = verify_winning(game, two_process_both_actions(), 10)
        large = verify_winning(game, two_process_both_actions(), 15)
        assert small.winning and large.winning
        assert small.maximal == large.maximal

    @pytest.mark.parametrize(
        "game, strategy",
        [(two_process_game(), BlockAll()), (choice_game(), choice_strategies()[0])],
        ids=["block-all", "bad-choice"],
    )
    def test_losing_witness_replays_to_a_maximal_play(self, game, strategy):
        verdict = verify_winning(game, strategy, 10)
        assert verdict.kind is VerdictKind.LOSING
        u, g = replay(game, strategy, verdict.witness.word)
        assert u == verdict.witness
        assert not game.automaton.is_final(g)
        assert not allowed(game, strategy, u, g)
