# test_cli.py
# Exit codes and stdout documents of the command-line front end.

import json

import pytest

import cli as cli_module
import documents
from cli import EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, EXIT_UNKNOWN, main
from coloring import Coloring
from errors import DecodeError, InvariantViolation
from fixtures import (
    CHAIN_WORDS,
    chain_alphabet,
    corner_constraint,
    pcp_corpus,
    sign_constraint,
    single_color_constraint,
    two_process_both_actions,
    two_process_game,
)
from games import BlockAll
from reduction_game import build_game, strategy_from_coloring
from traces import normalize


@pytest.fixture
def write(tmp_path):
    def _write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc, encoding="utf-8")
        return str(path)

    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


class TestPcp:
    def test_solve_finds_the_classic_solution(self, capsys, write):
        path = write("pcp.json", documents.emit(pcp_corpus()["ab/a,a/ba"]))
        code, doc, _ = run(capsys, "pcp", "solve", path, "--max-len", "3")
        assert code == EXIT_OK
        assert doc["result"] == "found"
        assert doc["witness"] == [1, 2]

    def test_solve_without_solution(self, capsys, write):
        path = write("pcp.json", documents.emit(pcp_corpus()["ab/ba"]))
        code, doc, _ = run(capsys, "pcp", "solve", path)
        assert code == EXIT_NEGATIVE
        assert doc["result"] == "not-found"

    def test_check(self, capsys, write):
        path = write("pcp.json", documents.emit(pcp_corpus()["ab/a,a/ba"]))
        assert run(capsys, "pcp", "check", path, "--seq", "1,2")[0] == EXIT_OK
        assert run(capsys, "pcp", "check", path, "--seq", "1")[0] == EXIT_NEGATIVE
        assert run(capsys, "pcp", "check", path, "--seq", "1,x")[0] == EXIT_INPUT

    def test_to_bcp_then_solve(self, capsys, write):
        path = write("pcp.json", documents.emit(pcp_corpus()["ab/ba"]))
        code, constraint, _ = run(capsys, "pcp", "to-bcp", path)
        assert code == EXIT_OK
        assert constraint["kind"] == "bcp-constraint"
        assert constraint["initial"] == []
        k_path = write("k.json", constraint)
        code, doc, _ = run(capsys, "bcp", "solve", k_path)
        assert code == EXIT_NEGATIVE
        assert doc == {"kind": "verdict", "result": "not-found"}

    def test_empty_top_is_an_input_error(self, capsys, write):
        path = write("pcp.json", {"kind": "pcp", "alphabet": ["a"], "tiles": [{"top": "", "bottom": "a"}]})
        code, doc, err = run(capsys, "pcp", "solve", path)
        assert code == EXIT_INPUT
        assert doc is None
        assert "$.tiles[0].top" in err


class TestBcp:
    def test_other_domain_errors_exit_as_input_errors(self, capsys, monkeypatch, write):
        def broken(*args, **kwargs):
            raise DecodeError("unreadable")

        monkeypatch.setattr(cli_module, "solve", broken)
        k_path = write("k.json", documents.emit(single_color_constraint()))
        code, doc, err = run(capsys, "bcp", "solve", k_path)
        assert code == EXIT_INPUT
        assert doc is None
        assert "DecodeError" in err

    def test_solve_then_check(self, capsys, write):
        k_path = write("k.json", documents.emit(sign_constraint(final_zero_only=True)))
        code, coloring, _ = run(capsys, "bcp", "solve", k_path, "--max-n", "2", "--max-m", "3")
        assert code == EXIT_OK
        assert coloring["kind"] == "coloring"
        assert coloring["n"] == coloring["m"]
        f_path = write("f.json", coloring)
        code, doc, _ = run(capsys, "bcp", "check", k_path, f_path)
        assert code == EXIT_OK
        assert doc["result"] == "true"

    def test_check_reports_the_violation(self, capsys, write):
        k_path = write("k.json", documents.emit(corner_constraint()))
        f_path = write("f.json", documents.emit(Coloring(2, 1, ("G", "B"))))
        code, doc, _ = run(capsys, "bcp", "check", k_path, f_path)
        assert code == EXIT_NEGATIVE
        assert doc["violation"] == {"clause": "upper", "cells": [[0, 0], [1, 0]], "colors": ["G", "B"]}

    def test_to_game_emits_the_builtin_game(self, capsys, write):
        k_path = write("k.json", documents.emit(single_color_constraint()))
        code, doc, _ = run(capsys, "bcp", "to-game", k_path)
        assert code == EXIT_OK
        assert doc["builtin"] == "coloring-game"


class TestGame:
    @pytest.fixture
    def one_color(self, write):
        arts = build_game(single_color_constraint())
        strategy = strategy_from_coloring(arts, Coloring(1, 1, ("c0",)))
        return (
            write("game.json", documents.emit(arts)),
            write("strategy.json", documents.emit(strategy)),
            write("block.json", documents.emit(BlockAll())),
        )

    def test_block_all_loses_at_the_empty_play(self, capsys, one_color):
        game, _, block = one_color
        code, doc, _ = run(capsys, "game", "verify", game, block)
        assert code == EXIT_NEGATIVE
        assert doc["result"] == "losing"
        assert doc["witness"] == []
        assert doc["clauses"] == []

    def test_coloring_strategy_wins(self, capsys, one_color):
        game, strategy, _ = one_color
        code, doc, _ = run(capsys, "game", "verify", game, strategy, "--max-depth", "100")
        assert code == EXIT_OK
        assert doc["result"] == "winning"

    def test_extract_coloring(self, capsys, one_color):
        game, strategy, _ = one_color
        code, doc, _ = run(capsys, "game", "extract-coloring", game, strategy)
        assert code == EXIT_OK
        assert doc == {"kind": "coloring", "n": 1, "m": 1, "cells": ["c0"]}

    def test_explicit_game_with_a_table_strategy(self, capsys, write):
        game = write("game.json", documents.emit(two_process_game()))
        strategy = write("strategy.json", documents.emit(two_process_both_actions()))
        code, doc, _ = run(capsys, "game", "verify", game, strategy, "--max-depth", "10")
        assert code == EXIT_OK
        assert "clauses" not in doc

    def test_extract_coloring_needs_the_builtin_game(self, capsys, write):
        game = write("game.json", documents.emit(two_process_game()))
        strategy = write("strategy.json", documents.emit(two_process_both_actions()))
        assert run(capsys, "game", "extract-coloring", game, strategy)[0] == EXIT_INPUT

    def test_failed_invariant_is_reported_as_unknown(self, capsys, monkeypatch, one_color):
        def broken(*args, **kwargs):
            raise InvariantViolation("two linearizations disagree")

        monkeypatch.setattr(cli_module, "verify_winning", broken)
        game, strategy, _ = one_color
        code, doc, err = run(capsys, "game", "verify", game, strategy)
        assert code == EXIT_UNKNOWN
        assert doc is None
        assert "InvariantViolation" in err


class TestSimulate:
    @pytest.fixture
    def paths(self, write):
        return (
            write("game.json", documents.emit(two_process_game())),
            write("strategy.json", documents.emit(two_process_both_actions())),
        )

    def test_script_is_replayed(self, capsys, paths):
        code, doc, _ = run(capsys, "game", "simulate", *paths, "--script", "a,A,rA_fin")
        assert code == EXIT_OK
        assert doc["word"] == ["a", "A", "rA_fin"]
        assert doc["state"] == {"L": "l_fin", "R": "r_fin"}

    def test_disallowed_letter(self, capsys, paths):
        code, doc, err = run(capsys, "game", "simulate", *paths, "--script", "a B")
        assert code == EXIT_NEGATIVE
        assert doc["result"] == "false"
        assert "not allowed" in err

    def test_unknown_letter(self, capsys, paths):
        code, _, err = run(capsys, "game", "simulate", *paths, "--script", "zz")
        assert code == EXIT_INPUT
        assert "InputError" in err


class TestTrace:
    @pytest.fixture
    def path(self, write):
        doc = {"kind": "trace", "alphabet": documents.emit_alphabet(chain_alphabet()), "word": CHAIN_WORDS[1]}
        return write("trace.json", doc)

    def test_normalize(self, capsys, path):
        code, doc, _ = run(capsys, "trace", "normalize", path)
        assert code == EXIT_OK
        assert doc["word"] == list(normalize(chain_alphabet(), CHAIN_WORDS[0]).word)

    def test_view(self, capsys, path):
        code, doc, _ = run(capsys, "trace", "view", "--process", "1", path)
        assert code == EXIT_OK
        assert doc["word"] == ["{2}", "{3}", "{2,3}", "{1,2}"]

    def test_unknown_process(self, capsys, path):
        assert run(capsys, "trace", "view", "--process", "9", path)[0] == EXIT_INPUT


class TestUsage:
    def test_missing_file(self, capsys, tmp_path):
        code, doc, _ = run(capsys, "pcp", "solve", str(tmp_path / "absent.json"))
        assert code == EXIT_INPUT
        assert doc is None

    def test_bad_option(self, capsys, write):
        path = write("pcp.json", documents.emit(pcp_corpus()["a/a"]))
        assert run(capsys, "pcp", "solve", path, "--max-len", "0")[0] == EXIT_INPUT
        assert run(capsys, "pcp", "solve", path, "--no-such-flag")[0] == EXIT_INPUT

    def test_verbose_logs_to_stderr(self, capsys, write):
        game = write("game.json", documents.emit(two_process_game()))
        strategy = write("strategy.json", documents.emit(two_process_both_actions()))
        code, _, err = run(capsys, "-v", "game", "verify", game, strategy, "--max-depth", "10")
        assert code == EXIT_OK
        assert "verdict winning" in err
