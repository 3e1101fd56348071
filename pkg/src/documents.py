# src/documents.py
# -----------------------------------------------------------
# JSON documents exchanged by the CLI.
# - Every document carries "kind" and is validated against a
#   closed-world JSON Schema (unknown fields are rejected).
# - emit() is canonical: sets are written in declared order,
#   so emit(parse(doc)) == doc for canonical documents.
# - Tile indices are 1-based; coloring cells are x-major
#   (cells[x * m + y] = f(x, y)).
# -----------------------------------------------------------

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from automata import AsyncAutomaton, GlobalState, TransitionTable
from coloring import Coloring, ColoringConstraint, Violation
from errors import DocumentError, InputError, PreconditionError
from games import BlockAll, DistributedGame, RuleStrategy, Strategy, TableStrategy, VerificationVerdict
from pcp import PcpInstance, Tile
from reduction_game import BUILTIN_GAME, BUILTIN_STRATEGY, GameArtifacts, build_game, strategy_from_coloring
from traces import DependencyAlphabet, Trace, normalize

# ---------- Schemas ----------

_STRINGS = {"type": "array", "items": {"type": "string"}}
_PAIRS = {"type": "array", "items": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2}}
_PROCESS = {"type": ["string", "integer"]}


def _closed(properties: Dict[str, Any], required: List[str]) -> Dict[str, Any]:
    return {"type": "object", "properties": properties, "required": required, "additionalProperties": False}


DEFS: Dict[str, Any] = {
    "alphabet": _closed(
        {
            "letters": _STRINGS,
            "domains": {"type": "object", "additionalProperties": {"type": "array", "items": _PROCESS, "minItems": 1}},
        },
        ["letters", "domains"],
    ),
    "pcp": _closed(
        {
            "kind": {"const": "pcp"},
            "alphabet": _STRINGS,
            "tiles": {
                "type": "array",
                "minItems": 1,
                "items": _closed(
                    {"top": {"type": "string", "minLength": 1}, "bottom": {"type": "string", "minLength": 1}},
                    ["top", "bottom"],
                ),
            },
        },
        ["kind", "alphabet", "tiles"],
    ),
    "bcp-constraint": _closed(
        {
            "kind": {"const": "bcp-constraint"},
            "colors": _STRINGS,
            "initial": _STRINGS,
            "final": _STRINGS,
            "squares": _PAIRS,
            "upper": _PAIRS,
            "lower": _PAIRS,
            "provenance": _closed(
                {
                    "source": {"type": "string"},
                    "raw_colors": {"type": "integer", "minimum": 0},
                    "pruned_colors": {"type": "integer", "minimum": 0},
                },
                ["source"],
            ),
        },
        ["kind", "colors", "initial", "final", "squares", "upper", "lower"],
    ),
    "coloring": _closed(
        {
            "kind": {"const": "coloring"},
            "n": {"type": "integer", "minimum": 1},
            "m": {"type": "integer", "minimum": 1},
            "cells": _STRINGS,
        },
        ["kind", "n", "m", "cells"],
    ),
    "trace": _closed(
        {
            "kind": {"const": "trace"},
            "alphabet": {"$ref": "#/$defs/alphabet"},
            "word": _STRINGS,
            "state": {"type": "object", "additionalProperties": {"type": "string"}},
        },
        ["kind", "alphabet", "word"],
    ),
    "automaton": _closed(
        {
            "kind": {"const": "automaton"},
            "name": {"type": "string"},
            "alphabet": {"$ref": "#/$defs/alphabet"},
            "processes": {
                "type": "object",
                "additionalProperties": _closed(
                    {"states": _STRINGS, "initial": {"type": "string"}, "finals": _STRINGS},
                    ["states", "initial", "finals"],
                ),
            },
            "transitions": {
                "type": "array",
                "items": _closed(
                    {"letter": {"type": "string"}, "source": _STRINGS, "target": _STRINGS},
                    ["letter", "source", "target"],
                ),
            },
        },
        ["kind", "alphabet", "processes", "transitions"],
    ),
    "game": {
        "oneOf": [
            _closed(
                {
                    "kind": {"const": "game"},
                    "builtin": {"const": BUILTIN_GAME},
                    "params": _closed({"constraint": {"$ref": "#/$defs/bcp-constraint"}}, ["constraint"]),
                },
                ["kind", "builtin", "params"],
            ),
            _closed(
                {
                    "kind": {"const": "game"},
                    "automaton": {"$ref": "#/$defs/automaton"},
                    "environment": _STRINGS,
                },
                ["kind", "automaton", "environment"],
            ),
        ]
    },
    "strategy": {
        "oneOf": [
            _closed(
                {
                    "kind": {"const": "strategy"},
                    "builtin": {"const": BUILTIN_STRATEGY},
                    "params": _closed({"coloring": {"$ref": "#/$defs/coloring"}}, ["coloring"]),
                },
                ["kind", "builtin", "params"],
            ),
            _closed(
                {
                    "kind": {"const": "strategy"},
                    "builtin": {"const": "block-all"},
                    "params": _closed({}, []),
                },
                ["kind", "builtin", "params"],
            ),
            _closed(
                {
                    "kind": {"const": "strategy"},
                    "table": {
                        "type": "object",
                        "additionalProperties": {
                            "type": "array",
                            "items": _closed({"view": _STRINGS, "allow": _STRINGS}, ["view", "allow"]),
                        },
                    },
                },
                ["kind", "table"],
            ),
        ]
    },
    "verdict": _closed(
        {
            "kind": {"const": "verdict"},
            "result": {"enum": ["winning", "losing", "unknown", "found", "not-found", "true", "false"]},
            "witness": {"type": "array", "items": {"type": ["string", "integer"]}},
            "reason": {"type": "string"},
            "depth": {"type": "integer", "minimum": 0},
            "explored": {"type": "integer", "minimum": 0},
            "clauses": _STRINGS,
            "violation": _closed(
                {
                    "clause": {"type": "string"},
                    "cells": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                    "colors": _STRINGS,
                },
                ["clause", "cells", "colors"],
            ),
        },
        ["kind", "result"],
    ),
}

KINDS = ("pcp", "bcp-constraint", "coloring", "automaton", "game", "strategy", "trace", "verdict")

_validators = {
    kind: Draft202012Validator({"$defs": DEFS, "$ref": f"#/$defs/{kind}"}) for kind in KINDS
}


def validate(doc: Any, expected: Optional[str] = None) -> str:
    """Check a document against its schema; returns its kind."""
    if not isinstance(doc, dict):
        raise DocumentError("a document must be a JSON object")
    kind = doc.get("kind")
    if kind not in _validators:
        raise DocumentError(f"unknown kind {kind!r}", "$.kind")
    if expected is not None and kind != expected:
        raise DocumentError(f"expected a {expected} document, got {kind}", "$.kind")
    error = best_match(_validators[kind].iter_errors(doc))
    if error is not None:
        raise DocumentError(error.message, error.json_path)
    return kind


# ---------- I/O ----------

def load(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"invalid JSON at line {e.lineno}: {e.msg}") from None


def dumps(doc: Mapping[str, Any]) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False)


# ---------- Alphabets & traces ----------

def _processes_by_name(alphabet: DependencyAlphabet) -> Dict[str, Any]:
    return {str(p): p for p in alphabet.processes}


def process_of(alphabet: DependencyAlphabet, name: Any, field: str) -> Any:
    try:
        return _processes_by_name(alphabet)[str(name)]
    except KeyError:
        raise DocumentError(f"unknown process {name!r}", field) from None


def emit_alphabet(alphabet: DependencyAlphabet) -> Dict[str, Any]:
    return {
        "letters": list(alphabet.letters),
        "domains": {a: sorted(alphabet.domain[a], key=lambda p: (type(p).__name__, p)) for a in alphabet.letters},
    }


def parse_alphabet(doc: Mapping[str, Any], field: str = "$.alphabet") -> DependencyAlphabet:
    try:
        return DependencyAlphabet(doc["letters"], doc["domains"])
    except InputError as e:
        raise DocumentError(str(e), field) from None


def emit_trace(u: Trace, state: Optional[GlobalState] = None) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"kind": "trace", "alphabet": emit_alphabet(u.alphabet), "word": list(u.word)}
    if state is not None:
        doc["state"] = {str(p): _state_label(q) for p, q in state.as_dict().items()}
    return doc


def _state_label(q: Any) -> str:
    label = getattr(q, "label", None)
    return label() if callable(label) else str(q)


def parse_trace(doc: Mapping[str, Any]) -> Trace:
    validate(doc, "trace")
    alphabet = parse_alphabet(doc["alphabet"])
    try:
        return normalize(alphabet, doc["word"])
    except InputError as e:
        raise DocumentError(str(e), "$.word") from None


# ---------- PCP & colorings ----------

def emit_pcp(inst: PcpInstance) -> Dict[str, Any]:
    return {
        "kind": "pcp",
        "alphabet": list(inst.sigma),
        "tiles": [{"top": t.top, "bottom": t.bottom} for t in inst.tiles],
    }


def parse_pcp(doc: Mapping[str, Any]) -> PcpInstance:
    validate(doc, "pcp")
    try:
        return PcpInstance(tuple(doc["alphabet"]), tuple(Tile(t["top"], t["bottom"]) for t in doc["tiles"]))
    except InputError as e:
        raise DocumentError(str(e), "$.tiles") from None


def emit_constraint(k: ColoringConstraint) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "kind": "bcp-constraint",
        "colors": list(k.colors),
        "initial": k.ordered(k.initial),
        "final": k.ordered(k.final),
        "squares": [list(p) for p in k.ordered_pairs(k.squares)],
        "upper": [list(p) for p in k.ordered_pairs(k.upper)],
        "lower": [list(p) for p in k.ordered_pairs(k.lower)],
    }
    if k.provenance:
        doc["provenance"] = dict(k.provenance)
    return doc


def parse_constraint(doc: Mapping[str, Any], field: str = "$") -> ColoringConstraint:
    validate(doc, "bcp-constraint")
    try:
        return ColoringConstraint(
            colors=tuple(doc["colors"]),
            initial=frozenset(doc["initial"]),
            final=frozenset(doc["final"]),
            squares=frozenset(map(tuple, doc["squares"])),
            upper=frozenset(map(tuple, doc["upper"])),
            lower=frozenset(map(tuple, doc["lower"])),
            provenance=dict(doc.get("provenance", {})),
        )
    except InputError as e:
        raise DocumentError(str(e), field) from None


def emit_coloring(f: Coloring) -> Dict[str, Any]:
    return {"kind": "coloring", "n": f.n, "m": f.m, "cells": [str(c) for c in f.cells]}


def parse_coloring(doc: Mapping[str, Any], field: str = "$") -> Coloring:
    validate(doc, "coloring")
    try:
        return Coloring(doc["n"], doc["m"], tuple(doc["cells"]))
    except InputError as e:
        raise DocumentError(str(e), f"{field}.cells") from None


# ---------- Automata & games ----------

def emit_automaton(aut: AsyncAutomaton) -> Dict[str, Any]:
    if not isinstance(aut.transitions, TransitionTable):
        raise InputError("only table automata have an explicit document")
    doc: Dict[str, Any] = {"kind": "automaton"}
    if aut.name:
        doc["name"] = aut.name
    doc["alphabet"] = emit_alphabet(aut.alphabet)
    doc["processes"] = {
        str(p): {
            "states": sorted(map(str, aut.states[p])),
            "initial": str(aut.initial[p]),
            "finals": sorted(map(str, aut.finals[p])),
        }
        for p in aut.processes
    }
    doc["transitions"] = [
        {"letter": a, "source": list(source), "target": list(target)}
        for a, source, target in aut.transitions.rows()
    ]
    return doc


def parse_automaton(doc: Mapping[str, Any], field: str = "$") -> AsyncAutomaton:
    validate(doc, "automaton")
    alphabet = parse_alphabet(doc["alphabet"], f"{field}.alphabet")
    names = _processes_by_name(alphabet)
    if set(doc["processes"]) != set(names):
        raise DocumentError(f"processes must be exactly {sorted(names)}", f"{field}.processes")
    spec = {names[key]: value for key, value in doc["processes"].items()}
    try:
        table = TransitionTable(
            (t["letter"], tuple(t["source"]), tuple(t["target"])) for t in doc["transitions"]
        )
        for i, t in enumerate(doc["transitions"]):
            if t["letter"] not in alphabet:
                raise DocumentError(f"unknown letter {t['letter']!r}", f"{field}.transitions[{i}].letter")
            if len(t["source"]) != len(alphabet.domain[t["letter"]]):
                raise DocumentError("one source state per process of the letter's domain", f"{field}.transitions[{i}].source")
        return AsyncAutomaton(
            alphabet,
            states={p: set(s["states"]) for p, s in spec.items()},
            initial={p: s["initial"] for p, s in spec.items()},
            finals={p: set(s["finals"]) for p, s in spec.items()},
            transitions=table,
            name=doc.get("name"),
        )
    except DocumentError:
        raise
    except InputError as e:
        raise DocumentError(str(e), field) from None


def emit_game(game: Union[GameArtifacts, DistributedGame]) -> Dict[str, Any]:
    if isinstance(game, GameArtifacts):
        return {"kind": "game", "builtin": BUILTIN_GAME, "params": {"constraint": emit_constraint(game.constraint)}}
    return {
        "kind": "game",
        "automaton": emit_automaton(game.automaton),
        "environment": [a for a in game.alphabet.letters if a in game.environment],
    }


def parse_game(doc: Mapping[str, Any]) -> Union[GameArtifacts, DistributedGame]:
    validate(doc, "game")
    if "builtin" in doc:
        return build_game(parse_constraint(doc["params"]["constraint"], "$.params.constraint"))
    aut = parse_automaton(doc["automaton"], "$.automaton")
    environment = frozenset(doc["environment"])
    try:
        return DistributedGame(aut, frozenset(aut.alphabet.letters) - environment, environment)
    except InputError as e:
        raise DocumentError(str(e), "$.environment") from None


def game_of(game: Union[GameArtifacts, DistributedGame]) -> DistributedGame:
    return game.game if isinstance(game, GameArtifacts) else game


# ---------- Strategies ----------

def emit_strategy(strategy: Strategy) -> Dict[str, Any]:
    if isinstance(strategy, BlockAll):
        return {"kind": "strategy", "builtin": "block-all", "params": {}}
    if isinstance(strategy, RuleStrategy) and strategy.name == BUILTIN_STRATEGY:
        return {"kind": "strategy", "builtin": BUILTIN_STRATEGY, "params": {"coloring": emit_coloring(strategy.params["coloring"])}}
    if isinstance(strategy, TableStrategy):
        return {
            "kind": "strategy",
            "table": {
                str(p): [{"view": list(view), "allow": sorted(allow)} for view, allow in rows.items()]
                for p, rows in strategy.table.items()
            },
        }
    raise InputError(f"strategy {strategy.name!r} has no document form")


def parse_strategy(doc: Mapping[str, Any], game: Union[GameArtifacts, DistributedGame]) -> Strategy:
    validate(doc, "strategy")
    builtin = doc.get("builtin")
    if builtin == "block-all":
        return BlockAll()
    if builtin == BUILTIN_STRATEGY:
        if not isinstance(game, GameArtifacts):
            raise DocumentError(f"{BUILTIN_STRATEGY} needs a {BUILTIN_GAME} game", "$.builtin")
        f = parse_coloring(doc["params"]["coloring"], "$.params.coloring")
        try:
            return strategy_from_coloring(game, f)
        except (InputError, PreconditionError) as e:
            raise DocumentError(str(e), "$.params.coloring") from None

    alphabet = game_of(game).alphabet
    table: Dict[Any, Dict[tuple, List[str]]] = {}
    for name, rows in doc["table"].items():
        p = process_of(alphabet, name, f"$.table.{name}")
        table[p] = {}
        for i, row in enumerate(rows):
            where = f"$.table.{name}[{i}]"
            try:
                view = normalize(alphabet, row["view"]).word
                allow = list(alphabet.check_word(row["allow"]))
            except InputError as e:
                raise DocumentError(str(e), where) from None
            table[p][view] = allow
    return TableStrategy(table)


# ---------- Verdicts ----------

def verdict_document(result: str, **fields: Any) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"kind": "verdict", "result": result}
    doc.update({k: v for k, v in fields.items() if v is not None})
    return doc


def emit_verdict(verdict: VerificationVerdict, clauses: Optional[List[str]] = None) -> Dict[str, Any]:
    return verdict_document(
        verdict.kind.value,
        witness=list(verdict.witness.word) if verdict.witness is not None else None,
        reason=verdict.reason,
        depth=verdict.depth,
        explored=verdict.explored,
        clauses=clauses,
    )


def emit_violation(v: Violation) -> Dict[str, Any]:
    return {"clause": v.clause, "cells": [list(c) for c in v.cells], "colors": [str(c) for c in v.colors]}


# ---------- Dispatch ----------

def parse(doc: Mapping[str, Any], game: Union[GameArtifacts, DistributedGame, None] = None) -> Any:
    kind = validate(doc)
    if kind == "strategy":
        if game is None:
            raise InputError("parsing a strategy needs its game")
        return parse_strategy(doc, game)
    if kind == "verdict":
        return dict(doc)
    return {
        "pcp": parse_pcp,
        "bcp-constraint": parse_constraint,
        "coloring": parse_coloring,
        "automaton": parse_automaton,
        "game": parse_game,
        "trace": parse_trace,
    }[kind](doc)


def emit(obj: Any) -> Dict[str, Any]:
    if isinstance(obj, PcpInstance):
        return emit_pcp(obj)
    if isinstance(obj, ColoringConstraint):
        return emit_constraint(obj)
    if isinstance(obj, Coloring):
        return emit_coloring(obj)
    if isinstance(obj, Trace):
        return emit_trace(obj)
    if isinstance(obj, AsyncAutomaton):
        return emit_automaton(obj)
    if isinstance(obj, (GameArtifacts, DistributedGame)):
        return emit_game(obj)
    if isinstance(obj, Strategy):
        return emit_strategy(obj)
    if isinstance(obj, VerificationVerdict):
        return emit_verdict(obj)
    if isinstance(obj, dict) and obj.get("kind") == "verdict":
        return dict(obj)
    raise InputError(f"no document form for {type(obj).__name__}")
