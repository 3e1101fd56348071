# src/run_desk_checks.py
# -----------------------------------------------------------
# Reproduce the small concrete claims end to end and save a
# results table.
# - python src/run_desk_checks.py
# - One row per case: check, case, expected, observed, ok, seconds
# - Cases are independent and run in joblib workers.
# -----------------------------------------------------------

from __future__ import annotations

import os
import time
from typing import Any, Callable, Dict, List, Tuple

import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from coloring import iter_solutions, satisfies, solve
from fixtures import (
    CHAIN_WORDS,
    chain_alphabet,
    converse_corpus,
    corner_coloring,
    corner_constraint,
    first_column_constraint,
    losing_cases,
    pcp_corpus,
    sign_coloring,
    sign_constraint,
)
from games import verify_winning
from pcp import brute_force, check_solution, decode_coloring, to_coloring_constraint
from reduction_game import GameAudit, build_game, coloring_from_strategy, strategy_from_answers, strategy_from_coloring
from traces import is_prime, maxima, normalize

# ---------- Config ----------
OUTPUT_DIR = "data"
OUTPUT_CSV = os.path.join(OUTPUT_DIR, "desk_checks.csv")
N_JOBS = -1
PCP_MAX_LEN = 3
GAME_MAX_LEN = 100
TOY_MAX_SIDE = 4

Row = Dict[str, Any]


# ---------- Checks ----------
# Each check returns (expected, observed); a row is ok when they are equal.

def check_chain() -> Tuple[Any, Any]:
    alphabet = chain_alphabet()
    u, v = (normalize(alphabet, w) for w in CHAIN_WORDS)
    observed = (u == v, sorted(maxima(u)), is_prime(u))
    return (True, ["{1,2}", "{3,4}"], False), observed


def check_corner() -> Tuple[Any, Any]:
    return True, bool(satisfies(corner_coloring(), corner_constraint()))


def check_first_column(n: int, m: int) -> Tuple[Any, Any]:
    solutions = list(iter_solutions(first_column_constraint(), n, m))
    zeros = [{(x, y) for x in range(n) for y in range(m) if f[x, y] == "0"} for f in solutions]
    return [{(0, y) for y in range(m)}], zeros


def check_sign(n: int, m: int) -> Tuple[Any, Any]:
    plain = list(iter_solutions(sign_constraint(), n, m))
    square = any(True for _ in iter_solutions(sign_constraint(final_zero_only=True), n, m))
    return ([sign_coloring(n, m)], n == m), (plain, square)


def check_pcp_round_trip(name: str) -> Tuple[Any, Any]:
    inst = pcp_corpus()[name]
    bound = PCP_MAX_LEN * max(max(len(t.top), len(t.bottom)) for t in inst.tiles)
    expected = brute_force(inst, PCP_MAX_LEN) is not None
    f = solve(to_coloring_constraint(inst), bound, bound)
    if f is None:
        return expected, False
    top_seq, bottom_seq = decode_coloring(inst, f)
    return expected, top_seq == bottom_seq and check_solution(inst, top_seq)


def check_converse(name: str) -> Tuple[Any, Any]:
    case = {c.name: c for c in converse_corpus()}[name]
    arts = build_game(case.constraint)
    verdict = verify_winning(arts.game, strategy_from_coloring(arts, case.coloring), GAME_MAX_LEN, GameAudit(arts, forbid_lose=True))
    return "winning", verdict.kind.value


def check_direct(name: str) -> Tuple[Any, Any]:
    case = {c.name: c for c in converse_corpus()}[name]
    arts = build_game(case.constraint)
    f = coloring_from_strategy(arts, strategy_from_coloring(arts, case.coloring), GAME_MAX_LEN)
    return case.coloring.cells, f.cells if f is not None else None


def check_losing_clause(clause: str) -> Tuple[Any, Any]:
    case = losing_cases()[clause]
    arts = build_game(case.constraint)
    strategy = strategy_from_answers(arts, case.n, case.m, case.answer_fn, name=f"cheat-{clause}")
    verdict = verify_winning(arts.game, strategy, GAME_MAX_LEN, GameAudit(arts))
    if verdict.witness is None:
        return [clause], verdict.kind.value
    return [clause], sorted({c.condition for c in arts.witness_clauses(verdict.witness)})


# ---------- Jobs ----------

def build_jobs() -> List[Tuple[str, str, Callable[..., Tuple[Any, Any]], tuple]]:
    sides = [(n, m) for n in range(1, TOY_MAX_SIDE + 1) for m in range(1, TOY_MAX_SIDE + 1)]
    cases = [c.name for c in converse_corpus()]
    jobs = [("chain", "two linearizations", check_chain, ()), ("corner", "4x2", check_corner, ())]
    jobs += [("first-column", f"{n}x{m}", check_first_column, (n, m)) for n, m in sides if n < TOY_MAX_SIDE and m < TOY_MAX_SIDE]
    jobs += [("sign", f"{n}x{m}", check_sign, (n, m)) for n, m in sides]
    jobs += [("pcp-round-trip", name, check_pcp_round_trip, (name,)) for name in pcp_corpus()]
    jobs += [("converse", name, check_converse, (name,)) for name in cases]
    jobs += [("direct", name, check_direct, (name,)) for name in cases]
    jobs += [("losing-clause", clause, check_losing_clause, (clause,)) for clause in sorted(losing_cases())]
    return jobs


def run_job(check: str, case: str, fn: Callable[..., Tuple[Any, Any]], args: tuple) -> Row:
    start = time.perf_counter()
    expected, observed = fn(*args)
    return {
        "check": check,
        "case": case,
        "expected": repr(expected),
        "observed": repr(observed),
        "ok": expected == observed,
        "seconds": round(time.perf_counter() - start, 3),
    }


# ---------- Main ----------

def main() -> pd.DataFrame:
    jobs = build_jobs()
    print(f"✅ Prepared {len(jobs)} desk checks")

    rows = Parallel(n_jobs=N_JOBS)(
        delayed(run_job)(check, case, fn, args) for check, case, fn, args in tqdm(jobs, desc="Desk checks")
    )
    df = pd.DataFrame(rows)

    summary = df.groupby("check")["ok"].agg(["sum", "count"])
    print("\n📊 Passed per check:")
    print(summary.to_string())

    os.makedirs(OUTPUT_DIR, exist_ok=True)
    df.to_csv(OUTPUT_CSV, index=False)
    print(f"💾 Saved {len(df)} rows → {OUTPUT_CSV}")

    failed = df[~df["ok"]]
    if failed.empty:
        print("✅ All desk checks passed")
    else:
        print(f"⚠️ {len(failed)} desk checks failed:")
        print(failed[["check", "case", "expected", "observed"]].to_string(index=False))
    return df


if __name__ == "__main__":
    main()
