# test_coloring.py

import itertools
import random

import numpy as np
import pytest

from coloring import (
    Coloring,
    ColoringConstraint,
    all_colorings,
    grid_sizes,
    iter_solutions,
    patterns,
    satisfies,
    solve,
)
from errors import InputError
from fixtures import (
    corner_coloring,
    corner_constraint,
    first_column_constraint,
    sign_coloring,
    sign_constraint,
    zero_detector_coloring,
    zero_detector_constraint,
)


def brute_solutions(k, n, m):
    return [f for f in all_colorings(k.colors, n, m) if satisfies(f, k)]


def random_constraint(rng, colors):
    pairs = list(itertools.product(colors, repeat=2))

    def some(pool, p):
        return {x for x in pool if rng.random() < p}

    return ColoringConstraint(
        colors=colors,
        initial=some(colors, 0.7) or {colors[0]},
        final=some(colors, 0.7) or {colors[-1]},
        squares=some(pairs, 0.3),
        upper=some(pairs, 0.3),
        lower=some(pairs, 0.3),
    )


class TestColoring:
    def test_corner_layout_is_x_major(self):
        f = corner_coloring()
        assert f[0, 0] == "G" and f[3, 1] == "B"
        assert f.grid.shape == (4, 2)
        assert f.grid[3, 1] == "B"
        assert np.count_nonzero(f.grid == "R") == 6

    def test_corner_satisfies_its_constraint(self):
        assert satisfies(corner_coloring(), corner_constraint())

    def test_corner_patterns(self):
        p = patterns(corner_coloring())
        expected = {("G", "R"), ("R", "R"), ("R", "B")}
        assert p.upper == expected
        assert p.lower == expected
        assert p.squares == expected

    def test_out_of_range_cell(self):
        with pytest.raises(InputError):
            corner_coloring()[4, 0]

    def test_wrong_cell_count(self):
        with pytest.raises(InputError):
            Coloring(2, 2, ("a", "b", "c"))

    def test_constraint_validation(self):
        with pytest.raises(InputError):
            ColoringConstraint(("a", "a"), {"a"}, {"a"})
        with pytest.raises(InputError):
            ColoringConstraint(("a",), {"b"}, {"a"})
        with pytest.raises(InputError):
            ColoringConstraint(("a",), {"a"}, {"a"}, upper={("a", "z")})


class TestSatisfies:
    def test_colors_outside_c(self):
        with pytest.raises(InputError):
            satisfies(Coloring(1, 1, ("X",)), corner_constraint())

    def test_initial_violation(self):
        f = Coloring(1, 2, ("B", "B"))
        report = satisfies(f, corner_constraint())
        assert not report
        assert report.violation.clause == "initial"
        assert report.violation.cells == ((0, 0),)

    def test_forbidden_pair_is_located(self):
        f = Coloring(2, 1, ("G", "B"))
        report = satisfies(f, corner_constraint())
        assert report.violation.clause == "upper"
        assert report.violation.cells == ((0, 0), (1, 0))
        assert report.violation.colors == ("G", "B")

    def test_single_cell_uses_both_initial_and_final(self):
        assert not satisfies(Coloring(1, 1, ("G",)), corner_constraint())
        one = ColoringConstraint(("G",), {"G"}, {"G"})
        assert satisfies(Coloring(1, 1, ("G",)), one)


class TestToyConstraints:
    @pytest.mark.parametrize("n,m", [(n, m) for n in range(1, 4) for m in range(1, 4)])
    def test_first_column_is_exactly_zero(self, n, m):
        k = first_column_constraint()
        solutions = list(iter_solutions(k, n, m))
        assert solutions == brute_solutions(k, n, m)
        assert len(solutions) == 1
        for f in solutions:
            for x in range(n):
                for y in range(m):
                    assert (f[x, y] == "0") == (x == 0)

    @pytest.mark.parametrize("n,m", [(n, m) for n in range(1, 5) for m in range(1, 5)])
    def test_sign_pattern_is_the_unique_solution(self, n, m):
        solutions = list(iter_solutions(sign_constraint(), n, m))
        assert solutions == [sign_coloring(n, m)]

    @pytest.mark.parametrize("n,m", [(n, m) for n in range(1, 5) for m in range(1, 5)])
    def test_zero_final_forces_a_square_grid(self, n, m):
        solutions = list(iter_solutions(sign_constraint(final_zero_only=True), n, m))
        assert bool(solutions) == (n == m)

    @pytest.mark.parametrize("n,m", [(n, m) for n in range(1, 4) for m in range(1, 4)])
    def test_sign_pattern_against_raw_enumeration(self, n, m):
        assert brute_solutions(sign_constraint(), n, m) == [sign_coloring(n, m)]

    @pytest.mark.parametrize("n,m", [(n, m) for n in range(1, 4) for m in range(1, 4)])
    def test_zero_detector(self, n, m):
        assert list(iter_solutions(zero_detector_constraint(), n, m)) == [zero_detector_coloring(n, m)]


class TestSolve:
    def test_grid_size_order(self):
        assert grid_sizes(2, 3) == [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (2, 3)]

    def test_smallest_grid_first(self):
        f = solve(sign_constraint(final_zero_only=True), 2, 3)
        assert (f.n, f.m) == (1, 1)
        assert f.cells == ("0",)

    def test_corner_constraint_smallest_solution(self):
        f = solve(corner_constraint(), 4, 4)
        assert satisfies(f, corner_constraint())
        assert (f.n, f.m) == (1, 2)
        assert f.cells == ("R", "B")

    def test_empty_initial_set_short_circuits(self):
        k = ColoringConstraint(("a",), set(), {"a"})
        assert solve(k, 3, 3) is None

    def test_bad_bounds(self):
        with pytest.raises(InputError):
            solve(corner_constraint(), 0, 2)

    def test_agrees_with_enumeration_on_two_colors(self):
        rng = random.Random(11)
        for _ in range(40):
            k = random_constraint(rng, ("p", "q"))
            for n, m in grid_sizes(3, 3):
                assert list(iter_solutions(k, n, m)) == brute_solutions(k, n, m)

    def test_agrees_with_enumeration_on_three_colors(self):
        rng = random.Random(12)
        for _ in range(40):
            k = random_constraint(rng, ("p", "q", "r"))
            found = solve(k, 2, 2)
            expected = next(
                (brute_solutions(k, n, m)[0] for n, m in grid_sizes(2, 2) if brute_solutions(k, n, m)),
                None,
            )
            assert found == expected
