import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.analysis.constants import bad_image_power, dichotomy_formulas
from src.analysis.goodness import (
    bad_mask,
    goodness,
    goodness_lower_bound,
    goodness_monotone_power,
    steps_to_goodness,
)
from src.errors import TrainTrackError, TrivialPathError
from src.model.graph import is_cyclically_reduced
from src.sim.sampling import random_loop


def test_legal_loops_are_good(load_ctx):
    ctx = load_ctx("fib")
    g = ctx.graph
    report = goodness(ctx, g.parse("ab"))
    assert report.goodness == 1
    assert (report.good, report.bad, report.ilt) == (2, 0, 0)
    assert goodness(ctx, ctx.step(g.parse("ab"), 3)).goodness == 1


def test_short_illegal_loop_has_no_good_edge(load_ctx):
    ctx = load_ctx("fib")
    report = goodness(ctx, ctx.graph.parse("Ab"))
    assert report.goodness == 0
    assert report.ilt == 1


def test_bad_edges_sit_within_cutoff_of_an_illegal_junction(load_ctx):
    ctx = load_ctx("fib")
    w = ctx.graph.parse("Abababab")
    mask = bad_mask(ctx, w)
    # junction 0 is the only illegal one; cutoff is 3 on both sides
    assert mask == [True, True, True, True, False, False, True, True]
    assert goodness(ctx, w).goodness == Fraction(1, 4)


def test_junction_edges_are_bad_without_cancellation(load_ctx):
    ctx = replace(load_ctx("fib"), cancellation=0)
    assert ctx.cutoff == 0
    w = ctx.graph.parse("Abababab")
    assert bad_mask(ctx, w) == [True, True] + [False] * 6
    report = goodness(ctx, w)
    assert report.ilt == 1
    assert report.bad >= report.ilt


def test_goodness_rejects_trivial_and_unreduced_loops(load_ctx):
    ctx = load_ctx("fib")
    with pytest.raises(TrivialPathError):
        goodness(ctx, ())
    with pytest.raises(TrainTrackError):
        goodness(ctx, ctx.graph.parse("abB"))


def test_illegal_turns_never_increase_along_orbits(load_ctx):
    ctx = load_ctx("plastic")
    s = goodness_monotone_power(ctx)
    assert ctx.bounds.lambda_min**s >= 2 * ctx.critical
    rng = np.random.default_rng(3)
    for _ in range(20):
        w = random_loop(ctx.graph, rng, 12)
        if not w:
            continue
        assert is_cyclically_reduced(w)
        before = goodness(ctx, w)
        after = goodness(ctx, ctx.step(w, s))
        assert after.ilt <= before.ilt
        if before.goodness == 1:
            assert after.goodness == 1


def test_goodness_lower_bound_and_steps(load_ctx):
    assert goodness_lower_bound(Fraction(1, 2), Fraction(3), 2, 3) == Fraction(4, 7)
    assert goodness_lower_bound(Fraction(1), Fraction(3), 2, 3) == 1
    assert goodness_lower_bound(Fraction(0), Fraction(3), 2, 3) == 0
    ctx = load_ctx("fib")
    assert goodness_monotone_power(ctx) == 3
    assert steps_to_goodness(ctx, Fraction(1, 2), Fraction(1, 10)) == 24
    assert steps_to_goodness(ctx, Fraction(1), Fraction(1, 10)) == 0
    with pytest.raises(ValueError):
        steps_to_goodness(ctx, Fraction(0), Fraction(1, 10))


def test_dichotomy_formulas_are_exact(load_ctx):
    delta, R = dichotomy_formulas(Fraction(3), 2)
    assert delta == Fraction(1, 25)
    assert R == Fraction(51, 50)
    ctx = load_ctx("fib")
    # |f^s(e)| >= 2C + 1 = 7 for the squared Fibonacci map: lengths 3, 8, 21 and 2, 5, 13
    assert bad_image_power(ctx) == 3
