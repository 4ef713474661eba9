import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.analysis.constants import dichotomy_constants
from src.analysis.goodness import goodness, goodness_monotone_power
from src.currents.weights import flip_defect, kolmogorov_defect, mu_plus
from src.model.cancellation import brute_force_cancellation
from src.model.graph import reverse
from src.sim.sampling import random_loops
from src.subst.frequencies import frequency_array, stretch_factor
from src.subst.substitution import convergence_power, iterate_states, substitution_from_map

TRAIN_TRACKS = ["fib", "fib_inv", "plastic", "plastic_inv", "cat", "reducible", "wedge", "wedge3", "wedge_inv", "wedge_same"]
HYPERBOLIC = ["plastic", "plastic_inv", "wedge", "wedge_inv"]


def _legal_walk(ctx, rng, first, length):
    walk = [first]
    while len(walk) < length:
        options = ctx.legal_followers(walk[-1])
        if not options:
            break
        walk.append(options[int(rng.integers(len(options)))])
    return tuple(walk)


def _common_prefix(a, b):
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


@pytest.mark.parametrize("name", TRAIN_TRACKS)
def test_cancellation_bound_holds_for_all_short_legal_pairs(load_ctx, name):
    ctx = load_ctx(name)
    assert brute_force_cancellation(ctx.map, 2 * ctx.cancellation + 2) <= ctx.cancellation


@pytest.mark.parametrize("name", TRAIN_TRACKS)
def test_cancellation_bound_holds_for_random_concatenations(load_ctx, name):
    ctx = load_ctx(name)
    g = ctx.graph
    f = ctx.map
    rng = np.random.default_rng(17)
    worst = 0
    for _ in range(10_000):
        u = _legal_walk(ctx, rng, int(rng.integers(g.n_edges)), int(rng.integers(1, 13)))
        nxt = g.followers(u[-1])
        v = _legal_walk(ctx, rng, nxt[int(rng.integers(len(nxt)))], int(rng.integers(1, 13)))
        worst = max(worst, _common_prefix(reverse(f.apply(u)), f.apply(v)))
    assert worst <= ctx.cancellation


@pytest.mark.parametrize("name", TRAIN_TRACKS)
def test_goodness_laws_on_random_loops(load_ctx, name):
    ctx = load_ctx(name)
    s = goodness_monotone_power(ctx)
    lam = ctx.bounds.lambda_min
    for w in random_loops(ctx.graph, 1000, 10, seed=23):
        before = goodness(ctx, w)
        once = goodness(ctx, ctx.step(w))
        assert once.good >= lam * before.good
        assert once.ilt <= before.ilt
        assert goodness(ctx, ctx.step(w, s)).goodness >= before.goodness


@pytest.mark.parametrize("name", HYPERBOLIC)
def test_goodness_dichotomy_on_random_loops(load_ctx, name):
    ctx = load_ctx(name)
    consts = dichotomy_constants(ctx)
    s = consts.s_bad
    for w in random_loops(ctx.graph, 1000, 10, seed=29):
        after = ctx.step(w, s)
        gains_goodness = goodness(ctx, after).goodness >= consts.delta / 2
        loses_turns = ctx.ilt(w) >= consts.R_dich * ctx.ilt(after)
        assert gains_goodness or loses_turns


@pytest.mark.parametrize("name", TRAIN_TRACKS)
def test_limit_currents_are_flip_and_extension_invariant(load_ctx, name):
    ctx = load_ctx(name)
    tol = 1e-9
    for e in ctx.graph.positive_edges:
        mu = mu_plus(ctx, e, 3, tol)
        assert flip_defect(mu) <= 10 * tol
        assert kolmogorov_defect(mu) <= 10 * tol


def _settled_step(ctx, e, radius=3, tol=1e-6, cap=200, run=3):
    """First ``t`` from which ``run`` successive iterates agree to ``tol`` in frequency and growth."""
    sub = substitution_from_map(ctx)
    g = ctx.graph
    p = convergence_power(sub, e)
    lam = stretch_factor(sub, e)
    prev = None
    streak = 0
    for t, states in enumerate(iterate_states(sub, radius)):
        if t % p:
            continue
        cur = frequency_array(g, states[e], radius)
        length = states[e].length
        if prev is not None:
            close = float(np.max(np.abs(cur - prev[0]))) < tol
            ratio = (length / prev[1]) ** (1.0 / p)
            streak = streak + 1 if close and abs(ratio - lam) < tol else 0
            if streak >= run:
                return t
        prev = (cur, length)
        if t >= cap:
            return None


@pytest.mark.parametrize("name", TRAIN_TRACKS)
def test_edge_iterates_settle_on_their_eigencurrent(load_ctx, name):
    ctx = load_ctx(name)
    for e in ctx.graph.positive_edges:
        assert _settled_step(ctx, e) is not None, ctx.graph.name(e)
