import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.currents.limits import (
    build_simplex,
    closed_image_current,
    distance_to_simplex,
    iterate_limit,
    mixture,
)
from src.currents.strata import rational_limit_strata, strata
from src.currents.weights import (
    counting_current,
    flip_defect,
    kolmogorov_defect,
    mu_plus,
    norm,
    projective_distance,
    pushforward_rational,
)
from src.errors import ImageTooLongError, SimplexError, TrainTrackError, TrivialPathError
from src.model.graph import Graph

PHI = (1 + 5**0.5) / 2


def test_counting_current_of_a_short_loop():
    g = Graph.rose(["a", "b"])
    mu = counting_current(g, g.parse("ab"), 2)
    assert mu.exact
    assert norm(mu) == 2
    for label in ("a", "A", "b", "ab", "BA", "ba", "AB"):
        assert mu.value(g.parse(label)) == 1
    assert mu.value(g.parse("aa")) == 0
    assert kolmogorov_defect(mu) == 0
    assert flip_defect(mu) == 0


def test_counting_current_is_a_class_invariant():
    g = Graph.rose(["a", "b"])
    w = g.parse("aabAB")
    mu = counting_current(g, w, 3)
    rotated = counting_current(g, w[2:] + w[:2], 3)
    inverse = counting_current(g, tuple(x ^ 1 for x in reversed(w)), 3)
    assert np.array_equal(mu.values, rotated.values)
    assert np.array_equal(mu.values, inverse.values)
    assert projective_distance(mu, counting_current(g, w + w, 3)) == 0
    assert norm(counting_current(g, w + w, 3)) == 2 * len(w)


def test_counting_current_rejects_bad_loops():
    g = Graph.rose(["a", "b"])
    with pytest.raises(TrivialPathError):
        counting_current(g, (), 2)
    with pytest.raises(TrainTrackError):
        counting_current(g, g.parse("abA"), 2)
    with pytest.raises(TrainTrackError):
        projective_distance(counting_current(g, g.parse("ab"), 2), counting_current(g, g.parse("ab"), 3))


def test_pushforward_uses_the_user_map(load_ctx):
    ctx = load_ctx("fib")
    g = ctx.graph
    assert pushforward_rational(ctx, g.parse("ab")) == g.parse("aba")
    assert pushforward_rational(ctx, g.parse("ab"), base=False) == g.parse("abaab")


def test_fibonacci_limit_current(load_ctx):
    ctx = load_ctx("fib")
    g = ctx.graph
    mu = mu_plus(ctx, g.edge_id("a"), 2, 1e-7)
    assert norm(mu) == pytest.approx(1.0)
    assert mu.value(g.parse("a")) == pytest.approx(1 / PHI, abs=1e-6)
    assert mu.value(g.parse("b")) == pytest.approx(1 / PHI**2, abs=1e-6)
    assert mu.value(g.parse("bb")) == 0
    assert mu.meta["lambda"] == pytest.approx(PHI**2, abs=1e-6)
    assert kolmogorov_defect(mu) < 1e-5
    assert flip_defect(mu) < 1e-9
    other = mu_plus(ctx, g.edge_id("b"), 2, 1e-7)
    assert projective_distance(mu, other) < 1e-5


def test_plastic_simplex_is_a_point(load_ctx):
    ctx = load_ctx("plastic")
    simplex = build_simplex(ctx, radius=2, tol=1e-8, dedup_tol=1e-5, workers=2)
    assert simplex.dimension == 0
    assert simplex.uniform_faces == [[0]]
    assert sorted(simplex.vertices[0].edges) == ["a", "b", "c"]
    out = simplex.to_dict()
    assert out["dimension"] == 0
    assert out["sign"] == "+"
    dist, coeffs = distance_to_simplex(simplex.vertices[0].current, simplex)
    assert dist < 1e-9
    assert coeffs.tolist() == pytest.approx([1.0])


@pytest.mark.parametrize("name, dimension", [("plastic", 0), ("wedge", 1)])
def test_simplex_at_radius_three(load_ctx, name, dimension):
    simplex = build_simplex(load_ctx(name), radius=3, tol=1e-9, dedup_tol=1e-6)
    assert simplex.dimension == dimension
    for v in simplex.vertices:
        assert v.stretch > 1


def test_iterates_approach_the_plastic_vertex(load_ctx):
    ctx = load_ctx("plastic")
    g = ctx.graph
    simplex = build_simplex(ctx, radius=2, tol=1e-8, dedup_tol=1e-5, workers=1)
    start = counting_current(g, g.parse("ab"), 2)
    far, _ = distance_to_simplex(start, simplex)
    mu, steps = iterate_limit(ctx, g.parse("ab"), 2, budget=5000)
    near, _ = distance_to_simplex(mu, simplex)
    assert steps >= 1
    assert near < far
    assert near < 0.05
    closed = closed_image_current(ctx, g.edge_id("a"), 8, 2)
    assert distance_to_simplex(closed, simplex)[0] < 0.05
    with pytest.raises(ImageTooLongError):
        iterate_limit(ctx, g.parse("ab"), 2, budget=2)


def test_wedge_simplices_count_components(load_ctx):
    wedge = build_simplex(load_ctx("wedge"), radius=2, tol=1e-8, dedup_tol=1e-5)
    assert wedge.dimension == 1
    wedge3 = build_simplex(load_ctx("wedge3"), radius=2, tol=1e-8, dedup_tol=1e-5)
    assert wedge3.dimension == 2
    same = build_simplex(load_ctx("wedge_same"), radius=2, tol=1e-8, dedup_tol=1e-5)
    assert same.dimension == 1
    assert same.uniform_faces == [[0, 1]]


def test_mixtures_lie_on_the_simplex(load_ctx):
    simplex = build_simplex(load_ctx("wedge_same"), radius=2, tol=1e-8, dedup_tol=1e-5)
    mu = mixture(simplex, [0.3, 0.7])
    dist, coeffs = distance_to_simplex(mu, simplex)
    assert dist < 1e-9
    assert coeffs.tolist() == pytest.approx([0.3, 0.7], abs=1e-6)
    with pytest.raises(SimplexError):
        mixture(simplex, [1.0])
    with pytest.raises(SimplexError):
        mixture(simplex, [-1.0, 2.0])


def test_strata_of_a_reducible_map(load_ctx):
    ctx = load_ctx("reducible")
    order = strata(ctx)
    assert len(order.strata) == 2
    g = ctx.graph
    top = order.stratum_of[g.edge_id("c")]
    low = order.stratum_of[g.edge_id("a")]
    assert order.stratum_of[g.edge_id("b")] == low
    assert order.strata[top].pf == pytest.approx(4.0, abs=1e-6)
    assert order.strata[low].pf == pytest.approx(PHI**2, abs=1e-6)
    assert order.below(top) == sorted({top, low})
    assert order.below(low) == [low]


def test_rational_limit_follows_the_fastest_stratum(load_ctx):
    ctx = load_ctx("reducible")
    g = ctx.graph
    limit = rational_limit_strata(ctx, g.parse("ac"), radius=2, tol=1e-7)
    assert limit.edges == ["c"]
    assert limit.steps == 0
    assert projective_distance(limit.current, mu_plus(ctx, g.edge_id("c"), 2, 1e-7)) < 1e-9
    lower = rational_limit_strata(ctx, g.parse("ab"), radius=2, tol=1e-7, weighting="uniform")
    assert lower.edges == ["a", "b"]
    assert lower.weights == [1.0, 1.0]
    with pytest.raises(ValueError):
        rational_limit_strata(ctx, g.parse("ab"), weighting="loudest")
