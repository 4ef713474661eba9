import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.analysis.context import build_context
from src.errors import (
    ImageTooLongError,
    InvariantLoopError,
    IrregularMapError,
    NotExpandingError,
    NotTrainTrackError,
)
from src.model.cancellation import brute_force_cancellation, cancellation_bound
from src.model.graph import Graph
from src.model.graph_map import (
    GraphMap,
    classify_turns,
    compose,
    contract_invariant_forest,
    image_lengths,
    is_train_track,
    make_expanding,
    power,
    transition_matrix,
)


def _rose_map(rules):
    names = list(rules)
    g = Graph.rose(names)
    return GraphMap.from_positive(g, [g.parse(rules[n]) for n in names])


def test_fibonacci_map_basics(load_map):
    f = load_map("fib")
    assert f.is_positive
    assert f.describe() == {"a": "ab", "b": "a"}
    assert f.apply(f.graph.parse("aB")) == f.graph.parse("abA")
    assert f.apply_reduced(f.graph.parse("Ab")) == f.graph.parse("B")
    assert f.apply_cyclic(f.graph.parse("abAB")) == f.graph.parse("baBA")


def test_irregular_maps_are_rejected():
    g = Graph.rose(["a", "b"])
    with pytest.raises(IrregularMapError):
        GraphMap.from_positive(g, [g.parse("aA"), g.parse("b")])
    with pytest.raises(IrregularMapError):
        GraphMap.from_positive(g, [g.parse("a")])


def test_powers_follow_the_length_recursion(load_map):
    f = load_map("fib")
    assert image_lengths(f, 5)[0] == 13
    assert image_lengths(f, 5)[2] == 8
    assert power(f, 2).describe() == {"a": "aba", "b": "ab"}
    assert compose(f, f).describe() == power(f, 2).describe()
    with pytest.raises(ImageTooLongError):
        power(f, 10, budget=50)


def test_turns_and_train_track_witness(load_map):
    f = load_map("fib")
    assert classify_turns(f).labels(f.graph) == ["{a,b}"]
    assert is_train_track(f).ok
    theta = load_map("theta")
    check = is_train_track(theta)
    assert not check.ok
    assert check.witness(theta.graph) == {"edge": "a", "turn": "{b,c}"}
    with pytest.raises(NotTrainTrackError):
        build_context(theta)


def test_make_expanding_and_transition_matrix(load_map):
    f = load_map("fib")
    g, k = make_expanding(f, 12)
    assert k == 2
    assert g.describe() == {"a": "aba", "b": "ab"}
    assert transition_matrix(f).tolist() == [[1, 1], [1, 0]]
    assert transition_matrix(f, oriented=True).sum() == 2 * 3


def test_positive_map_is_already_expanding(load_map):
    f = load_map("cat")
    assert f.is_positive
    assert transition_matrix(f).tolist() == [[2, 1], [1, 1]]
    assert is_train_track(f).ok
    _, k = make_expanding(f, 12)
    assert k == 1


def test_invariant_forest_is_contracted():
    g = Graph(("u", "w"), ("a", "t", "b"), (0, 0, 1), (0, 1, 1))
    f = GraphMap.from_positive(g, [g.parse("atbT"), g.parse("t"), g.parse("Tatb")])
    q = contract_invariant_forest(f)
    assert q is not None
    assert q.graph.vertices == ("u",)
    assert q.describe() == {"a": "ab", "b": "ab"}
    assert contract_invariant_forest(q) is None


def test_invariant_loop_is_an_error():
    f = _rose_map({"a": "a", "b": "bab"})
    with pytest.raises(InvariantLoopError):
        contract_invariant_forest(f)


def test_power_override_must_expand(load_map):
    with pytest.raises(NotExpandingError):
        build_context(load_map("fib"), power_override=1)


def test_cancellation_bound_matches_brute_force(load_map, load_ctx):
    f = load_map("fib")
    assert cancellation_bound(f) == 1
    assert brute_force_cancellation(f, 4) == 1
    f2 = power(f, 2)
    assert cancellation_bound(f2) == 3
    assert brute_force_cancellation(f2, 4) == 3
    ctx = load_ctx("plastic")
    assert brute_force_cancellation(ctx.map, 3) == ctx.cancellation == 4


def test_context_constants(load_ctx):
    ctx = load_ctx("fib")
    assert ctx.power == 2
    assert (ctx.bounds.lambda_min, ctx.bounds.lambda_max) == (2, 3)
    assert ctx.cancellation == 3
    assert ctx.critical == Fraction(3)
    assert ctx.cutoff == 3
    summary = ctx.summary()
    assert summary["illegal_turns"] == ["{a,b}"]
    assert summary["images"] == {"a": "aba", "b": "ab"}

    plastic = load_ctx("plastic")
    assert plastic.power == 3
    assert plastic.map.describe() == {"a": "ab", "b": "bc", "c": "cab"}
    assert plastic.turns.labels(plastic.graph) == ["{A,C}"]


def test_illegal_junctions_are_counted_cyclically(load_ctx):
    ctx = load_ctx("fib")
    g = ctx.graph
    assert ctx.ilt(g.parse("ab")) == 0
    assert ctx.illegal_junctions(g.parse("Ab")) == [0]
    assert ctx.ilt(g.parse("bA")) == 1
    assert ctx.illegal_junctions(g.parse("bA"), cyclic=False) == []
    assert ctx.step(g.parse("ab")) == g.parse("abaab")
    assert np.array_equal(ctx.map.apply_array(np.array(g.parse("ab"))), np.array(g.parse("abaab")))
