import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.analysis.decomposition import (
    good_bad_decomposition,
    pseudo_legal_decomposition,
    pull_back_decomposition,
)
from src.analysis.inps import Branch, NielsenPath
from src.errors import DecompositionError


def test_illegal_loop_splits_into_even_factors(load_ctx):
    ctx = load_ctx("fib")
    w = ctx.graph.parse("AbAbAbAb")
    assert ctx.illegal_junctions(w) == [0, 2, 4, 6]
    factors = good_bad_decomposition(ctx, w, A=1)
    assert [f.kind for f in factors] == ["odd", "even", "odd", "even"]
    assert sum(f.length for f in factors) == len(w)
    for f in factors:
        if f.kind == "even":
            assert 2 <= f.ilt <= 3
            assert f.goodness == 0
        else:
            assert f.length == 0


def test_long_legal_stretch_stays_one_odd_factor(load_ctx):
    ctx = load_ctx("fib")
    w = ctx.graph.parse("Ababababab")
    factors = good_bad_decomposition(ctx, w, A=0)
    assert len(factors) == 1
    assert factors[0].kind == "odd"
    assert factors[0].length == len(w)
    assert factors[0].ilt == 1


def test_too_few_illegal_turns_is_an_error(load_ctx):
    ctx = load_ctx("fib")
    with pytest.raises(DecompositionError):
        good_bad_decomposition(ctx, ctx.graph.parse("ab"), A=1)


def test_nielsen_loop_is_pseudo_legal(load_ctx):
    ctx = load_ctx("fib")
    g = ctx.graph
    eta = NielsenPath(Branch(g.parse("ab")), Branch(g.parse("ba")), 1)
    dec = pseudo_legal_decomposition(ctx, g.parse("ABab"), [eta])
    assert dec is not None
    assert dec.inp_count == 1
    assert dec.legal_edges == ()
    assert dec.spans[0].junction == 1
    assert pseudo_legal_decomposition(ctx, g.parse("AbAb"), [eta]) is None
    legal = pseudo_legal_decomposition(ctx, g.parse("aab"), [eta])
    assert legal is not None and legal.inp_count == 0


def test_pull_back_lifts_image_cuts(load_ctx):
    ctx = load_ctx("fib")
    g = ctx.graph
    w = g.parse("ABabABab")
    image = ctx.map.apply_cyclic(w)
    assert image == w
    cuts = ctx.illegal_junctions(image)
    assert cuts == [1, 5]
    lifted = pull_back_decomposition(ctx, w, cuts)
    assert len(lifted) == len(cuts)
    assert set(lifted) <= set(ctx.illegal_junctions(w))
    with pytest.raises(DecompositionError):
        pull_back_decomposition(ctx, w, [0])
    assert pull_back_decomposition(ctx, g.parse("ABab"), [1]) == [1]
