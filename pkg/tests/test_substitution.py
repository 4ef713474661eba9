import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.errors import IrregularMapError, NotExpandingError
from src.model.graph import Graph
from src.model.graph_map import GraphMap
from src.subst.frequencies import (
    letter_matrix,
    limit_frequencies,
    perron_root,
    stretch_factor,
    stretch_factors,
)
from src.subst.substitution import (
    Substitution,
    convergence_power,
    iterate_counts,
    naive_counts,
    substitution_from_map,
)

PHI = (1 + 5**0.5) / 2
PLASTIC = 1.3247179572447460


def _rose_sub(rules):
    names = list(rules)
    g = Graph.rose(names)
    return substitution_from_map(GraphMap.from_positive(g, [g.parse(rules[n]) for n in names]))


def test_substitution_of_the_fibonacci_map(load_map, load_ctx):
    sub = substitution_from_map(load_map("fib"))
    g = sub.graph
    assert sub.describe() == {"a": "ab", "A": "BA", "b": "a", "B": "A"}
    assert g.format(sub.expand(g.edge_id("a"), 4)) == "abaababa"
    assert sub.lengths(5)[g.edge_id("a")] == 13
    assert sub.reachable(g.edge_id("a")) == [g.edge_id("a"), g.edge_id("b")]
    assert sub.is_expanding()
    assert substitution_from_map(load_ctx("fib")).describe()["a"] == "aba"


def test_substitution_needs_inverse_images():
    g = Graph.rose(["a"])
    with pytest.raises(IrregularMapError):
        Substitution(g, ((0, 0), (0,)))


def test_block_counts_agree_with_expanded_words(load_map):
    sub = substitution_from_map(load_map("plastic"))
    g = sub.graph
    words = [g.parse(w) for w in ("a", "ab", "ca", "bca", "abca", "cabc")]
    for e in (g.edge_id("a"), g.edge_id("C")):
        for t in range(9):
            expected = naive_counts(sub, e, t, 4)
            for w in words + [tuple(x ^ 1 for x in reversed(w)) for w in words]:
                assert iterate_counts(sub, e, w, t) == expected.get(w, 0)


def test_iterate_counts_edge_cases(load_map):
    sub = substitution_from_map(load_map("fib"))
    g = sub.graph
    a = g.edge_id("a")
    assert iterate_counts(sub, a, g.parse("a"), 0) == 1
    assert iterate_counts(sub, a, g.parse("A"), 6) == 0
    assert iterate_counts(sub, a, g.parse("bb"), 10) == 0
    with pytest.raises(ValueError):
        iterate_counts(sub, a, (), 3)
    with pytest.raises(ValueError):
        iterate_counts(sub, a, g.parse("a"), -1)


def test_convergence_power_reads_cyclic_periods():
    sub = _rose_sub({"a": "bb", "b": "aa"})
    assert convergence_power(sub, sub.graph.edge_id("a")) == 2
    fib = _rose_sub({"a": "ab", "b": "a"})
    assert convergence_power(fib, fib.graph.edge_id("a")) == 1


def test_fibonacci_frequencies(load_map):
    sub = substitution_from_map(load_map("fib"))
    g = sub.graph
    freq = limit_frequencies(sub, g.edge_id("a"), radius=2, tol=1e-7)
    assert freq.value(g.parse("a")) == pytest.approx(1 / PHI, abs=1e-6)
    assert freq.value(g.parse("b")) == pytest.approx(1 / PHI**2, abs=1e-6)
    assert freq.value(g.parse("ab")) == pytest.approx(1 / PHI**2, abs=1e-6)
    assert freq.value(g.parse("aa")) == pytest.approx(1 / PHI**3, abs=1e-6)
    assert freq.value(g.parse("A")) == 0
    assert freq.value(g.parse("bb")) == 0
    as_dict = freq.as_dict()
    assert set(as_dict) >= {"a", "A", "ab", "BA"}
    assert sum(freq.values[: g.n_edges]) == pytest.approx(1.0)


def test_non_expanding_substitution_is_rejected():
    sub = _rose_sub({"a": "b", "b": "a"})
    assert not sub.is_expanding()
    with pytest.raises(NotExpandingError):
        limit_frequencies(sub, 0, radius=1)


def test_stretch_factors(load_map):
    sub = substitution_from_map(load_map("fib"))
    assert stretch_factor(sub, sub.graph.edge_id("a")) == pytest.approx(PHI, abs=1e-8)
    red = substitution_from_map(load_map("reducible"))
    g = red.graph
    factors = stretch_factors(red, group_tol=1e-4)
    assert factors.values[g.edge_id("c")] == pytest.approx(2.0, abs=1e-5)
    assert factors.values[g.edge_id("b")] == pytest.approx(PHI, abs=1e-5)
    assert [sorted(group) for group in factors.groups] == [
        sorted(g.edge_id(x) for x in "aAbB"),
        sorted(g.edge_id(x) for x in "cC"),
    ]


def test_plastic_stretch_factor_ignores_coincident_ratios(load_ctx):
    # |ζ^t(a)| = 4, 9, 21, 49 has the ratio 7/3 twice in a row
    sub = substitution_from_map(load_ctx("plastic"))
    g = sub.graph
    assert [sub.lengths(t)[g.edge_id("a")] for t in (2, 3, 4, 5)] == [4, 9, 21, 49]
    expected = PLASTIC**3
    for name in "abcABC":
        assert stretch_factor(sub, g.edge_id(name)) == pytest.approx(expected, abs=1e-9)
    factors = stretch_factors(sub)
    assert len(factors.groups) == 1


def test_stretch_factor_of_a_power_is_a_power(load_map):
    sub = substitution_from_map(load_map("plastic"))
    cube = sub.power(3)
    for e in sub.letters:
        assert stretch_factor(cube, e) == pytest.approx(stretch_factor(sub, e) ** 3, abs=1e-9)
    assert perron_root(letter_matrix(sub)) == pytest.approx(PLASTIC, abs=1e-10)


def test_stretch_factor_needs_an_expanding_substitution():
    sub = _rose_sub({"a": "ab", "b": "b"})
    assert not sub.is_expanding()
    with pytest.raises(NotExpandingError):
        stretch_factor(sub, sub.graph.edge_id("a"))
