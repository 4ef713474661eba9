import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.append(str(ROOT))
from src.data.dsl import format_map_file, load_map_file, parse_map_file
from src.errors import DslSyntaxError, IrregularMapError, UndeclaredLetterError

MAPS = ROOT / "data" / "maps"


def test_parse_rose_map():
    mf = parse_map_file("# Fibonacci\nedges: a, b\nmap f: a -> a b; b -> a\nfixed-vertex: v\n")
    assert mf.name == "f"
    assert mf.graph.is_rose
    assert mf.graph.vertices == ("v",)
    assert mf.fixed_vertex == "v"
    assert mf.map.describe() == {"a": "ab", "b": "a"}


def test_rules_may_span_lines_and_concatenate_letters():
    text = "edges: a, b, c\nmap g:\n  a -> cA;\n  b -> a\n  c -> b\n"
    mf = parse_map_file(text)
    assert mf.name == "g"
    assert mf.map.describe() == {"a": "cA", "b": "a", "c": "b"}


def test_parse_graph_with_vertices():
    mf = load_map_file(MAPS / "theta.map")
    g = mf.graph
    assert g.vertices == ("u", "w")
    assert [g.vertices[g.origin(g.edge_id(x))] for x in "abc"] == ["u", "u", "u"]
    assert mf.map.describe()["a"] == "aBc"
    assert mf.source == MAPS / "theta.map"


def test_undeclared_letter_is_located():
    with pytest.raises(UndeclaredLetterError) as err:
        parse_map_file("edges: a, b\nmap f: a -> a b; b -> a x\n")
    assert err.value.letter == "x"
    assert (err.value.line, err.value.column) == (2, 25)
    assert err.value.to_dict()["error"] == "undeclared_letter"


@pytest.mark.parametrize(
    "text, line",
    [
        ("map f: a -> a\n", 1),
        ("edges: a\nhello\nmap f: a -> a\n", 2),
        ("edges: a\nmap f: a - a\n", 2),
        ("edges: a, b\nmap f: a -> b\n", 2),
        ("edges: a\nmap f: A -> a\n", 2),
        ("edges: a\nmap f: a -> a; a -> a a\n", 2),
        ("edges: a, a\nmap f: a -> a\n", 1),
        ("edges: a\nmap f: a -> a\nfixed-vertex: q\n", 3),
        ("vertices: u, w\nedges: a\nmap f: a -> a\n", 2),
    ],
)
def test_syntax_errors_carry_line_numbers(text, line):
    with pytest.raises(DslSyntaxError) as err:
        parse_map_file(text)
    assert err.value.line == line
    assert err.value.column >= 1


def test_irregular_images_are_rejected():
    text = "vertices: u, w\nedges: a, b\nedge a: u -> w\nedge b: u -> w\nmap f: a -> a B; b -> a\n"
    with pytest.raises(IrregularMapError):
        parse_map_file(text)


@pytest.mark.parametrize("name", ["fib", "theta", "wedge3"])
def test_formatted_maps_parse_back(name):
    mf = load_map_file(MAPS / f"{name}.map")
    again = parse_map_file(format_map_file(mf.map, mf.name, mf.fixed_vertex, comment="copy"))
    assert again.graph == mf.graph
    assert again.map == mf.map
    assert again.fixed_vertex == mf.fixed_vertex
