import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.data.dsl import parse_map_file
from src.errors import WedgeError
from src.sim.wedge import wedge_maps, wedge_product

SWAP = """
vertices: u, w
edges: a, b
edge a: u -> w
edge b: u -> w
map s: a -> A; b -> B
"""


def test_wedge_renames_clashing_edges(load_map):
    f = wedge_maps([load_map("plastic"), load_map("plastic")], ["v", "v"])
    assert f.graph.edge_names == ("a", "b", "c", "a1", "b1", "c1")
    assert f.graph.vertices == ("v",)
    assert f.describe() == {
        "a": "b",
        "b": "c",
        "c": "ab",
        "a1": "b1",
        "b1": "c1",
        "c1": "a1b1",
    }


def test_wedge_of_distinct_names_matches_fixture(load_map):
    f = wedge_maps([load_map("plastic"), load_map("plastic_xyz")], [0, "v"])
    assert f.describe() == load_map("wedge").describe()


def test_wedge_keeps_extra_vertices(load_map):
    theta = load_map("theta")
    f = wedge_maps([load_map("fib"), theta], ["v", "u"])
    assert f.graph.vertices == ("v", "w")
    assert f.graph.edge_names == ("a", "b", "a1", "b1", "c")
    assert f.describe()["a1"] == "a1B1c"
    assert f.vertex_image == (0, 1)


def test_wedge_needs_fixed_vertices(load_map):
    swap = parse_map_file(SWAP).map
    with pytest.raises(WedgeError) as err:
        wedge_maps([load_map("fib"), swap], ["v", "u"])
    assert err.value.details == {"factor": 1, "vertex": "u", "image": "w"}
    with pytest.raises(WedgeError):
        wedge_maps([load_map("fib")], [])
    assert wedge_maps([load_map("fib")], ["v"]) is not None


def test_wedge_product_builds_a_context(load_ctx):
    ctx = wedge_product([load_ctx("plastic"), load_ctx("plastic")], ["v", "v"])
    assert len(ctx.graph.edge_names) == 6
    assert ctx.power == 3
    assert ctx.map.describe()["c1"] == "c1a1b1"
