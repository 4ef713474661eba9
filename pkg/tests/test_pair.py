import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.append(str(ROOT))
from src.currents.limits import build_simplex
from src.data.pair_file import build_pair_from_file, load_pair_file
from src.errors import PairFileError
from src.model.graph import Graph, same_cyclic_word
from src.sim.orbit import OrbitRecord, orbit
from src.sim.pair import build_pair, identity_translation

PAIRS = ROOT / "data" / "pairs"


@pytest.fixture(scope="module")
def plastic():
    pair = build_pair_from_file(load_pair_file(PAIRS / "plastic.yaml"))
    plus = build_simplex(pair.forward, radius=2, tol=1e-8, dedup_tol=1e-5, workers=1)
    minus = build_simplex(pair.backward, radius=2, tol=1e-8, dedup_tol=1e-5, sign="-", workers=1)
    return pair, plus, minus


def test_pair_is_raised_to_a_common_power(plastic):
    pair, _, _ = plastic
    assert pair.name == "plastic"
    assert pair.forward.power == pair.backward.power
    assert pair.forward.power % 3 == 0
    assert pair.check_marking() == []
    assert pair.check_inverse() == []
    assert pair.lipschitz_B == 1.0


def test_translations_follow_edge_names(plastic):
    pair, _, _ = plastic
    g = pair.forward.graph
    w = g.parse("abC")
    assert pair.to_backward(w) == pair.backward.graph.parse("abC")
    assert same_cyclic_word(pair.to_forward(pair.to_backward(w)), w)


def test_swapping_twice_restores_the_pair(plastic):
    pair, _, _ = plastic
    swapped = pair.swap()
    assert swapped.forward is pair.backward
    assert swapped.translate_fwd is pair.translate_bwd
    assert swapped.name == "plastic~"
    back = swapped.swap()
    assert back.forward is pair.forward
    assert back.backward is pair.backward


def test_pair_rejects_maps_that_are_not_inverse(load_map):
    with pytest.raises(PairFileError) as err:
        build_pair(load_map("plastic"), load_map("plastic"), name="twice")
    assert err.value.details["inverse"]
    with pytest.raises(PairFileError):
        identity_translation(Graph.rose(["a", "b"]), Graph.rose(["a", "c"]))


def test_pair_with_relabelled_inverse(tmp_path):
    doc = tmp_path / "xyz.yaml"
    doc.write_text(
        "\n".join(
            [
                f"forward: {ROOT / 'data' / 'maps' / 'plastic.map'}",
                f"backward: {ROOT / 'data' / 'maps' / 'plastic_xyz.map'}",
                "translation:",
                "  forward: {a: x, b: y, c: z}",
                "  backward: {x: a, y: b, z: c}",
            ]
        ),
        encoding="utf-8",
    )
    pair = build_pair_from_file(load_pair_file(doc))
    assert pair.name == "xyz"
    g = pair.forward.graph
    assert pair.backward.graph.format(pair.to_backward(g.parse("abc"))) == "xyz"


def test_orbit_without_steps_is_one_record(plastic):
    pair, plus, minus = plastic
    w = pair.forward.graph.parse("abC")
    records = orbit(pair, w, 0, plus, minus)
    assert len(records) == 1
    rec = records[0]
    assert rec.step == 0
    assert rec.length == 3
    assert not rec.truncated
    assert 0 <= rec.dist_plus <= 2
    assert 0 <= rec.goodness <= 1
    assert rec.coefficients == pytest.approx((1.0,))


def test_orbit_moves_towards_the_attracting_vertex(plastic):
    pair, plus, minus = plastic
    w = pair.forward.graph.parse("abC")
    records = orbit(pair, w, 3, plus, minus, budget=20_000, backward=False)
    assert [r.step for r in records] == [0, 1, 2, 3]
    assert records[-1].dist_plus < records[0].dist_plus
    assert records[-1].length > records[0].length
    assert records[-1].goodness == pytest.approx(1.0)


def test_orbit_marks_truncated_steps(plastic):
    pair, plus, minus = plastic
    w = pair.forward.graph.parse("ab")
    records = orbit(pair, w, 2, plus, minus, budget=3)
    forward = [r for r in records if r.step > 0]
    assert len(forward) == 1
    assert forward[0].truncated
    assert forward[0].goodness is None
    assert forward[0].length > 3
    assert all(r.step <= 0 for r in records if r is not forward[0])


def test_orbit_record_validation():
    with pytest.raises(ValueError):
        OrbitRecord(0, -1, None, None, None, None, None)
    with pytest.raises(ValueError):
        OrbitRecord(0, 3, 1.0, 1.0, 0, 2.5, 0.0)
    rec = OrbitRecord(1, 4, None, None, None, None, None, True)
    assert rec.to_dict()["truncated"] is True
