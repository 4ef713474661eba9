import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.append(str(ROOT))
from src.data.pair_file import load_pair_file, parse_pair_file, translation_map
from src.errors import PairFileError
from src.model.graph import Graph

PAIRS = ROOT / "data" / "pairs"


def test_load_plastic_pair_file():
    pf = load_pair_file(PAIRS / "plastic.yaml")
    assert pf.name == "plastic"
    assert pf.forward == (ROOT / "data" / "maps" / "plastic.map").resolve()
    assert pf.translation.kind == "identity"
    assert pf.overrides() == {"u_tol": 1e-3, "v_tol": 1e-3, "seed": 7}


def test_unknown_and_missing_keys():
    base = {"forward": "../maps/fib.map", "backward": "../maps/fib_inv.map"}
    with pytest.raises(PairFileError) as err:
        parse_pair_file({**base, "colour": "red"}, PAIRS)
    assert err.value.details == {"keys": ["colour"]}
    with pytest.raises(PairFileError) as err:
        parse_pair_file({"forward": base["forward"]}, PAIRS)
    assert err.value.details == {"keys": ["backward"]}
    with pytest.raises(PairFileError):
        parse_pair_file(["forward"], PAIRS)


def test_missing_map_file_and_bad_values():
    with pytest.raises(PairFileError) as err:
        parse_pair_file({"forward": "../maps/nope.map", "backward": "../maps/fib_inv.map"}, PAIRS)
    assert "forward" in err.value.message
    with pytest.raises(PairFileError):
        parse_pair_file({"forward": "../maps/fib.map", "backward": "../maps/fib_inv.map", "u_tol": -1}, PAIRS)
    with pytest.raises(PairFileError):
        parse_pair_file({"forward": "../maps/fib.map", "backward": "../maps/fib_inv.map", "translation": "swap"}, PAIRS)


def test_invalid_yaml_is_a_pair_file_error(tmp_path):
    doc = tmp_path / "broken.yaml"
    doc.write_text("forward: [unclosed\n", encoding="utf-8")
    with pytest.raises(PairFileError):
        load_pair_file(doc)


def test_explicit_translation_needs_every_edge():
    source = Graph.rose(["a", "b"])
    target = Graph.rose(["x", "y"])
    h = translation_map(source, target, {"a": "xy", "b": "Y"})
    assert h.describe() == {"a": "xy", "b": "Y"}
    assert h.codomain == target
    with pytest.raises(PairFileError) as err:
        translation_map(source, target, {"a": "x", "c": "y"})
    assert err.value.details == {"extra": ["c"], "missing": ["b"]}
