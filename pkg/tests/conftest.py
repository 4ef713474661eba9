import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.append(str(ROOT))

from src.analysis.context import build_context
from src.data.dsl import load_map_file

MAPS = ROOT / "data" / "maps"
PAIRS = ROOT / "data" / "pairs"


@pytest.fixture
def load_map():
    def _load(name):
        return load_map_file(MAPS / f"{name}.map").map

    return _load


@pytest.fixture
def load_ctx(load_map):
    def _load(name, **kwargs):
        return build_context(load_map(name), **kwargs)

    return _load
