import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))
from src.config import DEFAULTS_PATH, Settings, load_settings


def test_defaults_file_matches_dataclass():
    assert DEFAULTS_PATH.exists()
    assert load_settings() == Settings()


def test_overrides_win_and_none_is_ignored():
    s = load_settings(radius=2, tol=None, u_tol="0.01")
    assert s.radius == 2
    assert s.tol == Settings().tol
    assert s.u_tol == 0.01


def test_sections_are_flattened(tmp_path):
    cfg = tmp_path / "settings.yaml"
    cfg.write_text("currents:\n  radius: 4\nexperiments:\n  seed: 11\n", encoding="utf-8")
    s = load_settings(cfg)
    assert (s.radius, s.seed, s.n_max) == (4, 11, 60)


def test_invalid_settings():
    with pytest.raises(ValueError, match="unknown settings"):
        load_settings(colour="red")
    with pytest.raises(ValueError):
        load_settings(radius=0)
    with pytest.raises(ValueError):
        Settings(limit_weighting="loudest")
    with pytest.raises(ValueError):
        Settings(workers=0)
