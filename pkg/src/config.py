"""Settings loaded from ``config/defaults.yaml`` with keyword overrides."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

__all__ = ["Settings", "DEFAULTS_PATH", "load_settings"]

DEFAULTS_PATH = Path(__file__).resolve().parents[1] / "config" / "defaults.yaml"


@dataclass(slots=True)
class Settings:
    radius: int = 3
    tol: float = 1e-9
    dedup_tol: float = 1e-6
    lambda_tol: float = 1e-6
    limit_weighting: str = "growth"
    max_power: int = 12
    length_budget: int = 10**6
    period_bound: Optional[int] = None
    max_cycles: int = 10_000
    periodic_max_len: int = 8
    periodic_max_power: int = 6
    seed: int = 7
    samples: int = 100
    sample_length: int = 40
    n_max: int = 60
    u_tol: float = 1e-3
    v_tol: float = 1e-3
    max_iter: int = 200
    workers: int = 4

    def __post_init__(self) -> None:
        if self.radius < 1:
            raise ValueError("radius must be at least 1")
        for name in ("tol", "dedup_tol", "lambda_tol", "u_tol", "v_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.limit_weighting not in ("growth", "uniform"):
            raise ValueError("limit_weighting must be 'growth' or 'uniform'")
        if self.length_budget < 1 or self.n_max < 0 or self.workers < 1:
            raise ValueError("length_budget and workers must be positive, n_max non-negative")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _flatten(raw: Dict[str, Any]) -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in raw.items():
        if isinstance(value, dict):
            flat.update(_flatten(value))
        else:
            flat[key] = value
    return flat


def load_settings(path: Optional[Union[str, Path]] = None, **overrides: Any) -> Settings:
    """Read the YAML defaults (sections are flattened), then apply ``overrides``.

    ``None`` overrides are ignored so unset CLI flags keep file values.
    Unknown keys raise ``ValueError``.
    """
    src = Path(path) if path is not None else DEFAULTS_PATH
    raw: Dict[str, Any] = {}
    if src.exists():
        raw = _flatten(yaml.safe_load(src.read_text(encoding="utf-8")) or {})
    raw.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(Settings)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValueError(f"unknown settings: {', '.join(unknown)}")
    for name in ("tol", "dedup_tol", "lambda_tol", "u_tol", "v_tol"):
        if name in raw:
            raw[name] = float(raw[name])
    return Settings(**raw)
