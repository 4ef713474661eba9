"""YAML pair files: two map files and the translation between their graphs.

Example::

    name: plastic
    forward: ../maps/plastic.map
    backward: ../maps/plastic_inv.map
    translation: identity        # or {forward: {a: ...}, backward: {a: ...}}
    u_tol: 1.0e-3
    v_tol: 1.0e-3
    seed: 7

Map paths are resolved relative to the pair file.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import yaml

from src.config import Settings
from src.data.dsl import load_map_file
from src.data.schemas import PairFile, Translation
from src.errors import PairFileError, TrainTrackError
from src.model.graph import Graph
from src.model.graph_map import GraphMap
from src.sim.pair import AutomorphismPair, build_pair

__all__ = ["parse_pair_file", "load_pair_file", "translation_map", "build_pair_from_file"]

logger = logging.getLogger(__name__)

_KEYS = {"name", "forward", "backward", "translation", "radius", "tol", "u_tol", "v_tol", "seed"}


def _translation(raw: Any) -> Translation:
    if raw is None or raw == "identity":
        return Translation()
    if isinstance(raw, Mapping) and set(raw) == {"forward", "backward"}:
        fwd, bwd = raw["forward"], raw["backward"]
        if isinstance(fwd, Mapping) and isinstance(bwd, Mapping):
            return Translation("explicit", {str(k): str(v) for k, v in fwd.items()}, {str(k): str(v) for k, v in bwd.items()})
    raise PairFileError("translation must be 'identity' or a mapping with forward and backward images")


def parse_pair_file(raw: Mapping[str, Any], base_dir: Union[str, Path] = ".") -> PairFile:
    """Validate the keys of a loaded pair document.

    Raises
    ------
    PairFileError
        Unknown or missing keys, unreadable values, or missing map files.
    """
    if not isinstance(raw, Mapping):
        raise PairFileError("pair file must be a mapping")
    unknown = sorted(set(raw) - _KEYS)
    if unknown:
        raise PairFileError(f"unknown keys: {', '.join(unknown)}", {"keys": unknown})
    missing = [k for k in ("forward", "backward") if k not in raw]
    if missing:
        raise PairFileError(f"missing keys: {', '.join(missing)}", {"keys": missing})
    base = Path(base_dir)
    paths = {k: (base / str(raw[k])).resolve() for k in ("forward", "backward")}
    for key, p in paths.items():
        if not p.is_file():
            raise PairFileError(f"{key} map file not found: {p}", {"path": str(p)})
    try:
        return PairFile(
            forward=paths["forward"],
            backward=paths["backward"],
            translation=_translation(raw.get("translation")),
            name=str(raw.get("name", "")),
            radius=raw.get("radius"),
            tol=None if raw.get("tol") is None else float(raw["tol"]),
            u_tol=None if raw.get("u_tol") is None else float(raw["u_tol"]),
            v_tol=None if raw.get("v_tol") is None else float(raw["v_tol"]),
            seed=raw.get("seed"),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, TrainTrackError):
            raise
        raise PairFileError(str(exc)) from exc


def load_pair_file(path: Union[str, Path]) -> PairFile:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise PairFileError(f"invalid YAML in {path}: {exc}") from exc
    pf = parse_pair_file(raw or {}, path.parent)
    if not pf.name:
        pf.name = path.stem
    return pf


def translation_map(source: Graph, target: Graph, images: Dict[str, str]) -> GraphMap:
    """Graph map ``source → target`` from edge-name to word images."""
    extra = sorted(set(images) - set(source.edge_names))
    absent = [n for n in source.edge_names if n not in images]
    if extra or absent:
        raise PairFileError("translation must give one image per edge", {"extra": extra, "missing": absent})
    return GraphMap.from_positive(source, [target.parse(images[n]) for n in source.edge_names], None, target)


def build_pair_from_file(pf: PairFile, settings: Optional[Settings] = None) -> AutomorphismPair:
    """Load both maps and assemble the validated pair."""
    settings = settings or Settings()
    forward = load_map_file(pf.forward).map
    backward = load_map_file(pf.backward).map
    h = h_inv = None
    if pf.translation.kind == "explicit":
        h = translation_map(forward.graph, backward.graph, pf.translation.forward)
        h_inv = translation_map(backward.graph, forward.graph, pf.translation.backward)
    return build_pair(
        forward,
        backward,
        h,
        h_inv,
        max_power=settings.max_power,
        budget=settings.length_budget,
        name=pf.name,
    )
