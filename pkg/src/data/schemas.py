"""Structured data contracts for map and pair files.

Lightweight dataclasses that validate only what can be checked without
running any train track analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Union

from src.model.graph import Graph
from src.model.graph_map import GraphMap

__all__ = ["MapFile", "Translation", "PairFile"]


@dataclass(slots=True)
class MapFile:
    """One graph self-map as declared in a ``.map`` file.

    Attributes
    ----------
    graph:
        Declared graph.
    map:
        Declared map on ``graph``.
    name:
        Name given after the ``map`` keyword.
    fixed_vertex:
        Vertex designated by ``fixed-vertex:``, if any.
    source:
        File the declaration was read from.
    """

    graph: Graph
    map: GraphMap
    name: str = "f"
    fixed_vertex: Optional[str] = None
    source: Optional[Path] = None

    def __post_init__(self) -> None:
        if self.map.graph != self.graph:
            raise ValueError("map must be defined on the declared graph")
        if not self.name:
            raise ValueError("map name cannot be empty")
        if self.fixed_vertex is not None and self.fixed_vertex not in self.graph.vertices:
            raise ValueError(f"fixed vertex {self.fixed_vertex!r} is not a vertex of the graph")


@dataclass(slots=True)
class Translation:
    """Translation data of a pair: identity relabeling or explicit images.

    ``forward`` maps edge names of ``Γ`` to words on ``Γ′`` and ``backward``
    the other way; both are empty for the identity.
    """

    kind: str = "identity"
    forward: Dict[str, str] = field(default_factory=dict)
    backward: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "explicit"):
            raise ValueError("translation kind must be 'identity' or 'explicit'")
        if self.kind == "explicit" and not (self.forward and self.backward):
            raise ValueError("explicit translations need forward and backward images")


@dataclass(slots=True)
class PairFile:
    """Forward and backward map files with the glue between them."""

    forward: Path
    backward: Path
    translation: Translation = field(default_factory=Translation)
    name: str = ""
    radius: Optional[int] = None
    tol: Optional[float] = None
    u_tol: Optional[float] = None
    v_tol: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.radius is not None and self.radius < 1:
            raise ValueError("radius must be at least 1")
        for key in ("tol", "u_tol", "v_tol"):
            value = getattr(self, key)
            if value is not None and value <= 0:
                raise ValueError(f"{key} must be positive")

    def overrides(self) -> Dict[str, Union[int, float]]:
        """Settings the pair file pins, for :func:`src.config.load_settings`."""
        keys = ("radius", "tol", "u_tol", "v_tol", "seed")
        return {k: getattr(self, k) for k in keys if getattr(self, k) is not None}
