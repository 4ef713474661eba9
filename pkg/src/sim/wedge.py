"""One-point unions of graph maps at fixed vertices."""

from __future__ import annotations

import logging
from typing import Dict, List, Sequence, Tuple, Union

from src.analysis.context import TrainTrackContext, build_context
from src.errors import WedgeError
from src.model.graph import Graph, Path
from src.model.graph_map import DEFAULT_LENGTH_BUDGET, GraphMap

__all__ = ["wedge_maps", "wedge_product"]

logger = logging.getLogger(__name__)

VertexRef = Union[int, str]


def _vertex(g: Graph, ref: VertexRef) -> int:
    return ref if isinstance(ref, int) else g.vertex_id(ref)


def _fresh(name: str, taken: set, factor: int, sep: str = "") -> str:
    if name not in taken:
        return name
    k = factor
    while f"{name}{sep}{k}" in taken:
        k += 1
    return f"{name}{sep}{k}"


def wedge_maps(maps: Sequence[GraphMap], fixed_vertices: Sequence[VertexRef]) -> GraphMap:
    """Glue the graphs of ``maps`` at their fixed vertices and combine the maps.

    Edge names clashing with an earlier factor get a numeric suffix; the
    wedge point keeps the name of the first factor's fixed vertex.

    Raises
    ------
    WedgeError
        If some factor does not fix its designated vertex.
    """
    if not maps or len(maps) != len(fixed_vertices):
        raise WedgeError("one fixed vertex per factor is required")
    for i, (f, ref) in enumerate(zip(maps, fixed_vertices)):
        if not f.is_self_map:
            raise WedgeError(f"factor {i} is not a self-map", {"factor": i})
        v = _vertex(f.graph, ref)
        if f.vertex_image[v] != v:
            raise WedgeError(
                f"factor {i} moves its fixed vertex {f.graph.vertices[v]}",
                {"factor": i, "vertex": f.graph.vertices[v], "image": f.graph.vertices[f.vertex_image[v]]},
            )
    if len(maps) == 1:
        return maps[0]

    base = maps[0].graph.vertices[_vertex(maps[0].graph, fixed_vertices[0])]
    vertices: List[str] = [base]
    names: List[str] = []
    tails: List[int] = []
    heads: List[int] = []
    positive_images: List[Path] = []
    vertex_image: List[int] = [0]
    offsets: List[Tuple[Dict[int, int], int]] = []
    for i, (f, ref) in enumerate(zip(maps, fixed_vertices)):
        g = f.graph
        v0 = _vertex(g, ref)
        vmap: Dict[int, int] = {}
        for v, vname in enumerate(g.vertices):
            if v == v0:
                vmap[v] = 0
            else:
                vmap[v] = len(vertices)
                vertices.append(_fresh(vname, set(vertices), i, "."))
        first_edge = 2 * len(names)
        for k, ename in enumerate(g.edge_names):
            names.append(_fresh(ename, set(names), i))
            tails.append(vmap[g.tails[k]])
            heads.append(vmap[g.heads[k]])
        offsets.append((vmap, first_edge))
        for v in range(len(g.vertices)):
            if v != v0:
                vertex_image.append(vmap[f.vertex_image[v]])
    graph = Graph(tuple(vertices), tuple(names), tuple(tails), tuple(heads))
    for f, (_, first_edge) in zip(maps, offsets):
        for e in f.graph.positive_edges:
            positive_images.append(tuple(first_edge + x for x in f.images[e]))
    logger.info("Wedge of %d factors: %d edges, %d vertices", len(maps), len(names), len(vertices))
    return GraphMap.from_positive(graph, positive_images, vertex_image)


def wedge_product(
    factors: Sequence[Union[TrainTrackContext, GraphMap]],
    fixed_vertices: Sequence[VertexRef],
    max_power: int = 12,
    budget: int = DEFAULT_LENGTH_BUDGET,
) -> TrainTrackContext:
    """Context of the wedge; contexts contribute their (contracted) user maps."""
    maps = [f.base if isinstance(f, TrainTrackContext) else f for f in factors]
    return build_context(wedge_maps(maps, fixed_vertices), max_power, budget=budget)
