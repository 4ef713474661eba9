"""Subdivision of a graph map at interior points of edges.

A point is ``(e, x)`` with ``e`` a positive edge and ``0 < x < 1`` its
position along ``e``.  The point set is first closed under forward images,
so the subdivided map still sends vertices to vertices.  Edge ``e`` cut at
``t_1 < ... < t_m`` becomes ``e0 ... em`` through new vertices
``e.1 ... e.m``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from src.analysis.context import TrainTrackContext, build_context
from src.analysis.inps import NielsenPath, search_inps
from src.errors import SubdivisionError
from src.model.graph import Graph, Path, reverse
from src.model.graph_map import GraphMap

__all__ = [
    "Point",
    "Subdivision",
    "point_image",
    "close_points",
    "subdivide_at_points",
    "inp_endpoints",
    "subdivide_at_inp_endpoints",
]

logger = logging.getLogger(__name__)

Point = Tuple[int, Fraction]


def _normalize(e: int, x: Fraction) -> Optional[Point]:
    if x <= 0 or x >= 1:
        return None
    return (e, x) if e % 2 == 0 else (e ^ 1, 1 - x)


def point_image(f: GraphMap, point: Point) -> Optional[Point]:
    """Image of an interior point, ``None`` when it lands on a vertex."""
    e, x = point
    img = f.images[e]
    y = x * len(img)
    k = math.floor(y)
    return _normalize(img[k], y - k) if y != k else None


def close_points(f: GraphMap, points: Iterable[Point], max_points: int = 512) -> Set[Point]:
    """Forward closure of ``points`` under ``f``.

    Raises
    ------
    SubdivisionError
        When the orbits exceed ``max_points`` points.
    """
    closed: Set[Point] = set()
    stack = [p for p in (_normalize(e, Fraction(x)) for e, x in points) if p is not None]
    while stack:
        p = stack.pop()
        if p in closed:
            continue
        closed.add(p)
        if len(closed) > max_points:
            raise SubdivisionError(
                "point orbits do not become periodic within the bound", {"max_points": max_points}
            )
        q = point_image(f, p)
        if q is not None:
            stack.append(q)
    return closed


@dataclass(frozen=True)
class Subdivision:
    """Subdivided map with the dictionary back to the original graph."""

    original: GraphMap
    map: GraphMap
    cuts: Dict[int, Tuple[Fraction, ...]]
    pieces: Dict[int, Tuple[int, ...]]

    @property
    def graph(self) -> Graph:
        return self.map.graph

    def lift_edge(self, e: int) -> Path:
        seq = self.pieces[e & ~1]
        return seq if e % 2 == 0 else reverse(seq)

    def lift_word(self, word: Sequence[int]) -> Path:
        """The path ``word`` of the original graph as a path of the subdivision."""
        out: List[int] = []
        for e in word:
            out.extend(self.lift_edge(e))
        return tuple(out)

    def breakpoints(self, word: Sequence[int]) -> List[Fraction]:
        """Original-length coordinate of every vertex of ``lift_word(word)``."""
        coords = [Fraction(0)]
        for j, e in enumerate(word):
            ts = self.cuts.get(e & ~1, ())
            inner = ts if e % 2 == 0 else tuple(1 - t for t in reversed(ts))
            coords.extend(j + t for t in inner)
            coords.append(Fraction(j + 1))
        return coords

    def lift_segment(self, word: Sequence[int], start: Fraction, end: Fraction) -> Path:
        """Lift of the part of ``word`` between two subdivision vertices."""
        coords = self.breakpoints(word)
        try:
            a, b = coords.index(Fraction(start)), coords.index(Fraction(end))
        except ValueError as exc:
            raise SubdivisionError("segment ends are not vertices of the subdivision") from exc
        return self.lift_word(word)[a:b]

    def lift_inp(self, eta: NielsenPath) -> Path:
        word = eta.edges
        return self.lift_segment(word, 1 - eta.left.end, len(word) - 1 + eta.right.end)


def subdivide_at_points(f: GraphMap, points: Iterable[Point], max_points: int = 512) -> Subdivision:
    """Subdivide the self-map ``f`` at the forward closure of ``points``."""
    if not f.is_self_map:
        raise SubdivisionError("only self-maps can be subdivided")
    g = f.graph
    closed = close_points(f, points, max_points)
    cuts: Dict[int, Tuple[Fraction, ...]] = {}
    for e, x in closed:
        cuts.setdefault(e, ())
    for e in cuts:
        cuts[e] = tuple(sorted(x for edge, x in closed if edge == e))

    vertices = list(g.vertices)
    names: List[str] = []
    tails: List[int] = []
    heads: List[int] = []
    pieces: Dict[int, Tuple[int, ...]] = {}
    new_vertex: Dict[Point, int] = {}
    for e in g.positive_edges:
        name = g.name(e)
        ts = cuts.get(e, ())
        if not ts:
            pieces[e] = (2 * len(names),)
            names.append(name)
            tails.append(g.origin(e))
            heads.append(g.terminus(e))
            continue
        ends = [g.origin(e)]
        for i, t in enumerate(ts, start=1):
            new_vertex[(e, t)] = len(vertices)
            ends.append(len(vertices))
            vertices.append(f"{name}.{i}")
        ends.append(g.terminus(e))
        ids = []
        for i in range(len(ts) + 1):
            ids.append(2 * len(names))
            names.append(f"{name}{i}")
            tails.append(ends[i])
            heads.append(ends[i + 1])
        pieces[e] = tuple(ids)
    if len(set(names)) != len(names):
        raise SubdivisionError("subdivided edge names collide", {"names": sorted(names)})
    try:
        graph = Graph(tuple(vertices), tuple(names), tuple(tails), tuple(heads))
    except ValueError as exc:
        raise SubdivisionError(str(exc)) from exc

    draft = Subdivision(f, f, cuts, pieces)
    images: List[Path] = [()] * len(names)
    vertex_image = list(f.vertex_image) + [0] * (len(vertices) - len(g.vertices))
    for e in g.positive_edges:
        img = f.images[e]
        lifted = draft.lift_word(img)
        coords = draft.breakpoints(img)
        L = len(img)
        bounds = [Fraction(0), *cuts.get(e, ()), Fraction(1)]
        idx = [coords.index(t * L) for t in bounds]
        for i, piece in enumerate(pieces[e]):
            images[piece // 2] = lifted[idx[i] : idx[i + 1]]
        for i, t in enumerate(cuts.get(e, ()), start=1):
            a = idx[i]
            vertex_image[new_vertex[(e, t)]] = graph.origin(lifted[a])
    new_map = GraphMap.from_positive(graph, images, vertex_image)
    logger.info("Subdivided at %d points: %d -> %d edges", len(closed), len(g.edge_names), len(names))
    return Subdivision(f, new_map, cuts, pieces)


def inp_endpoints(paths: Iterable[NielsenPath]) -> List[Point]:
    """Interior endpoints of the given Nielsen paths."""
    out: Set[Point] = set()
    for eta in paths:
        for br in (eta.left, eta.right):
            p = _normalize(br.edges[-1], br.end)
            if p is not None:
                out.add(p)
    return sorted(out)


def subdivide_at_inp_endpoints(
    ctx: TrainTrackContext, max_points: int = 512, max_power: int = 12
) -> Tuple[TrainTrackContext, Optional[Subdivision]]:
    """Context of ``ctx.map`` subdivided so that every INP and pre-INP ends at a vertex.

    Returns ``(ctx, None)`` unchanged when all endpoints already are vertices.
    """
    search = search_inps(ctx)
    points = inp_endpoints([*search.inps, *search.pre_inps])
    if not points:
        return ctx, None
    sub = subdivide_at_points(ctx.map, points, max_points)
    new_ctx = build_context(sub.map, max_power=max_power)
    return new_ctx, sub
