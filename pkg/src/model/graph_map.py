"""Graph maps, their powers, turn dynamics and expansion checks.

A :class:`GraphMap` assigns to each oriented edge of a graph a non-trivial
reduced edge path (its image).  Images of inverse edges are the inverse
paths, so a map is determined by the images of the positive edges.  Maps
may have a different target graph (translation maps between two marked
graphs); self-maps have ``target is None``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from src.errors import (
    ImageTooLongError,
    InvariantLoopError,
    IrregularMapError,
    MaxPowerExceededError,
    NotExpandingError,
    TrainTrackError,
)
from src.model.graph import Graph, Path, Turn, check_composable, cyclically_reduce, is_reduced, reduce_path, reverse

__all__ = [
    "GraphMap",
    "ExpansionBounds",
    "TurnClassification",
    "TrainTrackCheck",
    "compose",
    "power",
    "image_lengths",
    "derivative",
    "classify_turns",
    "crossed_turns",
    "is_legal_path",
    "is_train_track",
    "expansion_bounds",
    "make_expanding",
    "contract_invariant_forest",
    "transition_matrix",
]

logger = logging.getLogger(__name__)

DEFAULT_LENGTH_BUDGET = 10**6


@dataclass(frozen=True)
class GraphMap:
    """Regular graph map ``f: Γ → Γ′``.

    Attributes
    ----------
    graph:
        Source graph ``Γ``.
    images:
        Image path of every oriented edge, indexed by edge id.
    vertex_image:
        Image of every vertex of ``Γ`` (indices into the target vertices).
    target:
        Target graph when it differs from ``graph``.
    """

    graph: Graph
    images: Tuple[Path, ...]
    vertex_image: Tuple[int, ...]
    target: Optional[Graph] = None

    def __post_init__(self) -> None:
        g, t = self.graph, self.codomain
        if len(self.images) != g.n_edges:
            raise IrregularMapError("one image per oriented edge is required")
        if len(self.vertex_image) != len(g.vertices):
            raise IrregularMapError("one image per vertex is required")
        for e in g.edges:
            img = self.images[e]
            if not img:
                raise IrregularMapError(f"image of {g.name(e)} is trivial", {"edge": g.name(e)})
            check_composable(t, img)
            if not is_reduced(img):
                raise IrregularMapError(f"image of {g.name(e)} is not reduced", {"edge": g.name(e)})
            if self.images[e ^ 1] != reverse(img):
                raise IrregularMapError(f"images of {g.name(e)} and its inverse disagree", {"edge": g.name(e)})
            if t.origin(img[0]) != self.vertex_image[g.origin(e)] or t.terminus(img[-1]) != self.vertex_image[g.terminus(e)]:
                raise IrregularMapError(
                    f"image of {g.name(e)} does not join the images of its endpoints", {"edge": g.name(e)}
                )

    @classmethod
    def from_positive(
        cls,
        graph: Graph,
        positive_images: Sequence[Sequence[int]],
        vertex_image: Optional[Sequence[int]] = None,
        target: Optional[Graph] = None,
    ) -> "GraphMap":
        """Build a map from the images of the positive edges.

        Vertex images are inferred from the edge images when not given;
        an isolated vertex maps to itself.
        """
        tgt = target if target is not None else graph
        if len(positive_images) != len(graph.edge_names):
            raise IrregularMapError("one image per positive edge is required")
        images: List[Path] = [()] * graph.n_edges
        for k, img in enumerate(positive_images):
            images[2 * k] = tuple(img)
            images[2 * k + 1] = reverse(img)
        if vertex_image is None:
            inferred: Dict[int, int] = {}
            for e in graph.edges:
                img = images[e]
                if not img:
                    raise IrregularMapError(f"image of {graph.name(e)} is trivial", {"edge": graph.name(e)})
                v, w = graph.origin(e), tgt.origin(img[0])
                if inferred.setdefault(v, w) != w:
                    raise IrregularMapError(
                        f"images disagree on the image of vertex {graph.vertices[v]}",
                        {"vertex": graph.vertices[v]},
                    )
            vertex_image = [inferred.get(v, v) for v in range(len(graph.vertices))]
        return cls(graph, tuple(images), tuple(vertex_image), target)

    # ------------------------------------------------------------------
    @property
    def codomain(self) -> Graph:
        return self.target if self.target is not None else self.graph

    @property
    def is_self_map(self) -> bool:
        return self.target is None or self.target == self.graph

    @cached_property
    def lengths(self) -> Tuple[int, ...]:
        return tuple(len(img) for img in self.images)

    @property
    def is_positive(self) -> bool:
        return all(x % 2 == 0 for e in self.graph.positive_edges for x in self.images[e])

    def image(self, e: int) -> Path:
        return self.images[e]

    def apply(self, p: Sequence[int]) -> Path:
        """Concatenate edge images without reduction."""
        check_composable(self.graph, p)
        out: List[int] = []
        for e in p:
            out.extend(self.images[e])
        return tuple(out)

    def apply_reduced(self, p: Sequence[int]) -> Path:
        return reduce_path(self.codomain, self.apply(p))

    def apply_cyclic(self, w: Sequence[int]) -> Path:
        """Apply to a cyclic word and cyclically reduce the result."""
        return cyclically_reduce(self.codomain, self.apply_array(np.asarray(w, dtype=np.int64)).tolist())

    @cached_property
    def _flat(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        flat = np.concatenate([np.asarray(img, dtype=np.int64) for img in self.images])
        lens = np.asarray(self.lengths, dtype=np.int64)
        starts = np.concatenate([[0], np.cumsum(lens)[:-1]]).astype(np.int64)
        return flat, starts, lens

    def apply_array(self, word: np.ndarray) -> np.ndarray:
        """Vectorized unreduced application to a long word."""
        flat, starts, lens = self._flat
        if word.size == 0:
            return np.zeros(0, dtype=np.int64)
        wl = lens[word]
        offsets = np.cumsum(wl) - wl
        idx = np.repeat(starts[word] - offsets, wl) + np.arange(int(wl.sum()), dtype=np.int64)
        return flat[idx]

    def describe(self) -> Dict[str, str]:
        g, t = self.graph, self.codomain
        return {g.name(e): t.format(self.images[e]) for e in g.positive_edges}


@dataclass(frozen=True)
class ExpansionBounds:
    lambda_min: int
    lambda_max: int

    def __post_init__(self) -> None:
        if not (self.lambda_max >= self.lambda_min > 1):
            raise ValueError("expansion bounds must satisfy lambda_max >= lambda_min > 1")


@dataclass(frozen=True)
class TurnClassification:
    """Illegal turns and gates of a graph self-map.

    ``eventual[d]`` is ``Df^m(d)`` for ``m = |EΓ|``; two directions at a
    vertex are identified by some iterate of ``Df`` iff their eventual
    images coincide.
    """

    illegal_turns: FrozenSet[Turn]
    gates: Tuple[Tuple[int, ...], ...]
    eventual: Tuple[int, ...]

    def is_legal(self, turn: Turn) -> bool:
        return not turn.degenerate and turn not in self.illegal_turns

    def labels(self, graph: Graph) -> List[str]:
        return [t.label(graph) for t in sorted(self.illegal_turns)]


@dataclass(frozen=True)
class TrainTrackCheck:
    ok: bool
    edge: Optional[int] = None
    turn: Optional[Turn] = None

    def witness(self, graph: Graph) -> Optional[Dict[str, str]]:
        if self.ok or self.edge is None or self.turn is None:
            return None
        return {"edge": graph.name(self.edge), "turn": self.turn.label(graph)}


# ----------------------------------------------------------------------
# Powers


def compose(f: GraphMap, g: GraphMap) -> GraphMap:
    """Return ``f ∘ g`` with reduced images."""
    if g.codomain != f.graph:
        raise TrainTrackError("maps do not compose")
    images = []
    for e in g.graph.positive_edges:
        img = f.apply_reduced(g.images[e])
        if not img:
            raise IrregularMapError(f"composite collapses {g.graph.name(e)}", {"edge": g.graph.name(e)})
        images.append(img)
    return GraphMap.from_positive(
        g.graph, images, [f.vertex_image[v] for v in g.vertex_image], f.target
    )


def image_lengths(f: GraphMap, t: int) -> List[int]:
    """Unreduced lengths ``|f^t(e)|`` by the integer recursion.

    Exact for train track maps, where iterated images of edges never
    cancel.  Python integers keep the values exact at any size.
    """
    lengths = [1] * f.graph.n_edges
    for _ in range(t):
        lengths = [sum(lengths[x] for x in f.images[e]) for e in f.graph.edges]
    return lengths


def power(f: GraphMap, k: int, budget: int = DEFAULT_LENGTH_BUDGET) -> GraphMap:
    """Materialize ``f^k``.

    Raises
    ------
    ImageTooLongError
        If some image of ``f^k`` would exceed ``budget`` letters.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return f
    longest = max(image_lengths(f, k))
    if longest > budget:
        raise ImageTooLongError(f"|f^{k}(e)| reaches {longest} letters", {"power": k, "budget": budget})
    images = list(f.images)
    for _ in range(k - 1):
        nxt = []
        for e in f.graph.positive_edges:
            word: List[int] = []
            for x in f.images[e]:
                word.extend(images[x])
            red = reduce_path(f.graph, word)
            if not red:
                raise IrregularMapError(f"f^{k} collapses {f.graph.name(e)}", {"edge": f.graph.name(e)})
            nxt.append(red)
        images = [()] * f.graph.n_edges
        for i, img in enumerate(nxt):
            images[2 * i] = img
            images[2 * i + 1] = reverse(img)
    vimg = list(range(len(f.graph.vertices)))
    for _ in range(k):
        vimg = [f.vertex_image[v] for v in vimg]
    return GraphMap(f.graph, tuple(images), tuple(vimg))


# ----------------------------------------------------------------------
# Turns


def derivative(f: GraphMap) -> Tuple[int, ...]:
    """Direction map ``Df(e)``: first edge of ``f(e)``."""
    return tuple(img[0] for img in f.images)


def classify_turns(f: GraphMap) -> TurnClassification:
    g = f.graph
    df = derivative(f)
    eventual = list(g.edges)
    for _ in range(g.n_edges):
        eventual = [df[d] for d in eventual]
    illegal = set()
    gates: List[Tuple[int, ...]] = []
    for v in range(len(g.vertices)):
        dirs = g.out_edges(v)
        groups: Dict[int, List[int]] = {}
        for d in dirs:
            groups.setdefault(eventual[d], []).append(d)
        for members in groups.values():
            gates.append(tuple(members))
            for i, a in enumerate(members):
                for b in members[i + 1 :]:
                    illegal.add(Turn.of(a, b))
    gates.sort()
    return TurnClassification(frozenset(illegal), tuple(gates), tuple(eventual))


def crossed_turns(f: GraphMap) -> List[Tuple[int, Turn]]:
    """``(edge, turn)`` for every turn crossed inside a positive edge image."""
    out = []
    for e in f.graph.positive_edges:
        img = f.images[e]
        for i in range(len(img) - 1):
            out.append((e, Turn.at_junction(img, i)))
    return out


def is_legal_path(turns: TurnClassification, p: Sequence[int]) -> bool:
    return all(turns.is_legal(Turn.at_junction(p, i)) for i in range(len(p) - 1))


def is_train_track(f: GraphMap, turns: Optional[TurnClassification] = None) -> TrainTrackCheck:
    """Check that every turn crossed by an edge image is legal.

    This finite check implies that all iterated images ``f^t(e)`` are legal.
    """
    turns = turns or classify_turns(f)
    for e, turn in crossed_turns(f):
        if not turns.is_legal(turn):
            return TrainTrackCheck(False, e, turn)
    return TrainTrackCheck(True)


def expansion_bounds(f: GraphMap) -> ExpansionBounds:
    for e in f.graph.positive_edges:
        if f.lengths[e] < 2:
            raise NotExpandingError(
                f"edge {f.graph.name(e)} is not expanded at this power", {"edge": f.graph.name(e)}
            )
    lengths = [f.lengths[e] for e in f.graph.positive_edges]
    return ExpansionBounds(min(lengths), max(lengths))


# ----------------------------------------------------------------------
# Expansion


def _never_expanding(f: GraphMap) -> List[int]:
    """Positive edges with ``|f^t(e)| = 1`` for every ``t``."""
    single = {e for e in f.graph.edges if f.lengths[e] == 1}
    changed = True
    while changed:
        changed = False
        for e in list(single):
            if f.images[e][0] not in single:
                single.discard(e)
                single.discard(e ^ 1)
                changed = True
    return sorted(e for e in single if e % 2 == 0)


def contract_invariant_forest(f: GraphMap) -> Optional[GraphMap]:
    """Collapse the invariant subgraph of never-expanded edges.

    Returns ``None`` when every edge eventually expands.

    Raises
    ------
    InvariantLoopError
        If the invariant subgraph contains a loop.
    """
    g = f.graph
    stuck = _never_expanding(f)
    if not stuck:
        return None
    forest = nx.MultiGraph()
    forest.add_nodes_from(range(len(g.vertices)))
    for e in stuck:
        forest.add_edge(g.origin(e), g.terminus(e), key=e)
    sub = forest.edge_subgraph([(g.origin(e), g.terminus(e), e) for e in stuck])
    if not nx.is_forest(sub):
        cycle = nx.find_cycle(sub)
        names = [g.name(step[2]) for step in cycle]
        raise InvariantLoopError("invariant loop of non-expanding edges", {"loop": "".join(names)})
    logger.info("Contracting invariant forest %s", [g.name(e) for e in stuck])

    components = sorted((sorted(c) for c in nx.connected_components(forest)), key=lambda c: c[0])
    comp_of = {v: i for i, comp in enumerate(components) for v in comp}
    kept = [e for e in g.positive_edges if e not in stuck]
    if not kept:
        raise InvariantLoopError("every edge is non-expanding")
    quotient = Graph(
        tuple(g.vertices[c[0]] for c in components),
        tuple(g.edge_names[e >> 1] for e in kept),
        tuple(comp_of[g.origin(e)] for e in kept),
        tuple(comp_of[g.terminus(e)] for e in kept),
    )
    new_id = {}
    for i, e in enumerate(kept):
        new_id[e] = 2 * i
        new_id[e ^ 1] = 2 * i + 1
    images = []
    for e in kept:
        img = [new_id[x] for x in f.images[e] if x in new_id]
        red = reduce_path(quotient, img)
        if not red:
            raise IrregularMapError(f"image of {g.name(e)} collapses in the quotient", {"edge": g.name(e)})
        images.append(red)
    vimg = [comp_of[f.vertex_image[c[0]]] for c in components]
    return GraphMap.from_positive(quotient, images, vimg)


def make_expanding(f: GraphMap, max_power: int, budget: int = DEFAULT_LENGTH_BUDGET) -> Tuple[GraphMap, int]:
    """Least power ``k <= max_power`` with ``|f^k(e)| >= 2`` for all edges.

    Never-expanded invariant forests are contracted first.

    Raises
    ------
    InvariantLoopError
        The never-expanded subgraph contains a loop.
    MaxPowerExceededError
        No power up to ``max_power`` expands every edge.
    """
    contracted = contract_invariant_forest(f)
    if contracted is not None:
        return make_expanding(contracted, max_power, budget)
    for k in range(1, max_power + 1):
        if min(image_lengths(f, k)) >= 2:
            return power(f, k, budget), k
    raise MaxPowerExceededError(f"no power up to {max_power} is expanding", {"max_power": max_power})


def transition_matrix(f: GraphMap, oriented: bool = False) -> np.ndarray:
    """Letter-count matrix ``M[x][e] = |f(e)|_x``.

    The unoriented variant ranges over positive edge classes and counts
    both orientations of ``x``.
    """
    g = f.graph
    if oriented:
        m = np.zeros((g.n_edges, g.n_edges), dtype=np.int64)
        for e in g.edges:
            for x in f.images[e]:
                m[x, e] += 1
        return m
    k = len(g.edge_names)
    m = np.zeros((k, k), dtype=np.int64)
    for e in g.positive_edges:
        for x in f.images[e]:
            m[x >> 1, e >> 1] += 1
    return m
