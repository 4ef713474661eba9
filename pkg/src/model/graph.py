"""Finite graphs with oriented edges, reduced paths and cyclic words.

Oriented edges are small integers.  The positive orientation of the
``k``-th topological edge is ``2k`` and its inverse is ``2k + 1`` so the
involution is ``e ^ 1``.  Paths and cyclic words are plain tuples of
edge ids; the :class:`Graph` carries the name mapping used for display
(lowercase name for the positive edge, uppercase for its inverse).

Junction convention
-------------------
A path ``e_1 ... e_n`` crosses at junction ``i`` the turn
``{inv(e_i), e_{i+1}}``, two directions with common origin
``terminus(e_i)``.  A turn is degenerate iff both directions coincide,
which is exactly a cancellation ``e_i e_{i+1} = e_i inv(e_i)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np

from src.errors import NonClosedLoopError, NonComposablePathError, TrainTrackError, TrivialPathError

__all__ = [
    "Path",
    "Graph",
    "Turn",
    "inv",
    "reverse",
    "check_composable",
    "is_reduced",
    "is_cyclically_reduced",
    "reduce_path",
    "cyclically_reduce",
    "occurrences",
    "symmetric_count",
    "canonical_rotation",
    "same_cyclic_word",
    "enumerate_reduced_paths",
    "count_reduced_paths",
    "PathIndex",
    "path_index",
    "window_counts",
    "close_up",
    "fundamental_loops",
]

Path = Tuple[int, ...]

_EDGE_NAME = re.compile(r"^[a-z][0-9]*$")
_TOKEN = re.compile(r"[A-Za-z][0-9]*")


def inv(e: int) -> int:
    return e ^ 1


def reverse(p: Sequence[int]) -> Path:
    """Return the inverse path ``inv(e_n) ... inv(e_1)``."""
    return tuple(e ^ 1 for e in reversed(p))


@dataclass(frozen=True)
class Graph:
    """Finite graph with a fixed orientation class of its edges.

    Attributes
    ----------
    vertices:
        Vertex names; vertices are referred to by index.
    edge_names:
        Names of the positive edges; ``edge_names[k]`` names edge ``2k``.
    tails, heads:
        Origin and terminus vertex index of each positive edge.
    """

    vertices: Tuple[str, ...]
    edge_names: Tuple[str, ...]
    tails: Tuple[int, ...]
    heads: Tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.vertices:
            raise ValueError("graph needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("vertex names must be unique")
        if len(set(self.edge_names)) != len(self.edge_names):
            raise ValueError("edge names must be unique")
        if not (len(self.edge_names) == len(self.tails) == len(self.heads)):
            raise ValueError("edge_names, tails and heads must align")
        for name in self.edge_names:
            if not _EDGE_NAME.match(name):
                raise ValueError(f"invalid edge name {name!r}: expected a lowercase letter and optional digits")
        nv = len(self.vertices)
        for v in (*self.tails, *self.heads):
            if not 0 <= v < nv:
                raise ValueError(f"vertex index {v} out of range")

    @classmethod
    def rose(cls, names: Sequence[str], vertex: str = "v") -> "Graph":
        k = len(names)
        return cls((vertex,), tuple(names), (0,) * k, (0,) * k)

    # ------------------------------------------------------------------
    @property
    def n_edges(self) -> int:
        """Number of oriented edges ``|EΓ|``."""
        return 2 * len(self.edge_names)

    @property
    def edges(self) -> range:
        return range(self.n_edges)

    @property
    def positive_edges(self) -> range:
        return range(0, self.n_edges, 2)

    @property
    def is_rose(self) -> bool:
        return len(self.vertices) == 1

    def origin(self, e: int) -> int:
        k = e >> 1
        return self.heads[k] if e & 1 else self.tails[k]

    def terminus(self, e: int) -> int:
        return self.origin(e ^ 1)

    def name(self, e: int) -> str:
        base = self.edge_names[e >> 1]
        return base.upper() if e & 1 else base

    @cached_property
    def _ids(self) -> Dict[str, int]:
        ids: Dict[str, int] = {}
        for k, name in enumerate(self.edge_names):
            ids[name] = 2 * k
            ids[name.upper()] = 2 * k + 1
        return ids

    def edge_id(self, name: str) -> int:
        try:
            return self._ids[name]
        except KeyError:
            raise TrainTrackError(f"unknown edge {name!r}", {"letter": name}) from None

    def vertex_id(self, name: str) -> int:
        try:
            return self.vertices.index(name)
        except ValueError:
            raise TrainTrackError(f"unknown vertex {name!r}", {"vertex": name}) from None

    @cached_property
    def _out(self) -> Tuple[Tuple[int, ...], ...]:
        out: List[List[int]] = [[] for _ in self.vertices]
        for e in self.edges:
            out[self.origin(e)].append(e)
        return tuple(tuple(x) for x in out)

    def out_edges(self, v: int) -> Tuple[int, ...]:
        """Directions at ``v``: oriented edges with origin ``v``."""
        return self._out[v]

    @cached_property
    def _followers(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(f for f in self._out[self.terminus(e)] if f != e ^ 1) for e in self.edges)

    def followers(self, e: int) -> Tuple[int, ...]:
        """Edges that may follow ``e`` in a reduced path."""
        return self._followers[e]

    def format(self, p: Iterable[int]) -> str:
        return "".join(self.name(e) for e in p)

    def parse(self, text: str) -> Path:
        """Parse ``"a b A"`` or ``"abA"`` into a tuple of edge ids."""
        tokens: List[int] = []
        for chunk in text.split():
            pos = 0
            for m in _TOKEN.finditer(chunk):
                if m.start() != pos:
                    raise TrainTrackError(f"cannot parse {chunk!r}", {"text": text})
                tokens.append(self.edge_id(m.group()))
                pos = m.end()
            if pos != len(chunk):
                raise TrainTrackError(f"cannot parse {chunk!r}", {"text": text})
        return tuple(tokens)


@dataclass(frozen=True, order=True)
class Turn:
    """Unordered pair of directions with a common origin."""

    d1: int
    d2: int

    @classmethod
    def of(cls, a: int, b: int) -> "Turn":
        return cls(a, b) if a <= b else cls(b, a)

    @classmethod
    def at_junction(cls, p: Sequence[int], i: int) -> "Turn":
        """Turn crossed between ``p[i]`` and ``p[i + 1]`` (indices taken cyclically)."""
        n = len(p)
        return cls.of(p[i % n] ^ 1, p[(i + 1) % n])

    @property
    def degenerate(self) -> bool:
        return self.d1 == self.d2

    def label(self, graph: Graph) -> str:
        return f"{{{graph.name(self.d1)},{graph.name(self.d2)}}}"


# ----------------------------------------------------------------------
# Reduction


def check_composable(graph: Graph, p: Sequence[int]) -> None:
    for i in range(len(p) - 1):
        if graph.terminus(p[i]) != graph.origin(p[i + 1]):
            raise NonComposablePathError(
                f"edges {graph.name(p[i])} and {graph.name(p[i + 1])} do not compose",
                {"index": i},
            )


def is_reduced(p: Sequence[int]) -> bool:
    return all(p[i + 1] != p[i] ^ 1 for i in range(len(p) - 1))


def is_cyclically_reduced(p: Sequence[int]) -> bool:
    return is_reduced(p) and (len(p) < 2 or p[0] != p[-1] ^ 1)


def reduce_path(graph: Graph, p: Sequence[int]) -> Path:
    """Cancel adjacent ``e inv(e)`` pairs until the path is reduced."""
    check_composable(graph, p)
    stack: List[int] = []
    for e in p:
        if stack and stack[-1] == e ^ 1:
            stack.pop()
        else:
            stack.append(e)
    return tuple(stack)


def cyclically_reduce(graph: Graph, p: Sequence[int]) -> Path:
    """Reduce a closed path and strip wrap-around cancellations.

    Raises
    ------
    NonClosedLoopError
        If ``p`` is not a closed path.  An empty result means the loop is
        contractible.
    """
    if p and graph.terminus(p[-1]) != graph.origin(p[0]):
        raise NonClosedLoopError("path is not closed", {"path": graph.format(p)})
    q = reduce_path(graph, p)
    lo, hi = 0, len(q)
    while hi - lo >= 2 and q[lo] == q[hi - 1] ^ 1:
        lo += 1
        hi -= 1
    return q[lo:hi]


# ----------------------------------------------------------------------
# Occurrences


def occurrences(gamma: Sequence[int], host: Sequence[int], cyclic: bool = False) -> Tuple[int, int]:
    """Return ``(|host|_γ, |host|_γ̄)``.

    Cyclic hosts are read as the bi-infinite periodic word and each of the
    ``len(host)`` starting positions is counted once, so ``γ`` may be
    longer than ``host``.
    """
    if not gamma:
        raise TrivialPathError("cannot count occurrences of the trivial path")
    bar = reverse(gamma)
    n, k = len(host), len(gamma)

    def _count(word: Sequence[int]) -> int:
        if cyclic:
            if n == 0:
                return 0
            return sum(1 for i in range(n) if all(host[(i + j) % n] == word[j] for j in range(k)))
        return sum(1 for i in range(n - k + 1) if tuple(host[i : i + k]) == tuple(word))

    return _count(gamma), _count(bar)


def symmetric_count(gamma: Sequence[int], host: Sequence[int], cyclic: bool = False) -> int:
    """``⟨γ, host⟩ = |host|_γ + |host|_γ̄``."""
    a, b = occurrences(gamma, host, cyclic)
    return a + b


def canonical_rotation(w: Sequence[int]) -> Path:
    if not w:
        return ()
    t = tuple(w)
    return min(t[i:] + t[:i] for i in range(len(t)))


def same_cyclic_word(u: Sequence[int], v: Sequence[int]) -> bool:
    return len(u) == len(v) and canonical_rotation(u) == canonical_rotation(v)


# ----------------------------------------------------------------------
# Enumeration


def enumerate_reduced_paths(graph: Graph, R: int) -> List[Path]:
    """All reduced paths of length ``1..R``, by length then edge order."""
    if R < 1:
        raise ValueError("R must be >= 1")
    layer: List[Path] = [(e,) for e in graph.edges]
    out = list(layer)
    for _ in range(R - 1):
        layer = [p + (f,) for p in layer for f in graph.followers(p[-1])]
        out.extend(layer)
    return out


def count_reduced_paths(graph: Graph, k: int) -> int:
    """Number of reduced paths of length ``k`` from the edge adjacency matrix."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = graph.n_edges
    adj = np.zeros((n, n), dtype=object)
    for e in graph.edges:
        for f in graph.followers(e):
            adj[e, f] = 1
    vec = np.ones(n, dtype=object)
    for _ in range(k - 1):
        vec = adj.dot(vec)
    return int(sum(vec))


class PathIndex:
    """Indexed enumeration of reduced paths up to radius ``R``.

    Paths are encoded as integers ``Σ (e_j + 1) B^j`` with ``B = |EΓ| + 1``
    so that codes of different lengths never collide.
    """

    def __init__(self, graph: Graph, radius: int) -> None:
        self.graph = graph
        self.radius = radius
        self.paths: List[Path] = enumerate_reduced_paths(graph, radius)
        self.base = graph.n_edges + 1
        self.position: Dict[Path, int] = {p: i for i, p in enumerate(self.paths)}
        self.lengths = np.array([len(p) for p in self.paths], dtype=np.int64)
        self.codes = np.array([self.encode(p) for p in self.paths], dtype=np.int64)
        self._order = np.argsort(self.codes)
        self._sorted_codes = self.codes[self._order]
        self.inverse = np.array([self.position[reverse(p)] for p in self.paths], dtype=np.int64)
        self.right_ext: List[List[int]] = []
        self.left_ext: List[List[int]] = []
        for p in self.paths:
            if len(p) >= radius:
                self.right_ext.append([])
                self.left_ext.append([])
                continue
            self.right_ext.append([self.position[p + (f,)] for f in graph.followers(p[-1])])
            self.left_ext.append([self.position[(f ^ 1,) + p] for f in graph.followers(p[0] ^ 1)])
        self.positive = np.array([self.position[(e,)] for e in graph.positive_edges], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.paths)

    def encode(self, p: Sequence[int]) -> int:
        code = 0
        mult = 1
        for e in p:
            code += (e + 1) * mult
            mult *= self.base
        return code

    def locate(self, codes: np.ndarray) -> np.ndarray:
        """Map path codes to positions in :attr:`paths`."""
        pos = np.searchsorted(self._sorted_codes, codes)
        pos = np.clip(pos, 0, len(self._sorted_codes) - 1)
        if not np.all(self._sorted_codes[pos] == codes):
            raise TrainTrackError("word contains a non-reduced window")
        return self._order[pos]

    def label(self, i: int) -> str:
        return self.graph.format(self.paths[i])


@lru_cache(maxsize=64)
def path_index(graph: Graph, radius: int) -> PathIndex:
    return PathIndex(graph, radius)


def window_counts(graph: Graph, word: Sequence[int], radius: int, cyclic: bool = True) -> np.ndarray:
    """Occurrence counts ``|word|_γ`` for every indexed path ``γ``.

    The result is an ``int64`` array aligned with ``path_index(graph,
    radius).paths``.  Cyclic words wrap around (``np.resize`` repeats the
    word when a window is longer than the word itself).
    """
    index = path_index(graph, radius)
    counts = np.zeros(len(index), dtype=np.int64)
    arr = np.asarray(word, dtype=np.int64)
    n = arr.size
    if n == 0:
        return counts
    for k in range(1, radius + 1):
        if cyclic:
            ext = np.resize(arr, n + k - 1)
            starts = n
        else:
            if k > n:
                break
            ext = arr
            starts = n - k + 1
        codes = np.zeros(starts, dtype=np.int64)
        mult = 1
        for j in range(k):
            codes += (ext[j : j + starts] + 1) * mult
            mult *= index.base
        uniq, cnt = np.unique(codes, return_counts=True)
        counts[index.locate(uniq)] += cnt
    return counts


# ----------------------------------------------------------------------
# Loops


def close_up(graph: Graph, path: Sequence[int]) -> Path:
    """Extend a reduced path by a shortest path into a cyclically reduced loop."""
    if not path:
        raise TrivialPathError("cannot close up the trivial path")
    first, last = path[0], path[-1]
    if graph.terminus(last) == graph.origin(first) and last != first ^ 1:
        return tuple(path)
    g = nx.DiGraph()
    for e in graph.edges:
        for f in graph.followers(e):
            g.add_edge(e, f)
    g.add_edges_from(("src", f) for f in graph.followers(last))
    g.add_edges_from(
        (x, "dst") for x in graph.edges if graph.terminus(x) == graph.origin(first) and x != first ^ 1
    )
    try:
        route = nx.shortest_path(g, "src", "dst")
    except (nx.NetworkXNoPath, nx.NodeNotFound):
        raise NonClosedLoopError("no reduced completing path", {"path": graph.format(path)}) from None
    return tuple(path) + tuple(route[1:-1])


def fundamental_loops(graph: Graph, base: int = 0) -> List[Path]:
    """Basis of loops at ``base``: one per positive edge outside a BFS tree."""
    parent_edge: Dict[int, int] = {base: -1}
    queue = [base]
    tree: set[int] = set()
    while queue:
        v = queue.pop(0)
        for e in graph.out_edges(v):
            w = graph.terminus(e)
            if w not in parent_edge:
                parent_edge[w] = e
                tree.add(e >> 1)
                queue.append(w)
    if len(parent_edge) != len(graph.vertices):
        raise TrainTrackError("graph is not connected")

    def _to(v: int) -> Path:
        out: List[int] = []
        while parent_edge[v] != -1:
            e = parent_edge[v]
            out.append(e)
            v = graph.origin(e)
        return tuple(reversed(out))

    loops = []
    for e in graph.positive_edges:
        if e >> 1 in tree:
            continue
        loop = _to(graph.origin(e)) + (e,) + reverse(_to(graph.terminus(e)))
        loops.append(reduce_path(graph, loop))
    return loops
