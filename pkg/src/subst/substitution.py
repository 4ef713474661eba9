"""The substitution ``ζ_f`` induced by a graph map on its oriented edges.

Letters are oriented edge ids.  Iterated images are concatenated without
reduction, which agrees with ``f^t(e)`` for train track maps.

Occurrence counts in ``ζ^t(e)`` are computed exactly without expanding the
word: every letter carries a :class:`BlockState` (window counts, first and
last ``L − 1`` letters, length) and the state of ``ζ^{t+1}(x)`` is folded
from the states of the letters of ``ζ(x)``, adding the windows that straddle
each junction.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass
from functools import reduce
from typing import Dict, Iterator, List, Sequence, Tuple

import networkx as nx

from src.analysis.context import TrainTrackContext
from src.errors import IrregularMapError
from src.model.graph import Graph, Path, reverse
from src.model.graph_map import GraphMap

__all__ = [
    "Substitution",
    "substitution_from_map",
    "BlockState",
    "iterate_states",
    "iterate_counts",
    "naive_counts",
    "convergence_power",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Substitution:
    graph: Graph
    images: Tuple[Path, ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.graph.n_edges:
            raise IrregularMapError("one image per letter is required")
        for e, img in enumerate(self.images):
            if not img:
                raise IrregularMapError(f"image of {self.graph.name(e)} is empty")
            if self.images[e ^ 1] != reverse(img):
                raise IrregularMapError(
                    f"image of {self.graph.name(e ^ 1)} is not the inverse of the image of {self.graph.name(e)}"
                )

    @property
    def letters(self) -> range:
        return self.graph.edges

    def expand(self, e: int, t: int) -> Path:
        """``ζ^t(e)`` letter by letter; test oracle for small ``t``."""
        word: Path = (e,)
        for _ in range(t):
            word = tuple(x for y in word for x in self.images[y])
        return word

    def lengths(self, t: int) -> List[int]:
        """``|ζ^t(x)|`` for every letter, exact."""
        cur = [1] * len(self.images)
        for _ in range(t):
            cur = [sum(cur[y] for y in img) for img in self.images]
        return cur

    def letter_graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.letters)
        for x, img in enumerate(self.images):
            g.add_edges_from((x, y) for y in img)
        return g

    def reachable(self, e: int) -> List[int]:
        return sorted(nx.descendants(self.letter_graph(), e) | {e})

    def is_expanding(self) -> bool:
        """Every letter eventually has an image of length at least two."""
        g = self.letter_graph()
        long_letters = {x for x, img in enumerate(self.images) if len(img) >= 2}
        return all((nx.descendants(g, x) | {x}) & long_letters for x in self.letters)

    def power(self, k: int) -> "Substitution":
        return Substitution(self.graph, tuple(self.expand(x, k) for x in self.letters))

    def describe(self) -> Dict[str, str]:
        g = self.graph
        return {g.name(x): g.format(img) for x, img in enumerate(self.images)}


def substitution_from_map(source: TrainTrackContext | GraphMap) -> Substitution:
    """``ζ_f`` for a context (its analysed power) or a bare self-map."""
    f = source.map if isinstance(source, TrainTrackContext) else source
    if not f.is_self_map:
        raise IrregularMapError("a substitution needs a self-map")
    return Substitution(f.graph, f.images)


# ----------------------------------------------------------------------
# Block states


@dataclass(frozen=True)
class BlockState:
    counts: Dict[Path, int]
    prefix: Path
    suffix: Path
    length: int


def _windows(word: Sequence[int], radius: int) -> Counter:
    out: Counter = Counter()
    n = len(word)
    for k in range(1, min(radius, n) + 1):
        for i in range(n - k + 1):
            out[tuple(word[i : i + k])] += 1
    return out


def _straddling(left: Path, right: Path, radius: int) -> Counter:
    """Windows of ``left + right`` of length ``<= radius`` meeting both parts."""
    out: Counter = Counter()
    joint = left + right
    cut = len(left)
    for i in range(cut):
        for j in range(cut + 1, min(len(joint), i + radius) + 1):
            out[joint[i:j]] += 1
    return out


def _fold(states: Sequence[BlockState], radius: int) -> BlockState:
    keep = radius - 1
    counts: Counter = Counter()
    prefix: Path = ()
    suffix: Path = ()
    length = 0
    for st in states:
        counts.update(st.counts)
        if length:
            counts.update(_straddling(suffix, st.prefix, radius))
        if len(prefix) < keep:
            prefix = (prefix + st.prefix)[:keep]
        suffix = (suffix + st.suffix)[-keep:] if keep else ()
        length += st.length
    return BlockState(dict(counts), prefix, suffix, length)


def iterate_states(sub: Substitution, radius: int) -> Iterator[List[BlockState]]:
    """Yield the block states of ``ζ^t(x)`` for ``t = 0, 1, 2, ...``."""
    if radius < 1:
        raise ValueError("radius must be at least 1")
    keep = radius - 1
    states = [
        BlockState({(x,): 1}, (x,)[:keep], (x,)[-keep:] if keep else (), 1) for x in sub.letters
    ]
    while True:
        yield states
        states = [_fold([states[y] for y in img], radius) for img in sub.images]


def iterate_counts(sub: Substitution, e: int, w: Sequence[int], t: int) -> int:
    """Exact ``|ζ^t(e)|_w``."""
    w = tuple(w)
    if not w:
        raise ValueError("the counted word must be non-empty")
    if t < 0:
        raise ValueError("t must be non-negative")
    reach = set(sub.reachable(e))
    if any(x not in reach for x in w):
        return 0
    states = next(itertools.islice(iterate_states(sub, len(w)), t, None))
    return states[e].counts.get(w, 0)


def naive_counts(sub: Substitution, e: int, t: int, radius: int) -> Dict[Path, int]:
    """Window counts of the expanded word ``ζ^t(e)``."""
    return dict(_windows(sub.expand(e, t), radius))


def _period(g: nx.DiGraph, comp: Sequence[int]) -> int:
    sub = g.subgraph(comp)
    root = next(iter(comp))
    level = nx.single_source_shortest_path_length(sub, root)
    return reduce(math.gcd, (level[u] + 1 - level[v] for u, v in sub.edges), 0)


def convergence_power(sub: Substitution, e: int) -> int:
    """``lcm`` of the cyclic periods of the letter components reachable from ``e``."""
    g = sub.letter_graph()
    reach = nx.descendants(g, e) | {e}
    periods = []
    for comp in nx.strongly_connected_components(g.subgraph(reach)):
        comp = sorted(comp)
        if len(comp) == 1 and not g.has_edge(comp[0], comp[0]):
            continue
        periods.append(_period(g, comp) or 1)
    return reduce(math.lcm, periods, 1)
