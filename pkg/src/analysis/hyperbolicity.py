"""Non-hyperbolicity detectors.

Two independent witnesses are searched for:

* closed Nielsen loops, i.e. cyclic legal concatenations of INPs, which
  carry a conjugacy class fixed by a power of the map;
* periodic conjugacy classes found by exhaustive search over short
  cyclically reduced words.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

import networkx as nx

from src.analysis.context import TrainTrackContext
from src.analysis.inps import InpSearch, NielsenPath, search_inps
from src.errors import NotHyperbolicError
from src.model.graph import Graph, Path, Turn, canonical_rotation, cyclically_reduce
from src.model.graph_map import GraphMap

__all__ = [
    "NielsenLoop",
    "PeriodicClass",
    "HyperbolicityVerdict",
    "find_nielsen_loop",
    "multi_inp_bound",
    "cyclic_words",
    "periodic_conjugacy_search",
    "hyperbolicity_verdict",
]

logger = logging.getLogger(__name__)

Oriented = Tuple[int, bool]


@dataclass(frozen=True)
class NielsenLoop:
    members: Tuple[Oriented, ...]
    loop: Path

    def label(self, graph: Graph) -> str:
        return graph.format(self.loop)


@dataclass(frozen=True)
class PeriodicClass:
    word: Path
    power: int


@dataclass(frozen=True)
class HyperbolicityVerdict:
    status: str
    witness: Optional[str] = None
    detail: Optional[str] = None

    def to_dict(self) -> Dict[str, Optional[str]]:
        return {"status": self.status, "witness": self.witness, "detail": self.detail}


def _ends(eta: NielsenPath, forward: bool) -> Tuple[Path, int, Fraction, int, Fraction]:
    """Edges of the oriented path with its first/last edge and end fractions."""
    first, last = (eta.left, eta.right) if forward else (eta.right, eta.left)
    edges = tuple(e ^ 1 for e in reversed(first.edges)) + last.edges
    # start point: fraction ``1 - first.end`` along the oriented first edge
    return edges, edges[0], 1 - first.end, last.edges[-1], last.end


def find_nielsen_loop(ctx: TrainTrackContext, inps: List[NielsenPath]) -> Optional[NielsenLoop]:
    """Search a cyclic legal concatenation of INPs."""
    pieces = [p for p in inps if p.kind == "INP"]
    oriented: List[Oriented] = [(i, fw) for i in range(len(pieces)) for fw in (True, False)]
    ends = {o: _ends(pieces[o[0]], o[1]) for o in oriented}
    g = nx.DiGraph()
    g.add_nodes_from(oriented)
    graph = ctx.graph
    for o1 in oriented:
        _, _, _, in_edge, in_frac = ends[o1]
        for o2 in oriented:
            _, out_edge, out_start, _, _ = ends[o2]
            if in_frac == 1:
                if out_start != 0 or graph.terminus(in_edge) != graph.origin(out_edge):
                    continue
                if not ctx.turns.is_legal(Turn.of(in_edge ^ 1, out_edge)):
                    continue
            elif out_edge != in_edge or out_start != in_frac:
                continue
            g.add_edge(o1, o2, interior=in_frac != 1)
    try:
        cycle = nx.find_cycle(g)
    except nx.NetworkXNoCycle:
        return None
    members = tuple(step[0] for step in cycle)
    letters: List[int] = []
    for o1, o2 in cycle:
        edges = ends[o1][0]
        letters.extend(edges)
        if g.edges[o1, o2]["interior"]:
            letters.pop()
    loop = cyclically_reduce(graph, letters)
    return NielsenLoop(members, loop)


def multi_inp_bound(ctx: TrainTrackContext, search: Optional[InpSearch] = None) -> int:
    """``A(f) = 2 · #INP``.

    Raises
    ------
    NotHyperbolicError
        When INPs close up into a Nielsen loop; the loop is the witness.
    """
    search = search or search_inps(ctx)
    loop = find_nielsen_loop(ctx, search.inps)
    if loop is not None:
        raise NotHyperbolicError(
            "INPs concatenate into a closed Nielsen loop", {"witness": loop.label(ctx.graph)}
        )
    return 2 * len(search.inps)


# ----------------------------------------------------------------------
# Periodic conjugacy classes


def cyclic_words(graph: Graph, max_len: int) -> Iterator[Path]:
    """Cyclically reduced loops up to rotation, one representative each."""
    stack: List[Path] = [(e,) for e in graph.edges]
    while stack:
        w = stack.pop()
        n = len(w)
        if graph.terminus(w[-1]) == graph.origin(w[0]) and (n == 1 or w[-1] != w[0] ^ 1):
            if canonical_rotation(w) == w:
                yield w
        if n < max_len:
            stack.extend(w + (x,) for x in graph.followers(w[-1]) if x >= w[0])


def periodic_conjugacy_search(f: GraphMap, max_len: int, max_power: int) -> Optional[PeriodicClass]:
    """First class ``w`` with ``[f^k(w)] = w`` up to rotation, ``k <= max_power``."""
    graph = f.graph
    checked = 0
    for w in cyclic_words(graph, max_len):
        checked += 1
        cur = w
        for k in range(1, max_power + 1):
            cur = cyclically_reduce(graph, f.apply(cur))
            if not cur:
                break
            if len(cur) == len(w) and canonical_rotation(cur) == w:
                return PeriodicClass(w, k)
    logger.info("Periodic search: %d classes of length <= %d, no periodic class", checked, max_len)
    return None


def hyperbolicity_verdict(
    ctx: TrainTrackContext,
    search: Optional[InpSearch] = None,
    max_len: int = 8,
    max_power: int = 6,
) -> HyperbolicityVerdict:
    """``pass``, ``fail`` with a witness loop, or ``unresolved``."""
    search = search or search_inps(ctx)
    loop = find_nielsen_loop(ctx, search.inps)
    if loop is not None:
        return HyperbolicityVerdict("fail", loop.label(ctx.graph), "closed Nielsen loop")
    periodic = periodic_conjugacy_search(ctx.base, max_len, max_power)
    if periodic is not None:
        return HyperbolicityVerdict(
            "fail", ctx.base.graph.format(periodic.word), f"periodic conjugacy class, power {periodic.power}"
        )
    if search.unresolved:
        return HyperbolicityVerdict("unresolved", None, f"{len(search.unresolved)} unresolved INP candidates")
    return HyperbolicityVerdict("pass")
