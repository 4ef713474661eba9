"""Cancellation bound of a train track map.

For legal paths ``γ, γ′`` leaving a vertex through an illegal turn the
images ``f(γ)`` and ``f(γ′)`` share an initial segment which cancels in
``f(γ̄ ∘ γ′)``.  :func:`cancellation_bound` computes the supremum of that
common prefix exactly by walking both images letter by letter in a
product automaton: a state ``(x, i, y, j)`` compares letter ``i`` of
``f(x)`` with letter ``j`` of ``f(y)``, and when an image runs out the
ray is extended over every legal follower.  The automaton is a DAG for a
genuine cancellation bound; its longest path is the bound.
"""

from __future__ import annotations

import logging
from typing import List, Optional, Tuple

import networkx as nx

from src.errors import NotTrainTrackError, UnboundedCancellationError
from src.model.graph import Path, Turn
from src.model.graph_map import GraphMap, TurnClassification, classify_turns, is_train_track

__all__ = ["cancellation_bound", "brute_force_cancellation", "legal_followers"]

logger = logging.getLogger(__name__)

State = Tuple[int, int, int, int]


def legal_followers(f: GraphMap, turns: TurnClassification, e: int) -> List[int]:
    return [x for x in f.graph.followers(e) if turns.is_legal(Turn.of(e ^ 1, x))]


def _advance(f: GraphMap, turns: TurnClassification, e: int, i: int) -> List[Tuple[int, int]]:
    if i + 1 < f.lengths[e]:
        return [(e, i + 1)]
    return [(x, 0) for x in legal_followers(f, turns, e)]


def _automaton(f: GraphMap, turns: TurnClassification) -> nx.DiGraph:
    g = nx.DiGraph()
    stack: List[State] = []
    for turn in turns.illegal_turns:
        state = (turn.d1, 0, turn.d2, 0)
        if f.images[turn.d1][0] == f.images[turn.d2][0]:
            g.add_node(state)
            stack.append(state)
    while stack:
        x, i, y, j = stack.pop()
        for x2, i2 in _advance(f, turns, x, i):
            for y2, j2 in _advance(f, turns, y, j):
                if f.images[x2][i2] != f.images[y2][j2]:
                    continue
                nxt = (x2, i2, y2, j2)
                if nxt not in g:
                    stack.append(nxt)
                g.add_edge((x, i, y, j), nxt)
    return g


def cancellation_bound(f: GraphMap, turns: Optional[TurnClassification] = None) -> int:
    """Exact cancellation bound ``C(f)``.

    Raises
    ------
    NotTrainTrackError
        If ``f`` is not a train track map.
    UnboundedCancellationError
        If two legal rays have images with an unbounded common prefix.
    """
    turns = turns or classify_turns(f)
    check = is_train_track(f, turns)
    if not check.ok:
        raise NotTrainTrackError("cancellation bound needs a train track map", check.witness(f.graph) or {})
    g = _automaton(f, turns)
    if g.number_of_nodes() == 0:
        return 0
    if not nx.is_directed_acyclic_graph(g):
        raise UnboundedCancellationError("legal rays with unbounded common image prefix")
    bound = nx.dag_longest_path_length(g) + 1
    logger.debug("Cancellation automaton has %d states, C_f = %d", g.number_of_nodes(), bound)
    return bound


def _common_prefix(a: Path, b: Path) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def brute_force_cancellation(f: GraphMap, max_len: int, turns: Optional[TurnClassification] = None) -> int:
    """Largest cancellation over legal path pairs of length ``<= max_len``.

    Both paths grow one edge at a time, always on the side whose image is
    shorter; a pair whose images already differ is not extended, since no
    extension changes its common prefix.
    """
    turns = turns or classify_turns(f)
    best = 0
    for turn in turns.illegal_turns:
        stack: List[Tuple[Path, Path]] = [((turn.d1,), (turn.d2,))]
        while stack:
            p, q = stack.pop()
            a, b = f.apply(p), f.apply(q)
            m = _common_prefix(a, b)
            best = max(best, m)
            if m < min(len(a), len(b)):
                continue
            if len(a) <= len(b) and len(p) < max_len:
                stack.extend((p + (x,), q) for x in legal_followers(f, turns, p[-1]))
            elif len(b) < len(a) and len(q) < max_len:
                stack.extend((p, q + (x,)) for x in legal_followers(f, turns, q[-1]))
    return best
