"""Strata of the transition matrix and limits of rational currents.

A stratum is a strongly connected component of the directed graph
``e → x`` whenever ``x`` occurs in ``f(e)``; strata are ordered by
reachability.  The limit of ``φ^t[η_w]`` is a combination of the limit
currents of the legal edges of a pseudo-legal iterate of ``w``, restricted
to the edges of fastest growth.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from src.analysis.context import TrainTrackContext
from src.analysis.decomposition import pseudo_legal_decomposition
from src.analysis.inps import search_inps
from src.currents.weights import WeightFunction, mu_plus
from src.errors import DecompositionError
from src.model.graph import Path
from src.model.graph_map import image_lengths, transition_matrix
from src.subst.frequencies import perron_root

__all__ = ["Stratum", "StrataOrder", "strata", "RationalLimit", "rational_limit_strata"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Stratum:
    index: int
    edges: Tuple[int, ...]
    pf: float


@dataclass
class StrataOrder:
    strata: List[Stratum]
    dag: nx.DiGraph
    stratum_of: Dict[int, int]

    def below(self, s: int) -> List[int]:
        return sorted(nx.descendants(self.dag, s) | {s})

    def depth(self, s: int, pf: float, tol: float) -> int:
        """Length of the longest chain of ``pf``-strata starting below ``s``."""
        best: Dict[int, int] = {}
        for node in reversed(list(nx.topological_sort(self.dag.subgraph(self.below(s))))):
            own = 1 if abs(self.strata[node].pf - pf) <= tol * pf else 0
            nxt = [best[c] for c in self.dag.successors(node) if c in best]
            best[node] = own + max(nxt, default=0)
        return best[s]


def strata(ctx: TrainTrackContext) -> StrataOrder:
    """Strata of ``ctx.map`` over positive edges, with their reachability DAG."""
    m = transition_matrix(ctx.map)
    adj = (m.T > 0).astype(np.int8)
    n_comp, labels = connected_components(csr_matrix(adj), directed=True, connection="strong")
    members: List[List[int]] = [[] for _ in range(n_comp)]
    for k, lab in enumerate(labels):
        members[lab].append(k)
    out = []
    for lab, ks in enumerate(members):
        block = m[np.ix_(ks, ks)]
        out.append(Stratum(lab, tuple(2 * k for k in ks), perron_root(block)))
    dag = nx.DiGraph()
    dag.add_nodes_from(range(n_comp))
    rows, cols = np.nonzero(adj)
    dag.add_edges_from((int(labels[i]), int(labels[j])) for i, j in zip(rows, cols) if labels[i] != labels[j])
    stratum_of = {2 * k: int(lab) for k, lab in enumerate(labels)}
    logger.info("Strata: %s", [(s.index, len(s.edges), round(s.pf, 6)) for s in out])
    return StrataOrder(out, dag, stratum_of)


@dataclass
class RationalLimit:
    current: WeightFunction
    edges: List[str]
    weights: List[float]
    steps: int
    pseudo_legal: Path


def _growth_weights(ctx: TrainTrackContext, edges: Sequence[int], tol: float, max_steps: int = 400) -> List[float]:
    prev: Optional[np.ndarray] = None
    for t in range(1, max_steps + 1):
        lengths = image_lengths(ctx.map, t)
        vec = np.array([lengths[e] for e in edges], dtype=object)
        total = sum(vec)
        cur = np.array([x / total for x in vec], dtype=float)
        if prev is not None and np.max(np.abs(cur - prev)) < tol:
            return cur.tolist()
        prev = cur
    return prev.tolist() if prev is not None else [1.0 / len(edges)] * len(edges)


def rational_limit_strata(
    ctx: TrainTrackContext,
    w: Sequence[int],
    radius: int = 3,
    tol: float = 1e-9,
    weighting: str = "growth",
    max_steps: int = 64,
    pf_tol: float = 1e-6,
) -> RationalLimit:
    """``[μ_∞] = [Σ a_i μ₊(c_i)]`` over the fastest growing legal edges of ``w``.

    Parameters
    ----------
    weighting:
        ``"growth"`` weighs ``μ₊(c_i)`` by the asymptotic share of
        ``|f^T(c_i)|``; ``"uniform"`` gives every edge weight one.

    Raises
    ------
    DecompositionError
        When no iterate up to ``max_steps`` is pseudo-legal.
    """
    if weighting not in ("growth", "uniform"):
        raise ValueError("weighting must be 'growth' or 'uniform'")
    inps = search_inps(ctx).inps
    cur = tuple(w)
    decomposition = None
    for step in range(max_steps + 1):
        decomposition = pseudo_legal_decomposition(ctx, cur, inps)
        if decomposition is not None:
            break
        cur = ctx.map.apply_cyclic(cur)
    if decomposition is None:
        raise DecompositionError("no pseudo-legal iterate found", {"max_steps": max_steps})
    multiplicity = Counter(c & ~1 for c in decomposition.legal_edges)
    collected = sorted(multiplicity)
    if not collected:
        raise DecompositionError("pseudo-legal iterate has no legal edges")

    order = strata(ctx)
    reach_pf = {c: max(order.strata[s].pf for s in order.below(order.stratum_of[c])) for c in collected}
    top = max(reach_pf.values())
    depth = {c: order.depth(order.stratum_of[c], top, pf_tol) for c in collected}
    best_depth = max(depth[c] for c in collected if abs(reach_pf[c] - top) <= pf_tol * top)
    chosen = [c for c in collected if abs(reach_pf[c] - top) <= pf_tol * top and depth[c] == best_depth]

    if weighting == "growth":
        shares = _growth_weights(ctx, chosen, tol)
    else:
        shares = [1.0] * len(chosen)
    weights = [multiplicity[c] * a for c, a in zip(chosen, shares)]
    currents = [mu_plus(ctx, c, radius, tol) for c in chosen]
    values = sum(a * mu.values for a, mu in zip(weights, currents))
    limit = WeightFunction(ctx.graph, radius, values, False, tol).projectivize()
    return RationalLimit(limit, [ctx.graph.name(c) for c in chosen], weights, step, cur)
