"""Limit frequencies and stretch factors of a substitution.

Frequencies are read off the exact block counts of ``ζ^t(e)`` at
``t = p, 2p, 3p, ...`` where ``p`` is the convergence power of the letter
graph; iteration stops once two successive normalized vectors agree to
``tol`` in max norm and the boundary term ``1 / |ζ^t(e)|`` is below
``tol`` as well.  Counts stay exact integers until the final division.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import networkx as nx
import numpy as np
from scipy.linalg import eigvals

from src.errors import ConvergenceError, NotExpandingError
from src.model.graph import Graph, Path, path_index
from src.subst.substitution import BlockState, Substitution, convergence_power, iterate_states

__all__ = [
    "FrequencyVector",
    "StretchFactors",
    "frequency_array",
    "letter_matrix",
    "limit_frequencies",
    "perron_root",
    "stretch_factor",
    "stretch_factors",
]

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class FrequencyVector:
    """Limit frequencies ``lim |ζ^t(e)|_γ / |ζ^t(e)|`` for ``|γ| <= radius``.

    ``values`` is aligned with ``path_index(graph, radius).paths``.
    """

    graph: Graph
    radius: int
    basepoint: int
    values: np.ndarray
    power: int
    iterations: int
    tol: float

    def __post_init__(self) -> None:
        if self.values.shape != (len(path_index(self.graph, self.radius)),):
            raise ValueError("values must align with the path index")

    def value(self, gamma: Path) -> float:
        index = path_index(self.graph, self.radius)
        return float(self.values[index.position[tuple(gamma)]])

    def as_dict(self) -> Dict[str, float]:
        index = path_index(self.graph, self.radius)
        return {index.label(i): float(v) for i, v in enumerate(self.values)}


@dataclass(slots=True)
class StretchFactors:
    values: Dict[int, float]
    groups: List[List[int]] = field(default_factory=list)
    tol: float = 1e-6

    def __post_init__(self) -> None:
        for e, lam in self.values.items():
            if lam <= 1:
                raise ValueError(f"stretch factor of letter {e} must exceed 1")


def frequency_array(graph: Graph, state: BlockState, radius: int) -> np.ndarray:
    """Normalized window counts of one block state, aligned with the path index.

    Windows that are not reduced paths are dropped.
    """
    index = path_index(graph, radius)
    out = np.zeros(len(index), dtype=float)
    for gamma, n in state.counts.items():
        pos = index.position.get(gamma)
        if pos is not None and len(gamma) <= radius:
            out[pos] = n / state.length
    return out


def limit_frequencies(
    sub: Substitution,
    e: int,
    radius: int,
    tol: float = 1e-9,
    max_iter: int = 200,
    power: Optional[int] = None,
) -> FrequencyVector:
    """Limit frequency vector of the letter ``e``.

    Parameters
    ----------
    power:
        Step between compared iterates; defaults to :func:`convergence_power`.

    Raises
    ------
    NotExpandingError
        When some letter never grows.
    ConvergenceError
        When ``max_iter`` comparisons pass without agreement; ``details``
        carries the power used so a caller can retry with a multiple.
    """
    if not sub.is_expanding():
        raise NotExpandingError("substitution is not expanding")
    p = power or convergence_power(sub, e)
    prev: Optional[np.ndarray] = None
    for t, states in enumerate(iterate_states(sub, radius)):
        if t == 0 or t % p:
            continue
        cur = frequency_array(sub.graph, states[e], radius)
        settled = prev is not None and float(np.max(np.abs(cur - prev))) < tol
        if settled and states[e].length * tol >= 1:
            logger.info("Frequencies of %s converged at t=%d (power %d)", sub.graph.name(e), t, p)
            return FrequencyVector(sub.graph, radius, e, cur, p, t // p, tol)
        prev = cur
        if t // p >= max_iter:
            break
    raise ConvergenceError(
        f"frequencies of {sub.graph.name(e)} did not converge", {"power": p, "iterations": max_iter}
    )


def perron_root(block: np.ndarray) -> float:
    """Perron-Frobenius eigenvalue of an irreducible non-negative block."""
    if not block.any():
        return 0.0
    return float(np.max(np.abs(eigvals(block.astype(float)))))


def letter_matrix(sub: Substitution) -> np.ndarray:
    """``M[x, y]`` = number of occurrences of ``y`` in ``ζ(x)``."""
    m = np.zeros((len(sub.images), len(sub.images)), dtype=np.int64)
    for x, img in enumerate(sub.images):
        for y in img:
            m[x, y] += 1
    return m


def stretch_factor(sub: Substitution, e: int) -> float:
    """``λ_e = lim |ζ^t(e)|^{1/t}``.

    The growth rate of ``|ζ^t(e)|`` is the largest Perron-Frobenius root
    among the letter components reachable from ``e``; each root is taken
    from its own irreducible block.
    """
    if not sub.is_expanding():
        raise NotExpandingError("substitution is not expanding")
    m = letter_matrix(sub)
    reach = sub.letter_graph().subgraph(sub.reachable(e))
    return max(perron_root(m[np.ix_(sorted(c), sorted(c))]) for c in nx.strongly_connected_components(reach))


def stretch_factors(sub: Substitution, group_tol: float = 1e-6) -> StretchFactors:
    """``λ_e`` for every letter, grouped by relative tolerance."""
    values: Dict[int, float] = {}
    for e in sub.graph.positive_edges:
        lam = stretch_factor(sub, e)
        values[e] = lam
        values[e ^ 1] = lam
    groups: List[List[int]] = []
    for e in sorted(values, key=lambda x: (values[x], x)):
        if groups and abs(values[e] - values[groups[-1][0]]) <= group_tol * values[e]:
            groups[-1].append(e)
        else:
            groups.append([e])
    return StretchFactors(values, groups, group_tol)
