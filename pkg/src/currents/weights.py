"""Currents as weight functions on reduced paths of bounded length.

A :class:`WeightFunction` stores ``⟨γ, μ⟩`` for every reduced path ``γ`` of
length at most ``radius``, aligned with :func:`src.model.graph.path_index`.
Counting currents are exact integer vectors; limit currents are floats
carrying the tolerance they were computed to.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Optional, Sequence

import numpy as np

from src.analysis.context import TrainTrackContext
from src.errors import TrainTrackError, TrivialPathError
from src.model.graph import Graph, Path, cyclically_reduce, is_cyclically_reduced, path_index, window_counts
from src.subst.frequencies import limit_frequencies, stretch_factor
from src.subst.substitution import substitution_from_map

__all__ = [
    "WeightFunction",
    "counting_current",
    "frequency_current",
    "norm",
    "projective_distance",
    "kolmogorov_defect",
    "flip_defect",
    "pushforward_rational",
    "mu_plus",
]

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class WeightFunction:
    graph: Graph
    radius: int
    values: np.ndarray
    exact: bool = False
    tol: float = 0.0
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.radius < 1:
            raise ValueError("radius must be at least 1")
        if self.values.shape != (len(path_index(self.graph, self.radius)),):
            raise ValueError("values must align with the path index")
        if np.any(self.values < 0):
            raise ValueError("weights must be non-negative")

    @property
    def index(self):
        return path_index(self.graph, self.radius)

    def value(self, gamma: Sequence[int]) -> float:
        return self.values[self.index.position[tuple(gamma)]]

    def normalized(self) -> np.ndarray:
        total = norm(self)
        if total <= 0:
            raise TrainTrackError("the zero current has no projective class")
        return self.values.astype(float) / total

    def projectivize(self) -> "WeightFunction":
        return WeightFunction(self.graph, self.radius, self.normalized(), False, self.tol, dict(self.meta))

    def scaled(self, k: float) -> "WeightFunction":
        return WeightFunction(self.graph, self.radius, self.values * k, self.exact and float(k).is_integer(), self.tol)

    def as_dict(self) -> Dict[str, float]:
        idx = self.index
        return {idx.label(i): (int(v) if self.exact else float(v)) for i, v in enumerate(self.values)}


def _symmetrize(graph: Graph, radius: int, counts: np.ndarray) -> np.ndarray:
    return counts + counts[path_index(graph, radius).inverse]


def counting_current(graph: Graph, w: Sequence[int], radius: int) -> WeightFunction:
    """``η_w``: ``⟨γ, η_w⟩`` counts cyclic occurrences of ``γ`` or ``γ̄`` in ``w``.

    Raises
    ------
    TrivialPathError
        For the empty loop.
    """
    if not w:
        raise TrivialPathError("the counting current of the empty loop is undefined")
    if not is_cyclically_reduced(w):
        raise TrainTrackError("loop must be cyclically reduced", {"loop": graph.format(w)})
    counts = window_counts(graph, w, radius, cyclic=True)
    return WeightFunction(graph, radius, _symmetrize(graph, radius, counts), exact=True)


def frequency_current(graph: Graph, word: Sequence[int], radius: int) -> WeightFunction:
    """Symmetrized window counts of a long path read linearly."""
    if not word:
        raise TrivialPathError("empty path")
    counts = window_counts(graph, word, radius, cyclic=False)
    return WeightFunction(graph, radius, _symmetrize(graph, radius, counts), exact=True)


def norm(mu: WeightFunction) -> float:
    """``‖μ‖_Γ = Σ_{e ∈ E⁺Γ} ⟨e, μ⟩``."""
    total = mu.values[mu.index.positive].sum()
    return int(total) if mu.exact else float(total)


def projective_distance(mu: WeightFunction, nu: WeightFunction) -> float:
    """Max-norm distance between the normalized weight vectors."""
    if mu.graph != nu.graph or mu.radius != nu.radius:
        raise TrainTrackError("currents live on different graphs or radii")
    return float(np.max(np.abs(mu.normalized() - nu.normalized())))


def kolmogorov_defect(mu: WeightFunction) -> float:
    """Largest violation of ``⟨γ, μ⟩ = Σ ⟨γx, μ⟩ = Σ ⟨xγ, μ⟩`` for ``|γ| < R``."""
    idx = mu.index
    vals = mu.values.astype(float)
    worst = 0.0
    for i, p in enumerate(idx.paths):
        if len(p) >= mu.radius:
            continue
        right = vals[idx.right_ext[i]].sum()
        left = vals[idx.left_ext[i]].sum()
        worst = max(worst, abs(vals[i] - right), abs(vals[i] - left))
    return worst


def flip_defect(mu: WeightFunction) -> float:
    vals = mu.values.astype(float)
    return float(np.max(np.abs(vals - vals[mu.index.inverse])))


def pushforward_rational(ctx: TrainTrackContext, w: Sequence[int], base: bool = True) -> Path:
    """``[f(w)]`` as a cyclic word; the push-forward of ``η_w`` is ``η_{[f(w)]}``.

    Uses the user map ``ctx.base`` unless ``base`` is false.
    """
    f = ctx.base if base else ctx.map
    image = cyclically_reduce(f.codomain, f.apply(w))
    if not image:
        raise TrivialPathError("image of the conjugacy class is trivial", {"loop": f.graph.format(w)})
    return image


@lru_cache(maxsize=512)
def mu_plus(
    ctx: TrainTrackContext,
    e: int,
    radius: int,
    tol: float = 1e-9,
    max_iter: int = 200,
) -> WeightFunction:
    """Limit current ``μ₊(e)`` of the edge ``e``, normalized to ``‖μ‖ = 1``.

    ``meta`` records the edge, the stretch factor of ``ctx.map`` at ``e``
    and the convergence power.  Results are cached and shared, so callers
    must not mutate them.
    """
    sub = substitution_from_map(ctx)
    freq = limit_frequencies(sub, e, radius, tol, max_iter)
    values = _symmetrize(ctx.graph, radius, freq.values)
    mu = WeightFunction(ctx.graph, radius, values, False, tol)
    mu = mu.projectivize()
    mu.meta.update(
        {
            "edge": ctx.graph.name(e),
            "lambda": stretch_factor(sub, e),
            "power": freq.power,
            "iterations": freq.iterations,
        }
    )
    defect = kolmogorov_defect(mu)
    if defect > 10 * tol:
        logger.warning("mu_plus(%s): Kolmogorov defect %.3g exceeds 10*tol", ctx.graph.name(e), defect)
    return mu
