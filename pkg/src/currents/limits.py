"""Simplices of limit currents and distances to them."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import nnls

from src.analysis.context import TrainTrackContext
from src.currents.weights import WeightFunction, counting_current, mu_plus, projective_distance
from src.errors import ImageTooLongError, SimplexError
from src.model.graph import Path, close_up, cyclically_reduce

__all__ = [
    "SimplexVertex",
    "LimitSimplex",
    "build_simplex",
    "distance_to_simplex",
    "mixture",
    "closed_image_current",
    "iterate_limit",
]

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class SimplexVertex:
    current: WeightFunction
    stretch: float
    edges: List[str] = field(default_factory=list)


@dataclass(slots=True)
class LimitSimplex:
    """Projective limit currents of the edges, merged within ``dedup_tol``.

    ``uniform_faces`` groups vertex indices by equal stretch factor.
    """

    vertices: List[SimplexVertex]
    uniform_faces: List[List[int]]
    sign: str = "+"
    radius: int = 3
    dedup_tol: float = 1e-6
    lambda_tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.sign not in ("+", "-"):
            raise ValueError("sign must be '+' or '-'")

    @property
    def dimension(self) -> int:
        return len(self.vertices) - 1

    def matrix(self) -> np.ndarray:
        """Normalized vertex coordinates as columns."""
        return np.column_stack([v.current.normalized() for v in self.vertices])

    def to_dict(self) -> Dict[str, object]:
        return {
            "sign": self.sign,
            "dimension": self.dimension,
            "radius": self.radius,
            "dedup_tol": self.dedup_tol,
            "lambda_tol": self.lambda_tol,
            "vertices": [
                {"edges": v.edges, "lambda": v.stretch, "weights": v.current.as_dict()} for v in self.vertices
            ],
            "uniform_faces": self.uniform_faces,
        }


def build_simplex(
    ctx: TrainTrackContext,
    radius: int = 3,
    tol: float = 1e-9,
    dedup_tol: float = 1e-6,
    lambda_tol: float = 1e-6,
    sign: str = "+",
    workers: int = 4,
) -> LimitSimplex:
    """``Δ₊`` of ``ctx`` (``Δ₋`` when called on the inverse with ``sign="-"``).

    Raises
    ------
    SimplexError
        When edges merged into one vertex disagree on the stretch factor.
    """
    g = ctx.graph
    edges = list(g.positive_edges)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        currents = list(pool.map(lambda e: mu_plus(ctx, e, radius, tol), edges))

    vertices: List[SimplexVertex] = []
    for e, mu in zip(edges, currents):
        lam = float(mu.meta["lambda"])
        for v in vertices:
            if projective_distance(v.current, mu) < dedup_tol:
                if abs(v.stretch - lam) > lambda_tol * max(lam, v.stretch):
                    raise SimplexError(
                        "edges with the same limit current have different stretch factors",
                        {"edges": [*v.edges, g.name(e)], "lambdas": [v.stretch, lam]},
                    )
                v.edges.append(g.name(e))
                break
        else:
            vertices.append(SimplexVertex(mu, lam, [g.name(e)]))

    faces: List[List[int]] = []
    for i in sorted(range(len(vertices)), key=lambda k: (vertices[k].stretch, k)):
        if faces and abs(vertices[i].stretch - vertices[faces[-1][0]].stretch) <= lambda_tol * vertices[i].stretch:
            faces[-1].append(i)
        else:
            faces.append([i])
    for face in faces:
        face.sort()
    faces.sort()
    logger.info("Simplex %s: %d vertices from %d edges, %d uniform faces", sign, len(vertices), len(edges), len(faces))
    return LimitSimplex(vertices, faces, sign, radius, dedup_tol, lambda_tol)


def distance_to_simplex(mu: WeightFunction, simplex: LimitSimplex) -> Tuple[float, np.ndarray]:
    """Projective distance from ``μ`` to the convex hull of the vertices.

    The convex coefficients come from nonnegative least squares with an
    appended row of ones; the distance is the max-norm residual of the
    normalized minimizer.
    """
    if not simplex.vertices:
        raise SimplexError("the simplex has no vertices")
    first = simplex.vertices[0].current
    if mu.graph != first.graph or mu.radius != first.radius:
        raise SimplexError("current and simplex live on different graphs or radii")
    V = simplex.matrix()
    x = mu.normalized()
    A = np.r_[V, np.ones((1, V.shape[1]))]
    b = np.r_[x, np.ones(1)]
    coeffs, _ = nnls(A, b)
    total = coeffs.sum()
    coeffs = coeffs / total if total > 0 else np.full(V.shape[1], 1.0 / V.shape[1])
    return float(np.max(np.abs(V @ coeffs - x))), coeffs


def mixture(simplex: LimitSimplex, coefficients: Sequence[float]) -> WeightFunction:
    coeffs = np.asarray(coefficients, dtype=float)
    if coeffs.shape != (len(simplex.vertices),) or np.any(coeffs < 0) or coeffs.sum() <= 0:
        raise SimplexError("mixture needs one non-negative coefficient per vertex")
    first = simplex.vertices[0].current
    values = simplex.matrix() @ (coeffs / coeffs.sum())
    return WeightFunction(first.graph, first.radius, values, False, first.tol)


def closed_image_current(ctx: TrainTrackContext, e: int, t: int, radius: int) -> WeightFunction:
    """Counting current of ``f^t(e)`` closed up into a loop."""
    word: Path = (e,)
    for _ in range(t):
        word = ctx.map.apply(word)
    loop = cyclically_reduce(ctx.graph, close_up(ctx.graph, word))
    return counting_current(ctx.graph, loop, radius)


def iterate_limit(
    ctx: TrainTrackContext,
    w: Sequence[int],
    radius: int,
    budget: int = 10**6,
    max_steps: int = 200,
    tol: Optional[float] = None,
) -> Tuple[WeightFunction, int]:
    """Counting current of the last iterate ``[f^t(w)]`` within ``budget`` letters.

    Stops early once successive normalized currents are closer than ``tol``.

    Raises
    ------
    ImageTooLongError
        If already ``[f(w)]`` exceeds the budget.
    """
    cur = tuple(w)
    mu = counting_current(ctx.graph, cur, radius)
    steps = 0
    for _ in range(max_steps):
        nxt = ctx.map.apply_cyclic(cur)
        if len(nxt) > budget:
            if steps == 0:
                raise ImageTooLongError("first iterate already exceeds the budget", {"budget": budget})
            break
        nu = counting_current(ctx.graph, nxt, radius)
        steps += 1
        done = tol is not None and projective_distance(mu, nu) < tol
        cur, mu = nxt, nu
        if done:
            break
    return mu, steps
