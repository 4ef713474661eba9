"""Seeded samples of conjugacy classes for the orbit experiments.

Random samples are reduced random walks closed up into cyclically reduced
loops.  Adversarial samples add the closed-up INPs of the forward map and
loops confined to the edges of each stratum.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Set, Tuple

import numpy as np

from src.analysis.context import TrainTrackContext
from src.analysis.inps import search_inps
from src.currents.strata import strata
from src.errors import NonClosedLoopError
from src.model.graph import Graph, Path, close_up, cyclically_reduce

__all__ = ["SampleSpec", "Sample", "random_loop", "random_loops", "adversarial_loops", "draw_samples"]

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class SampleSpec:
    count: int = 100
    length: int = 40
    seed: int = 7
    adversarial: bool = False
    words: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.count < 0 or self.length < 1:
            raise ValueError("count must be non-negative and length positive")


@dataclass(frozen=True)
class Sample:
    word: Path
    kind: str = "random"
    label: str = field(default="", compare=False)


def random_loop(
    graph: Graph, rng: np.random.Generator, length: int, allowed: Optional[Set[int]] = None
) -> Path:
    """Random reduced walk of ``length`` edges, closed up and cyclically reduced.

    ``allowed`` restricts the walk (not the closing path) to a set of edges.
    """
    edges = [e for e in graph.edges if allowed is None or e in allowed]
    if not edges:
        raise ValueError("no edges to walk on")
    walk = [edges[int(rng.integers(len(edges)))]]
    while len(walk) < length:
        options = [f for f in graph.followers(walk[-1]) if allowed is None or f in allowed]
        if not options:
            break
        walk.append(options[int(rng.integers(len(options)))])
    return cyclically_reduce(graph, close_up(graph, walk))


def random_loops(graph: Graph, count: int, length: int, seed: int) -> List[Path]:
    rng = np.random.default_rng(seed)
    out: List[Path] = []
    while len(out) < count:
        w = random_loop(graph, rng, length)
        if w:
            out.append(w)
    return out


def adversarial_loops(ctx: TrainTrackContext, length: int, seed: int) -> List[Sample]:
    """Closed-up INPs and loops confined to single strata."""
    g = ctx.graph
    out: List[Sample] = []
    for eta in search_inps(ctx).inps:
        try:
            w = cyclically_reduce(g, close_up(g, eta.edges))
        except NonClosedLoopError:
            continue
        if w:
            out.append(Sample(w, "inp", eta.label(g)))
    rng = np.random.default_rng(seed + 1)
    for s in strata(ctx).strata:
        allowed = {e for x in s.edges for e in (x, x ^ 1)}
        w = random_loop(g, rng, length, allowed)
        if w:
            out.append(Sample(w, "stratum", f"stratum {s.index}"))
    return out


def draw_samples(ctx: TrainTrackContext, plan: SampleSpec) -> List[Sample]:
    """Explicit words first, then random loops, then adversarial loops."""
    g = ctx.graph
    samples = [Sample(cyclically_reduce(g, g.parse(text)), "given", text) for text in plan.words]
    samples = [s for s in samples if s.word]
    samples += [Sample(w, "random") for w in random_loops(g, plan.count, plan.length, plan.seed)]
    if plan.adversarial:
        samples += adversarial_loops(ctx, plan.length, plan.seed)
    logger.info("Drew %d samples (seed=%d, length=%d)", len(samples), plan.seed, plan.length)
    return samples
