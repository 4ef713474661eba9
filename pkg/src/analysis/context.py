"""Validated train track context shared by every analysis.

A :class:`TrainTrackContext` bundles the map under analysis (a power of the
user map at which every edge is expanded) with its turn classification,
expansion bounds and cancellation constants.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from src.errors import NotExpandingError, NotTrainTrackError
from src.model.cancellation import cancellation_bound, legal_followers
from src.model.graph import Graph, Path, Turn
from src.model.graph_map import (
    DEFAULT_LENGTH_BUDGET,
    ExpansionBounds,
    GraphMap,
    TurnClassification,
    classify_turns,
    contract_invariant_forest,
    expansion_bounds,
    image_lengths,
    is_train_track,
    make_expanding,
    power,
)

__all__ = ["TrainTrackContext", "build_context"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainTrackContext:
    """Expanding train track map with its derived constants.

    Attributes
    ----------
    base:
        User map after contraction of invariant forests.
    map:
        ``base ** power``, the map every analysis runs on.
    power:
        Exponent of ``map`` relative to ``base``.
    bounds:
        ``λ′ = min |f(e)|`` and ``λ″ = max |f(e)|`` for ``map``.
    turns:
        Illegal turns and gates of ``map``.
    cancellation:
        Cancellation bound ``C_f`` of ``map``.
    """

    base: GraphMap
    map: GraphMap
    power: int
    bounds: ExpansionBounds
    turns: TurnClassification
    cancellation: int

    @property
    def graph(self) -> Graph:
        return self.map.graph

    @property
    def critical(self) -> Fraction:
        """Critical constant ``C = C_f / (λ′ − 1)``."""
        return Fraction(self.cancellation, self.bounds.lambda_min - 1)

    @property
    def cutoff(self) -> int:
        return math.ceil(self.critical)

    # ------------------------------------------------------------------
    def turn_at(self, w: Sequence[int], i: int) -> Turn:
        return Turn.at_junction(w, i)

    def is_legal(self, p: Sequence[int], cyclic: bool = False) -> bool:
        return not self.illegal_junctions(p, cyclic)

    def illegal_junctions(self, w: Sequence[int], cyclic: bool = True) -> List[int]:
        """Indices ``i`` whose junction ``w[i] | w[i + 1]`` crosses an illegal turn."""
        n = len(w)
        last = n if cyclic else n - 1
        if n == 0:
            return []
        return [i for i in range(last) if not self.turns.is_legal(Turn.at_junction(w, i))]

    def ilt(self, w: Sequence[int]) -> int:
        return len(self.illegal_junctions(w, cyclic=True))

    def legal_followers(self, e: int) -> List[int]:
        return legal_followers(self.map, self.turns, e)

    def step(self, w: Sequence[int], times: int = 1) -> Path:
        """``[f^times(w)]`` for a cyclic word."""
        out = tuple(w)
        for _ in range(times):
            out = self.map.apply_cyclic(out)
        return out

    def summary(self) -> Dict[str, object]:
        g = self.graph
        return {
            "power": self.power,
            "lambda_min": self.bounds.lambda_min,
            "lambda_max": self.bounds.lambda_max,
            "C_f": self.cancellation,
            "C": self.critical,
            "cutoff": self.cutoff,
            "illegal_turns": self.turns.labels(g),
            "images": self.map.describe(),
        }


def _contract(f: GraphMap) -> GraphMap:
    while True:
        contracted = contract_invariant_forest(f)
        if contracted is None:
            return f
        f = contracted


def build_context(
    f: GraphMap,
    max_power: int = 12,
    power_override: Optional[int] = None,
    budget: int = DEFAULT_LENGTH_BUDGET,
) -> TrainTrackContext:
    """Validate ``f`` and raise it to an expanding power.

    Parameters
    ----------
    f:
        Graph self-map.
    max_power:
        Largest power tried when searching the expanding power.
    power_override:
        Use this power instead of the least expanding one (common powers
        of a forward/backward pair).
    budget:
        Longest edge image materialized.

    Raises
    ------
    NotTrainTrackError
        With the offending edge and turn as witness.
    NotExpandingError
        If ``power_override`` does not expand every edge.
    """
    check = is_train_track(f)
    if not check.ok:
        raise NotTrainTrackError("map is not a train track map", check.witness(f.graph) or {})
    base = _contract(f)
    if power_override is None:
        expanded, k = make_expanding(base, max_power, budget)
    else:
        k = power_override
        lengths = image_lengths(base, k)
        short = [e for e in base.graph.edges if lengths[e] < 2]
        if short:
            raise NotExpandingError(
                f"power {k} does not expand edge {base.graph.name(short[0])}", {"edge": base.graph.name(short[0])}
            )
        expanded = power(base, k, budget)
    turns = classify_turns(expanded)
    ctx = TrainTrackContext(
        base=base,
        map=expanded,
        power=k,
        bounds=expansion_bounds(expanded),
        turns=turns,
        cancellation=cancellation_bound(expanded, turns),
    )
    logger.info(
        "Train track context: power=%d lambda'=%d lambda''=%d C_f=%d C=%s",
        k,
        ctx.bounds.lambda_min,
        ctx.bounds.lambda_max,
        ctx.cancellation,
        ctx.critical,
    )
    return ctx
