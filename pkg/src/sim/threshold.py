"""Entry of good loops into shrinking neighborhoods of ``Δ₊``."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import pandas as pd

from src.analysis.context import TrainTrackContext
from src.analysis.goodness import goodness, steps_to_goodness
from src.currents.limits import LimitSimplex, distance_to_simplex
from src.currents.weights import counting_current
from src.model.graph import Path

__all__ = ["ThresholdReport", "goodness_threshold_experiment"]

logger = logging.getLogger(__name__)


@dataclass
class ThresholdReport:
    delta: float
    table: pd.DataFrame
    excluded: List[int] = field(default_factory=list)

    def summary(self) -> Dict[str, object]:
        t = self.table
        return {
            "delta": self.delta,
            "samples": int(t["sample"].nunique()) if len(t) else 0,
            "excluded": self.excluded,
            "all_entered": bool(t["first_entry"].notna().all()) if len(t) else True,
            "all_stay_inside": bool(t["stays_inside"].all()) if len(t) else True,
            "goodness_within_bound": bool(t["within_bound"].all()) if len(t) else True,
        }


def goodness_threshold_experiment(
    ctx: TrainTrackContext,
    delta: Fraction | float,
    words: Sequence[Path],
    n_max: int,
    probes: Sequence[float],
    simplex: LimitSimplex,
    eps: Fraction | float = Fraction(1, 10),
    budget: int = 10**6,
) -> ThresholdReport:
    """Iterate words of goodness at least ``δ`` and record neighborhood entry.

    For every kept word and probe tolerance the table holds the first step
    with distance to ``simplex`` below the probe, whether the orbit stays
    inside afterwards, and the step at which goodness exceeds ``1 − ε``
    compared with the step count predicted by the goodness estimate.
    Words below ``δ`` are excluded and listed by index.
    """
    d, eps = Fraction(delta), Fraction(eps)
    excluded: List[int] = []
    rows = []
    for i, w in enumerate(words):
        g0 = goodness(ctx, w).goodness
        if g0 < d:
            excluded.append(i)
            continue
        predicted = steps_to_goodness(ctx, g0, eps)
        dists: List[float] = []
        reached: Optional[int] = None
        cur = tuple(w)
        for n in range(n_max + 1):
            if n:
                nxt = ctx.map.apply_cyclic(cur)
                if len(nxt) > budget:
                    logger.info("Sample %d truncated at step %d", i, n)
                    break
                cur = nxt
            if reached is None and goodness(ctx, cur).goodness >= 1 - eps:
                reached = n
            dist, _ = distance_to_simplex(counting_current(ctx.graph, cur, simplex.radius), simplex)
            dists.append(dist)
        for probe in probes:
            first = next((n for n, x in enumerate(dists) if x < probe), None)
            rows.append(
                {
                    "sample": i,
                    "goodness": float(g0),
                    "probe": probe,
                    "first_entry": first,
                    "stays_inside": first is None or all(x < probe for x in dists[first:]),
                    "steps": len(dists) - 1,
                    "predicted_steps": predicted,
                    "goodness_reached": reached,
                    "within_bound": (predicted > len(dists) - 1) if reached is None else reached <= predicted,
                }
            )
    if excluded:
        logger.info("Excluded %d words with goodness below %s", len(excluded), d)
    return ThresholdReport(float(d), pd.DataFrame(rows), excluded)
