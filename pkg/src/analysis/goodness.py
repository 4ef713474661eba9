"""Goodness of loops.

An edge of a cyclic word is *good* when at least ``⌈C⌉`` edges separate
it from every illegal junction on both sides; otherwise it is *bad*.  The
two edges meeting at an illegal junction are always bad, also when
``C = 0``, so a loop has at least as many bad edges as illegal turns.
The goodness is the fraction of good edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from src.analysis.context import TrainTrackContext
from src.errors import TrainTrackError, TrivialPathError
from src.model.graph import Path, is_cyclically_reduced

__all__ = [
    "GoodnessReport",
    "bad_mask",
    "goodness",
    "goodness_monotone_power",
    "goodness_lower_bound",
    "steps_to_goodness",
]


@dataclass(frozen=True)
class GoodnessReport:
    loop: Path
    good: int
    bad: int
    goodness: Fraction
    ilt: int

    def __post_init__(self) -> None:
        if self.good + self.bad != len(self.loop):
            raise ValueError("good + bad must equal the loop length")


def bad_mask(ctx: TrainTrackContext, w: Sequence[int], junctions: Optional[List[int]] = None) -> List[bool]:
    n = len(w)
    c = max(ctx.cutoff, 1)
    junctions = ctx.illegal_junctions(w) if junctions is None else junctions
    bad = [False] * n
    for i in junctions:
        for k in range(min(c, n)):
            bad[(i - k) % n] = True
            bad[(i + 1 + k) % n] = True
    return bad


def goodness(ctx: TrainTrackContext, w: Sequence[int]) -> GoodnessReport:
    """Classify the edges of the cyclic word ``w``.

    Raises
    ------
    TrivialPathError
        For the empty loop.
    """
    if not w:
        raise TrivialPathError("goodness of the empty loop is undefined")
    if not is_cyclically_reduced(w):
        raise TrainTrackError("loop must be cyclically reduced", {"loop": ctx.graph.format(w)})
    junctions = ctx.illegal_junctions(w)
    nbad = sum(bad_mask(ctx, w, junctions))
    n = len(w)
    return GoodnessReport(tuple(w), n - nbad, nbad, Fraction(n - nbad, n), len(junctions))


def goodness_monotone_power(ctx: TrainTrackContext) -> int:
    """Least ``s >= 1`` with ``λ′^s >= 2C``."""
    target = 2 * ctx.critical
    s = 1
    while ctx.bounds.lambda_min**s < target:
        s += 1
    return s


def goodness_lower_bound(g: Fraction, C: Fraction, lambda_min: int, s: int) -> Fraction:
    """``1 / (1 + (2C / λ′^s)(1/g − 1))``: goodness guaranteed after ``s`` steps."""
    if g <= 0:
        return Fraction(0)
    return 1 / (1 + (2 * C / Fraction(lambda_min) ** s) * (1 / g - 1))


def steps_to_goodness(ctx: TrainTrackContext, g0: Fraction, eps: Fraction, s: Optional[int] = None, cap: int = 10_000) -> int:
    """Number of ``f``-steps after which goodness ``g0`` is pushed above ``1 − ε``.

    The estimate is iterated in blocks of ``s`` steps (the monotone power
    by default); the result is a multiple of ``s``.
    """
    if g0 <= 0:
        raise ValueError("goodness must be positive")
    s = s or goodness_monotone_power(ctx)
    if Fraction(ctx.bounds.lambda_min) ** s <= 2 * ctx.critical:
        s += 1
    g = Fraction(g0)
    steps = 0
    while g < 1 - Fraction(eps):
        g = goodness_lower_bound(g, ctx.critical, ctx.bounds.lambda_min, s)
        steps += s
        if steps > cap:
            raise ValueError("goodness estimate does not reach the target")
    return steps
