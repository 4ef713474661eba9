"""Explicit constants of the goodness dichotomy."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from src.analysis.context import TrainTrackContext
from src.analysis.goodness import goodness_monotone_power
from src.analysis.hyperbolicity import multi_inp_bound
from src.analysis.inps import InpSearch, search_inps
from src.model.graph_map import image_lengths

__all__ = ["TtConstants", "dichotomy_formulas", "bad_image_power", "dichotomy_constants"]


@dataclass(frozen=True)
class TtConstants:
    C_f: int
    critical_C: Fraction
    A: int
    delta: Fraction
    R_dich: Fraction
    s_good: int
    s_bad: int
    r: int
    lambda_min: int
    lambda_max: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "C_f": self.C_f,
            "C": self.critical_C,
            "A": self.A,
            "delta": self.delta,
            "R": self.R_dich,
            "s_good": self.s_good,
            "s": self.s_bad,
            "r": self.r,
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
        }


def dichotomy_formulas(C: Fraction, A: int) -> Tuple[Fraction, Fraction]:
    """``δ = 1/(2C(A+2)+1)`` and ``R = 1 + 1/(2C(2(A+1)+1) + 2(A+1) + 2)``."""
    C = Fraction(C)
    delta = 1 / (2 * C * (A + 2) + 1)
    R = 1 + 1 / (2 * C * (2 * (A + 1) + 1) + 2 * (A + 1) + 2)
    return delta, R


def bad_image_power(ctx: TrainTrackContext, cap: int = 64) -> int:
    """Least ``s`` with ``|f^s(e)| >= 2C + 1`` for every edge."""
    target = 2 * ctx.critical + 1
    for s in range(1, cap + 1):
        if min(image_lengths(ctx.map, s)) >= target:
            return s
    raise ValueError("edge images never reach the bad-image threshold")


def dichotomy_constants(ctx: TrainTrackContext, search: Optional[InpSearch] = None) -> TtConstants:
    """All constants for ``ctx``; fails for maps with a closed Nielsen loop."""
    search = search or search_inps(ctx)
    A = multi_inp_bound(ctx, search)
    delta, R = dichotomy_formulas(ctx.critical, A)
    r = max(1, search.stabilization_time)
    return TtConstants(
        C_f=ctx.cancellation,
        critical_C=ctx.critical,
        A=A,
        delta=delta,
        R_dich=R,
        s_good=goodness_monotone_power(ctx),
        s_bad=max(bad_image_power(ctx), r),
        r=r,
        lambda_min=ctx.bounds.lambda_min,
        lambda_max=ctx.bounds.lambda_max,
    )
