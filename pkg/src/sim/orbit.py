"""Forward and backward orbits of rational currents under a pair."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from src.analysis.goodness import goodness
from src.currents.limits import LimitSimplex, distance_to_simplex
from src.currents.weights import counting_current
from src.model.graph import Path
from src.sim.pair import AutomorphismPair

__all__ = ["OrbitRecord", "orbit"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrbitRecord:
    """One step of an orbit; negative steps iterate the backward map.

    A truncated record marks where the word outgrew the length budget; it
    carries the length of the rejected iterate and no measurements.
    """

    step: int
    length: int
    goodness: Optional[float]
    goodness_back: Optional[float]
    ilt: Optional[int]
    dist_plus: Optional[float]
    dist_minus: Optional[float]
    truncated: bool = False
    coefficients: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if self.length < 0 or (self.ilt is not None and self.ilt < 0):
            raise ValueError("lengths and counts must be non-negative")
        for d in (self.dist_plus, self.dist_minus):
            if d is not None and not 0 <= d <= 2 + 1e-9:
                raise ValueError("distances lie in [0, 2]")

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def _measure(
    pair: AutomorphismPair,
    step: int,
    w_fwd: Path,
    w_bwd: Path,
    plus: LimitSimplex,
    minus: LimitSimplex,
    ilt_on_forward: bool,
) -> OrbitRecord:
    fwd, bwd = pair.forward, pair.backward
    d_plus, coeffs = distance_to_simplex(counting_current(fwd.graph, w_fwd, plus.radius), plus)
    d_minus, _ = distance_to_simplex(counting_current(bwd.graph, w_bwd, minus.radius), minus)
    g_fwd = goodness(fwd, w_fwd)
    g_bwd = goodness(bwd, w_bwd)
    return OrbitRecord(
        step=step,
        length=len(w_fwd) if ilt_on_forward else len(w_bwd),
        goodness=float(g_fwd.goodness),
        goodness_back=float(g_bwd.goodness),
        ilt=g_fwd.ilt if ilt_on_forward else g_bwd.ilt,
        dist_plus=d_plus,
        dist_minus=d_minus,
        coefficients=tuple(float(c) for c in coeffs),
    )


def orbit(
    pair: AutomorphismPair,
    w: Sequence[int],
    n_max: int,
    plus: LimitSimplex,
    minus: LimitSimplex,
    budget: int = 10**6,
    backward: bool = True,
) -> List[OrbitRecord]:
    """Records for ``n = 0..n_max`` forward and ``n = −1..−n_max`` backward.

    Forward words are ``[f^n(w)]`` on ``Γ``; backward words are
    ``[f′^n(h(w))]`` on ``Γ′``.  Each side is measured against both simplices
    through the translation maps.  The ILT and length columns refer to the
    graph being iterated.
    """
    w = tuple(w)
    records: List[OrbitRecord] = []
    cur = w
    for n in range(n_max + 1):
        if n:
            nxt = pair.forward.map.apply_cyclic(cur)
            if len(nxt) > budget:
                records.append(OrbitRecord(n, len(nxt), None, None, None, None, None, True))
                logger.warning("Forward orbit truncated at step %d (length %d > %d)", n, len(nxt), budget)
                break
            cur = nxt
        records.append(_measure(pair, n, cur, pair.to_backward(cur), plus, minus, True))
    if not backward:
        return records
    cur = pair.to_backward(w)
    for n in range(1, n_max + 1):
        nxt = pair.backward.map.apply_cyclic(cur)
        if len(nxt) > budget:
            records.append(OrbitRecord(-n, len(nxt), None, None, None, None, None, True))
            logger.warning("Backward orbit truncated at step %d (length %d > %d)", -n, len(nxt), budget)
            break
        cur = nxt
        records.append(_measure(pair, -n, pair.to_forward(cur), cur, plus, minus, False))
    return records
