"""Back-and-forth goodness: forward or backward iterates become good."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from src.analysis.goodness import goodness
from src.model.graph import Path
from src.sim.pair import AutomorphismPair

__all__ = ["BackForthReport", "verify_backforth"]

logger = logging.getLogger(__name__)


@dataclass
class BackForthReport:
    """Per-step goodness table plus the empirical threshold ``M``.

    ``violations`` lists ``(sample, n)`` with ``n >= M`` where neither side
    reaches ``δ``; with ``M`` chosen as the largest per-sample threshold
    they are the samples that never settle within ``n_probe``.
    """

    delta: float
    n_probe: int
    table: pd.DataFrame
    thresholds: List[Optional[int]]
    M: int
    violations: List[Tuple[int, int]] = field(default_factory=list)

    def summary(self) -> Dict[str, object]:
        return {
            "delta": self.delta,
            "n_probe": self.n_probe,
            "M": self.M,
            "samples": len(self.thresholds),
            "violations": [list(v) for v in self.violations],
        }


def _trajectory(pair: AutomorphismPair, w: Path, n_probe: int, budget: int) -> List[Tuple[int, Optional[Fraction], Optional[Fraction]]]:
    fwd = tuple(w)
    bwd = pair.to_backward(fwd)
    rows = []
    for n in range(n_probe + 1):
        if n:
            fwd = pair.forward.map.apply_cyclic(fwd) if fwd is not None and len(fwd) <= budget else None
            bwd = pair.backward.map.apply_cyclic(bwd) if bwd is not None and len(bwd) <= budget else None
        g_f = goodness(pair.forward, fwd).goodness if fwd is not None and len(fwd) <= budget else None
        g_b = goodness(pair.backward, bwd).goodness if bwd is not None and len(bwd) <= budget else None
        rows.append((n, g_f, g_b))
    return rows


def verify_backforth(
    pair: AutomorphismPair,
    words: Sequence[Path],
    delta: Fraction | float,
    n_probe: int,
    budget: int = 10**6,
    workers: int = 4,
) -> BackForthReport:
    """Check ``𝔤([f^n(γ)]) >= δ`` or ``𝔤′([f′^n(γ′)]) >= δ`` for ``n`` in ``[M, n_probe]``.

    Steps beyond the length budget on one side count as unknown for that
    side; a step with both sides unknown is not a violation.
    """
    d = Fraction(delta)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        trajectories = list(pool.map(lambda w: _trajectory(pair, w, n_probe, budget), words))
    rows = []
    thresholds: List[Optional[int]] = []
    failing: Dict[int, List[int]] = {}
    for i, traj in enumerate(trajectories):
        bad = []
        for n, g_f, g_b in traj:
            holds = (g_f is not None and g_f >= d) or (g_b is not None and g_b >= d)
            unknown = g_f is None and g_b is None
            if not holds and not unknown:
                bad.append(n)
            rows.append(
                {
                    "sample": i,
                    "n": n,
                    "goodness": None if g_f is None else float(g_f),
                    "goodness_back": None if g_b is None else float(g_b),
                    "holds": holds,
                }
            )
        failing[i] = bad
        thresholds.append(None if bad and bad[-1] == n_probe else (bad[-1] + 1 if bad else 0))
    settled = [t for t in thresholds if t is not None]
    M = max(settled, default=0)
    violations = [(i, n) for i, bad in failing.items() for n in bad if n >= M]
    if violations:
        logger.warning("Back-and-forth check: %d violations at n >= %d", len(violations), M)
    return BackForthReport(float(d), n_probe, pd.DataFrame(rows), thresholds, M, violations)
