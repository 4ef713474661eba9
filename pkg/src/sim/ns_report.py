"""North-South convergence reports over sampled rational currents.

For every sample the forward orbit is measured against ``Δ₊`` and the
backward orbit against ``Δ₋``.  The report records the first forward step
inside the ``U`` neighborhood, the first backward step inside ``V`` and the
empirical ``m₀`` after which every sample is in ``U`` forward or in ``V``
backward.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.currents.limits import LimitSimplex
from src.sim.orbit import OrbitRecord, orbit
from src.sim.pair import AutomorphismPair
from src.sim.sampling import Sample

__all__ = ["SampleOutcome", "NsReport", "ns_report"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SampleOutcome:
    sample: int
    kind: str
    label: str
    length: int
    first_forward: Optional[int]
    first_backward: Optional[int]
    coefficient_drift: Optional[float]

    @property
    def converged(self) -> bool:
        return self.first_forward is not None or self.first_backward is not None

    @property
    def first_either(self) -> Optional[int]:
        steps = [s for s in (self.first_forward, self.first_backward) if s is not None]
        return min(steps, default=None)


@dataclass
class NsReport:
    table: pd.DataFrame
    outcomes: List[SampleOutcome]
    m0: Optional[int]
    violations: List[Tuple[int, int]] = field(default_factory=list)
    unconverged: List[int] = field(default_factory=list)
    params: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.unconverged

    def outcome_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "sample": o.sample,
                    "kind": o.kind,
                    "label": o.label,
                    "length": o.length,
                    "first_forward": o.first_forward,
                    "first_backward": o.first_backward,
                    "coefficient_drift": o.coefficient_drift,
                }
                for o in self.outcomes
            ]
        )

    def summary(self) -> Dict[str, object]:
        return {
            **self.params,
            "samples": len(self.outcomes),
            "m0": self.m0,
            "ok": self.ok,
            "violations": [list(v) for v in self.violations],
            "unconverged": self.unconverged,
        }


def _first_inside(records: Dict[int, OrbitRecord], steps: Sequence[int], attr: str, tol: float) -> Optional[int]:
    for k in steps:
        rec = records.get(k)
        value = None if rec is None else getattr(rec, attr)
        if value is not None and value < tol:
            return abs(k)
    return None


def _criterion(fwd: Optional[OrbitRecord], bwd: Optional[OrbitRecord], u_tol: float, v_tol: float) -> Optional[bool]:
    """True if in ``U`` forward or ``V`` backward, None if nothing was measured."""
    d_plus = None if fwd is None else fwd.dist_plus
    d_minus = None if bwd is None else bwd.dist_minus
    if (d_plus is not None and d_plus < u_tol) or (d_minus is not None and d_minus < v_tol):
        return True
    if d_plus is None or d_minus is None:
        return None
    return False


def ns_report(
    pair: AutomorphismPair,
    samples: Sequence[Sample],
    plus: LimitSimplex,
    minus: LimitSimplex,
    u_tol: float = 1e-3,
    v_tol: float = 1e-3,
    n_max: int = 60,
    budget: int = 10**6,
    workers: int = 4,
    seed: Optional[int] = None,
) -> NsReport:
    """Run every sample's orbit and evaluate the convergence criterion.

    A step ``k`` satisfies the criterion when ``[f^k(w)]`` is within
    ``u_tol`` of ``Δ₊`` or ``[f′^k(h(w))]`` is within ``v_tol`` of ``Δ₋``.
    Steps where one side was truncated and the other is outside count as
    unknown.  ``m₀`` is the largest over samples of the first step at which
    either side enters its neighborhood; violations are ``(sample, k)``
    with ``k >= m₀`` failing the criterion.  A sample that enters neither
    neighborhood up to ``n_max`` is reported as the violation
    ``(sample, n_max)`` and listed in ``unconverged``.
    """
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        orbits = list(pool.map(lambda s: orbit(pair, s.word, n_max, plus, minus, budget), samples))

    rows = []
    outcomes: List[SampleOutcome] = []
    per_sample: List[Dict[int, OrbitRecord]] = []
    for i, (sample, records) in enumerate(zip(samples, orbits)):
        by_step = {r.step: r for r in records if not r.truncated}
        per_sample.append(by_step)
        for r in records:
            rows.append({"sample": i, "kind": sample.kind, **{k: v for k, v in r.to_dict().items() if k != "coefficients"}})
        fwd_coeffs = [by_step[k].coefficients for k in sorted(k for k in by_step if k >= 0)]
        drift = None
        if len(fwd_coeffs) >= 2:
            drift = float(np.max(np.abs(np.asarray(fwd_coeffs[-1]) - np.asarray(fwd_coeffs[-2]))))
        outcomes.append(
            SampleOutcome(
                sample=i,
                kind=sample.kind,
                label=sample.label,
                length=len(sample.word),
                first_forward=_first_inside(by_step, range(0, n_max + 1), "dist_plus", u_tol),
                first_backward=_first_inside(by_step, [0, *range(-1, -n_max - 1, -1)], "dist_minus", v_tol),
                coefficient_drift=drift,
            )
        )

    unconverged = [o.sample for o in outcomes if not o.converged]
    firsts = [o.first_either for o in outcomes if o.converged]
    m0 = max(firsts, default=None)
    violations: List[Tuple[int, int]] = []
    start = m0 if m0 is not None else 0
    for i, by_step in enumerate(per_sample):
        if i in unconverged:
            violations.append((i, n_max))
            continue
        for k in range(start, n_max + 1):
            if _criterion(by_step.get(k), by_step.get(-k if k else 0), u_tol, v_tol) is False:
                violations.append((i, k))
    if unconverged:
        logger.warning("NS report: %d samples converge neither way within n_max=%d", len(unconverged), n_max)
    if violations:
        logger.warning("NS report: %d criterion violations at k >= %s", len(violations), m0)
    logger.info("NS report on %s: %d samples, m0=%s", pair.name or "<unnamed>", len(samples), m0)
    params = {
        "pair": pair.name,
        "u_tol": u_tol,
        "v_tol": v_tol,
        "n_max": n_max,
        "budget": budget,
        "radius": plus.radius,
        "seed": seed,
        "plus_vertices": len(plus.vertices),
        "minus_vertices": len(minus.vertices),
    }
    return NsReport(pd.DataFrame(rows), outcomes, m0, violations, unconverged, params)
