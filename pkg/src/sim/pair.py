"""Forward and backward train track representatives of one automorphism."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional

from src.analysis.context import TrainTrackContext, build_context
from src.errors import PairFileError
from src.model.graph import Graph, Path, cyclically_reduce, fundamental_loops, reduce_path, same_cyclic_word
from src.model.graph_map import DEFAULT_LENGTH_BUDGET, GraphMap

__all__ = ["AutomorphismPair", "identity_translation", "build_pair"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AutomorphismPair:
    """``f`` representing ``φ`` on ``Γ`` and ``f′`` representing ``φ⁻¹`` on ``Γ′``.

    ``translate_fwd`` is ``h: Γ → Γ′`` and ``translate_bwd`` is ``h′: Γ′ → Γ``;
    both contexts are raised to a common power.
    """

    forward: TrainTrackContext
    backward: TrainTrackContext
    translate_fwd: GraphMap
    translate_bwd: GraphMap
    lipschitz_B: float
    name: str = ""

    def to_backward(self, w: Path) -> Path:
        return cyclically_reduce(self.backward.graph, self.translate_fwd.apply(w))

    def to_forward(self, w: Path) -> Path:
        return cyclically_reduce(self.forward.graph, self.translate_bwd.apply(w))

    def swap(self) -> "AutomorphismPair":
        """The pair of ``φ⁻¹``: forward and backward exchanged."""
        return replace(
            self,
            forward=self.backward,
            backward=self.forward,
            translate_fwd=self.translate_bwd,
            translate_bwd=self.translate_fwd,
            name=f"{self.name}~" if self.name else "",
        )

    def _test_loops(self) -> List[Path]:
        g = self.forward.graph
        basis = fundamental_loops(g)
        loops = list(basis)
        for i, a in enumerate(basis):
            for b in basis[i + 1 :]:
                prod = cyclically_reduce(g, reduce_path(g, a + b))
                if prod:
                    loops.append(prod)
        return [cyclically_reduce(g, w) for w in loops if cyclically_reduce(g, w)]

    def check_marking(self) -> List[str]:
        """Loops on which ``h′ ∘ h`` is not the identity up to conjugacy."""
        g = self.forward.graph
        bad = []
        for w in self._test_loops():
            back = self.to_forward(self.to_backward(w))
            if not same_cyclic_word(back, w):
                bad.append(g.format(w))
        return bad

    def check_inverse(self) -> List[str]:
        """Loops on which ``h′ f′ h f`` is not the identity up to conjugacy (user maps)."""
        g = self.forward.graph
        f, fb = self.forward.base, self.backward.base
        bad = []
        for w in self._test_loops():
            img = cyclically_reduce(g, f.apply(w))
            there = cyclically_reduce(self.backward.graph, fb.apply(self.to_backward(img)))
            if not same_cyclic_word(self.to_forward(there), w):
                bad.append(g.format(w))
        return bad


def identity_translation(source: Graph, target: Graph) -> GraphMap:
    """Relabel edges by name; both graphs must be roses on the same names."""
    if not (source.is_rose and target.is_rose) or sorted(source.edge_names) != sorted(target.edge_names):
        raise PairFileError("identity translation needs two roses on the same edge names")
    images = [(target.edge_id(name),) for name in source.edge_names]
    return GraphMap.from_positive(source, images, [0], target)


def _lipschitz(h: GraphMap) -> int:
    return max(len(h.images[e]) for e in h.graph.edges)


def build_pair(
    forward: GraphMap,
    backward: GraphMap,
    translate_fwd: Optional[GraphMap] = None,
    translate_bwd: Optional[GraphMap] = None,
    max_power: int = 12,
    budget: int = DEFAULT_LENGTH_BUDGET,
    name: str = "",
    check: bool = True,
) -> AutomorphismPair:
    """Validate both maps and raise them to the lcm of their expanding powers.

    Raises
    ------
    PairFileError
        When the marking or inverse checks fail on the test loops.
    """
    ctx_f = build_context(forward, max_power, budget=budget)
    ctx_b = build_context(backward, max_power, budget=budget)
    common = math.lcm(ctx_f.power, ctx_b.power)
    if common != ctx_f.power:
        ctx_f = build_context(forward, max_power, power_override=common, budget=budget)
    if common != ctx_b.power:
        ctx_b = build_context(backward, max_power, power_override=common, budget=budget)
    h = translate_fwd or identity_translation(ctx_f.graph, ctx_b.graph)
    h_inv = translate_bwd or identity_translation(ctx_b.graph, ctx_f.graph)
    pair = AutomorphismPair(ctx_f, ctx_b, h, h_inv, float(max(_lipschitz(h), _lipschitz(h_inv))), name)
    if check:
        problems: Dict[str, List[str]] = {
            "marking": pair.check_marking(),
            "inverse": pair.check_inverse(),
        }
        if any(problems.values()):
            raise PairFileError("maps do not form an automorphism pair", problems)
    logger.info("Pair %s: common power %d", name or "<unnamed>", common)
    return pair
