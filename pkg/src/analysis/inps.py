"""Indivisible Nielsen paths and pre-INPs.

The search runs a lazily built automaton whose states are pairs ``(a, b)``
of legal words of length at most ``⌈C⌉`` leaving an illegal turn.  A state
records where the images ``f(a)`` and ``f(b)`` first disagree after
cancelling their common prefix ``τ``; its successors are the states
obtained from the two image tails.  Every INP of the map lives along a
cycle of this automaton, and its branches are the fixed point of the
piecewise linear map the cycle induces on branch lengths.  Candidates are
solved exactly with rationals and then verified by iterating the Nielsen
image.  Backward search from cycle states yields the pre-INPs.

Points on edges are measured with each edge parametrized by ``[0, 1]`` and
``f`` linear on every edge onto its image path.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from src.analysis.context import TrainTrackContext
from src.model.graph import Graph, Path, Turn, reverse

__all__ = [
    "Branch",
    "NielsenPath",
    "InpSearch",
    "nielsen_image",
    "search_inps",
    "find_inps",
]

logger = logging.getLogger(__name__)

Node = Tuple[Path, Path]


@dataclass(frozen=True, order=True)
class Branch:
    """Legal path from a tip, ending ``end`` of the way along its last edge."""

    edges: Path
    end: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if not self.edges:
            raise ValueError("branch must contain an edge")
        if not 0 < self.end <= 1:
            raise ValueError("branch end must lie in (0, 1]")

    @property
    def length(self) -> Fraction:
        return len(self.edges) - 1 + self.end

    @classmethod
    def at_length(cls, word: Sequence[int], x: Fraction) -> "Branch":
        """Initial segment of ``word`` of length ``x`` (``0 < x <= len(word)``)."""
        k = math.ceil(x)
        return cls(tuple(word[:k]), Fraction(x) - (k - 1))

    def label(self, graph: Graph) -> str:
        text = graph.format(self.edges)
        return text if self.end == 1 else f"{text}@{self.end}"


@dataclass(frozen=True)
class NielsenPath:
    """Path ``η = reverse(left) · right`` with a single illegal turn.

    ``kind`` is ``"INP"`` (``[f^period(η)] = η``), ``"pre-INP"``
    (``[f^pre_period(η)]`` is an INP) or ``"unresolved"`` for automaton
    cycles the search could not settle.
    """

    left: Branch
    right: Branch
    period: int
    kind: str = "INP"
    pre_period: int = 0

    @property
    def tip(self) -> Turn:
        return Turn.of(self.left.edges[0], self.right.edges[0])

    @property
    def edges(self) -> Path:
        return reverse(self.left.edges) + self.right.edges

    @property
    def at_vertices(self) -> bool:
        return self.left.end == 1 and self.right.end == 1

    def same_path(self, other: "NielsenPath") -> bool:
        return sorted((self.left, self.right)) == sorted((other.left, other.right))

    def canonical(self) -> "NielsenPath":
        if self.right < self.left:
            return replace(self, left=self.right, right=self.left)
        return self

    def key(self) -> Tuple[Branch, Branch]:
        c = self.canonical()
        return (c.left, c.right)

    def label(self, graph: Graph) -> str:
        text = graph.format(self.edges)
        ends = []
        if self.left.end != 1:
            ends.append(f"start@{1 - self.left.end}")
        if self.right.end != 1:
            ends.append(f"end@{self.right.end}")
        return text if not ends else f"{text} ({', '.join(ends)})"

    def to_dict(self, graph: Graph) -> Dict[str, object]:
        return {
            "path": graph.format(self.edges),
            "left": self.left.label(graph),
            "right": self.right.label(graph),
            "tip": self.tip.label(graph),
            "kind": self.kind,
            "period": self.period,
            "pre_period": self.pre_period,
            "left_end": str(self.left.end),
            "right_end": str(self.right.end),
        }


@dataclass
class InpSearch:
    inps: List[NielsenPath] = field(default_factory=list)
    pre_inps: List[NielsenPath] = field(default_factory=list)
    unresolved: List[NielsenPath] = field(default_factory=list)
    n_states: int = 0
    n_transitions: int = 0
    stabilization_time: int = 0

    @property
    def all_paths(self) -> List[NielsenPath]:
        return [*self.inps, *self.pre_inps, *self.unresolved]


def _common_prefix(a: Sequence[int], b: Sequence[int]) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def _image_position(ctx: TrainTrackContext, br: Branch) -> Tuple[Path, Fraction]:
    f = ctx.map
    word = f.apply(br.edges)
    pre = sum(f.lengths[e] for e in br.edges[:-1])
    return word, pre + br.end * f.lengths[br.edges[-1]]


def nielsen_image(ctx: TrainTrackContext, eta: NielsenPath) -> Optional[NielsenPath]:
    """``[f(η)]`` when it is again a path with one illegal tip at a vertex, else ``None``."""
    wa, ta = _image_position(ctx, eta.left)
    wb, tb = _image_position(ctx, eta.right)
    m = _common_prefix(wa[: math.ceil(ta)], wb[: math.ceil(tb)])
    if ta <= m or tb <= m:
        return None
    if ctx.turns.is_legal(Turn.of(wa[m], wb[m])):
        return None
    left = Branch.at_length(wa[m:], ta - m)
    right = Branch.at_length(wb[m:], tb - m)
    return NielsenPath(left, right, eta.period, eta.kind, eta.pre_period)


# ----------------------------------------------------------------------
# Automaton


class _Automaton:
    def __init__(self, ctx: TrainTrackContext) -> None:
        self.ctx = ctx
        self.f = ctx.map
        self.c = max(ctx.cutoff, 1)
        self.graph = nx.DiGraph()
        self._img: Dict[Path, Path] = {}

    def image(self, word: Path) -> Path:
        img = self._img.get(word)
        if img is None:
            img = self.f.apply(word)
            self._img[word] = img
        return img

    def resolve(self, a: Path, b: Path) -> List[Tuple[Node, int]]:
        out: List[Tuple[Node, int]] = []
        stack = [(a, b)]
        while stack:
            a, b = stack.pop()
            fa, fb = self.image(a), self.image(b)
            m = _common_prefix(fa, fb)
            if m < len(fa) and m < len(fb):
                out.append(((a, b), m))
            elif m == len(fa) and len(a) < self.c:
                stack.extend((a + (x,), b) for x in self.ctx.legal_followers(a[-1]))
            elif m == len(fb) and len(b) < self.c:
                stack.extend((a, b + (x,)) for x in self.ctx.legal_followers(b[-1]))
        return out

    def tails(self, node: Node) -> Tuple[Path, Path, int]:
        a, b = node
        fa, fb = self.image(a), self.image(b)
        m = self.graph.nodes[node]["tau"]
        return fa[m : m + self.c], fb[m : m + self.c], m

    def build(self) -> None:
        queue: List[Node] = []
        for turn in sorted(self.ctx.turns.illegal_turns):
            for node, m in self.resolve((turn.d1,), (turn.d2,)):
                if node not in self.graph:
                    self.graph.add_node(node, tau=m)
                    queue.append(node)
        while queue:
            node = queue.pop()
            ta, tb, _ = self.tails(node)
            if self.ctx.turns.is_legal(Turn.of(ta[0], tb[0])):
                continue
            for nxt, m in self.resolve(ta, tb):
                if nxt not in self.graph:
                    self.graph.add_node(nxt, tau=m)
                    queue.append(nxt)
                self.graph.add_edge(node, nxt)

    # ------------------------------------------------------------------
    def extend_cycle(self, cycle: List[Node]) -> Optional[List[List[Path]]]:
        """Lengthen cycle words until every state contains its predecessor's tail."""
        words = [[a, b] for a, b in cycle]
        p = len(words)
        for _ in range(2 * self.c * p + 2):
            changed = False
            for j in range(p):
                fa, fb = self.image(words[j][0]), self.image(words[j][1])
                m = _common_prefix(fa, fb)
                tails = (fa[m : m + self.c], fb[m : m + self.c])
                nxt = words[(j + 1) % p]
                for side in (0, 1):
                    t, s = tails[side], nxt[side]
                    if t[: len(s)] != s[: len(t)]:
                        return None
                    if len(t) > len(s):
                        nxt[side] = t
                        changed = True
            if not changed:
                return words
        return None

    def fixed_points(self, words: List[Path], taus: List[int]) -> List[Fraction]:
        """Positive fixed points of the branch length map around a cycle."""
        lengths = self.f.lengths
        p = len(words)
        found = set()
        stack = [(0, Fraction(1), Fraction(0), Fraction(0), Fraction(len(words[0])))]
        while stack:
            j, alpha, beta, lo, hi = stack.pop()
            if j == p:
                if alpha != 1:
                    x = beta / (1 - alpha)
                    if lo <= x <= hi and x > 0:
                        found.add(x)
                continue
            word = words[j]
            pre = 0
            for k, e in enumerate(word):
                l2 = max(lo, (k - beta) / alpha)
                h2 = min(hi, (k + 1 - beta) / alpha)
                if l2 <= h2:
                    size = lengths[e]
                    stack.append((j + 1, alpha * size, (beta - k) * size + pre - taus[j], l2, h2))
                pre += lengths[e]
        return sorted(found)


def _verify_period(ctx: TrainTrackContext, eta: NielsenPath, bound: int) -> Optional[List[NielsenPath]]:
    """Orbit ``η, [f(η)], ...`` up to its return to ``η``, or ``None``."""
    orbit = [eta]
    cur: Optional[NielsenPath] = eta
    for _ in range(bound):
        cur = nielsen_image(ctx, cur)
        if cur is None:
            return None
        if cur.left == eta.left and cur.right == eta.right:
            return orbit
        orbit.append(cur)
    return None


def _extend_to_cover(auto: _Automaton, word: Path, y: Fraction, m: int, target: Path) -> Optional[Path]:
    """Legal extension of ``word`` whose image covers ``y`` and agrees with ``target`` after ``τ``."""
    stack = [word]
    while stack:
        w = stack.pop()
        img = auto.image(w)
        tail = img[m:]
        if tail[: len(target)] != target[: len(tail)]:
            continue
        if len(img) >= y:
            return w
        if len(w) >= 2 * auto.c + 2:
            continue
        stack.extend(w + (x,) for x in auto.ctx.legal_followers(w[-1]))
    return None


def _preimage_length(auto: _Automaton, word: Path, y: Fraction) -> Fraction:
    pre = 0
    for k, e in enumerate(word):
        size = auto.f.lengths[e]
        if y <= pre + size:
            return k + Fraction(y - pre, size)
        pre += size
    return Fraction(len(word))


@lru_cache(maxsize=32)
def search_inps(ctx: TrainTrackContext, period_bound: Optional[int] = None, max_cycles: int = 10_000) -> InpSearch:
    """Run the INP automaton for ``ctx``.

    Parameters
    ----------
    period_bound:
        Longest automaton cycle examined; defaults to ``2·|EΓ|²``.
    max_cycles:
        Cap on the number of cycles enumerated.  Cyclic states left
        unexamined are reported as unresolved.
    """
    result = InpSearch()
    if ctx.cancellation == 0 or not ctx.turns.illegal_turns:
        return result
    bound = period_bound or 2 * ctx.graph.n_edges**2
    auto = _Automaton(ctx)
    auto.build()
    g = auto.graph
    result.n_states = g.number_of_nodes()
    result.n_transitions = g.number_of_edges()
    if g.number_of_nodes():
        result.stabilization_time = nx.dag_longest_path_length(nx.condensation(g)) + 1
    logger.info("INP automaton: %d states, %d transitions", result.n_states, result.n_transitions)

    seen: Dict[Tuple[Branch, Branch], NielsenPath] = {}
    anchors: Dict[Node, NielsenPath] = {}
    covered = set()
    cycles = itertools.islice(nx.simple_cycles(g, length_bound=bound), max_cycles)
    for cycle in cycles:
        covered.update(cycle)
        words = auto.extend_cycle(list(cycle))
        if words is None:
            continue
        taus = [_common_prefix(auto.image(a), auto.image(b)) for a, b in words]
        xs = auto.fixed_points([w[0] for w in words], taus)
        ys = auto.fixed_points([w[1] for w in words], taus)
        for x in xs:
            for y in ys:
                eta = NielsenPath(Branch.at_length(words[0][0], x), Branch.at_length(words[0][1], y), len(cycle))
                orbit = _verify_period(ctx, eta, len(cycle))
                if orbit is None:
                    continue
                period = len(orbit)
                for j, member in enumerate(orbit):
                    member = replace(member, period=period)
                    seen.setdefault(member.key(), member.canonical())
                    anchors.setdefault(cycle[j % len(cycle)], member)
    result.inps = sorted(seen.values(), key=lambda p: p.key())

    # pre-INPs: walk backwards from anchored states
    pre_seen: Dict[Tuple[Branch, Branch], NielsenPath] = {}
    depth = {node: 0 for node in anchors}
    frontier = list(anchors)
    while frontier:
        nxt_frontier = []
        for node in frontier:
            target = anchors[node]
            for q in g.predecessors(node):
                if q in anchors:
                    continue
                m = g.nodes[q]["tau"]
                sides = []
                for word, br, goal in ((q[0], target.left, node[0]), (q[1], target.right, node[1])):
                    y = br.length + m
                    ext = _extend_to_cover(auto, word, y, m, goal)
                    if ext is None:
                        break
                    sides.append(Branch.at_length(ext, _preimage_length(auto, ext, y)))
                if len(sides) != 2:
                    continue
                cand = NielsenPath(sides[0], sides[1], target.period, "pre-INP", depth[node] + 1)
                img = nielsen_image(ctx, cand)
                if img is None or img.left != target.left or img.right != target.right:
                    continue
                if cand.key() in seen:
                    continue
                anchors[q] = cand
                depth[q] = depth[node] + 1
                pre_seen.setdefault(cand.key(), cand.canonical())
                nxt_frontier.append(q)
        frontier = nxt_frontier
    result.pre_inps = sorted(pre_seen.values(), key=lambda p: p.key())

    unresolved: Dict[Tuple[Branch, Branch], NielsenPath] = {}
    for comp in nx.strongly_connected_components(g):
        nodes = sorted(comp)
        cyclic = len(nodes) > 1 or g.has_edge(nodes[0], nodes[0])
        if not cyclic:
            continue
        for node in nodes:
            if node in covered:
                continue
            cand = NielsenPath(Branch(node[0]), Branch(node[1]), 0, "unresolved")
            unresolved.setdefault(cand.key(), cand.canonical())
    if unresolved:
        logger.warning("%d cyclic INP automaton states left unresolved", len(unresolved))
    result.unresolved = sorted(unresolved.values(), key=lambda p: p.key())
    return result


def find_inps(ctx: TrainTrackContext, period_bound: Optional[int] = None) -> List[NielsenPath]:
    """INPs, pre-INPs and unresolved candidates of ``ctx.map``."""
    return search_inps(ctx, period_bound).all_paths
