"""Decompositions of loops into factors.

* :func:`good_bad_decomposition` splits a loop with many illegal turns into
  alternating odd factors (long legal stretches, goodness at least ``δ``,
  or trivial markers) and even factors (no good edge, between ``A + 1``
  and ``2A + 1`` illegal turns).
* :func:`pseudo_legal_decomposition` recognises a loop as a legal
  concatenation of legal paths and INPs.
* :func:`pull_back_decomposition` lifts an illegal concatenation of
  ``[f(w)]`` back to ``w``.

Cut points are junction indices: cut ``i`` separates ``w[i]`` from
``w[i + 1]``.  An even factor counts the illegal turns strictly inside it
plus the one at its terminal cut.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from src.analysis.context import TrainTrackContext
from src.analysis.goodness import bad_mask
from src.analysis.inps import NielsenPath
from src.errors import DecompositionError
from src.model.graph import Path

__all__ = [
    "Factor",
    "good_bad_decomposition",
    "InpSpan",
    "PseudoLegalDecomposition",
    "pseudo_legal_decomposition",
    "pull_back_decomposition",
]


@dataclass(frozen=True)
class Factor:
    """Factor of a cyclic word starting at edge ``start`` (cyclic index).

    Trivial odd factors have ``length == 0`` and mark the cut position.
    """

    kind: str
    start: int
    length: int
    edges: Path
    ilt: int
    goodness: Fraction


def _segment(w: Sequence[int], start: int, length: int) -> Path:
    n = len(w)
    return tuple(w[(start + k) % n] for k in range(length))


def _split_sizes(q: int, A: int) -> List[int]:
    k = max(1, math.ceil(q / (2 * A + 1)))
    return [q // k + (1 if i < q % k else 0) for i in range(k)]


def good_bad_decomposition(ctx: TrainTrackContext, w: Sequence[int], A: int) -> List[Factor]:
    """Alternating odd/even factors of the cyclic word ``w``.

    The list starts with an odd factor; a loop whose bad stretches all
    merge into long legal ones yields a single odd factor.

    Raises
    ------
    DecompositionError
        If ``ILT(w) < A + 1``.
    """
    n = len(w)
    junctions = ctx.illegal_junctions(w)
    q = len(junctions)
    if q < A + 1:
        raise DecompositionError(f"loop has {q} illegal turns, needs at least {A + 1}", {"ilt": q, "A": A})
    bad = bad_mask(ctx, w, junctions)
    threshold = 2 * ctx.critical + 1

    def _factor(kind: str, cut_from: int, cut_to: int, ilt: int) -> Factor:
        start = (cut_from + 1) % n
        if kind == "odd-trivial":
            return Factor("odd", start, 0, (), 0, Fraction(0))
        length = (cut_to - cut_from) % n or n
        edges = _segment(w, start, length)
        good = sum(1 for k in range(length) if not bad[(start + k) % n])
        return Factor(kind, start, length, edges, ilt, Fraction(good, length) if length else Fraction(0))

    # legal segment k runs from junction k to junction k+1 (cyclically)
    seg_len = [((junctions[(k + 1) % q] - junctions[k]) % n) or n for k in range(q)]
    long_segs = [k for k in range(q) if seg_len[k] >= threshold]

    def _even_run(first: int, count: int) -> List[Factor]:
        """Even factors covering ``count`` junctions starting after junction index ``first``."""
        out: List[Factor] = []
        pos = first
        for i, size in enumerate(_split_sizes(count, A)):
            end = (pos + size) % q
            if i:
                out.append(_factor("odd-trivial", junctions[pos], junctions[pos], 0))
            out.append(_factor("even", junctions[pos], junctions[end], size))
            pos = end
        return out

    if not long_segs:
        factors = [_factor("odd-trivial", junctions[0], junctions[0], 0)]
        factors.extend(_even_run(0, q))
        return factors

    # gaps between consecutive long segments, merged when they carry <= A turns
    groups: List[List[int]] = [[long_segs[0]]]
    gaps: List[int] = []
    for prev, cur in zip(long_segs, long_segs[1:] + long_segs[:1]):
        gap = (cur - prev) % q or q
        if cur == long_segs[0]:
            gaps.append(gap - 1 if gap else 0)
            break
        if gap - 1 <= A:
            groups[-1].append(cur)
        else:
            gaps.append(gap - 1)
            groups.append([cur])
    if len(groups) > 1 and gaps[-1] <= A:
        groups[0] = groups.pop() + groups[0]
        gaps.pop()
    elif len(groups) == 1 and gaps[-1] <= A:
        odd = _factor("odd", junctions[groups[0][0]], junctions[groups[0][0]], q)
        return [odd]

    factors: List[Factor] = []
    for gi, group in enumerate(groups):
        head, tail = group[0], group[-1]
        odd_from, odd_to = junctions[head], junctions[(tail + 1) % q]
        inner = (tail - head) % q
        factors.append(_factor("odd", odd_from, odd_to, inner + 1))
        nxt_head = groups[(gi + 1) % len(groups)][0]
        count = (nxt_head - tail - 1) % q
        factors.extend(_even_run((tail + 1) % q, count))
    return factors


# ----------------------------------------------------------------------
# Pseudo-legal


@dataclass(frozen=True)
class InpSpan:
    junction: int
    path: NielsenPath
    forward: bool
    start: Fraction
    end: Fraction


@dataclass(frozen=True)
class PseudoLegalDecomposition:
    spans: Tuple[InpSpan, ...]
    legal_edges: Tuple[int, ...]

    @property
    def inp_count(self) -> int:
        return len(self.spans)


def _placements(w: Sequence[int], i: int, inps: Sequence[NielsenPath], cyclic: bool) -> List[InpSpan]:
    n = len(w)
    out = []
    for eta in inps:
        for forward in (True, False):
            left, right = (eta.left, eta.right) if forward else (eta.right, eta.left)
            k, m = len(left.edges), len(right.edges)
            if k + m > n:
                continue
            if not cyclic and (i - k + 1 < 0 or i + m >= n):
                continue
            if any(w[(i - j) % n] != left.edges[j] ^ 1 for j in range(k)):
                continue
            if any(w[(i + 1 + j) % n] != right.edges[j] for j in range(m)):
                continue
            start = Fraction(i + 1 - (k - 1)) - left.end
            end = Fraction(i + 1 + (m - 1)) + right.end
            out.append(InpSpan(i, eta, forward, start, end))
    return out


def pseudo_legal_decomposition(
    ctx: TrainTrackContext,
    w: Sequence[int],
    inps: Sequence[NielsenPath],
    cyclic: bool = True,
) -> Optional[PseudoLegalDecomposition]:
    """Match every illegal junction with an INP tip; ``None`` on failure."""
    n = len(w)
    pieces = [p for p in inps if p.kind == "INP"]
    junctions = ctx.illegal_junctions(w, cyclic)
    options = [_placements(w, i, pieces, cyclic) for i in junctions]
    if any(not opts for opts in options):
        return None
    chosen: List[InpSpan] = []

    def _fits(span: InpSpan) -> bool:
        if chosen and chosen[-1].end > span.start:
            return False
        return True

    def _search(idx: int) -> bool:
        if idx == len(options):
            if cyclic and chosen and chosen[-1].end - n > chosen[0].start:
                return False
            return True
        for span in options[idx]:
            if _fits(span):
                chosen.append(span)
                if _search(idx + 1):
                    return True
                chosen.pop()
        return False

    if not _search(0):
        return None
    covered = set()
    for span in chosen:
        first = math.ceil(span.start)
        last = math.floor(span.end)
        for j in range(first, last):
            covered.add(j % n)
    legal = tuple(w[j] for j in range(n) if j not in covered)
    return PseudoLegalDecomposition(tuple(chosen), legal)


# ----------------------------------------------------------------------
# Pull-back


def _contains(host: Sequence[int], sub: Sequence[int]) -> bool:
    k = len(sub)
    if k == 0:
        return True
    return any(tuple(host[i : i + k]) == tuple(sub) for i in range(len(host) - k + 1))


def pull_back_decomposition(ctx: TrainTrackContext, w: Sequence[int], image_cuts: Sequence[int]) -> List[int]:
    """Cut points on ``w`` whose factors map over the factors of ``[f(w)]``.

    Parameters
    ----------
    w:
        Cyclically reduced loop.
    image_cuts:
        Junction indices of ``[f(w)]`` (as returned by
        ``ctx.map.apply_cyclic``) at illegal turns.

    Returns
    -------
    list of int
        Junction indices of ``w`` in increasing order, one per image factor.

    Raises
    ------
    DecompositionError
        If a cut is not an illegal junction of ``[f(w)]`` or no lift exists.
    """
    image = ctx.map.apply_cyclic(w)
    m = len(image)
    illegal = set(ctx.illegal_junctions(image))
    cuts = sorted(set(c % m for c in image_cuts)) if m else []
    if not cuts or any(c not in illegal for c in cuts):
        raise DecompositionError("image cuts must be illegal junctions of [f(w)]", {"cuts": list(image_cuts)})
    own = ctx.illegal_junctions(w)
    if len(cuts) == 1:
        if not own:
            raise DecompositionError("loop has no illegal junction to cut at")
        return [own[0]]
    pieces = [_segment(image, (cuts[i] + 1) % m, (cuts[(i + 1) % len(cuts)] - cuts[i]) % m or m) for i in range(len(cuts))]
    n = len(w)
    t = len(pieces)
    for start in own:
        for rot in range(t):
            order = pieces[rot:] + pieces[:rot]
            result = [start]
            pos = start
            ok = True
            for piece in order[:-1]:
                found = None
                for cut in own:
                    span = (cut - pos) % n
                    if span == 0:
                        continue
                    if any((c - pos) % n and (c - pos) % n < span for c in result[1:]):
                        continue
                    seg = _segment(w, (pos + 1) % n, span)
                    if _contains(ctx.map.apply_reduced(seg), piece):
                        if found is None or span < (found - pos) % n:
                            found = cut
                if found is None or (found - start) % n == 0:
                    ok = False
                    break
                result.append(found)
                pos = found
            if not ok:
                continue
            last = _segment(w, (pos + 1) % n, (start - pos) % n or n)
            if not _contains(ctx.map.apply_reduced(last), order[-1]):
                continue
            if len(set(result)) != len(result):
                continue
            return sorted(result)
    raise DecompositionError("no pull-back of the image factors exists")
