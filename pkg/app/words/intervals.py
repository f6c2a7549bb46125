"""Group elements, intervals I_w and the partitions Z(tau) / mirrored Z(tau)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from app.config import PARTITION_MAX_DEPTH
from app.errors import DepthExceeded, TauNonPositive
from app.models import IntervalData, SchottkyData
from app.words.alphabet import Word, bar, check_letters, mirror

logger = logging.getLogger(__name__)

# 2x2 matrices are kept as (a, b, c, d) tuples in the enumeration hot loops.
Mat = tuple[float, float, float, float]
IDENTITY: Mat = (1.0, 0.0, 0.0, 1.0)


def _mul(x: Mat, y: Mat) -> Mat:
    a, b, c, d = x
    e, f, g, h = y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _as_tuple(m: np.ndarray) -> Mat:
    return (float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))


def as_array(m: Mat) -> np.ndarray:
    return np.array([[m[0], m[1]], [m[2], m[3]]])


def _upsilon_under(m: Mat, letter: int, g: SchottkyData) -> float:
    """Length of m(I_letter); m has unit determinant and no pole on I_letter."""
    c0, rad = g.center(letter), g.radius(letter)
    x1, x2 = c0 - rad, c0 + rad
    return 2 * rad / abs((m[2] * x1 + m[3]) * (m[2] * x2 + m[3]))


# ── Elements and intervals ───────────────────────────────────────────────────

def group_element(w: Word, g: SchottkyData) -> np.ndarray:
    """gamma_w = gamma_{a1} ... gamma_{an}; the empty word gives the identity."""
    check_letters(w, g.r)
    m = np.eye(2)
    for a in w:
        m = m @ g.generator(a)
    return m


def interval(w: Word, g: SchottkyData) -> IntervalData:
    """I_w = gamma_{w'}(I_{a_n})."""
    if not w:
        raise ValueError("interval needs a non-empty word")
    prefix = group_element(w[:-1], g)
    c0, rad = g.center(w[-1]), g.radius(w[-1])
    ends = []
    for x in (c0 - rad, c0 + rad):
        ends.append((prefix[0, 0] * x + prefix[0, 1]) / (prefix[1, 0] * x + prefix[1, 1]))
    return IntervalData(lo=float(min(ends)), hi=float(max(ends)))


def upsilon(w: Word, g: SchottkyData) -> float:
    """|I_w|, with the empty word given length 1."""
    if not w:
        return 1.0
    return _upsilon_under(_as_tuple(group_element(w[:-1], g)), w[-1], g)


# ── Partitions ───────────────────────────────────────────────────────────────

def partition(tau: float, g: SchottkyData, max_depth: Optional[int] = None) -> list[Word]:
    """Z(tau): words with |I_w| <= tau < |I_{w'}|, in lexicographic order.

    Single letters have parent length +inf, so they qualify as soon as
    their own interval is short enough.
    """
    if tau <= 0:
        raise TauNonPositive(f"tau must be positive, got {tau}")
    depth_cap = max_depth or PARTITION_MAX_DEPTH
    gens = [_as_tuple(g.generator(a)) for a in range(1, g.size + 1)]
    out: list[Word] = []

    def visit(word: Word, prefix: Mat) -> None:
        last = word[-1]
        if _upsilon_under(prefix, last, g) <= tau:
            out.append(word)
            return
        if len(word) >= depth_cap:
            raise DepthExceeded(f"branch {word[:8]}... exceeds depth {depth_cap}")
        m = _mul(prefix, gens[last - 1])
        forbidden = bar(last, g.r)
        for b in range(1, g.size + 1):
            if b != forbidden:
                visit(word + (b,), m)

    for a in range(1, g.size + 1):
        visit((a,), IDENTITY)
    return out


def mirror_partition(tau: float, g: SchottkyData, max_depth: Optional[int] = None) -> list[Word]:
    """Elementwise mirror of Z(tau), sorted."""
    return sorted(mirror(w, g.r) for w in partition(tau, g, max_depth))


def standard_words(g: SchottkyData) -> list[Word]:
    """W_2: every admissible two-letter word."""
    return [(a, b) for a in range(1, g.size + 1) for b in range(1, g.size + 1)
            if b != bar(a, g.r)]


# ── Level-by-level enumeration ───────────────────────────────────────────────

@dataclass
class WordTable:
    """All admissible words of length 1..depth with gamma_w and |I_w|."""
    depth: int
    matrix: dict[Word, Mat] = field(default_factory=dict)
    upsilon: dict[Word, float] = field(default_factory=dict)
    levels: list[list[Word]] = field(default_factory=list)

    def prefix_matrix(self, w: Word) -> Mat:
        return self.matrix[w[:-1]] if len(w) > 1 else IDENTITY


def enumerate_words(depth: int, g: SchottkyData) -> WordTable:
    gens = [_as_tuple(g.generator(a)) for a in range(1, g.size + 1)]
    table = WordTable(depth=depth)
    level: list[Word] = []
    for a in range(1, g.size + 1):
        w = (a,)
        table.matrix[w] = gens[a - 1]
        table.upsilon[w] = 2 * g.radius(a)
        level.append(w)
    table.levels.append(level)

    for _ in range(depth - 1):
        nxt: list[Word] = []
        for w in level:
            m = table.matrix[w]
            forbidden = bar(w[-1], g.r)
            for b in range(1, g.size + 1):
                if b == forbidden:
                    continue
                child = w + (b,)
                table.matrix[child] = _mul(m, gens[b - 1])
                table.upsilon[child] = _upsilon_under(m, b, g)
                nxt.append(child)
        table.levels.append(nxt)
        level = nxt
    logger.debug("Enumerated %d words up to length %d", len(table.matrix), depth)
    return table
