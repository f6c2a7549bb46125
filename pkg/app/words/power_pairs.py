"""PowerPairs classification of mirrored-partition pairs and the UNI distance."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from app.config import POWER_PAIRS_CAP, UNI_GRID
from app.errors import CapExceeded, MismatchedTerminalLetter
from app.models import PairClass, SchottkyData
from app.words.alphabet import Word, mirror, multiply_reduced, proper_power_decomposition
from app.words.intervals import group_element, mirror_partition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PowerDecomposition:
    """a' = cAd, b' = cBd with |c| = L, |A| = M1, |B| = M2, |d| = R."""
    L: int
    M1: int
    M2: int
    R: int
    q: int


@dataclass
class PowerPairsResult:
    tau: float
    zbar_size: int
    counts: Counter = field(default_factory=Counter)
    histogram: Counter = field(default_factory=Counter)
    power_examples: list[tuple[Word, Word, PowerDecomposition]] = field(default_factory=list)

    @property
    def identity(self) -> int:
        return self.counts[PairClass.IDENTITY]

    @property
    def power(self) -> int:
        return self.counts[PairClass.POWER]

    @property
    def other(self) -> int:
        return self.counts[PairClass.OTHER]


def common_prefix(x: Word, y: Word) -> int:
    n = 0
    for a, b in zip(x, y):
        if a != b:
            break
        n += 1
    return n


def decompose(x: Word, y: Word, q: int) -> PowerDecomposition:
    L = common_prefix(x, y)
    R = common_prefix(x[L:][::-1], y[L:][::-1])
    return PowerDecomposition(L=L, M1=len(x) - L - R, M2=len(y) - L - R, R=R, q=q)


def power_pairs(tau: float, g: SchottkyData, cap: Optional[int] = None,
                keep_examples: int = 0) -> PowerPairsResult:
    """Classify Z̄(tau)^2 by whether gamma_{a'} gamma_{b'}^-1 is a proper power.

    Pairs only depend on the prefixes a', b', so the work runs over distinct
    prefixes weighted by their multiplicities.
    """
    limit = cap or POWER_PAIRS_CAP
    zbar = mirror_partition(tau, g)
    if len(zbar) > limit:
        raise CapExceeded(f"|Z̄({tau:g})| = {len(zbar)} exceeds cap {limit}")

    result = PowerPairsResult(tau=tau, zbar_size=len(zbar))
    prefixes = Counter(w[:-1] for w in zbar)
    items = sorted(prefixes.items())
    for p1, m1 in items:
        for p2, m2 in items:
            weight = m1 * m2
            if p1 == p2:
                result.counts[PairClass.IDENTITY] += weight
                continue
            dec = proper_power_decomposition(multiply_reduced(p1, mirror(p2, g.r), g.r), g.r)
            if dec is None:
                result.counts[PairClass.OTHER] += weight
                continue
            parts = decompose(p1, p2, dec[1])
            result.counts[PairClass.POWER] += weight
            result.histogram[parts] += weight
            if len(result.power_examples) < keep_examples:
                result.power_examples.append((p1, p2, parts))
    logger.info("PowerPairs at tau=%g: |Z̄|=%d identity=%d power=%d other=%d", tau,
                result.zbar_size, result.identity, result.power, result.other)
    return result


# ── UNI distance ─────────────────────────────────────────────────────────────

def _log_second(m: np.ndarray, x):
    return -2 * m[1, 0] / (m[1, 0] * x + m[1, 1])


def uni_distance(a: Word, b: Word, g: SchottkyData, grid: Optional[int] = None,
                 refine: bool = False) -> float:
    """min over I_j of |gamma_a''/gamma_a' - gamma_b''/gamma_b'| on a grid."""
    if not a or not b or a[-1] != b[-1]:
        raise MismatchedTerminalLetter(f"{a} and {b} do not end in the same letter")
    j = a[-1]
    ma, mb = group_element(a, g), group_element(b, g)
    lo, hi = g.center(j) - g.radius(j), g.center(j) + g.radius(j)
    xs = np.linspace(lo, hi, grid or UNI_GRID)
    gap = np.abs(_log_second(ma, xs) - _log_second(mb, xs))
    k = int(np.argmin(gap))
    best = float(gap[k])
    if refine:
        left, right = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
        if right > left:
            res = minimize_scalar(lambda x: abs(_log_second(ma, x) - _log_second(mb, x)),
                                  bounds=(left, right), method="bounded",
                                  options={"xatol": 1e-12})
            best = min(best, float(res.fun))
    return best
