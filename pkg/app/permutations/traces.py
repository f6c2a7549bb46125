"""Expected traces of the standard-minus-trivial character and their bound."""

from __future__ import annotations

import itertools
import logging
import math

import numpy as np

from app.config import EXHAUSTIVE_CAP
from app.errors import ExhaustiveTooLarge, HypothesisViolated
from app.models import TraceEstimate, TraceMode
from app.permutations.permrep import stream
from app.words.alphabet import Word, check_letters, divisor_count, proper_power_decomposition

logger = logging.getLogger(__name__)


def bsp_bound(x: Word, n: int, r: int) -> float:
    """Upper bound on |E Tr rho_n^0(gamma_x)| for reduced x, valid when n > |x|^2."""
    t = len(x)
    if n <= t * t:
        raise HypothesisViolated(f"need n > t^2, got n={n}, t={t}")
    if t == 0:
        return float(n - 1)
    tail = t**4 / (n - t * t)
    dec = proper_power_decomposition(x, r)
    if dec is None:
        return tail
    return divisor_count(dec[1]) - 1 + tail


def _batch_act(x: Word, r: int, images: list[np.ndarray]) -> np.ndarray:
    """Compose per-row permutation batches along x; images[i] holds letter i+1."""
    inverses = [np.argsort(p, axis=1) for p in images]
    rows, n = images[0].shape
    result = np.broadcast_to(np.arange(n, dtype=images[0].dtype), (rows, n))
    for a in x:
        perm = images[a - 1] if a <= r else inverses[a - r - 1]
        result = np.take_along_axis(result, perm, axis=1)
    return result


def _characters(composite: np.ndarray) -> np.ndarray:
    n = composite.shape[1]
    return np.count_nonzero(composite == np.arange(n), axis=1) - 1


def expected_trace(x: Word, n: int, r: int, mode: TraceMode = TraceMode.MONTE_CARLO,
                   trials: int = 10_000, seed: int = 0) -> TraceEstimate:
    check_letters(x, r)
    if mode == TraceMode.EXHAUSTIVE:
        return _exhaustive(x, n, r)

    images = [stream(seed, index).permuted(np.tile(np.arange(n), (trials, 1)), axis=1)
              for index in range(r)]
    chars = _characters(_batch_act(x, r, images)).astype(float)
    stderr = float(chars.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return TraceEstimate(mean=float(chars.mean()), stderr=stderr, trials=trials,
                         mode=TraceMode.MONTE_CARLO)


def _exhaustive(x: Word, n: int, r: int) -> TraceEstimate:
    total = math.factorial(n) ** r
    if total > EXHAUSTIVE_CAP:
        raise ExhaustiveTooLarge(f"(n!)^r = {total} exceeds {EXHAUSTIVE_CAP}")
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int16)
    # One row per r-tuple; letter i+1 reads column i of the tuple grid.
    grid = np.indices((len(perms),) * r).reshape(r, -1)
    images = [perms[grid[i]] for i in range(r)]
    chars = _characters(_batch_act(x, r, images))
    return TraceEstimate(mean=float(chars.sum() / total), stderr=0.0, trials=total,
                         mode=TraceMode.EXHAUSTIVE)
