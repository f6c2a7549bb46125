"""Empirical finite-depth estimates of the distortion and derivative constants.

The true constants are suprema over infinitely many words; everything here
is a sup/inf over the words of length <= depth and never claims more.
"""

from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np

from app.config import MAX_ENUMERATION_DEPTH
from app.errors import DepthExceeded
from app.models import EstimatedConstants, SchottkyData
from app.words.alphabet import Word, mirror
from app.words.intervals import WordTable, enumerate_words, mirror_partition

logger = logging.getLogger(__name__)

# Sample offsets inside D_{a_n}, as fractions of the radius.
_OFFSETS = np.array([0.0, 0.9, -0.9, 0.9j, -0.9j])


def tau_zero(g: SchottkyData) -> float:
    """Largest tau for which Z̄(tau) has no single letters (strict)."""
    return float(np.min(2 * g.radius_array))


def default_taus() -> list[float]:
    return [10 ** (-k / 2) for k in range(1, 13)]


def _sup_ratio(values: np.ndarray) -> float:
    return float(max(values.max(), (1.0 / values).max()))


def _derivative_samples(table: WordTable, g: SchottkyData) -> tuple[list[Word], np.ndarray]:
    """|gamma'_{a'}(x)| at the sample points of D_{a_n}, one row per word."""
    words = list(table.upsilon)
    rows = np.array([table.prefix_matrix(w)[2:] for w in words])
    last = np.array([w[-1] for w in words])
    x = (g.center_array[last - 1][:, None]
         + g.radius_array[last - 1][:, None] * _OFFSETS[None, :])
    deriv = 1.0 / np.abs(rows[:, :1] * x + rows[:, 1:]) ** 2
    return words, deriv


def partition_window(taus: Sequence[float], g: SchottkyData, depth: int
                     ) -> list[tuple[float, list[Word]]]:
    """(tau, Z̄(tau)) for the taus whose members all have length <= depth."""
    out = []
    for tau in sorted(taus, reverse=True):
        zbar = mirror_partition(tau, g)
        if max(len(w) for w in zbar) > depth:
            break
        out.append((tau, zbar))
    return out


def word_length_window(window: list[tuple[float, list[Word]]]) -> tuple[float, float]:
    """Fitted (D, kappa) with D^-1 log(1/tau) - kappa <= |a| <= D log(1/tau) + kappa."""
    usable = [(np.log(1 / tau), [len(w) for w in zbar]) for tau, zbar in window if tau < 1]
    if not usable:
        return 1.0, 0.0
    fit = [(L, lens) for L, lens in usable if L > 1.0] or usable
    d = max(max(max(lens) / L, L / min(lens)) for L, lens in fit)
    kappa = max(max(max(lens) - d * L, L / d - min(lens), 0.0) for L, lens in usable)
    return float(d), float(kappa)


def _contraction_rates(deriv: np.ndarray, prefix_len: np.ndarray, depth: int
                       ) -> tuple[Optional[float], Optional[float]]:
    """Per-letter growth of the largest and smallest derivative.

    Fitted over prefix lengths 1..depth-1; with a single length the empty
    prefix (derivative 1) anchors the rate, and depth 1 has no rate at all.
    """
    ells = np.arange(1, depth)
    if len(ells) == 0:
        return None, None
    top = np.array([deriv[prefix_len == ell].max() for ell in ells])
    bottom = np.array([deriv[prefix_len == ell].min() for ell in ells])
    if len(ells) == 1:
        return float(top[0]), float(bottom[0])
    return (float(np.exp(np.polyfit(ells, np.log(top), 1)[0])),
            float(np.exp(np.polyfit(ells, np.log(bottom), 1)[0])))


def estimate_constants(depth: int, g: SchottkyData, delta: Optional[float] = None,
                       taus: Optional[Sequence[float]] = None) -> EstimatedConstants:
    if not 1 <= depth <= MAX_ENUMERATION_DEPTH:
        raise DepthExceeded(f"depth must lie in 1..{MAX_ENUMERATION_DEPTH}, got {depth}")
    table = enumerate_words(depth, g)
    ups = table.upsilon

    # 1. Derivative vs interval length, and distortion
    words, deriv = _derivative_samples(table, g)
    lengths = np.array([ups[w] for w in words])
    k0 = _sup_ratio(deriv / lengths[:, None])
    distortion = float((deriv.max(axis=1) / deriv.min(axis=1)).max())

    # 2. Contraction rates from the extreme derivatives per prefix length
    prefix_len = np.array([len(w) - 1 for w in words])
    theta, theta_bar = _contraction_rates(deriv, prefix_len, depth)

    # 3. Coarse multiplicativity over every split w = ab
    ratios = [ups[w] / (ups[w[:i]] * ups[w[i:]])
              for w in words if len(w) > 1 for i in range(1, len(w))]
    k2 = _sup_ratio(np.array(ratios)) if ratios else 1.0

    # 4. Mirror ratio
    k3 = _sup_ratio(np.array([ups[w] / ups[mirror(w, g.r)] for w in words]))

    # 5. Partition constants over the taus the table can resolve
    window = partition_window(taus or default_taus(), g, depth)
    k1_vals = [ups[w] / tau for tau, zbar in window for w in zbar]
    k1 = _sup_ratio(np.array(k1_vals)) if k1_vals else 1.0
    c2 = None
    if delta is not None and window:
        c2 = _sup_ratio(np.array([len(zbar) * tau ** delta for tau, zbar in window]))
    window_d, window_kappa = word_length_window(window)

    logger.info("Constants at depth %d: K0=%.3g K1=%.3g K2=%.3g K3=%.3g", depth, k0, k1, k2, k3)
    return EstimatedConstants(
        depth=depth, k0=k0, k1=k1, k2=k2, k3=k3, theta=theta, theta_bar=theta_bar,
        distortion=distortion, c2=c2, window_d=window_d, window_kappa=window_kappa,
        taus=[tau for tau, _ in window],
    )
