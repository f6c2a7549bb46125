"""Selberg zeta function as an Euler product over closed geodesics.

    log Z(s) = - sum_N 1/N sum_{w cyclically reduced, |w| = N} chi(w) e^{-s l(w)} (1 - e^{-(k+1) l(w)}) / (1 - e^{-l(w)})

with l(w) = 2 arccosh(|tr gamma_w| / 2) and k the truncation of the inner
product over k >= 0. Every prime power gamma^m is reached through the |gamma|
rotations of its word, which is where the 1/m of the logarithm comes from.
The explicit product over primitive classes is kept as a cross-check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.config import DEFAULT_DEGREE
from app.errors import ConvergenceRegionViolated, InvalidGroup
from app.models import GeodesicConvention, PermutationRep, RepKind, SchottkyData
from app.spectral.representations import TrivialRep
from app.spectral.zeta import ZetaKind, evaluate, hausdorff_dimension
from app.words.alphabet import Word, bar, mirror, primitive_classes
from app.words.intervals import group_element

logger = logging.getLogger(__name__)

CONVERGENCE_MARGIN = 0.1


def _lengths(traces: np.ndarray) -> np.ndarray:
    t = np.abs(traces)
    if np.any(t <= 2.0):
        raise InvalidGroup(f"non-hyperbolic element with |tr| = {t.min():.6g}")
    return 2.0 * np.arccosh(t / 2.0)


def _terms(s: complex, lengths: np.ndarray, chars: np.ndarray, k_max: int) -> complex:
    inner = -np.expm1(-(k_max + 1) * lengths) / -np.expm1(-lengths)
    return complex(np.sum(chars * np.exp(-s * lengths) * inner))


def _characters(perms: Optional[np.ndarray], rows: int, rep_kind: RepKind) -> np.ndarray:
    if perms is None or rep_kind == RepKind.TRIVIAL:
        return np.ones(rows)
    fixed = np.count_nonzero(perms == np.arange(perms.shape[1]), axis=1)
    return fixed - 1.0 if rep_kind == RepKind.STD0 else fixed.astype(float)


def log_euler_sum(s: complex, g: SchottkyData, max_word_len: int = 14, k_max: int = 20,
                  rep: Optional[PermutationRep] = None, rep_kind: RepKind = RepKind.STD) -> complex:
    """Full-orbit log-sum; words are grown level by level per first letter."""
    gens = g.matrices
    letter_perms = None
    if rep is not None:
        letter_perms = np.concatenate([rep.image_array, rep.inverse_array])
    total = 0j
    for a in range(1, g.size + 1):
        mats = gens[a - 1][None, :, :]
        last = np.array([a])
        perms = None if letter_perms is None else letter_perms[a - 1][None, :]
        closing = bar(a, g.r)
        for N in range(1, max_word_len + 1):
            cyclic = last != closing if N > 1 else np.ones(1, dtype=bool)
            traces = np.einsum("wii->w", mats[cyclic])
            chars = _characters(None if perms is None else perms[cyclic], int(cyclic.sum()), rep_kind)
            total -= _terms(s, _lengths(traces), chars, k_max) / N
            if N == max_word_len:
                break
            children, child_last, child_perms = [], [], []
            for b in range(1, g.size + 1):
                keep = last != bar(b, g.r)
                children.append(mats[keep] @ gens[b - 1])
                child_last.append(np.full(int(keep.sum()), b))
                if perms is not None:
                    child_perms.append(perms[keep][:, letter_perms[b - 1]])
            mats = np.concatenate(children)
            last = np.concatenate(child_last)
            perms = None if perms is None else np.concatenate(child_perms)
    return total


def euler_product_zeta(s: complex, g: SchottkyData, max_word_len: int = 14, k_max: int = 20,
                       rep: Optional[PermutationRep] = None, rep_kind: RepKind = RepKind.STD,
                       convention: GeodesicConvention = GeodesicConvention.CLASSES,
                       delta: Optional[float] = None) -> complex:
    """Truncated Euler product; ``rep`` twists it by the permutation character."""
    if delta is None:
        delta = hausdorff_dimension(g).delta
    if complex(s).real <= delta + CONVERGENCE_MARGIN:
        raise ConvergenceRegionViolated(
            f"Re s = {complex(s).real:.4g} must exceed delta + {CONVERGENCE_MARGIN} = {delta + CONVERGENCE_MARGIN:.4g}"
        )
    log_z = log_euler_sum(s, g, max_word_len, k_max, rep, rep_kind)
    if convention == GeodesicConvention.INVERSE_PAIRS:
        log_z /= 2
    return complex(np.exp(log_z))


def _canonical(w: Word) -> Word:
    return min(w[k:] + w[:k] for k in range(len(w)))


def euler_product_by_classes(s: complex, g: SchottkyData, max_word_len: int = 8, k_max: int = 20,
                             convention: GeodesicConvention = GeodesicConvention.CLASSES) -> complex:
    """Prod over primitive classes of prod_k (1 - e^{-(s+k) l}), untwisted."""
    k = np.arange(k_max + 1)
    value = 1 + 0j
    for w in primitive_classes(max_word_len, g.r):
        if convention == GeodesicConvention.INVERSE_PAIRS and w > _canonical(mirror(w, g.r)):
            continue
        m = group_element(w, g)
        ell = float(_lengths(np.array([np.trace(m)]))[0])
        value *= np.prod(1 - np.exp(-(s + k) * ell))
    return complex(value)


@dataclass
class Calibration:
    convention: GeodesicConvention
    s: complex
    determinant: complex
    classes_value: complex
    pairs_value: complex

    @property
    def mismatch(self) -> float:
        chosen = self.classes_value if self.convention == GeodesicConvention.CLASSES else self.pairs_value
        return abs(chosen - self.determinant)


def calibrate_convention(g: SchottkyData, degree: Optional[int] = None, delta: Optional[float] = None,
                         max_word_len: int = 10, k_max: int = 20) -> Calibration:
    """Pick the geodesic-counting convention that reproduces det(1 - L_s) at s = delta + 1."""
    if delta is None:
        delta = hausdorff_dimension(g, degree=degree).delta
    s = complex(delta + 1.0)
    det = evaluate(ZetaKind.standard(), s, TrivialRep(), g, degree or DEFAULT_DEGREE)
    log_z = log_euler_sum(s, g, max_word_len, k_max)
    classes, pairs = complex(np.exp(log_z)), complex(np.exp(log_z / 2))
    convention = (GeodesicConvention.CLASSES if abs(classes - det) <= abs(pairs - det)
                  else GeodesicConvention.INVERSE_PAIRS)
    logger.info("Euler product convention %s: det=%.10f classes=%.10f pairs=%.10f",
                convention.value, det.real, classes.real, pairs.real)
    return Calibration(convention, s, det, classes, pairs)
