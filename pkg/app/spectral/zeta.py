"""Fredholm determinants of the transfer operator and what is derived from them.

zeta_rho(s)       = det(1 - L_{W2,s,rho})          standard kind, resonance bookkeeping
zeta_{tau,rho}(s) = det(1 - L_{Z̄(tau),s,rho}^2)    refined kind, HS-norm estimates

Pressure and Hausdorff dimension come from the leading eigenvalue of the
trivial-rep W2 matrix at real s.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.optimize import brentq

from app.config import DEFAULT_DEGREE, PERRON_TOLERANCE, STRICT_MODE
from app.errors import HypothesisViolated, NoSignChange, PerronViolation, SingularMatrix, TauNonPositive
from app.models import PermutationRep, SchottkyData, ZeroRecord, ZetaKindName
from app.spectral.representations import RepProvider, StandardRep, StdZeroRep, TrivialRep
from app.spectral.transfer import TransferGeometry, TransferOperator, hs_norm_matrix
from app.words.constants import tau_zero
from app.words.intervals import enumerate_words, mirror_partition, standard_words

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ZetaKind:
    name: ZetaKindName
    tau: Optional[float] = None

    @classmethod
    def standard(cls) -> "ZetaKind":
        return cls(ZetaKindName.STANDARD)

    @classmethod
    def refined(cls, tau: float, g: Optional[SchottkyData] = None) -> "ZetaKind":
        kind = cls(ZetaKindName.REFINED, tau)
        if g is not None:
            kind.check(g)
        return kind

    @property
    def squared(self) -> bool:
        return self.name == ZetaKindName.REFINED

    @property
    def label(self) -> str:
        return self.name.value if not self.squared else f"refined(tau={self.tau:g})"

    def check(self, g: SchottkyData) -> None:
        if not self.squared:
            return
        if self.tau is None or self.tau <= 0:
            raise TauNonPositive(f"refined zeta needs tau > 0, got {self.tau}")
        t0 = tau_zero(g)
        if self.tau >= t0:
            raise HypothesisViolated(f"refined zeta needs tau < tau_0 = {t0:g}, got {self.tau:g}")

    def words(self, g: SchottkyData):
        return mirror_partition(self.tau, g) if self.squared else standard_words(g)


class ZetaFunction:
    """s -> det(1 - A(s)) or det(1 - A(s)^2) for one kind, rep and degree.

    Pass ``geometry`` to share the rep-independent part between reps on the
    same word set (factorization checks, Monte-Carlo loops).
    """

    def __init__(self, kind: ZetaKind, g: SchottkyData, rep: RepProvider,
                 degree: Optional[int] = None, geometry: Optional[TransferGeometry] = None,
                 strict: Optional[bool] = None):
        kind.check(g)
        self.kind = kind
        self.g = g
        self.rep = rep
        self.geometry = geometry or TransferGeometry(
            g, kind.words(g), degree or DEFAULT_DEGREE, label=kind.label,
            strict=STRICT_MODE if strict is None else strict,
        )
        self.operator = TransferOperator(self.geometry, rep)
        self.warnings: list[str] = []

    def _matrix(self, s: complex, derivative: bool = False) -> np.ndarray:
        T = self.operator.matrix(s, derivative)
        for message in T.warnings:
            if message not in self.warnings:
                self.warnings.append(message)
        return T.matrix

    def _system(self, s: complex) -> tuple[np.ndarray, np.ndarray]:
        A = self._matrix(s)
        B = A @ A if self.kind.squared else A
        return A, np.eye(A.shape[0]) - B

    def value(self, s: complex) -> complex:
        if self.operator.size == 0:
            return 1.0 + 0j
        _, system = self._system(s)
        lu, piv = lu_factor(system)
        return _lu_determinant(lu, piv)

    def value_and_log_derivative(self, s: complex) -> tuple[complex, complex]:
        """(zeta(s), zeta'(s)/zeta(s)) from a single LU factorization."""
        if self.operator.size == 0:
            return 1.0 + 0j, 0j
        A, system = self._system(s)
        lu, piv = lu_factor(system)
        if np.any(np.diag(lu) == 0):
            raise SingularMatrix(f"1 - L is singular at s = {s}")
        dA = self._matrix(s, derivative=True)
        dB = dA @ A + A @ dA if self.kind.squared else dA
        logd = -np.trace(lu_solve((lu, piv), dB))
        if not np.isfinite(logd):
            raise SingularMatrix(f"log-derivative is not finite at s = {s}")
        return _lu_determinant(lu, piv), complex(logd)

    def log_derivative(self, s: complex) -> complex:
        return self.value_and_log_derivative(s)[1]


def _lu_determinant(lu: np.ndarray, piv: np.ndarray) -> complex:
    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    det = np.prod(np.diag(lu))
    return complex(-det if swaps % 2 else det)


# ── One-shot wrappers ────────────────────────────────────────────────────────

def evaluate(kind: ZetaKind, s: complex, rep: RepProvider, g: SchottkyData,
             degree: Optional[int] = None) -> complex:
    return ZetaFunction(kind, g, rep, degree).value(s)


def log_derivative(kind: ZetaKind, s: complex, rep: RepProvider, g: SchottkyData,
                   degree: Optional[int] = None) -> complex:
    return ZetaFunction(kind, g, rep, degree).log_derivative(s)


# ── Pressure and dimension ───────────────────────────────────────────────────

def pressure_operator(g: SchottkyData, degree: Optional[int] = None) -> TransferOperator:
    geometry = TransferGeometry(g, standard_words(g), degree or DEFAULT_DEGREE, label="W2")
    return TransferOperator(geometry, TrivialRep())


def pressure(sigma: float, g: SchottkyData, degree: Optional[int] = None,
             operator: Optional[TransferOperator] = None) -> float:
    """log of the spectral radius of L_sigma on W2, with a Perron check."""
    operator = operator or pressure_operator(g, degree)
    eig = np.linalg.eigvals(operator.matrix(complex(sigma)).matrix)
    lead = eig[np.argmax(np.abs(eig))]
    if lead.real <= 0 or abs(lead.imag) > PERRON_TOLERANCE * abs(lead):
        raise PerronViolation(f"leading eigenvalue {lead} at sigma={sigma} is not real positive")
    return float(np.log(lead.real))


@dataclass
class DimensionResult:
    delta: float
    bracket: tuple[float, float]
    pressure_at_delta: float
    iterations: int

    @property
    def bracket_width(self) -> float:
        return self.bracket[1] - self.bracket[0]


def hausdorff_dimension(g: SchottkyData, tol: float = 1e-10,
                        degree: Optional[int] = None) -> DimensionResult:
    """Root of sigma -> P(sigma) on (0, 1) by bracketed Brent iteration."""
    operator = pressure_operator(g, degree)

    def P(sigma: float) -> float:
        return pressure(sigma, g, operator=operator)

    lo, hi = 0.0, 1.0
    p_lo, p_hi = P(lo), P(hi)
    if not (p_lo > 0 > p_hi):
        raise NoSignChange(f"P(0) = {p_lo:.3g}, P(1) = {p_hi:.3g}")
    xtol = max(tol * 1e-2, 1e-14)
    delta, info = brentq(P, lo, hi, xtol=xtol, full_output=True)
    h = max(xtol, 1e-13)
    bracket = (max(lo, delta - h), min(hi, delta + h))
    p_delta = P(delta)
    logger.info("delta = %.12f after %d iterations (P = %.2e)", delta, info.iterations, p_delta)
    return DimensionResult(delta=float(delta), bracket=bracket,
                           pressure_at_delta=p_delta, iterations=info.iterations)


def pressure_sum_ratios(sigma: float, length: int, g: SchottkyData,
                        degree: Optional[int] = None) -> list[float]:
    """sum_{|w|=l} Upsilon_w^sigma / exp(l P(sigma)) for l = 1..length."""
    p = pressure(sigma, g, degree)
    table = enumerate_words(length, g)
    ratios = []
    for ell, level in enumerate(table.levels, start=1):
        total = float(np.sum(np.array([table.upsilon[w] for w in level]) ** sigma))
        ratios.append(total / np.exp(ell * p))
    return ratios


# ── Checks built on the determinant ──────────────────────────────────────────

def factorization_residual(rep_n: PermutationRep, samples: Sequence[complex], g: SchottkyData,
                           degree: Optional[int] = None) -> float:
    """max |zeta_std - zeta_trivial * zeta_std0| / max(1, |zeta_std|) over the samples."""
    kind = ZetaKind.standard()
    geometry = TransferGeometry(g, standard_words(g), degree or DEFAULT_DEGREE, label="W2")
    full = ZetaFunction(kind, g, StandardRep(rep_n), geometry=geometry)
    trivial = ZetaFunction(kind, g, TrivialRep(), geometry=geometry)
    reduced = ZetaFunction(kind, g, StdZeroRep(rep_n), geometry=geometry)
    worst = 0.0
    for s in samples:
        z = full.value(s)
        worst = max(worst, abs(z - trivial.value(s) * reduced.value(s)) / max(1.0, abs(z)))
    return worst


def pointwise_threshold(tau: float, rep: RepProvider, g: SchottkyData,
                        degree: Optional[int] = None, s_max: float = 30.0,
                        window: float = 10.0, step: float = 0.5) -> Optional[float]:
    """Smallest grid point s* <= s_max with -log|zeta_tau(s)| <= dim(V) tau on [s*, s* + window]."""
    zeta = ZetaFunction(ZetaKind.refined(tau, g), g, rep, degree)
    grid = np.arange(0.0, s_max + window + step / 2, step)
    bound = rep.dimension * tau
    ok = np.array([-np.log(abs(zeta.value(complex(s)))) <= bound for s in grid])
    span = int(round(window / step))
    for i, s in enumerate(grid):
        if s > s_max:
            break
        if ok[i: i + span + 1].all():
            return float(s)
    return None


def weyl_slack(tau: float, s: complex, rep: RepProvider, g: SchottkyData,
               degree: Optional[int] = None) -> float:
    """||L_{tau,s}||_HS^2 - log|zeta_tau(s)|; non-negative by Weyl's inequality."""
    zeta = ZetaFunction(ZetaKind.refined(tau, g), g, rep, degree)
    hs = hs_norm_matrix(zeta.operator.matrix(s))
    return hs * hs - float(np.log(abs(zeta.value(s))))


def laplacian_eigenvalues(zeros: Sequence[ZeroRecord], sigma0: float,
                          upper: Optional[float] = None, imag_tol: float = 1e-6) -> list[float]:
    """lambda = s(1-s) for real zeros s with sigma0 <= s (<= upper)."""
    out = []
    for z in zeros:
        if abs(z.im) > imag_tol or z.re < sigma0 or (upper is not None and z.re > upper):
            continue
        out.extend([z.re * (1 - z.re)] * z.multiplicity)
    return sorted(out)

