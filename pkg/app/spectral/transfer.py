"""Galerkin truncation of the twisted transfer operator on Bergman space.

For a word set Z the operator sends f on D_{a_1} to

    (L f)(x) = sum over a in Z ending in b of  gamma'_{a'}(x)^s rho(gamma_{a'}^-1) f(gamma_{a'}(x)),

for x in D_b. Each output is sampled on the circle |x - c_b| = beta r_b, its
Taylor coefficients are recovered by FFT, and entries are expressed in the
orthonormal monomial basis so the Frobenius norm is the truncated HS norm.
Everything that does not depend on s or on the representation is computed
once in TransferGeometry.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from app.config import (
    CIRCLE_RATIO,
    DEFAULT_DEGREE,
    IMAGINARY_RESIDUAL_LIMIT,
    MIN_CIRCLE_SAMPLES,
    QUAD_ANGULAR,
    QUAD_CHANGE_LIMIT,
    QUAD_RADIAL,
    STRICT_MODE,
    TRUNCATION_MASS_LIMIT,
)
from app.errors import DegreeTooSmall, QuadratureNotConverged
from app.models import SchottkyData
from app.spectral.bergman import basis_values, kernel, principal_log
from app.spectral.representations import RepProvider
from app.words.alphabet import Word, mirror
from app.words.intervals import group_element, mirror_partition

logger = logging.getLogger(__name__)

Block = tuple[int, int]  # (target disk b, source disk a_1)


@dataclass
class _BlockGeometry:
    words: list[Word]
    log_deriv: np.ndarray   # (words, K)   Log gamma'_{a'}(x_j)
    basis: np.ndarray       # (words, K, M+1)   e_{a_1,m}(gamma_{a'}(x_j))


@dataclass
class TransferMatrix:
    matrix: np.ndarray
    s: complex
    degree: int
    rep_dimension: int
    disks: int
    label: str
    derivative: bool = False
    truncation_mass: float = 0.0
    warnings: list[str] = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


class TransferGeometry:
    """Rep- and s-independent data of L_{Z,s,rho}: sample points, images, basis values."""

    def __init__(self, g: SchottkyData, words: Sequence[Word], degree: Optional[int] = None,
                 samples: Optional[int] = None, ratio: Optional[float] = None,
                 label: str = "custom", strict: Optional[bool] = None):
        self.g = g
        self.degree = degree or DEFAULT_DEGREE
        self.samples = max(samples or 0, MIN_CIRCLE_SAMPLES, 4 * (self.degree + 1))
        self.ratio = ratio or CIRCLE_RATIO
        self.label = label
        self.strict = STRICT_MODE if strict is None else strict
        self.words = sorted(words)
        self._warned = False
        self._gram_cache: dict[complex, dict[Block, np.ndarray]] = {}

        M, K = self.degree, self.samples
        self._phases = np.exp(2j * np.pi * np.arange(K) / K)
        # Taylor coefficient k of the output on D_b -> entry against e_{b,k}
        k = np.arange(2 * M + 2)
        self._out_scale = {
            b: self.ratio ** (-k) * g.radius(b) * np.sqrt(np.pi / (k + 1))
            for b in range(1, g.size + 1)
        }

        grouped: dict[Block, list[Word]] = {}
        for w in self.words:
            grouped.setdefault((w[-1], w[0]), []).append(w)

        self.blocks: dict[Block, _BlockGeometry] = {}
        for (b, a1), ws in sorted(grouped.items()):
            x = g.center(b) + self.ratio * g.radius(b) * self._phases
            logs, vals = [], []
            for w in ws:
                m = group_element(w[:-1], g)
                denom = m[1, 0] * x + m[1, 1]
                y = (m[0, 0] * x + m[0, 1]) / denom
                logs.append(principal_log(denom ** -2))
                vals.append(basis_values(g.center(a1), g.radius(a1), y, M))
            self.blocks[(b, a1)] = _BlockGeometry(ws, np.array(logs), np.array(vals))

    @property
    def inverse_prefixes(self) -> dict[Block, list[Word]]:
        return {blk: [mirror(w[:-1], self.g.r) for w in geo.words]
                for blk, geo in self.blocks.items()}

    # ── Coefficients ─────────────────────────────────────────────────────────

    def coefficients(self, s: complex, derivative: bool = False
                     ) -> tuple[dict[Block, np.ndarray], float]:
        """Per-word scalar blocks C_w[k, m] and the worst trailing-coefficient mass."""
        M, K = self.degree, self.samples
        out: dict[Block, np.ndarray] = {}
        worst = 0.0
        for (b, a1), geo in self.blocks.items():
            weights = np.exp(s * geo.log_deriv)
            if derivative:
                weights = weights * geo.log_deriv
            spectrum = np.fft.fft(weights[:, :, None] * geo.basis, axis=1) / K
            scaled = spectrum[:, : 2 * M + 2, :] * self._out_scale[b][None, :, None]
            head = scaled[:, : M + 1, :]
            total = float(np.sum(np.abs(scaled) ** 2))
            if total > 0:
                worst = max(worst, float(np.sum(np.abs(scaled[:, M + 1:, :]) ** 2)) / total)
            out[(b, a1)] = head
        return out, worst

    def check_truncation(self, mass: float, warnings: list[str]) -> None:
        if mass <= TRUNCATION_MASS_LIMIT:
            return
        message = f"trailing coefficient mass {mass:.2e} at degree {self.degree}"
        if self.strict:
            raise DegreeTooSmall(message)
        warnings.append(message)
        if not self._warned:
            logger.warning("DegreeTooSmall: %s", message)
            self._warned = True

    def coefficient_gram(self, s: complex) -> dict[Block, np.ndarray]:
        """<C_x, C_y> for words x, y in the same block; cached per s."""
        if s not in self._gram_cache:
            coeffs, _ = self.coefficients(s)
            self._gram_cache[s] = {blk: np.einsum("xkm,ykm->xy", c, np.conj(c))
                                   for blk, c in coeffs.items()}
        return self._gram_cache[s]


class TransferOperator:
    """L_{Z,s,rho} for a fixed geometry and representation, assembled per s."""

    def __init__(self, geometry: TransferGeometry, rep: RepProvider):
        self.geometry = geometry
        self.rep = rep
        self._rep_mats: Optional[dict[Block, np.ndarray]] = None

    @property
    def size(self) -> int:
        return self.geometry.g.size * (self.geometry.degree + 1) * self.rep.dimension

    def _rep_matrices(self) -> dict[Block, np.ndarray]:
        if self._rep_mats is None:
            self._rep_mats = {blk: self.rep.matrices(ws)
                              for blk, ws in self.geometry.inverse_prefixes.items()}
        return self._rep_mats

    def matrix(self, s: complex, derivative: bool = False) -> TransferMatrix:
        geo = self.geometry
        M1, d = geo.degree + 1, self.rep.dimension
        side = M1 * d
        A = np.zeros((self.size, self.size), dtype=complex)
        warnings: list[str] = []
        mass = 0.0
        if d > 0:
            coeffs, mass = geo.coefficients(s, derivative)
            geo.check_truncation(mass, warnings)
            for (b, a1), c in coeffs.items():
                block = np.einsum("wkm,wij->kimj", c, self._rep_matrices()[(b, a1)])
                A[(b - 1) * side: b * side, (a1 - 1) * side: a1 * side] += block.reshape(side, side)
        return TransferMatrix(matrix=A, s=complex(s), degree=geo.degree, rep_dimension=d,
                              disks=geo.g.size, label=geo.label, derivative=derivative,
                              truncation_mass=mass, warnings=warnings)

    def hs_norm_squared(self, s: complex) -> float:
        """Frobenius norm squared without forming the matrix.

        ||sum_w C_w (x) R_w||^2 = sum_{x,y} <C_x, C_y> Tr(R_y^H R_x), words in one block.
        """
        if self.rep.dimension == 0:
            return 0.0
        grams = self.geometry.coefficient_gram(s)
        total = 0.0
        for blk, words in self.geometry.inverse_prefixes.items():
            total += float(np.sum(grams[blk] * self.rep.gram(words)).real)
        return max(total, 0.0)


# ── Entry points ─────────────────────────────────────────────────────────────

def assemble(g: SchottkyData, words: Sequence[Word], s: complex, rep: RepProvider,
             degree: Optional[int] = None, samples: Optional[int] = None,
             derivative: bool = False, label: str = "custom") -> TransferMatrix:
    geometry = TransferGeometry(g, words, degree, samples, label=label)
    return TransferOperator(geometry, rep).matrix(s, derivative)


def hs_norm_matrix(T: TransferMatrix) -> float:
    if T.matrix.size == 0:
        return 0.0
    return float(np.linalg.norm(T.matrix, "fro"))


def hs_norm_factored(operator: TransferOperator, s: complex) -> float:
    return float(np.sqrt(operator.hs_norm_squared(s)))


def _polar_nodes(center: float, radius: float, radial: int, angular: int
                 ) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(radial)
    rho = radius * (t + 1) / 2
    rw = w * radius / 2 * rho
    theta = 2 * np.pi * np.arange(angular) / angular
    x = center + rho[:, None] * np.exp(1j * theta)[None, :]
    weights = np.repeat(rw[:, None], angular, axis=1) * (2 * np.pi / angular)
    return x.ravel(), weights.ravel()


def _kernel_sum(g: SchottkyData, blocks: dict[Block, list[Word]], s: complex,
                rep: RepProvider, radial: int, angular: int) -> complex:
    total = 0j
    for (b, a1), ws in blocks.items():
        x, wq = _polar_nodes(g.center(b), g.radius(b), radial, angular)
        images, weights = [], []
        for w in ws:
            m = group_element(w[:-1], g)
            denom = m[1, 0] * x + m[1, 1]
            images.append((m[0, 0] * x + m[0, 1]) / denom)
            weights.append(np.exp(s * principal_log(denom ** -2)))
        images, weights = np.array(images), np.array(weights)
        traces = rep.gram([mirror(w[:-1], g.r) for w in ws])
        for i in range(len(ws)):
            kern = kernel(g.center(a1), g.radius(a1), images[i][None, :], images)
            integrals = (weights[i][None, :] * np.conj(weights) * kern) @ wq
            total += np.sum(traces[i] * integrals)
    return total


def hs_norm_kernel(g: SchottkyData, tau: float, s: complex, rep: RepProvider,
                   radial: Optional[int] = None, angular: Optional[int] = None,
                   strict: Optional[bool] = None, warnings: Optional[list[str]] = None) -> float:
    """HS norm of L_{Z̄(tau),s,rho} from the Bergman-kernel double word sum."""
    strict = STRICT_MODE if strict is None else strict
    nr, na = radial or QUAD_RADIAL, angular or QUAD_ANGULAR
    if rep.dimension == 0:
        return 0.0
    blocks: dict[Block, list[Word]] = {}
    for w in mirror_partition(tau, g):
        blocks.setdefault((w[-1], w[0]), []).append(w)

    coarse = _kernel_sum(g, blocks, s, rep, nr, na)
    fine = _kernel_sum(g, blocks, s, rep, 2 * nr, 2 * na)
    problems = []
    change = abs(fine - coarse) / max(abs(fine), 1e-300)
    if change > QUAD_CHANGE_LIMIT:
        problems.append(f"HS quadrature changed by {change:.2%} on doubling")
    if abs(fine.imag) >= IMAGINARY_RESIDUAL_LIMIT * max(abs(fine.real), 1e-300):
        problems.append(f"HS kernel sum has imaginary residual {abs(fine.imag):.2e} "
                        f"against total {fine.real:.6e}")
    for message in problems:
        if strict:
            raise QuadratureNotConverged(message)
        logger.warning(message)
        if warnings is not None:
            warnings.append(message)
    return float(np.sqrt(max(fine.real, 0.0)))


# ── Matrix dump ──────────────────────────────────────────────────────────────

_HEADER = struct.Struct("<QQQQ")


def write_matrix_dump(T: TransferMatrix, path: str | Path) -> None:
    """32-byte header (rows, cols, degree, rep dimension) then complex128 row-major."""
    rows, cols = T.matrix.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(rows, cols, T.degree, T.rep_dimension))
        fh.write(np.ascontiguousarray(T.matrix, dtype="<c16").tobytes())


def read_matrix_dump(path: str | Path) -> tuple[np.ndarray, int, int]:
    raw = Path(path).read_bytes()
    rows, cols, degree, dim = _HEADER.unpack(raw[: _HEADER.size])
    data = np.frombuffer(raw[_HEADER.size:], dtype="<c16").reshape(rows, cols)
    return data, degree, dim
