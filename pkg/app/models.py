"""Data models for the Schottky spectral toolkit."""

from __future__ import annotations

from enum import Enum
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator


# ── Enums ────────────────────────────────────────────────────────────────────

class ZetaKindName(str, Enum):
    STANDARD = "standard"
    REFINED = "refined"


class RepKind(str, Enum):
    TRIVIAL = "trivial"
    STD = "std"
    STD0 = "std0"


class TraceMode(str, Enum):
    MONTE_CARLO = "monte_carlo"
    EXHAUSTIVE = "exhaustive"


class PairClass(str, Enum):
    IDENTITY = "identity"
    POWER = "power"
    OTHER = "other"


class GeodesicConvention(str, Enum):
    CLASSES = "classes"
    INVERSE_PAIRS = "inverse_pairs"


class ExperimentScale(str, Enum):
    QUICK = "quick"
    DESK = "desk"
    ACCEPTANCE = "acceptance"


# ── Group data ───────────────────────────────────────────────────────────────

class SchottkyData(BaseModel):
    """Disks, pairing and SL(2,R) generators of a Schottky group.

    Letters are 1-based; ``generators[a - 1]`` is the matrix of letter ``a``.
    """

    model_config = ConfigDict(frozen=True)

    r: int = Field(..., ge=1)
    centers: list[float]
    radii: list[float]
    generators: list[list[list[float]]]

    _centers: np.ndarray = PrivateAttr()
    _radii: np.ndarray = PrivateAttr()
    _matrices: np.ndarray = PrivateAttr()

    @model_validator(mode="after")
    def _check_shapes(self) -> "SchottkyData":
        size = 2 * self.r
        if len(self.centers) != size or len(self.radii) != size or len(self.generators) != size:
            raise ValueError(f"expected {size} centers, radii and generators")
        for m in self.generators:
            if len(m) != 2 or any(len(row) != 2 for row in m):
                raise ValueError("generators must be 2x2 matrices")
        return self

    def model_post_init(self, __context) -> None:
        self._centers = np.asarray(self.centers, dtype=float)
        self._radii = np.asarray(self.radii, dtype=float)
        self._matrices = np.asarray(self.generators, dtype=float)

    @property
    def size(self) -> int:
        return 2 * self.r

    @property
    def center_array(self) -> np.ndarray:
        return self._centers

    @property
    def radius_array(self) -> np.ndarray:
        return self._radii

    @property
    def matrices(self) -> np.ndarray:
        return self._matrices

    def center(self, a: int) -> float:
        return float(self._centers[a - 1])

    def radius(self, a: int) -> float:
        return float(self._radii[a - 1])

    def generator(self, a: int) -> np.ndarray:
        return self._matrices[a - 1]


class InvariantCheck(BaseModel):
    name: str
    passed: bool
    residual: float = 0.0
    detail: str = ""


class ValidationReport(BaseModel):
    passed: bool = False
    checks: list[InvariantCheck] = Field(default_factory=list)

    def failures(self) -> list[InvariantCheck]:
        return [c for c in self.checks if not c.passed]


class IntervalData(BaseModel):
    lo: float
    hi: float

    @property
    def upsilon(self) -> float:
        return self.hi - self.lo


class EstimatedConstants(BaseModel):
    """Finite-depth empirical estimates of the distortion and derivative constants."""

    depth: int
    k0: float
    k1: float
    k2: float
    k3: float
    theta: Optional[float] = None
    theta_bar: Optional[float] = None
    distortion: float
    c2: Optional[float] = None
    window_d: float = 1.0
    window_kappa: float = 0.0
    taus: list[float] = Field(default_factory=list)

    def report(self) -> dict[str, dict[str, float]]:
        names = ["k0", "k1", "k2", "k3", "theta", "theta_bar", "distortion",
                 "c2", "window_d", "window_kappa"]
        out: dict[str, dict[str, float]] = {}
        for name in names:
            value = getattr(self, name)
            if value is not None:
                out[name] = {"estimate": float(value), "depth": self.depth}
        return out


# ── Permutation model ────────────────────────────────────────────────────────

class PermutationRep(BaseModel):
    """r permutations of {0..n-1}, the images of the generators 1..r."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    seed: int = 0
    images: list[list[int]]

    _images: np.ndarray = PrivateAttr()
    _inverses: np.ndarray = PrivateAttr()

    @field_validator("images")
    @classmethod
    def _bijections(cls, v: list[list[int]]) -> list[list[int]]:
        for perm in v:
            if sorted(perm) != list(range(len(perm))):
                raise ValueError("each image must be a permutation of 0..n-1")
        return v

    @model_validator(mode="after")
    def _degree_matches(self) -> "PermutationRep":
        if any(len(p) != self.n for p in self.images):
            raise ValueError("image length differs from n")
        return self

    def model_post_init(self, __context) -> None:
        self._images = np.asarray(self.images, dtype=np.int64).reshape(len(self.images), self.n)
        self._inverses = np.argsort(self._images, axis=1)

    @property
    def r(self) -> int:
        return len(self.images)

    @property
    def image_array(self) -> np.ndarray:
        return self._images

    @property
    def inverse_array(self) -> np.ndarray:
        return self._inverses

    def dump(self) -> dict:
        return {"n": self.n, "seed": self.seed,
                "images": [[i + 1 for i in perm] for perm in self.images]}


class TraceEstimate(BaseModel):
    mean: float
    stderr: float = 0.0
    trials: int
    mode: TraceMode


# ── Regions and zeros ────────────────────────────────────────────────────────

class Rectangle(BaseModel):
    shape: Literal["rectangle"] = "rectangle"
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    @model_validator(mode="after")
    def _ordered(self) -> "Rectangle":
        if not (self.re_min <= self.re_max and self.im_min <= self.im_max):
            raise ValueError("rectangle corners must be ordered")
        return self

    def contains(self, s: complex) -> bool:
        return self.re_min <= s.real <= self.re_max and self.im_min <= s.imag <= self.im_max

    @property
    def area(self) -> float:
        """Zero for a segment or a point, which enclose no zeros."""
        return (self.re_max - self.re_min) * (self.im_max - self.im_min)

    @property
    def center(self) -> complex:
        return complex((self.re_min + self.re_max) / 2, (self.im_min + self.im_max) / 2)

    @property
    def diameter(self) -> float:
        return float(np.hypot(self.re_max - self.re_min, self.im_max - self.im_min))

    def dilated(self, factor: float) -> "Rectangle":
        hw = (self.re_max - self.re_min) * factor / 2
        hh = (self.im_max - self.im_min) * factor / 2
        c = self.center
        return Rectangle(re_min=c.real - hw, re_max=c.real + hw,
                         im_min=c.imag - hh, im_max=c.imag + hh)


class Disk(BaseModel):
    shape: Literal["disk"] = "disk"
    center_re: float
    center_im: float = 0.0
    radius: float = Field(..., gt=0)

    @property
    def center(self) -> complex:
        return complex(self.center_re, self.center_im)

    @property
    def diameter(self) -> float:
        return 2 * self.radius

    @property
    def area(self) -> float:
        return float(np.pi * self.radius ** 2)

    def contains(self, s: complex) -> bool:
        return abs(s - self.center) <= self.radius

    def dilated(self, factor: float) -> "Disk":
        return Disk(center_re=self.center_re, center_im=self.center_im,
                    radius=self.radius * factor)

    def bounding_rectangle(self, margin: float = 0.0) -> Rectangle:
        half = self.radius * (1 + margin)
        return Rectangle(re_min=self.center_re - half, re_max=self.center_re + half,
                         im_min=self.center_im - half, im_max=self.center_im + half)


Region = Union[Rectangle, Disk]


class ZeroRecord(BaseModel):
    re: float
    im: float
    multiplicity: int = 1
    residual: float = 0.0

    @property
    def s(self) -> complex:
        return complex(self.re, self.im)


class ZeroReport(BaseModel):
    region: Union[Rectangle, Disk] = Field(..., discriminator="shape")
    winding: int
    zeros: list[ZeroRecord] = Field(default_factory=list)

    @property
    def multiplicity_sum(self) -> int:
        return sum(z.multiplicity for z in self.zeros)


# ── Experiments ──────────────────────────────────────────────────────────────

class GapExperimentConfig(BaseModel):
    group_file: Optional[str] = None
    degrees: list[int] = Field(default_factory=lambda: [4, 8, 16])
    trials: int = Field(30, ge=1)
    sigma0_fraction: float = 0.8
    height: float = Field(1.0, gt=0)
    taylor_degree: int = Field(12, ge=1)
    base_seed: int = 0
    contour_nodes: int = Field(256, ge=16)
    right_margin: float = Field(0.1, gt=0)
    audit_trials: int = Field(3, ge=0)
    identity_debug: bool = False
    strict: bool = False
    jobs: Optional[int] = None

    @field_validator("sigma0_fraction")
    @classmethod
    def _sigma0_range(cls, v: float) -> float:
        if not 0.75 < v < 1.0:
            raise ValueError("sigma0_fraction must lie in (3/4, 1)")
        return v

    @field_validator("degrees")
    @classmethod
    def _sorted_degrees(cls, v: list[int]) -> list[int]:
        if not v or any(n < 1 for n in v):
            raise ValueError("degrees must be positive")
        if v != sorted(v):
            raise ValueError("degrees must be sorted ascending")
        return v


class GapTrialRow(BaseModel):
    n: int
    trial: int
    seed: int
    transitive: bool = False
    new_zero_count: int = 0
    wall_ms: float = 0.0
    new_eigenvalues: list[float] = Field(default_factory=list)
    error: Optional[str] = None


class GapSummary(BaseModel):
    n: int
    trials: int
    completed: int
    fraction_with_new_zeros: float
    binomial_error: float
    mean_count: float
    transitive_fraction: float


class AuditRow(BaseModel):
    n: int
    trial: int
    seed: int
    matched: bool
    std0_zeros: list[ZeroRecord] = Field(default_factory=list)
    difference_zeros: list[ZeroRecord] = Field(default_factory=list)


class ExperimentRecord(BaseModel):
    config_hash: str
    config: GapExperimentConfig
    delta: float
    region: Rectangle
    base_zeros: list[ZeroRecord] = Field(default_factory=list)
    rows: list[GapTrialRow] = Field(default_factory=list)
    summaries: list[GapSummary] = Field(default_factory=list)
    audits: list[AuditRow] = Field(default_factory=list)
    trend_ok: bool = True
    warnings: list[str] = Field(default_factory=list)


class HsDecayConfig(BaseModel):
    group_file: Optional[str] = None
    degrees: list[int] = Field(default_factory=lambda: [4, 8, 16, 32])
    trials: int = Field(20, ge=1)
    sigma_fractions: list[float] = Field(default_factory=lambda: [0.9])
    t_values: list[float] = Field(default_factory=lambda: [0.0])
    taylor_degree: int = Field(12, ge=1)
    base_seed: int = 0
    strict: bool = False
    jobs: Optional[int] = None

    @field_validator("sigma_fractions")
    @classmethod
    def _sigma_range(cls, v: list[float]) -> list[float]:
        if not v or any(f <= 0.75 for f in v):
            raise ValueError("sigma fractions must exceed 3/4")
        return v


class HsDecayRow(BaseModel):
    n: int
    sigma: float
    t: float
    tau: float
    words: int
    mean_hs2: float
    stderr: float
    majorant: float = 0.0


class HsDecayFit(BaseModel):
    sigma: float
    t: float
    slope: float


class HsDecayRecord(BaseModel):
    config_hash: str
    delta: float
    rows: list[HsDecayRow] = Field(default_factory=list)
    fits: list[HsDecayFit] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)


class ScalingConfig(BaseModel):
    group_file: Optional[str] = None
    taus: list[float] = Field(default_factory=lambda: [10**-2, 10**-2.5, 10**-3, 10**-3.5])
    cap: Optional[int] = None
    epsilon: float = 0.3
    degree: int = 16


class ScalingRow(BaseModel):
    tau: float
    zbar_size: int
    identity_pairs: int
    power_pairs: int
    other_pairs: int
    three_case_bound: float = 0.0


class HistogramRow(BaseModel):
    tau: float
    L: int
    M1: int
    M2: int
    R: int
    q: int
    count: int


class ScalingRecord(BaseModel):
    config_hash: str
    delta: float
    rows: list[ScalingRow] = Field(default_factory=list)
    histogram: list[HistogramRow] = Field(default_factory=list)
    zbar_exponent: float = 0.0
    power_exponent: Optional[float] = None
    identity_exponent: float = 0.0


class JensenAudit(BaseModel):
    center_re: float
    center_im: float = 0.0
    radius: float
    lhs: float
    rhs: float
    residual: float
    zeros: list[ZeroRecord] = Field(default_factory=list)
    count_bound: Optional[float] = None


# ── CLI ──────────────────────────────────────────────────────────────────────

class CliConfig(BaseModel):
    """Parameters of one CLI invocation, checked before any computation starts."""

    subcommand: str
    group_file: Optional[str] = None
    taylor_degree: int = Field(16, ge=1)
    tau: Optional[float] = None
    taus: list[float] = Field(default_factory=list)
    s_re: Optional[float] = None
    s_im: float = 0.0
    sigma0_fraction: Optional[float] = None
    height: float = Field(1.0, gt=0)
    n: Optional[int] = Field(None, ge=1)
    degrees: list[int] = Field(default_factory=list)
    trials: Optional[int] = Field(None, ge=1)
    tol: float = Field(1e-10, gt=0)
    seed: int = Field(0, ge=0)
    out: Optional[str] = None
    stdout: bool = False
    strict: bool = False
    jobs: Optional[int] = Field(None, ge=1)

    @field_validator("tau")
    @classmethod
    def _tau_positive(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and v <= 0:
            raise ValueError("tau must be positive")
        return v

    @field_validator("taus")
    @classmethod
    def _taus_positive(cls, v: list[float]) -> list[float]:
        if any(t <= 0 for t in v):
            raise ValueError("every tau must be positive")
        return v

    @field_validator("sigma0_fraction")
    @classmethod
    def _sigma0_range(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not 0.75 < v < 1.0:
            raise ValueError("sigma0_fraction must lie in (3/4, 1)")
        return v

    @field_validator("degrees")
    @classmethod
    def _degrees_positive(cls, v: list[int]) -> list[int]:
        if any(n < 1 for n in v):
            raise ValueError("cover degrees must be positive")
        return v


# ── HTTP requests ────────────────────────────────────────────────────────────

class GroupPayload(BaseModel):
    """Group as in a group file; ``generators`` may be omitted."""

    centers: list[float]
    radii: list[float]
    r: Optional[int] = None
    generators: Optional[list[list[list[float]]]] = None


class DimensionRequest(BaseModel):
    group: Optional[GroupPayload] = None
    taylor_degree: int = Field(16, ge=1, le=64)
    tol: float = Field(1e-10, gt=0)


class ZetaRequest(BaseModel):
    group: Optional[GroupPayload] = None
    kind: ZetaKindName = ZetaKindName.STANDARD
    tau: Optional[float] = Field(None, gt=0)
    re: float
    im: float = 0.0
    taylor_degree: int = Field(16, ge=1, le=64)


class PartitionRequest(BaseModel):
    group: Optional[GroupPayload] = None
    tau: float = Field(..., gt=0)
    mirror: bool = False


class CoverRequest(BaseModel):
    n: int = Field(..., ge=1, le=10_000)
    r: int = Field(2, ge=1)
    seed: int = Field(0, ge=0)
