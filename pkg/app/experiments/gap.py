"""Spectral-gap experiment: new zeros of zeta_{std0} for random covers in Rect(sigma0, H).

By the factorization Z_{X_n} = Z_X * zeta_{std0}, every zero of zeta_{std0}
is a resonance of the cover that the base surface does not have. Each trial
samples a degree-n cover and counts those zeros; audited trials check the
factorization by locating both sides.
"""

from __future__ import annotations

import logging
import time
from pathlib import Path
from typing import Optional

from app.errors import ToolkitError
from app.experiments.runner import (
    binomial_error,
    config_hash,
    run_tasks,
    write_csv,
    write_dat,
    write_json,
)
from app.geometry.schottky import load_group
from app.models import (
    AuditRow,
    ExperimentRecord,
    GapExperimentConfig,
    GapSummary,
    GapTrialRow,
    PermutationRep,
    Rectangle,
    SchottkyData,
    ZeroRecord,
)
from app.permutations.permrep import derive_seed, identity_rep, is_transitive, sample_rep
from app.spectral.contour import contour_count, locate_zeros
from app.spectral.representations import StandardRep, StdZeroRep, TrivialRep
from app.spectral.zeta import ZetaFunction, ZetaKind, hausdorff_dimension, laplacian_eigenvalues

logger = logging.getLogger(__name__)

GAP_COLUMNS = ["n", "trial", "seed", "transitive", "new_zero_count", "wall_ms"]
ZERO_MATCH_TOL = 1e-5


def counting_region(delta: float, config: GapExperimentConfig) -> Rectangle:
    """[sigma0, delta + margin] x [-H, H]; delta sits inside so the bass zero is counted once."""
    return Rectangle(re_min=config.sigma0_fraction * delta, re_max=delta + config.right_margin,
                     im_min=-config.height, im_max=config.height)


def _trial_rep(n: int, r: int, seed: int, identity_debug: bool) -> PermutationRep:
    return identity_rep(n, r) if identity_debug else sample_rep(n, r, seed)


def _expand(zeros: list[ZeroRecord]) -> list[complex]:
    return [z.s for z in zeros for _ in range(z.multiplicity)]


def subtract_zeros(full: list[ZeroRecord], base: list[ZeroRecord],
                   tol: float = ZERO_MATCH_TOL) -> list[ZeroRecord]:
    """Multiset difference full - base, matching points within tol."""
    remaining = _expand(full)
    for b in _expand(base):
        hit = next((i for i, z in enumerate(remaining) if abs(z - b) <= tol), None)
        if hit is not None:
            remaining.pop(hit)
    return [ZeroRecord(re=z.real, im=z.imag) for z in remaining]


def same_zeros(a: list[ZeroRecord], b: list[ZeroRecord], tol: float = ZERO_MATCH_TOL) -> bool:
    left, right = _expand(a), _expand(b)
    if len(left) != len(right):
        return False
    for z in left:
        hit = next((i for i, w in enumerate(right) if abs(z - w) <= tol), None)
        if hit is None:
            return False
        right.pop(hit)
    return True


# ── Workers (module level so the process pool can pickle them) ───────────────

def _gap_trial(task: tuple) -> dict:
    group, degree, nodes, region, n, trial, seed, identity_debug, sigma0, delta, strict = task
    g = SchottkyData(**group)
    rect = Rectangle(**region)
    row = GapTrialRow(n=n, trial=trial, seed=seed)
    started = time.perf_counter()
    try:
        rep = _trial_rep(n, g.r, seed, identity_debug)
        row.transitive = is_transitive(rep)
        zeta = ZetaFunction(ZetaKind.standard(), g, StdZeroRep(rep), degree, strict=strict)
        counted = contour_count(zeta, rect, nodes)
        row.new_zero_count = counted.winding
        if row.new_zero_count:
            zeros = locate_zeros(zeta, rect, nodes=nodes).zeros
            if counted.region != rect:
                # the count ran on a dilation; keep only zeros of the requested rectangle
                zeros = [z for z in zeros if rect.contains(z.s)]
                row.new_zero_count = sum(z.multiplicity for z in zeros)
            row.new_eigenvalues = laplacian_eigenvalues(zeros, sigma0, upper=delta)
    except Exception as exc:
        logger.exception("Trial n=%d #%d failed", n, trial)
        row.error = f"{type(exc).__name__}: {exc}"
    row.wall_ms = round((time.perf_counter() - started) * 1000, 3)
    return row.model_dump()


def _audit_trial(task: tuple) -> dict:
    group, degree, nodes, region, n, trial, seed, identity_debug, base, strict = task
    g = SchottkyData(**group)
    rect = Rectangle(**region)
    base_zeros = [ZeroRecord(**z) for z in base]
    rep = _trial_rep(n, g.r, seed, identity_debug)
    kind = ZetaKind.standard()
    try:
        std0 = locate_zeros(ZetaFunction(kind, g, StdZeroRep(rep), degree, strict=strict),
                            rect, nodes=nodes).zeros
        full = locate_zeros(ZetaFunction(kind, g, StandardRep(rep), degree, strict=strict),
                            rect, nodes=nodes).zeros
    except ToolkitError:
        logger.exception("Audit n=%d #%d failed", n, trial)
        return AuditRow(n=n, trial=trial, seed=seed, matched=False).model_dump()
    difference = subtract_zeros(full, base_zeros)
    return AuditRow(n=n, trial=trial, seed=seed, matched=same_zeros(std0, difference),
                    std0_zeros=std0, difference_zeros=difference).model_dump()


# ── Aggregation ──────────────────────────────────────────────────────────────

def summarize(rows: list[GapTrialRow], degrees: list[int]) -> list[GapSummary]:
    out = []
    for n in degrees:
        mine = [r for r in rows if r.n == n]
        done = [r for r in mine if r.error is None]
        k = len(done)
        frac = sum(1 for r in done if r.new_zero_count > 0) / k if k else 0.0
        out.append(GapSummary(
            n=n, trials=len(mine), completed=k,
            fraction_with_new_zeros=frac,
            binomial_error=binomial_error(frac, k),
            mean_count=sum(r.new_zero_count for r in done) / k if k else 0.0,
            transitive_fraction=sum(1 for r in done if r.transitive) / k if k else 0.0,
        ))
    return out


def trend_holds(summaries: list[GapSummary], sigmas: float = 2.0) -> bool:
    """Fraction with new zeros is non-increasing in n up to the combined binomial error."""
    for prev, nxt in zip(summaries, summaries[1:]):
        slack = sigmas * (prev.binomial_error ** 2 + nxt.binomial_error ** 2) ** 0.5
        if nxt.fraction_with_new_zeros > prev.fraction_with_new_zeros + slack:
            return False
    return True


def run_gap_experiment(config: GapExperimentConfig, g: Optional[SchottkyData] = None,
                       delta: Optional[float] = None) -> ExperimentRecord:
    g = g or load_group(config.group_file)
    delta = delta if delta is not None else hausdorff_dimension(g, degree=config.taylor_degree).delta
    region = counting_region(delta, config)
    sigma0 = config.sigma0_fraction * delta
    logger.info("Gap experiment: delta=%.8f, region %s, degrees %s x %d trials",
                delta, region, config.degrees, config.trials)

    base = locate_zeros(ZetaFunction(ZetaKind.standard(), g, TrivialRep(), config.taylor_degree,
                                     strict=config.strict),
                        region, nodes=config.contour_nodes)
    group, rect = g.model_dump(), region.model_dump()
    tasks = [
        (group, config.taylor_degree, config.contour_nodes, rect, n, trial,
         derive_seed(config.base_seed, n, trial), config.identity_debug, sigma0, delta,
         config.strict)
        for n in config.degrees for trial in range(config.trials)
    ]
    rows = [GapTrialRow(**row) for row in run_tasks(_gap_trial, tasks, config.jobs)]

    audit_n = next((n for n in config.degrees if n > 1), None)
    audits: list[AuditRow] = []
    if audit_n is not None and config.audit_trials:
        base_dump = [z.model_dump() for z in base.zeros]
        audit_tasks = [
            (group, config.taylor_degree, config.contour_nodes, rect, audit_n, trial,
             derive_seed(config.base_seed, audit_n, trial), config.identity_debug, base_dump,
             config.strict)
            for trial in range(min(config.audit_trials, config.trials))
        ]
        audits = [AuditRow(**a) for a in run_tasks(_audit_trial, audit_tasks, config.jobs)]

    summaries = summarize(rows, config.degrees)
    warnings = [f"trial n={r.n} #{r.trial}: {r.error}" for r in rows if r.error]
    warnings += [f"audit n={a.n} #{a.trial} did not match" for a in audits if not a.matched]
    for message in warnings:
        logger.warning(message)
    record = ExperimentRecord(
        config_hash=config_hash(config), config=config, delta=delta, region=region,
        base_zeros=base.zeros, rows=rows, summaries=summaries, audits=audits,
        trend_ok=trend_holds(summaries), warnings=warnings,
    )
    logger.info("Gap experiment finished: %s", [(s.n, s.fraction_with_new_zeros) for s in summaries])
    return record


def write_gap_outputs(record: ExperimentRecord, out: Path) -> list[Path]:
    rows = [r.model_dump() for r in record.rows]
    return [
        write_csv(out / "gap_trials.csv", rows, GAP_COLUMNS),
        write_json(out / "gap_summary.json", record),
        write_dat(out / "gap_fraction.dat", ["n", "fraction", "binomial_error", "mean_count"],
                  [(s.n, s.fraction_with_new_zeros, s.binomial_error, s.mean_count)
                   for s in record.summaries]),
    ]
