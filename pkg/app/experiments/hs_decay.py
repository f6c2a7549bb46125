"""Decay of E ||L_{tau,s,rho_n^0}||_HS^2 in the cover degree n, with tau = n^{-2/delta}.

The squared norm is computed from block Gram matrices, so the coefficient
part (which does not see the representation) is built once per (n, s) and
reused for every sampled cover.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from app.experiments.runner import config_hash, log_slope, run_tasks, write_csv, write_dat, write_json
from app.geometry.schottky import load_group
from app.models import HsDecayConfig, HsDecayFit, HsDecayRecord, HsDecayRow, PermutationRep, SchottkyData
from app.permutations.permrep import derive_seed, sample_rep
from app.spectral.representations import StdZeroRep
from app.spectral.transfer import TransferGeometry, TransferOperator
from app.spectral.zeta import ZetaKind, hausdorff_dimension

logger = logging.getLogger(__name__)

HS_COLUMNS = ["n", "sigma", "t", "tau", "words", "mean_hs2", "stderr", "majorant"]


def decay_tau(n: int, delta: float) -> float:
    return float(n ** (-2.0 / delta))


def hs_majorant(geometry: TransferGeometry, s: complex, reps: Sequence[PermutationRep],
                tau: float) -> float:
    """C tau^{2 sigma} sum over same-block pairs of |E Tr rho^0(gamma_{a1'}^-1 gamma_{a2'})|.

    The expectation is the sample mean over ``reps``; C tau^{2 sigma} is the
    largest coefficient pairing |<C_x, C_y>|.
    """
    if not reps or reps[0].n == 1:
        return 0.0
    grams = geometry.coefficient_gram(s)
    scale = max(float(np.abs(gc).max()) for gc in grams.values())
    total = 0.0
    for words in geometry.inverse_prefixes.values():
        mean_trace = np.mean([StdZeroRep(rep).gram(words) for rep in reps], axis=0)
        total += float(np.abs(mean_trace).sum())
    logger.debug("majorant constant C = %.3e at tau=%g", scale / tau ** (2 * s.real), tau)
    return scale * total


def _degree_rows(task: tuple) -> list[dict]:
    group, n, delta, sigmas, t_values, degree, trials, base_seed, strict = task
    g = SchottkyData(**group)
    tau = decay_tau(n, delta)
    if n == 1:
        # std0 of S_1 is zero-dimensional: the operator vanishes identically
        return [HsDecayRow(n=1, sigma=sigma, t=t, tau=tau, words=0, mean_hs2=0.0, stderr=0.0).model_dump()
                for sigma in sigmas for t in t_values]
    kind = ZetaKind.refined(tau, g)
    geometry = TransferGeometry(g, kind.words(g), degree, label=kind.label, strict=strict)
    reps = [sample_rep(n, g.r, derive_seed(base_seed, n, trial)) for trial in range(trials)]
    operators = [TransferOperator(geometry, StdZeroRep(rep)) for rep in reps]
    rows = []
    for sigma in sigmas:
        for t in t_values:
            s = complex(sigma, t)
            values = np.array([op.hs_norm_squared(s) for op in operators])
            stderr = float(values.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
            rows.append(HsDecayRow(
                n=n, sigma=sigma, t=t, tau=tau, words=len(geometry.words),
                mean_hs2=float(values.mean()), stderr=stderr,
                majorant=hs_majorant(geometry, s, reps, tau),
            ).model_dump())
    logger.info("HS decay n=%d: tau=%.3g, |Z̄|=%d", n, tau, len(geometry.words))
    return rows


def fit_slopes(rows: list[HsDecayRow]) -> list[HsDecayFit]:
    fits = []
    for key in sorted({(r.sigma, r.t) for r in rows}):
        usable = [r for r in rows if (r.sigma, r.t) == key and r.mean_hs2 > 0]
        if len(usable) < 2:
            continue
        fits.append(HsDecayFit(sigma=key[0], t=key[1],
                               slope=log_slope([r.n for r in usable], [r.mean_hs2 for r in usable])))
    return fits


def run_hs_decay(config: HsDecayConfig, g: Optional[SchottkyData] = None,
                 delta: Optional[float] = None) -> HsDecayRecord:
    g = g or load_group(config.group_file)
    delta = delta if delta is not None else hausdorff_dimension(g, degree=config.taylor_degree).delta
    sigmas = [f * delta for f in config.sigma_fractions]
    group = g.model_dump()
    tasks = [(group, n, delta, sigmas, config.t_values, config.taylor_degree, config.trials,
              config.base_seed, config.strict) for n in config.degrees]
    rows = [HsDecayRow(**row) for batch in run_tasks(_degree_rows, tasks, config.jobs) for row in batch]
    fits = fit_slopes(rows)
    warnings = [f"slope {f.slope:.3f} at sigma={f.sigma:.4f}, t={f.t} is not negative"
                for f in fits if f.slope >= 0]
    for message in warnings:
        logger.warning(message)
    return HsDecayRecord(config_hash=config_hash(config), delta=delta, rows=rows, fits=fits,
                         warnings=warnings)


def write_hs_outputs(record: HsDecayRecord, out: Path) -> list[Path]:
    return [
        write_csv(out / "hs_decay.csv", [r.model_dump() for r in record.rows], HS_COLUMNS),
        write_json(out / "hs_decay.json", record),
        write_dat(out / "hs_decay.dat", ["n", "sigma", "t", "mean_hs2", "stderr"],
                  [(r.n, r.sigma, r.t, r.mean_hs2, r.stderr) for r in record.rows]),
    ]
