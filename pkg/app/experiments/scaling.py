"""Growth of |Z̄(tau)| and of the PowerPairs classes as tau shrinks."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

import numpy as np

from app.experiments.runner import config_hash, log_slope, write_csv, write_json
from app.geometry.schottky import load_group
from app.models import HistogramRow, ScalingConfig, ScalingRecord, ScalingRow, SchottkyData
from app.spectral.zeta import hausdorff_dimension
from app.words.power_pairs import power_pairs

logger = logging.getLogger(__name__)

SCALING_COLUMNS = ["tau", "zbar_size", "identity_pairs", "power_pairs", "other_pairs", "three_case_bound"]
HISTOGRAM_COLUMNS = ["tau", "L", "M1", "M2", "R", "q", "count"]


def three_case_bound(tau: float, n: float, delta: float, eps: float, power_count: int) -> float:
    """n tau^-delta + n^eps |PowerPairs| + tau^-2delta / n^(1-eps)."""
    return n * tau ** -delta + n ** eps * power_count + tau ** (-2 * delta) / n ** (1 - eps)


def _exponent(taus: list[float], counts: list[int]) -> Optional[float]:
    if len(taus) < 2 or min(counts) <= 0:
        return None
    return log_slope([1 / t for t in taus], counts)


def run_partition_scaling(config: ScalingConfig, g: Optional[SchottkyData] = None,
                          delta: Optional[float] = None) -> ScalingRecord:
    g = g or load_group(config.group_file)
    delta = delta if delta is not None else hausdorff_dimension(g, degree=config.degree).delta
    rows: list[ScalingRow] = []
    histogram: list[HistogramRow] = []
    for tau in config.taus:
        result = power_pairs(tau, g, config.cap)
        # cover degree whose decay scale n^{-2/delta} equals this tau
        n = tau ** (-delta / 2)
        rows.append(ScalingRow(
            tau=tau, zbar_size=result.zbar_size, identity_pairs=result.identity,
            power_pairs=result.power, other_pairs=result.other,
            three_case_bound=three_case_bound(tau, n, delta, config.epsilon, result.power),
        ))
        for parts, count in sorted(result.histogram.items(),
                                   key=lambda kv: (kv[0].L, kv[0].M1, kv[0].M2, kv[0].R, kv[0].q)):
            histogram.append(HistogramRow(tau=tau, L=parts.L, M1=parts.M1, M2=parts.M2,
                                          R=parts.R, q=parts.q, count=count))

    taus = [r.tau for r in rows]
    zbar_exp = _exponent(taus, [r.zbar_size for r in rows])
    record = ScalingRecord(
        config_hash=config_hash(config), delta=delta, rows=rows, histogram=histogram,
        zbar_exponent=zbar_exp if zbar_exp is not None else float("nan"),
        power_exponent=_exponent(taus, [r.power_pairs for r in rows]),
        identity_exponent=_exponent(taus, [r.identity_pairs for r in rows]) or float("nan"),
    )
    logger.info("Partition scaling: |Z̄| exponent %.4f vs delta %.4f", record.zbar_exponent, delta)
    if np.isfinite(record.zbar_exponent) and abs(record.zbar_exponent - delta) > 0.15 * delta:
        logger.warning("|Z̄| exponent %.4f is more than 15%% away from delta", record.zbar_exponent)
    return record


def write_scaling_outputs(record: ScalingRecord, out: Path) -> list[Path]:
    return [
        write_csv(out / "scaling.csv", [r.model_dump() for r in record.rows], SCALING_COLUMNS),
        write_csv(out / "power_histogram.csv", [h.model_dump() for h in record.histogram],
                  HISTOGRAM_COLUMNS),
        write_json(out / "scaling.json", record),
    ]
