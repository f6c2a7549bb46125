"""Shared plumbing for the experiment pipelines: hashing, workers, persistence."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from app.config import JOBS, OUTPUT_ROOT

logger = logging.getLogger(__name__)


def config_hash(config: BaseModel) -> str:
    """sha256 of the config's canonical JSON (sorted keys, no worker count)."""
    payload = config.model_dump(mode="json", exclude={"jobs"})
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def run_tasks(worker: Callable[[tuple], Any], tasks: Sequence[tuple],
              jobs: Optional[int] = None) -> list[Any]:
    """Apply worker to every task; results come back in task order whatever the pool does."""
    jobs = jobs or JOBS
    if jobs <= 1 or len(tasks) <= 1:
        return [worker(task) for task in tasks]

    results: list[Any] = [None] * len(tasks)
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as executor:
        futures = {executor.submit(worker, task): i for i, task in enumerate(tasks)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return results


def binomial_error(p: float, n: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / n) if n > 0 else 0.0


def log_slope(x: Iterable[float], y: Iterable[float]) -> float:
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(list(x)), np.log(list(y)), 1)[0])


# ── Persistence ──────────────────────────────────────────────────────────────

def output_dir(out: Optional[str], name: str) -> Path:
    """``out`` as given, else a fresh timestamped directory under OUTPUT_ROOT."""
    if out:
        path = Path(out)
    else:
        path = Path(OUTPUT_ROOT) / f"{name}-{datetime.now().strftime('%Y%m%dT%H%M%S%f')}"
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_csv(path: Path, rows: Sequence[dict], columns: Sequence[str]) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore",
                                lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    logger.info("Wrote %d rows to %s", len(rows), path)
    return path


def write_json(path: Path, model: BaseModel) -> Path:
    path.write_text(model.model_dump_json(indent=2), encoding="utf-8")
    logger.info("Wrote %s", path)
    return path


def write_dat(path: Path, columns: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    """Whitespace-separated columns with a commented header, ready for gnuplot."""
    lines = ["# " + " ".join(columns)]
    lines += [" ".join(f"{v:.10g}" for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
