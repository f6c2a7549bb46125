"""FastAPI application: interactive access to the inexpensive toolkit operations."""

from __future__ import annotations

import logging
from typing import Optional

from fastapi import FastAPI, HTTPException

from app.errors import InputError, InvalidGroup
from app.experiments.presets import PRESET_CONFIGS
from app.geometry.schottky import group_from_dict, reference_group, validate
from app.models import (
    CoverRequest,
    DimensionRequest,
    GroupPayload,
    PartitionRequest,
    SchottkyData,
    ZetaKindName,
    ZetaRequest,
)
from app.permutations.permrep import is_transitive, sample_rep
from app.spectral.representations import TrivialRep
from app.spectral.zeta import ZetaKind, evaluate, hausdorff_dimension
from app.words.intervals import mirror_partition, partition, upsilon

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

app = FastAPI(
    title="Schottky Spectral Toolkit",
    description="Dimension, zeta functions and partitions of Schottky surfaces",
    version="1.0.0",
)


def _group(payload: Optional[GroupPayload]) -> SchottkyData:
    if payload is None:
        return reference_group()
    return group_from_dict(payload.model_dump(exclude_none=True))


@app.post("/api/validate")
async def validate_group(req: GroupPayload):
    """Validation report; a group that fails is reported, not rejected."""
    try:
        return validate(_group(req)).model_dump()
    except InvalidGroup as e:
        if e.report is not None:
            return e.report.model_dump()
        raise HTTPException(status_code=422, detail=str(e))
    except InputError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.exception("Validation failed")
        raise HTTPException(status_code=500, detail=str(e))


@app.post("/api/dimension")
async def dimension(req: DimensionRequest):
    try:
        result = hausdorff_dimension(_group(req.group), tol=req.tol, degree=req.taylor_degree)
        return {
            "delta": result.delta,
            "bracket": list(result.bracket),
            "pressure_at_delta": result.pressure_at_delta,
        }
    except InputError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.exception("Dimension computation failed")
        raise HTTPException(status_code=500, detail=str(e))


@app.post("/api/zeta")
async def zeta(req: ZetaRequest):
    """Trivial-representation zeta function at one point."""
    try:
        g = _group(req.group)
        if req.kind == ZetaKindName.REFINED:
            if req.tau is None:
                raise InputError("refined zeta needs tau")
            kind = ZetaKind.refined(req.tau, g)
        else:
            kind = ZetaKind.standard()
        value = evaluate(kind, complex(req.re, req.im), TrivialRep(), g, req.taylor_degree)
        return {"re": value.real, "im": value.imag, "abs": abs(value)}
    except InputError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.exception("Zeta evaluation failed")
        raise HTTPException(status_code=500, detail=str(e))


@app.post("/api/partition")
async def word_partition(req: PartitionRequest):
    try:
        g = _group(req.group)
        words = mirror_partition(req.tau, g) if req.mirror else partition(req.tau, g)
        return {
            "tau": req.tau,
            "mirror": req.mirror,
            "count": len(words),
            "words": [{"word": list(w), "upsilon": upsilon(w, g)} for w in words],
        }
    except InputError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.exception("Partition failed")
        raise HTTPException(status_code=500, detail=str(e))


@app.post("/api/cover")
async def cover(req: CoverRequest):
    try:
        rep = sample_rep(req.n, req.r, req.seed)
        return {**rep.dump(), "r": req.r, "transitive": is_transitive(rep)}
    except InputError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.exception("Cover sampling failed")
        raise HTTPException(status_code=500, detail=str(e))


@app.get("/api/presets")
async def list_presets():
    """Return the experiment scale presets."""
    return [
        {
            "value": scale.value,
            "label": preset.label,
            "taylor_degree": preset.taylor_degree,
            "gap_degrees": preset.gap_degrees,
            "gap_trials": preset.gap_trials,
            "hs_degrees": preset.hs_degrees,
            "hs_trials": preset.hs_trials,
        }
        for scale, preset in PRESET_CONFIGS.items()
    ]


@app.get("/api/health")
async def health():
    return {"status": "ok"}
