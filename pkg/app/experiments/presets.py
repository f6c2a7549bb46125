"""Experiment scale presets: discretization and sampling sizes per run scale.

A preset fills in the numbers a config file leaves out, so
``gap-experiment --preset quick`` is a smoke run and ``acceptance`` matches
the sizes the trend checks are stated for.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from app.models import ExperimentScale


@dataclass
class PresetConfig:
    """Sizes for the gap and HS-decay pipelines."""
    taylor_degree: int = 12
    gap_degrees: list[int] = field(default_factory=lambda: [4, 8, 16])
    gap_trials: int = 30
    contour_nodes: int = 256
    hs_degrees: list[int] = field(default_factory=lambda: [4, 8, 16, 32])
    hs_trials: int = 20
    label: str = "Desk"


PRESET_CONFIGS: dict[ExperimentScale, PresetConfig] = {
    ExperimentScale.QUICK: PresetConfig(
        taylor_degree=8,
        gap_degrees=[2, 4],
        gap_trials=3,
        contour_nodes=128,
        hs_degrees=[2, 4, 8],
        hs_trials=3,
        label="Quick smoke run",
    ),
    ExperimentScale.DESK: PresetConfig(
        taylor_degree=12,
        gap_degrees=[4, 8, 16],
        gap_trials=20,
        contour_nodes=256,
        hs_degrees=[4, 8, 16],
        hs_trials=10,
        label="Desk scale",
    ),
    ExperimentScale.ACCEPTANCE: PresetConfig(
        taylor_degree=16,
        gap_degrees=[4, 8, 16],
        gap_trials=30,
        contour_nodes=256,
        hs_degrees=[4, 8, 16, 32],
        hs_trials=20,
        label="Acceptance trend checks",
    ),
}


def get_preset_config(scale: ExperimentScale) -> PresetConfig:
    return PRESET_CONFIGS.get(scale, PRESET_CONFIGS[ExperimentScale.DESK])
