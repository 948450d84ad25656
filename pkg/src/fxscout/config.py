"""Engine configuration.

Defaults live here so every front door (CLI, HTTP service, tests) shares the
same shipped values: N = 8 trail steps, K = 4 candidates per round, 64
boundary samples, and the transformation grid used by alignment search.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, asdict


def _log_spaced(lo: float, hi: float, count: int) -> tuple[float, ...]:
    step = (math.log(hi) - math.log(lo)) / (count - 1)
    return tuple(math.exp(math.log(lo) + i * step) for i in range(count))


@dataclass(frozen=True)
class EngineConfig:
    # Representation
    n_steps: int = 8                 # trail divisions per particle lifetime
    m_boundary: int = 64             # boundary samples per shape state

    # Metric
    alpha: float = 0.5               # duration-factor weight
    sigma: float | None = None       # similarity scale; None -> from index
    lambda_mode: str | float = "adaptive"  # rotation-penalty scaling

    # Search
    top_k: int = 4
    extrapolation_coefficients: tuple[float, ...] = (1.5, 2.0, 3.0)
    scale_grid: tuple[float, ...] = field(
        default_factory=lambda: _log_spaced(0.25, 4.0, 13))
    duration_scale_grid: tuple[float, ...] = field(
        default_factory=lambda: _log_spaced(1.0 / 3.0, 3.0, 9))
    regularizer_weight: float = 0.05  # per unit |ln scale|, times sigma

    # Extrapolation
    slog_epsilon: float = 0.01

    # Simulation defaults for extraction
    particle_count: int = 1024
    samples_per_lifetime: int = 16

    # Providers
    provider: str = "mock"           # "mock" or "remote"
    embedding_dimension: int = 256
    provider_timeout: float = 10.0
    max_inflight: int = 4

    def replace(self, **kwargs) -> "EngineConfig":
        data = asdict(self)
        data.update(kwargs)
        data["scale_grid"] = tuple(data["scale_grid"])
        data["duration_scale_grid"] = tuple(data["duration_scale_grid"])
        data["extrapolation_coefficients"] = tuple(
            data["extrapolation_coefficients"])
        return EngineConfig(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(path: str | None = None) -> EngineConfig:
    """Load configuration from a JSON file, falling back to defaults.

    When *path* is None the FXSCOUT_CONFIG environment variable is consulted.
    Unknown keys are rejected to surface typos early.
    """
    if path is None:
        path = os.environ.get("FXSCOUT_CONFIG")
    if path is None:
        return EngineConfig()
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    known = set(EngineConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key in ("scale_grid", "duration_scale_grid",
                "extrapolation_coefficients"):
        if key in data:
            data[key] = tuple(data[key])
    return EngineConfig(**data)
