"""Distance stack over structured representations.

Kinematic distance is a semi-metric: per-step Hausdorff distances between the
evolved boundary shapes plus a rotation penalty, summed over the trail and
multiplied by a non-linear duration factor. It satisfies non-negativity,
symmetry, and identity of indiscernibles; the triangle inequality is neither
claimed nor tested.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .kinematics import (DomainError, Kinematics, ParameterError, ShapeState,
                         Trail, evolved_states)
from .semantics import SemanticDescriptor, semantic_similarity


@dataclass(frozen=True)
class MetricParams:
    lambda_mode: str | float = "adaptive"  # rotation-penalty scaling
    alpha: float = 0.5                     # duration-factor weight
    m_boundary: int = 64                   # boundary samples per shape
    sigma: float = 1.0                     # similarity scale, meters

    def __post_init__(self):
        if self.alpha < 0:
            raise ParameterError("alpha must be >= 0")
        if self.m_boundary < 4:
            raise ParameterError("m_boundary must be >= 4")
        if self.sigma <= 0:
            raise ParameterError("sigma must be > 0")

    @classmethod
    def from_config(cls, config, sigma: float | None = None) -> "MetricParams":
        return cls(lambda_mode=config.lambda_mode, alpha=config.alpha,
                   m_boundary=config.m_boundary,
                   sigma=sigma if sigma is not None
                   else (config.sigma or 1.0))


@dataclass(frozen=True)
class StructuredRepresentation:
    """The search currency: semantic descriptor + kinematic behavior."""

    semantic: SemanticDescriptor | None = None
    kinematics: Kinematics | None = None

    def __post_init__(self):
        if self.semantic is None and self.kinematics is None:
            raise DomainError(
                "a representation needs at least one component")


# --- Hausdorff ---------------------------------------------------------------

def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two 3D point sets."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise DomainError("point sets must be nonempty")
    d = cdist(a.reshape(-1, 3), b.reshape(-1, 3))
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def _as_cartesian(state) -> np.ndarray:
    if isinstance(state, ShapeState):
        return state.to_cartesian()
    return np.asarray(state, dtype=float)


def _equatorial_radius(state: ShapeState) -> float:
    return float((state.r * np.sin(state.theta)).max())


def _lambda_values(lambda_mode, states_c: Sequence[ShapeState],
                   states_i: Sequence[ShapeState] | None = None) -> np.ndarray:
    """Rotation-penalty weight per step.

    Adaptive mode scales by half the larger of the two shapes' equatorial
    radii, giving the penalty length units commensurate with the arc
    displacement a rotation would cause while keeping the distance symmetric.
    """
    n = len(states_c)
    if lambda_mode == "adaptive":
        radii = np.array([_equatorial_radius(s) for s in states_c])
        if states_i is not None:
            radii = np.maximum(
                radii, [_equatorial_radius(s) for s in states_i])
        return 0.5 * radii
    return np.full(n, float(lambda_mode))


def shape_step_distance(sc, si, delta_phi_j: float,
                        params: MetricParams,
                        lambda_j: float | None = None) -> float:
    """Eq.-style per-step distance: Hausdorff plus rotation penalty."""
    if lambda_j is None:
        if params.lambda_mode == "adaptive":
            radii = []
            for state in (sc, si):
                if isinstance(state, ShapeState):
                    radii.append(_equatorial_radius(state))
                else:
                    pts = _as_cartesian(state)
                    radii.append(float(np.hypot(pts[:, 0], pts[:, 1]).max()))
            lambda_j = 0.5 * max(radii)
        else:
            lambda_j = float(params.lambda_mode)
    h = hausdorff(_as_cartesian(sc), _as_cartesian(si))
    return h + lambda_j * (1.0 - math.cos(delta_phi_j))


def resample_trail(trail: Trail, n_steps: int) -> Trail:
    """Linear resampling of cumulative deltas to a different step count."""
    if len(trail) == n_steps:
        return trail
    cum = np.vstack([np.zeros(3), np.cumsum(trail.steps, axis=0)])
    src = np.linspace(0.0, 1.0, len(trail) + 1)
    dst = np.linspace(0.0, 1.0, n_steps + 1)
    resampled = np.stack([np.interp(dst, src, cum[:, k]) for k in range(3)],
                         axis=1)
    return Trail(np.diff(resampled, axis=0))


def _harmonized(kc: Kinematics, ki: Kinematics) -> tuple:
    if len(kc.trail) == len(ki.trail):
        return kc, ki
    n = max(len(kc.trail), len(ki.trail))
    if len(kc.trail) != n:
        kc = Kinematics(kc.shape, resample_trail(kc.trail, n), kc.duration)
    else:
        ki = Kinematics(ki.shape, resample_trail(ki.trail, n), ki.duration)
    return kc, ki


def trail_distance(kc: Kinematics, ki: Kinematics,
                   params: MetricParams) -> float:
    """Sum of per-step shape distances over the evolved boundary states."""
    kc, ki = _harmonized(kc, ki)
    states_c = evolved_states(kc, params.m_boundary)[1:]
    states_i = evolved_states(ki, params.m_boundary)[1:]
    lambdas = _lambda_values(params.lambda_mode, states_c, states_i)
    dphi = kc.trail.cumulative_phi - ki.trail.cumulative_phi
    total = 0.0
    for j in range(len(states_c)):
        total += shape_step_distance(states_c[j], states_i[j],
                                     float(dphi[j]), params,
                                     lambda_j=float(lambdas[j]))
    return total


def duration_factor(dc: float, di: float, alpha: float) -> float:
    """Non-linear duration mismatch factor, >= 1 and 1 at equal durations."""
    if dc <= 0 or di <= 0:
        raise DomainError("durations must be > 0")
    ratio = max(dc / di, di / dc)
    return 1.0 + alpha * (ratio - 1.0) ** 2


def kinematic_distance(kc: Kinematics, ki: Kinematics,
                       params: MetricParams) -> float:
    return trail_distance(kc, ki, params) * duration_factor(
        kc.duration, ki.duration, params.alpha)


def combined_similarity(rc: StructuredRepresentation,
                        ri: StructuredRepresentation, w: float,
                        params: MetricParams,
                        kinematic_distance_value: float | None = None
                        ) -> float:
    """Weighted sum of semantic and kinematic similarity, in [0, 1].

    A missing constraint component forces the weight to the present side.
    The kinematic distance maps to similarity through exp(-D/sigma).
    """
    if not 0.0 <= w <= 1.0:
        raise ParameterError("w must lie in [0, 1]")
    if rc.semantic is None or ri.semantic is None:
        w = 0.0
    if rc.kinematics is None or ri.kinematics is None:
        w = 1.0
    sem = 0.0
    if w > 0.0:
        sem = semantic_similarity(rc.semantic, ri.semantic)
    kin = 0.0
    if w < 1.0:
        if kinematic_distance_value is None:
            kinematic_distance_value = kinematic_distance(
                rc.kinematics, ri.kinematics, params)
        kin = math.exp(-kinematic_distance_value / params.sigma)
    return w * sem + (1.0 - w) * kin


# --- consistency audit (taxonomy-level distances) ---------------------------

@dataclass(frozen=True)
class KinematicProfile:
    """Taxonomy attributes of one effect, for composition auditing."""

    duration: float
    shape_class: str        # point | circle | cylinder | sphere
    direction: str          # conical | spherical
    trajectory: str         # linear | curved


def composition_consistency(profiles: Sequence[KinematicProfile]) -> dict:
    """Mean pairwise distances per dimension across a set of effects.

    Duration: absolute difference. Shape: 0/1 indicator. Trail: 1 if both
    direction and trajectory differ, 0.5 if exactly one matches, 0 if both
    match.
    """
    if len(profiles) < 2:
        raise DomainError("need at least 2 effects")
    duration_d, shape_d, trail_d = [], [], []
    for a, b in itertools.combinations(profiles, 2):
        duration_d.append(abs(a.duration - b.duration))
        shape_d.append(0.0 if a.shape_class == b.shape_class else 1.0)
        mismatches = (a.direction != b.direction) + \
            (a.trajectory != b.trajectory)
        trail_d.append(mismatches * 0.5)
    return {"duration": float(np.mean(duration_d)),
            "shape": float(np.mean(shape_d)),
            "trail": float(np.mean(trail_d))}
