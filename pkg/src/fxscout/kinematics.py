"""Structured kinematic representation and conversions into it.

A particle effect's kinematic behavior is a triple (shape, trail, duration):
the emission shape, N per-step spherical-coordinate deltas describing how the
outer boundary evolves over a particle lifetime, and the total duration. The
effect's symmetry axis is aligned with the polar (+z) axis, so a boundary
point is (r, theta, phi) with theta measured from +z.

Conversions provided here:
  * extract_kinematics      -- from simulated trajectory samples
  * kinematics_from_graphical_input -- from shape controls + drawn strokes
  * boundary_points / apply_trail_step -- shape-state evolution for the metric
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .simulate import TrajectorySet

_POLE_EPS = 1e-6

DURATION_SLIDER_RANGE = (0.1, 10.0)
SHAPE_BOUND = 10.0  # meters, sanity bound on graphical shape controls


class DomainError(ValueError):
    pass


class ParameterError(ValueError):
    pass


class ExtractionError(ValueError):
    pass


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class SphericalPoint:
    r: float
    theta: float
    phi: float

    def __post_init__(self):
        if self.r < 0 or not 0 <= self.theta <= math.pi:
            raise DomainError("spherical point out of range")


@dataclass(frozen=True)
class EmissionShape:
    s: str          # circle | cylinder | sphere
    r: float
    h: float = 0.0

    def __post_init__(self):
        if self.s not in ("circle", "cylinder", "sphere"):
            raise DomainError(f"unknown shape kind {self.s!r}")
        if self.r < 0 or self.h < 0:
            raise DomainError("shape dimensions must be >= 0")
        if self.s != "cylinder" and self.h != 0.0:
            raise DomainError("height only applies to cylinders")


@dataclass(frozen=True)
class Trail:
    """Per-step (delta_r, delta_theta, delta_phi) triples, shape (N, 3)."""

    steps: np.ndarray

    def __post_init__(self):
        steps = np.asarray(self.steps, dtype=float)
        if steps.ndim != 2 or steps.shape[1] != 3:
            raise DomainError("trail steps must have shape (N, 3)")
        object.__setattr__(self, "steps", steps)

    def __len__(self) -> int:
        return self.steps.shape[0]

    @property
    def cumulative_phi(self) -> np.ndarray:
        """Cumulative azimuth advance after each step, shape (N,)."""
        return np.cumsum(self.steps[:, 2])


@dataclass(frozen=True)
class Kinematics:
    shape: EmissionShape
    trail: Trail
    duration: float

    def __post_init__(self):
        if self.duration <= 0:
            raise DomainError("duration must be > 0")

    def to_dict(self) -> dict:
        return {"shape": {"s": self.shape.s, "r": self.shape.r,
                          "h": self.shape.h},
                "trail": [[float(v) for v in row]
                          for row in self.trail.steps],
                "duration": self.duration}

    @classmethod
    def from_dict(cls, data: dict) -> "Kinematics":
        shape = data["shape"]
        return cls(shape=EmissionShape(s=shape["s"], r=float(shape["r"]),
                                       h=float(shape.get("h", 0.0))),
                   trail=Trail(np.asarray(data["trail"], dtype=float)),
                   duration=float(data["duration"]))


@dataclass(frozen=True)
class ShapeState:
    """Boundary point set at one trail step, as parallel spherical arrays."""

    r: np.ndarray
    theta: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        if self.r.size == 0:
            raise DomainError("shape state must be nonempty")
        if not np.all(np.isfinite(self.r)):
            raise DomainError("shape state radii must be finite")

    def __len__(self) -> int:
        return self.r.size

    def to_cartesian(self) -> np.ndarray:
        sin_t = np.sin(self.theta)
        out = np.empty((self.r.size, 3))
        out[:, 0] = self.r * sin_t * np.cos(self.phi)
        out[:, 1] = self.r * sin_t * np.sin(self.phi)
        out[:, 2] = self.r * np.cos(self.theta)
        return out

    def points(self) -> list[SphericalPoint]:
        return [SphericalPoint(float(r), float(t), float(p))
                for r, t, p in zip(self.r, self.theta, self.phi)]


# --- coordinate conversion ---------------------------------------------------

def to_spherical(p) -> SphericalPoint:
    """Cartesian (x, y, z) -> (r, theta, phi); phi is 0 at poles and origin."""
    x, y, z = (float(v) for v in p)
    if not all(math.isfinite(v) for v in (x, y, z)):
        raise DomainError("coordinates must be finite")
    rho_sq = x * x + y * y
    r = math.sqrt(rho_sq + z * z)
    if r == 0.0:
        return SphericalPoint(0.0, 0.0, 0.0)
    theta = math.atan2(math.sqrt(rho_sq), z)
    if math.sqrt(rho_sq) < _POLE_EPS * r or theta in (0.0, math.pi):
        return SphericalPoint(r, 0.0 if z >= 0 else math.pi, 0.0)
    phi = math.atan2(y, x) % (2.0 * math.pi)
    return SphericalPoint(r, theta, phi)


def to_cartesian(point: SphericalPoint) -> tuple[float, float, float]:
    sin_t = math.sin(point.theta)
    return (point.r * sin_t * math.cos(point.phi),
            point.r * sin_t * math.sin(point.phi),
            point.r * math.cos(point.theta))


# --- boundary sampling -------------------------------------------------------

def _allocate(weights: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder allocation of `total` into len(weights) bins, >= 1."""
    weights = np.asarray(weights, dtype=float)
    weights = weights / weights.sum()
    raw = weights * total
    counts = np.maximum(1, np.floor(raw).astype(int))
    while counts.sum() > total:
        counts[np.argmax(counts)] -= 1
    remainder = raw - np.floor(raw)
    while counts.sum() < total:
        i = np.argmax(remainder)
        counts[i] += 1
        remainder[i] = -1.0
    return counts


def boundary_points(shape: EmissionShape, m: int) -> ShapeState:
    """Sample m quasi-uniform points on the shape's outer boundary.

    The layout is axisymmetric: points form rings of constant (r, theta),
    staggered in azimuth between adjacent rings.
    """
    if m < 4:
        raise ParameterError("m must be >= 4")

    if shape.s == "circle":
        phi = 2.0 * np.pi * np.arange(m) / m
        return ShapeState(r=np.full(m, shape.r),
                          theta=np.full(m, np.pi / 2.0),
                          phi=phi)

    n_rings = max(2, int(round(math.sqrt(m / 2.0))))
    if shape.s == "sphere":
        theta_rings = np.pi * (np.arange(n_rings) + 0.5) / n_rings
        counts = _allocate(np.sin(theta_rings), m)
        r_rings = np.full(n_rings, shape.r)
        z_rings = None
    else:  # cylinder: lateral surface incl. both rims, height centered
        z_rings = -shape.h / 2.0 + shape.h * np.arange(n_rings) / (n_rings - 1)
        counts = _allocate(np.ones(n_rings), m)
        r_rings = np.hypot(shape.r, z_rings)
        theta_rings = np.arctan2(shape.r, z_rings)

    r = np.empty(m)
    theta = np.empty(m)
    phi = np.empty(m)
    pos = 0
    for i in range(n_rings):
        n_i = counts[i]
        offset = 0.5 * (i % 2)  # stagger alternate rings
        r[pos:pos + n_i] = r_rings[i]
        theta[pos:pos + n_i] = theta_rings[i]
        phi[pos:pos + n_i] = 2.0 * np.pi * ((np.arange(n_i) + offset) / n_i)
        pos += n_i
    return ShapeState(r=r, theta=theta, phi=phi % (2.0 * np.pi))


def apply_trail_step(state: ShapeState, step) -> ShapeState:
    """Increment every point by (delta_r, delta_theta, delta_phi)."""
    dr, dtheta, dphi = (float(v) for v in step)
    return ShapeState(r=np.maximum(0.0, state.r + dr),
                      theta=np.clip(state.theta + dtheta, 0.0, np.pi),
                      phi=(state.phi + dphi) % (2.0 * np.pi))


def evolved_states(kin: Kinematics, m: int) -> list[ShapeState]:
    """Boundary states after each trail step: index 0 is the initial shape."""
    states = [boundary_points(kin.shape, m)]
    for step in kin.trail.steps:
        states.append(apply_trail_step(states[-1], step))
    return states


def evolved_cartesian(kin: Kinematics, m: int) -> np.ndarray:
    """Cartesian boundary states at steps 1..N, shape (N, m, 3)."""
    states = evolved_states(kin, m)
    return np.stack([s.to_cartesian() for s in states[1:]])


# --- extraction from simulation ----------------------------------------------

def _resample_positions(trajectories: TrajectorySet,
                        n_steps: int) -> np.ndarray:
    """Positions at lifetime fractions i/n_steps, shape (P, n_steps + 1, 3)."""
    t = trajectories.t
    pos = trajectories.position
    s_count = t.size
    # Uniform sample grid: fractional index of each requested fraction.
    idx = np.arange(n_steps + 1) / n_steps * (s_count - 1)
    lo = np.minimum(np.floor(idx).astype(int), s_count - 2)
    frac = idx - lo
    return (pos[:, lo, :] * (1.0 - frac)[None, :, None]
            + pos[:, lo + 1, :] * frac[None, :, None])


def _fit_shape(births: np.ndarray, padding: float) -> EmissionShape:
    """Classify the birth point cloud as circle, cylinder, or sphere.

    Sphere: particle norms near-constant while equatorial radii spread out
    (the radial extent is the same in every direction). Cylinder: vertical
    extent significant relative to the equatorial radius. Otherwise circle.
    """
    norms = np.linalg.norm(births, axis=1)
    rho = np.hypot(births[:, 0], births[:, 1])
    mean_norm = float(norms.mean())
    mean_rho = float(rho.mean())
    h_est = float(births[:, 2].max() - births[:, 2].min())

    if mean_norm > 1e-9:
        cv_norm = float(norms.std() / mean_norm)
        cv_rho = float(rho.std() / mean_rho) if mean_rho > 1e-9 else 0.0
        if cv_norm < 0.2 and cv_rho > 0.2:
            return EmissionShape("sphere", mean_norm + padding)
    if mean_rho > 1e-9 and h_est > 0.2 * mean_rho:
        return EmissionShape("cylinder", mean_rho + padding, h_est)
    return EmissionShape("circle", mean_rho + padding)


def extract_kinematics(trajectories: TrajectorySet,
                       n_steps: int = 8) -> Kinematics:
    """Average per-particle spherical-coordinate changes into a trail.

    Step i is the mean change during lifetime fraction [i-1, i]/n_steps;
    particles too close to the polar axis contribute no azimuth change, since
    azimuth is numerically meaningless there.
    """
    if trajectories.particle_count < 1 or len(trajectories) == 0:
        raise ExtractionError("no samples to extract from")
    if n_steps < 1:
        raise ParameterError("n_steps must be >= 1")

    pos = _resample_positions(trajectories, n_steps)   # (P, N+1, 3)
    x, y, z = pos[:, :, 0], pos[:, :, 1], pos[:, :, 2]
    rho = np.hypot(x, y)
    r = np.hypot(rho, z)
    theta = np.arctan2(rho, z)
    phi = np.unwrap(np.arctan2(y, x), axis=1)

    d_r = np.diff(r, axis=1)
    d_theta = np.diff(theta, axis=1)
    d_phi = np.diff(phi, axis=1)
    # Azimuth is undefined near the axis: zero those contributions.
    near_axis = (rho[:, :-1] < _POLE_EPS) | (rho[:, 1:] < _POLE_EPS)
    d_phi = np.where(near_axis, 0.0, d_phi)

    steps = np.stack([d_r.mean(axis=0), d_theta.mean(axis=0),
                      d_phi.mean(axis=0)], axis=1)
    shape = _fit_shape(trajectories.birth_positions(), trajectories.size)
    return Kinematics(shape=shape, trail=Trail(steps),
                      duration=trajectories.observed_duration)


# --- graphical input ---------------------------------------------------------

@dataclass(frozen=True)
class Stroke:
    """A drawn trail stroke, projected into the meridian plane.

    Points are (outward, axial) offsets in meters relative to the stroke
    start; spiral_rate adds rotation about the symmetry axis.
    """

    points: tuple = ()
    spiral_rate: float = 0.0


def _resample_stroke(points: Sequence, n_steps: int) -> np.ndarray:
    """Per-step displacement from equal-arc resampling, shape (n_steps, 2)."""
    pts = np.asarray(points, dtype=float)
    pts = pts - pts[0]
    seg = np.diff(pts, axis=0)
    seg_len = np.linalg.norm(seg, axis=1)
    total = seg_len.sum()
    if total < 1e-12:
        return np.zeros((n_steps, 2))
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    targets = np.linspace(0.0, total, n_steps + 1)
    resampled = np.empty((n_steps + 1, 2))
    for axis in range(2):
        resampled[:, axis] = np.interp(targets, cum, pts[:, axis])
    return np.diff(resampled, axis=0)


def kinematics_from_graphical_input(shape: EmissionShape,
                                    strokes: Sequence[Stroke],
                                    duration: float,
                                    n_steps: int = 8) -> Kinematics:
    """Convert shape controls, drawn strokes, and the duration slider.

    Each stroke is resampled into n_steps equal-arc segments; the resulting
    displacement of the shape's equatorial reference point is re-expressed as
    per-step (delta_r, delta_theta) and the spiral control contributes a
    uniform delta_phi per step.
    """
    lo, hi = DURATION_SLIDER_RANGE
    if not lo <= duration <= hi:
        raise InputError(f"duration must lie in [{lo}, {hi}] s")
    if shape.r > SHAPE_BOUND or shape.h > SHAPE_BOUND:
        raise InputError("shape exceeds configured bounds")

    displacement = np.zeros((n_steps, 2))
    d_phi = np.zeros(n_steps)
    if strokes:
        for stroke in strokes:
            if len(stroke.points) < 2:
                if stroke.spiral_rate == 0.0:
                    raise InputError("empty stroke with no spiral control")
                # Pure spin stroke: no in-plane displacement.
            else:
                displacement += _resample_stroke(stroke.points, n_steps)
            d_phi += stroke.spiral_rate * duration / n_steps
        displacement /= len(strokes)
        d_phi /= len(strokes)

    # Track the equatorial reference point through the stroke displacement.
    rho = shape.r + np.concatenate([[0.0],
                                    np.cumsum(displacement[:, 0])])
    z = np.concatenate([[0.0], np.cumsum(displacement[:, 1])])
    rho = np.maximum(0.0, rho)
    r_path = np.hypot(rho, z)
    theta_path = np.arctan2(rho, z)

    steps = np.stack([np.diff(r_path), np.diff(theta_path), d_phi], axis=1)
    return Kinematics(shape=shape, trail=Trail(steps), duration=duration)


# --- reference-path components (used by extrapolation) ----------------------

def reference_component_deltas(kin: Kinematics) -> np.ndarray:
    """Per-step deltas of (axial, azimuth, equatorial), shape (N, 3).

    The trail is replayed on the shape's equatorial reference point without
    clamping; axial = r cos(theta), equatorial = r sin(theta).
    """
    steps = kin.trail.steps
    r = kin.shape.r + np.concatenate([[0.0], np.cumsum(steps[:, 0])])
    theta = np.pi / 2.0 + np.concatenate([[0.0], np.cumsum(steps[:, 1])])
    axial = r * np.cos(theta)
    equatorial = r * np.sin(theta)
    return np.stack([np.diff(axial), steps[:, 2], np.diff(equatorial)],
                    axis=1)


def trail_from_component_deltas(shape: EmissionShape,
                                deltas: np.ndarray) -> Trail:
    """Inverse of reference_component_deltas for a given target shape."""
    axial = np.concatenate([[0.0], np.cumsum(deltas[:, 0])])
    equatorial = shape.r + np.concatenate([[0.0], np.cumsum(deltas[:, 2])])
    equatorial = np.maximum(0.0, equatorial)
    r_path = np.hypot(axial, equatorial)
    theta_path = np.arctan2(equatorial, axial)
    return Trail(np.stack([np.diff(r_path), np.diff(theta_path),
                           deltas[:, 1]], axis=1))
