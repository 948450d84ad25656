"""Deterministic closed-form particle simulation.

Positions are evaluated analytically per sample time (straight lines,
constant-curvature arcs in the meridian plane, constant spiral rate about the
polar axis), so the output is bitwise reproducible and trivially verifiable.
All randomness is a pure function of (definition.seed, particle_id): changing
the particle count never reshuffles existing particles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .effects import EffectDefinition, require_valid

_TWO_PI = 2.0 * np.pi


class TrajectorySample(NamedTuple):
    particle_id: int
    birth_time: float
    t: float
    position: tuple[float, float, float]
    size: float


@dataclass(frozen=True)
class TrajectorySet:
    """Simulated samples for all particles, ordered by (particle_id, t)."""

    particle_count: int
    samples_per_lifetime: int
    particle_lifetime: float
    emission_window: float
    birth_time: np.ndarray    # (P,)
    t: np.ndarray             # (S,) seconds since particle birth
    position: np.ndarray      # (P, S, 3) meters
    size: float

    def __len__(self) -> int:
        return self.particle_count * self.samples_per_lifetime

    def samples(self) -> Iterator[TrajectorySample]:
        for p in range(self.particle_count):
            for s in range(self.samples_per_lifetime):
                yield TrajectorySample(
                    particle_id=p,
                    birth_time=float(self.birth_time[p]),
                    t=float(self.t[s]),
                    position=tuple(float(c) for c in self.position[p, s]),
                    size=self.size)

    def birth_positions(self) -> np.ndarray:
        return self.position[:, 0, :]

    @property
    def observed_duration(self) -> float:
        return float(self.birth_time.max() + self.t.max())


def _hash_uniform(seed: int, particle_ids: np.ndarray,
                  channel: int) -> np.ndarray:
    """Counter-based uniform in [0, 1): splitmix64 over (seed, id, channel)."""
    with np.errstate(over="ignore"):
        x = (particle_ids.astype(np.uint64)
             + np.uint64((seed * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF)
             + np.uint64((channel * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF))
        x ^= x >> np.uint64(30)
        x *= np.uint64(0xBF58476D1CE4E5B9)
        x ^= x >> np.uint64(27)
        x *= np.uint64(0x94D049BB133111EB)
        x ^= x >> np.uint64(31)
    return (x >> np.uint64(11)).astype(np.float64) / float(1 << 53)


def simulate(definition: EffectDefinition, particle_count: int = 1024,
             samples_per_lifetime: int = 16) -> TrajectorySet:
    """Sample every particle's trajectory at uniform times over its lifetime."""
    require_valid(definition)
    if particle_count < 1:
        raise ValueError("particle_count must be >= 1")
    if samples_per_lifetime < 2:
        raise ValueError("samples_per_lifetime must be >= 2")

    em = definition.emitter
    seed = definition.seed
    pids = np.arange(particle_count, dtype=np.uint64)

    u_phi = _hash_uniform(seed, pids, 0)
    u_shape = _hash_uniform(seed, pids, 1)
    u_birth = _hash_uniform(seed, pids, 2)

    phi0 = _TWO_PI * u_phi
    radius = em.emission_radius
    if em.emission_kind == "circle":
        rho0 = np.full(particle_count, radius)
        z0 = np.zeros(particle_count)
    elif em.emission_kind == "sphere":
        cos_theta = 2.0 * u_shape - 1.0
        sin_theta = np.sqrt(np.maximum(0.0, 1.0 - cos_theta ** 2))
        rho0 = radius * sin_theta
        z0 = radius * cos_theta
    else:  # cylinder lateral surface, height centered on the equator
        rho0 = np.full(particle_count, radius)
        z0 = (u_shape - 0.5) * (em.emission_height or 0.0)

    # Initial heading: polar angle of the velocity in the meridian plane.
    if em.direction_mode == "conical":
        beta0 = np.full(particle_count, em.cone_axis_angle)
    else:
        beta0 = np.arctan2(rho0, z0)
        degenerate = (rho0 ** 2 + z0 ** 2) < 1e-24
        if degenerate.any():
            cos_rand = 2.0 * _hash_uniform(seed, pids, 3) - 1.0
            beta0 = np.where(degenerate, np.arccos(cos_rand), beta0)

    birth_time = u_birth * em.emission_window
    t = np.linspace(0.0, em.particle_lifetime, samples_per_lifetime)

    speed = em.speed
    tt = t[None, :]                       # (1, S)
    if em.trajectory == "curved" and em.curvature is not None \
            and abs(em.curvature) > 1e-12 and speed > 0:
        kappa = em.curvature
        omega = speed * kappa
        beta_t = beta0[:, None] + omega * tt
        rho = rho0[:, None] + (np.cos(beta0)[:, None] - np.cos(beta_t)) / kappa
        z = z0[:, None] + (np.sin(beta_t) - np.sin(beta0)[:, None]) / kappa
    else:
        rho = rho0[:, None] + speed * tt * np.sin(beta0)[:, None]
        z = z0[:, None] + speed * tt * np.cos(beta0)[:, None]

    phi = phi0[:, None] + em.spiral_rate * tt
    position = np.empty((particle_count, samples_per_lifetime, 3))
    position[:, :, 0] = rho * np.cos(phi)
    position[:, :, 1] = rho * np.sin(phi)
    position[:, :, 2] = z

    return TrajectorySet(particle_count=particle_count,
                         samples_per_lifetime=samples_per_lifetime,
                         particle_lifetime=em.particle_lifetime,
                         emission_window=em.emission_window,
                         birth_time=birth_time,
                         t=t,
                         position=position,
                         size=em.particle_size)


def write_trajectory_dump(trajectories: TrajectorySet, fh) -> None:
    """One sample per line: particle_id birth_time t x y z size."""
    for s in trajectories.samples():
        x, y, z = s.position
        fh.write(f"{s.particle_id} {s.birth_time!r} {s.t!r} "
                 f"{x!r} {y!r} {z!r} {s.size!r}\n")
