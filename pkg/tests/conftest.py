import numpy as np
import pytest

from fxscout.config import EngineConfig
from fxscout.corpus import build_index, generate_synthetic_corpus
from fxscout.effects import EffectDefinition, EmitterSpec
from fxscout.metrics import MetricParams
from fxscout.semantics import make_providers

ALL_FAMILIES = ("expanding_ring", "rising_column", "spherical_burst",
                "spiral_fountain", "ground_circle", "cone_spray")


def brute_force_hausdorff(a, b):
    """O(n*m) oracle with plain loops; no vectorization shortcuts."""
    def directed(src, dst):
        worst = 0.0
        for p in src:
            best = float("inf")
            for q in dst:
                d = ((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2
                     + (p[2] - q[2]) ** 2) ** 0.5
                if d < best:
                    best = d
            if best > worst:
                worst = best
        return worst

    return max(directed(a, b), directed(b, a))


def ring_definition(effect_id="ring", radius=0.5, speed=1.0, lifetime=1.0,
                    seed=7):
    return EffectDefinition(
        id=effect_id, description="expanding ring of sparks", theme="test",
        emitter=EmitterSpec(emission_kind="circle", emission_radius=radius,
                            direction_mode="spherical", speed=speed,
                            trajectory="linear", spiral_rate=0.0,
                            particle_lifetime=lifetime, emission_window=0.5,
                            particle_size=0.02, emission_rate=100.0),
        seed=seed)


def column_definition(effect_id="column", spiral_rate=0.0, seed=11):
    return EffectDefinition(
        id=effect_id, description="rising column of embers", theme="test",
        emitter=EmitterSpec(emission_kind="circle", emission_radius=0.05,
                            direction_mode="conical", cone_axis_angle=0.0,
                            speed=1.5, trajectory="linear",
                            spiral_rate=spiral_rate,
                            particle_lifetime=2.0, emission_window=1.0,
                            particle_size=0.02, emission_rate=100.0),
        seed=seed)


@pytest.fixture(scope="session")
def config():
    return EngineConfig()


@pytest.fixture(scope="session")
def providers(config):
    return make_providers(config)


@pytest.fixture(scope="session")
def small_defs():
    return generate_synthetic_corpus(ALL_FAMILIES, 36, seed=9)


@pytest.fixture(scope="session")
def small_index(small_defs, providers, config):
    index = build_index(small_defs, providers, config)
    index.kinematic_cache(config.m_boundary)
    return index


@pytest.fixture(scope="session")
def metric_params(small_index, config):
    return MetricParams.from_config(config, sigma=small_index.sigma)


@pytest.fixture()
def rng():
    return np.random.default_rng(123)
