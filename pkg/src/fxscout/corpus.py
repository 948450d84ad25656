"""Corpus generation, offline index building, and index persistence.

Indexing does the heavy lifting once: every effect is simulated, its
kinematics extracted, its description normalized and embedded, and the
similarity scale sigma set from the median pairwise kinematic distance.
Queries then only read. The index persists to a single JSON file whose bytes
depend solely on the inputs, so rebuilds are verifiably idempotent.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from . import ENGINE_VERSION
from .config import EngineConfig
from .effects import (EffectDefinition, EmitterSpec, classify_emission_shape,
                      effect_from_dict, effect_to_dict, require_valid)
from .kinematics import Kinematics, extract_kinematics
from .metrics import (KinematicProfile, MetricParams, StructuredRepresentation,
                      composition_consistency, duration_factor)
from .search import KinematicCache
from .semantics import SemanticDescriptor, describe
from .simulate import simulate


class IngestionError(ValueError):
    pass


MAX_SIGMA_PAIRS = 10_000


@dataclass(frozen=True)
class IndexEntry:
    definition: EffectDefinition
    representation: StructuredRepresentation


@dataclass
class CorpusIndex:
    """Immutable search-side view of an ingested corpus."""

    entries: dict[str, IndexEntry]
    ids: list[str]
    embeddings: np.ndarray          # (C, d), unit rows
    sigma: float
    build_metadata: dict
    errors: list[tuple[str, str]] = field(default_factory=list)
    _caches: dict[int, KinematicCache] = field(default_factory=dict)

    def position(self, effect_id: str) -> int:
        return self.ids.index(effect_id)

    def kinematic_cache(self, m_boundary: int) -> KinematicCache:
        cache = self._caches.get(m_boundary)
        if cache is None:
            kins = [self.entries[i].representation.kinematics
                    for i in self.ids]
            cache = KinematicCache(kins, m_boundary)
            self._caches[m_boundary] = cache
        return cache

    def profile(self, effect_id: str) -> KinematicProfile:
        d = self.entries[effect_id].definition
        return KinematicProfile(
            duration=d.emitter.duration,
            shape_class=classify_emission_shape(d),
            direction=d.emitter.direction_mode,
            trajectory=d.emitter.trajectory)


def _params_hash(config: EngineConfig) -> str:
    blob = json.dumps(config.to_dict(), sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def _pairwise_dk(cache: KinematicCache, lambdas: np.ndarray,
                 pairs: np.ndarray, alpha: float) -> np.ndarray:
    """Plain (untransformed) kinematic distances for index pairs (P, 2)."""
    out = np.empty(len(pairs))
    identity = 0
    for row, (a, b) in enumerate(pairs):
        dphi = cache.cum_phi[a] - cache.cum_phi[b]
        lam = np.maximum(lambdas[a], lambdas[b])
        total = 0.0
        for j in range(cache.n_steps):
            d = cdist(cache.states[identity, a, j],
                      cache.states[identity, b, j])
            h = max(d.min(axis=1).max(), d.min(axis=0).max())
            total += h + lam[j] * (1.0 - math.cos(dphi[j]))
        out[row] = total * duration_factor(cache.durations[a],
                                           cache.durations[b], alpha)
    return out


def _compute_sigma(cache: KinematicCache, alpha: float) -> float:
    n = cache.count
    if n < 2:
        return 1.0
    # adaptive lambda: half the max equatorial radius per evolved step
    lambdas = 0.5 * cache.features[0, :, :, 2]
    all_pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    if len(all_pairs) > MAX_SIGMA_PAIRS:
        rng = np.random.default_rng(0)
        idx = rng.choice(len(all_pairs), size=MAX_SIGMA_PAIRS, replace=False)
        idx.sort()
        pairs = np.array([all_pairs[i] for i in idx])
    else:
        pairs = np.array(all_pairs)
    dks = _pairwise_dk(cache, lambdas, pairs, alpha)
    median = float(np.median(dks))
    return median if median > 0.0 else 1.0


def build_index(defs: list[EffectDefinition], providers,
                config: EngineConfig | None = None) -> CorpusIndex:
    """Simulate, extract, and embed every effect; compute sigma.

    A failing entry is reported in `errors` and skipped; the index is built
    from the survivors. Duplicate ids abort the whole build.
    """
    config = config or EngineConfig()
    if not defs:
        raise IngestionError("corpus must be nonempty")
    seen = set()
    for d in defs:
        if d.id in seen:
            raise IngestionError(f"duplicate effect id: {d.id}")
        seen.add(d.id)

    llm, embedder = providers
    entries: dict[str, IndexEntry] = {}
    ids: list[str] = []
    vectors: list[np.ndarray] = []
    errors: list[tuple[str, str]] = []
    for d in defs:
        try:
            require_valid(d)
            trajectories = simulate(d, config.particle_count,
                                    config.samples_per_lifetime)
            kin = extract_kinematics(trajectories, config.n_steps)
            semantic = describe(d.description, llm, embedder)
        except Exception as exc:  # noqa: BLE001 - entry-level isolation
            errors.append((d.id, str(exc)))
            continue
        entries[d.id] = IndexEntry(d, StructuredRepresentation(semantic, kin))
        ids.append(d.id)
        vectors.append(semantic.embedding)
    if not entries:
        raise IngestionError("every entry failed extraction")

    index = CorpusIndex(entries=entries, ids=ids,
                        embeddings=np.stack(vectors),
                        sigma=1.0,
                        build_metadata={"engine_version": ENGINE_VERSION,
                                        "params_hash": _params_hash(config),
                                        "entry_count": len(ids)},
                        errors=errors)
    if config.sigma is not None:
        index.sigma = config.sigma
    else:
        cache = index.kinematic_cache(config.m_boundary)
        index.sigma = _compute_sigma(cache, config.alpha)
    return index


# --- persistence -------------------------------------------------------------

INDEX_FORMAT_VERSION = 1


def save_index(index: CorpusIndex, path) -> None:
    doc = {"format_version": INDEX_FORMAT_VERSION,
           "metadata": index.build_metadata,
           "sigma": index.sigma,
           "errors": [list(e) for e in index.errors],
           "entries": [
               {"definition": effect_to_dict(e.definition),
                "raw_text": e.representation.semantic.raw_text,
                "normalized_text":
                    e.representation.semantic.normalized_text,
                "embedding":
                    [float(v) for v in e.representation.semantic.embedding],
                "kinematics": e.representation.kinematics.to_dict()}
               for e in (index.entries[i] for i in index.ids)]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_index(path) -> CorpusIndex:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format_version") != INDEX_FORMAT_VERSION:
        raise IngestionError("unsupported index format version")
    entries: dict[str, IndexEntry] = {}
    ids: list[str] = []
    vectors: list[np.ndarray] = []
    for item in doc["entries"]:
        definition = effect_from_dict(item["definition"])
        semantic = SemanticDescriptor(
            raw_text=item["raw_text"],
            normalized_text=item["normalized_text"],
            embedding=np.asarray(item["embedding"], dtype=float))
        kin = Kinematics.from_dict(item["kinematics"])
        entries[definition.id] = IndexEntry(
            definition, StructuredRepresentation(semantic, kin))
        ids.append(definition.id)
        vectors.append(semantic.embedding)
    return CorpusIndex(entries=entries, ids=ids,
                       embeddings=np.stack(vectors),
                       sigma=float(doc["sigma"]),
                       build_metadata=dict(doc["metadata"]),
                       errors=[tuple(e) for e in doc.get("errors", [])])


# --- synthetic corpus --------------------------------------------------------

# Slot vocabularies hash to pairwise-distinct embedding buckets, so every
# (adjective, color, setting) combination yields a distinct mock embedding
# and self-retrieval stays unambiguous at w = 1.
_ADJECTIVES = ("golden", "crimson", "pale", "emerald", "violet", "amber",
               "silver", "azure", "smoky", "glowing")
_COLORS = ("red", "orange", "yellow", "green", "blue", "indigo", "teal",
           "magenta", "coral", "ivory", "pearl", "bronze")
_SETTINGS = ("dawn", "dusk", "noon", "winter", "summer", "autumn",
             "festival", "carnival")


def _ring(rng) -> tuple[EmitterSpec, str]:
    em = EmitterSpec(emission_kind="circle",
                     emission_radius=rng.uniform(0.3, 1.5),
                     emission_height=None,
                     direction_mode="spherical", cone_axis_angle=None,
                     speed=rng.uniform(0.3, 0.8),
                     trajectory="linear", curvature=None, spiral_rate=0.0,
                     particle_lifetime=rng.uniform(1.4, 1.8),
                     emission_window=rng.uniform(0.4, 0.6),
                     particle_size=0.02, emission_rate=200.0)
    return em, "expanding ring of sparks sweeping outward"

def _column(rng) -> tuple[EmitterSpec, str]:
    em = EmitterSpec(emission_kind="circle",
                     emission_radius=rng.uniform(0.02, 0.08),
                     emission_height=None,
                     direction_mode="conical", cone_axis_angle=0.0,
                     speed=rng.uniform(1.0, 2.0),
                     trajectory="linear", curvature=None, spiral_rate=0.0,
                     particle_lifetime=rng.uniform(1.8, 2.2),
                     emission_window=rng.uniform(0.9, 1.1),
                     particle_size=0.015, emission_rate=300.0)
    return em, "rising column of embers climbing straight up"

def _burst(rng) -> tuple[EmitterSpec, str]:
    em = EmitterSpec(emission_kind="sphere",
                     emission_radius=rng.uniform(0.2, 0.6),
                     emission_height=None,
                     direction_mode="spherical", cone_axis_angle=None,
                     speed=rng.uniform(1.5, 3.0),
                     trajectory="linear", curvature=None, spiral_rate=0.0,
                     particle_lifetime=rng.uniform(0.5, 0.8),
                     emission_window=rng.uniform(0.1, 0.2),
                     particle_size=0.03, emission_rate=600.0)
    return em, "spherical burst of glitter exploding in all directions"

def _fountain(rng) -> tuple[EmitterSpec, str]:
    em = EmitterSpec(emission_kind="circle",
                     emission_radius=rng.uniform(0.12, 0.25),
                     emission_height=None,
                     direction_mode="conical",
                     cone_axis_angle=rng.uniform(0.2, 0.5),
                     speed=rng.uniform(0.8, 1.5),
                     trajectory="linear", curvature=None,
                     spiral_rate=rng.uniform(math.pi, 3 * math.pi),
                     particle_lifetime=rng.uniform(2.4, 2.8),
                     emission_window=rng.uniform(0.5, 0.7),
                     particle_size=0.02, emission_rate=250.0)
    return em, "spiral fountain of light twisting upward"

def _ground(rng) -> tuple[EmitterSpec, str]:
    em = EmitterSpec(emission_kind="circle",
                     emission_radius=rng.uniform(1.0, 2.0),
                     emission_height=None,
                     direction_mode="conical",
                     cone_axis_angle=rng.uniform(1.2, 1.5),
                     speed=rng.uniform(0.5, 1.0),
                     trajectory="curved", curvature=rng.uniform(0.2, 0.5),
                     spiral_rate=0.0,
                     particle_lifetime=rng.uniform(3.0, 3.5),
                     emission_window=rng.uniform(0.8, 1.2),
                     particle_size=0.04, emission_rate=150.0)
    return em, "wide ground circle of mist drifting along the floor"

def _cone(rng) -> tuple[EmitterSpec, str]:
    em = EmitterSpec(emission_kind="cylinder",
                     emission_radius=rng.uniform(0.15, 0.3),
                     emission_height=rng.uniform(0.4, 0.8),
                     direction_mode="conical",
                     cone_axis_angle=rng.uniform(0.6, 0.9),
                     speed=rng.uniform(1.0, 1.8),
                     trajectory="linear", curvature=None, spiral_rate=0.0,
                     particle_lifetime=rng.uniform(1.0, 1.3),
                     emission_window=rng.uniform(0.3, 0.5),
                     particle_size=0.025, emission_rate=350.0)
    return em, "cone spray of dust fanning out from a nozzle"


FAMILIES = {"expanding_ring": _ring,
            "rising_column": _column,
            "spherical_burst": _burst,
            "spiral_fountain": _fountain,
            "ground_circle": _ground,
            "cone_spray": _cone}


def generate_synthetic_corpus(families, size: int,
                              seed: int = 0) -> list[EffectDefinition]:
    """Deterministic parameter-sampled corpus spread across families."""
    families = list(families)
    if not families:
        raise IngestionError("need at least one family")
    for name in families:
        if name not in FAMILIES:
            raise IngestionError(f"unknown family: {name}")
    rng = np.random.default_rng(seed)
    defs = []
    counters = {name: 0 for name in families}
    for i in range(size):
        family = families[i % len(families)]
        emitter, phrase = FAMILIES[family](rng)
        # mixed-radix slot walk keeps descriptions unique within a family
        n = counters[family]
        counters[family] += 1
        adjective = _ADJECTIVES[n % len(_ADJECTIVES)]
        color = _COLORS[(n // len(_ADJECTIVES)) % len(_COLORS)]
        setting = _SETTINGS[(n // (len(_ADJECTIVES) * len(_COLORS)))
                            % len(_SETTINGS)]
        defs.append(EffectDefinition(
            id=f"{family}-{i:04d}",
            description=f"{adjective} {color} {phrase} at {setting}",
            theme=family,
            emitter=emitter,
            seed=int(rng.integers(2 ** 31))))
    return defs


def consistency_report(index: CorpusIndex) -> list[dict]:
    """Within-theme and between-theme consistency rows for `corpus stats`.

    The between row pairs one representative per theme, so it measures
    cross-theme spread on the same scale as the within rows.
    """
    by_theme: dict[str, list[str]] = {}
    for i in index.ids:
        by_theme.setdefault(index.entries[i].definition.theme, []).append(i)
    rows = []
    for theme in sorted(by_theme):
        members = by_theme[theme]
        if len(members) < 2:
            continue
        dist = composition_consistency([index.profile(i) for i in members])
        rows.append({"scope": "within", "theme": theme,
                     "count": len(members), **dist})
    if len(by_theme) >= 2:
        representatives = [by_theme[t][0] for t in sorted(by_theme)]
        dist = composition_consistency(
            [index.profile(i) for i in representatives])
        rows.append({"scope": "between", "theme": "*",
                     "count": len(representatives), **dist})
    return rows
