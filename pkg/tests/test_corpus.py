import json

import numpy as np
import pytest

from fxscout.config import EngineConfig
from fxscout.corpus import (FAMILIES, CorpusIndex, IngestionError,
                            build_index, consistency_report,
                            generate_synthetic_corpus, load_index,
                            save_index)
from fxscout.effects import EffectDefinition, EmitterSpec

from conftest import ALL_FAMILIES, ring_definition


def test_generate_deterministic():
    a = generate_synthetic_corpus(ALL_FAMILIES, 24, seed=3)
    b = generate_synthetic_corpus(ALL_FAMILIES, 24, seed=3)
    assert a == b
    c = generate_synthetic_corpus(ALL_FAMILIES, 24, seed=4)
    assert a != c


def test_generate_covers_families_evenly():
    defs = generate_synthetic_corpus(ALL_FAMILIES, 18, seed=0)
    themes = [d.theme for d in defs]
    for family in ALL_FAMILIES:
        assert themes.count(family) == 3
    assert set(FAMILIES) == set(ALL_FAMILIES)


def test_generate_unique_ids_and_descriptions():
    defs = generate_synthetic_corpus(ALL_FAMILIES, 839, seed=42)
    assert len({d.id for d in defs}) == 839
    assert len({d.description for d in defs}) == 839


def test_generate_rejects_bad_family():
    with pytest.raises(IngestionError):
        generate_synthetic_corpus(["volcano"], 4)
    with pytest.raises(IngestionError):
        generate_synthetic_corpus([], 4)


def test_build_index_basic(small_index, small_defs, config):
    assert small_index.ids == [d.id for d in small_defs]
    assert small_index.errors == []
    assert small_index.embeddings.shape == (36, config.embedding_dimension)
    assert np.allclose(np.linalg.norm(small_index.embeddings, axis=1), 1.0)
    assert small_index.sigma > 0.0
    assert small_index.build_metadata["entry_count"] == 36
    for i in small_index.ids:
        kin = small_index.entries[i].representation.kinematics
        assert len(kin.trail) == config.n_steps


def test_build_rejects_duplicates_and_empty(providers, config):
    with pytest.raises(IngestionError):
        build_index([], providers, config)
    d = ring_definition()
    with pytest.raises(IngestionError):
        build_index([d, d], providers, config)


def test_build_isolates_entry_failures(providers, config):
    good = ring_definition(effect_id="good")
    bad = EffectDefinition(id="bad", description="", theme="t",
                           emitter=good.emitter, seed=1)
    index = build_index([good, bad], providers, config)
    assert index.ids == ["good"]
    assert len(index.errors) == 1
    assert index.errors[0][0] == "bad"


def test_build_all_failures_abort(providers, config):
    bad = EffectDefinition(id="bad", description="", theme="t",
                           emitter=ring_definition().emitter, seed=1)
    with pytest.raises(IngestionError):
        build_index([bad], providers, config)


def test_sigma_fallback_for_identical_effects(providers, config):
    defs = [ring_definition(effect_id=f"fx-{i}", seed=5) for i in range(3)]
    for i, d in enumerate(defs):
        object.__setattr__(d, "description", f"same ring {i}")
    index = build_index(defs, providers, config)
    # identical kinematics -> zero median distance -> documented fallback
    assert index.sigma == 1.0


def test_sigma_override(providers, config):
    defs = generate_synthetic_corpus(ALL_FAMILIES, 6, seed=1)
    index = build_index(defs, providers, config.replace(sigma=2.5))
    assert index.sigma == 2.5


def test_save_load_round_trip(small_index, tmp_path):
    path = tmp_path / "index.json"
    save_index(small_index, path)
    loaded = load_index(path)
    assert loaded.ids == small_index.ids
    assert loaded.sigma == small_index.sigma
    assert np.array_equal(loaded.embeddings, small_index.embeddings)
    for i in small_index.ids:
        a = small_index.entries[i]
        b = loaded.entries[i]
        assert a.definition == b.definition
        assert np.array_equal(a.representation.kinematics.trail.steps,
                              b.representation.kinematics.trail.steps)
        assert a.representation.semantic.normalized_text == \
            b.representation.semantic.normalized_text


def test_save_is_byte_identical(small_index, tmp_path):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_index(small_index, p1)
    save_index(small_index, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_rebuild_reproduces_same_file(small_defs, providers, config,
                                      tmp_path):
    from fxscout.corpus import build_index as rebuild
    again = rebuild(small_defs, providers, config)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_index(again, p1)
    rebuilt = rebuild(small_defs, providers, config)
    save_index(rebuilt, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_load_rejects_unknown_format(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"format_version": 99, "entries": []}))
    with pytest.raises(IngestionError):
        load_index(path)


def test_position_and_cache_reuse(small_index, config):
    assert small_index.position(small_index.ids[4]) == 4
    c1 = small_index.kinematic_cache(config.m_boundary)
    c2 = small_index.kinematic_cache(config.m_boundary)
    assert c1 is c2
    assert c1.count == 36


def test_profile_fields(small_index):
    ring_id = next(i for i in small_index.ids
                   if i.startswith("expanding_ring"))
    p = small_index.profile(ring_id)
    assert p.shape_class == "circle"
    assert p.direction == "spherical"
    assert p.trajectory == "linear"
    assert p.duration > 0


def test_within_theme_tighter_than_between(small_index):
    rows = consistency_report(small_index)
    within = [r for r in rows if r["scope"] == "within"]
    between = next(r for r in rows if r["scope"] == "between")
    assert len(within) == len(ALL_FAMILIES)
    for dim in ("duration", "shape", "trail"):
        mean_within = np.mean([r[dim] for r in within])
        assert mean_within < between[dim]


def test_metadata_tracks_config(small_defs, providers, config):
    a = build_index(small_defs[:6], providers, config)
    b = build_index(small_defs[:6], providers, config.replace(alpha=0.9))
    assert a.build_metadata["params_hash"] != b.build_metadata["params_hash"]
