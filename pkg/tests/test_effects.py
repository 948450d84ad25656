import json

import pytest

from fxscout.effects import (ArtworkComposition, ArtworkItem,
                             EffectDefinition, EmitterSpec, ValidationError,
                             classify_emission_shape, effect_from_dict,
                             effect_to_dict, read_corpus, require_valid,
                             validate_artwork, validate_effect, write_corpus)
from fxscout.transforms import Transformation

from conftest import ring_definition


def emitter(**overrides):
    base = dict(emission_kind="circle", emission_radius=0.5,
                direction_mode="spherical", speed=1.0, trajectory="linear",
                spiral_rate=0.0, particle_lifetime=1.0, emission_window=0.5,
                particle_size=0.02, emission_rate=100.0)
    base.update(overrides)
    return EmitterSpec(**base)


def definition(**overrides):
    base = dict(id="fx", description="spark shower", theme="t",
                emitter=emitter(), seed=1)
    base.update(overrides)
    return EffectDefinition(**base)


def test_valid_definition_has_no_violations():
    assert validate_effect(definition()) == []


def test_missing_id_and_description_reported():
    violations = validate_effect(definition(id="", description=""))
    fields = {v.field for v in violations}
    assert {"id", "description"} <= fields


def test_height_requires_cylinder():
    bad = definition(emitter=emitter(emission_height=1.0))
    assert any(v.field == "emitter.emission_height"
               for v in validate_effect(bad))
    good = definition(emitter=emitter(emission_kind="cylinder",
                                      emission_height=1.0))
    assert validate_effect(good) == []
    missing = definition(emitter=emitter(emission_kind="cylinder"))
    assert any(v.field == "emitter.emission_height"
               for v in validate_effect(missing))


def test_cone_angle_requires_conical_mode():
    bad = definition(emitter=emitter(cone_axis_angle=0.5))
    assert any(v.field == "emitter.cone_axis_angle"
               for v in validate_effect(bad))
    missing = definition(emitter=emitter(direction_mode="conical"))
    assert any(v.field == "emitter.cone_axis_angle"
               for v in validate_effect(missing))
    good = definition(emitter=emitter(direction_mode="conical",
                                      cone_axis_angle=0.5))
    assert validate_effect(good) == []


def test_curvature_requires_curved_trajectory():
    bad = definition(emitter=emitter(curvature=0.3))
    assert any(v.field == "emitter.curvature"
               for v in validate_effect(bad))
    missing = definition(emitter=emitter(trajectory="curved"))
    assert any(v.field == "emitter.curvature"
               for v in validate_effect(missing))
    good = definition(emitter=emitter(trajectory="curved", curvature=0.3))
    assert validate_effect(good) == []


def test_require_valid_raises_with_all_violations():
    with pytest.raises(ValidationError) as exc:
        require_valid(definition(id="", emitter=emitter(speed=-1.0)))
    assert len(exc.value.violations) == 2


def test_point_classification_threshold():
    assert classify_emission_shape(
        definition(emitter=emitter(emission_radius=0.09))) == "point"
    assert classify_emission_shape(
        definition(emitter=emitter(emission_radius=0.1))) == "circle"
    sphere = definition(emitter=emitter(emission_kind="sphere",
                                        emission_radius=0.05))
    assert classify_emission_shape(sphere) == "point"


def test_dict_round_trip():
    d = definition(emitter=emitter(emission_kind="cylinder",
                                   emission_height=0.7))
    assert effect_from_dict(effect_to_dict(d)) == d


def test_unknown_fields_rejected():
    data = effect_to_dict(definition())
    data["sparkle_level"] = 11
    with pytest.raises(ValueError):
        effect_from_dict(data)
    data = effect_to_dict(definition())
    data["emitter"]["wobble"] = 1
    with pytest.raises(ValueError):
        effect_from_dict(data)


def test_corpus_file_round_trip(tmp_path):
    defs = [definition(id=f"fx-{i}") for i in range(3)]
    path = tmp_path / "corpus.jsonl"
    write_corpus(defs, path)
    lines = path.read_text().strip().split("\n")
    assert len(lines) == 3
    json.loads(lines[0])
    assert read_corpus(path) == defs


def test_ring_definition_fixture_is_valid():
    require_valid(ring_definition())


def test_artwork_validation():
    art = ArtworkComposition(name="demo", items=(
        ArtworkItem(effect_id="a", placement=Transformation(),
                    start_delay=0.0),
        ArtworkItem(effect_id="missing"),
    ))
    violations = validate_artwork(art, {"a", "b"})
    assert len(violations) == 1
    assert "missing" in violations[0].message
    assert validate_artwork(art, {"a", "missing"}) == []
