"""Parametric particle-effect description format and composed-artwork model.

An EffectDefinition is the corpus unit: a semantic free-text description plus
an EmitterSpec, the minimal parameter set reproducing the common emission
cases (conical/spherical direction x linear/curved trajectory, plus spiral).
All units are SI: meters, seconds, radians.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .transforms import Transformation

EMISSION_KINDS = ("circle", "cylinder", "sphere")
DIRECTION_MODES = ("conical", "spherical")
TRAJECTORIES = ("linear", "curved")

POINT_RADIUS_THRESHOLD = 0.1  # radii below this classify as "point"


class ValidationError(ValueError):
    """Raised when an operation receives an invalid definition."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class Violation:
    field: str
    message: str

    def __str__(self):
        return f"{self.field}: {self.message}"


@dataclass(frozen=True)
class EmitterSpec:
    emission_kind: str = "sphere"
    emission_radius: float = 0.5
    emission_height: float | None = None   # cylinder only
    direction_mode: str = "spherical"
    cone_axis_angle: float | None = None   # conical only, radians in [0, pi]
    speed: float = 1.0
    trajectory: str = "linear"
    curvature: float | None = None         # curved only, 1/meters
    spiral_rate: float = 0.0               # radians/second about the axis
    particle_lifetime: float = 1.0
    emission_window: float = 0.0
    particle_size: float = 0.02
    emission_rate: float = 100.0

    @property
    def duration(self) -> float:
        return self.emission_window + self.particle_lifetime


@dataclass(frozen=True)
class EffectDefinition:
    id: str
    description: str
    theme: str = ""
    emitter: EmitterSpec = field(default_factory=EmitterSpec)
    seed: int = 0


@dataclass(frozen=True)
class ArtworkItem:
    effect_id: str
    placement: Transformation = field(default_factory=Transformation)
    start_delay: float = 0.0
    playback_speed: float = 1.0


@dataclass(frozen=True)
class ArtworkComposition:
    name: str
    items: tuple[ArtworkItem, ...] = ()


def validate_effect(definition: EffectDefinition) -> list[Violation]:
    """Return every invariant violation; an empty list means valid."""
    out = []
    if not definition.id:
        out.append(Violation("id", "must be nonempty"))
    if not definition.description:
        out.append(Violation("description", "must be nonempty"))
    if not isinstance(definition.seed, int) or definition.seed < 0 \
            or definition.seed >= 2 ** 64:
        out.append(Violation("seed", "must be a 64-bit unsigned integer"))

    em = definition.emitter
    if em.emission_kind not in EMISSION_KINDS:
        out.append(Violation("emitter.emission_kind",
                             f"must be one of {EMISSION_KINDS}"))
    if em.emission_radius < 0:
        out.append(Violation("emitter.emission_radius", "must be >= 0"))
    if em.emission_kind == "cylinder":
        if em.emission_height is None:
            out.append(Violation("emitter.emission_height",
                                 "required for cylinder emitters"))
        elif em.emission_height < 0:
            out.append(Violation("emitter.emission_height", "must be >= 0"))
    elif em.emission_height is not None:
        out.append(Violation("emitter.emission_height",
                             "only valid for cylinder emitters"))

    if em.direction_mode not in DIRECTION_MODES:
        out.append(Violation("emitter.direction_mode",
                             f"must be one of {DIRECTION_MODES}"))
    if em.direction_mode == "conical":
        if em.cone_axis_angle is None:
            out.append(Violation("emitter.cone_axis_angle",
                                 "required for conical emission"))
        elif not 0.0 <= em.cone_axis_angle <= 3.14159265358979323846:
            out.append(Violation("emitter.cone_axis_angle",
                                 "must lie in [0, pi]"))
    elif em.cone_axis_angle is not None:
        out.append(Violation("emitter.cone_axis_angle",
                             "only valid for conical emission"))

    if em.speed < 0:
        out.append(Violation("emitter.speed", "must be >= 0"))
    if em.trajectory not in TRAJECTORIES:
        out.append(Violation("emitter.trajectory",
                             f"must be one of {TRAJECTORIES}"))
    if em.trajectory == "curved":
        if em.curvature is None:
            out.append(Violation("emitter.curvature",
                                 "required for curved trajectories"))
    elif em.curvature is not None:
        out.append(Violation("emitter.curvature",
                             "only valid for curved trajectories"))

    if em.particle_lifetime <= 0:
        out.append(Violation("emitter.particle_lifetime", "must be > 0"))
    if em.emission_window < 0:
        out.append(Violation("emitter.emission_window", "must be >= 0"))
    if em.particle_size < 0:
        out.append(Violation("emitter.particle_size", "must be >= 0"))
    if em.emission_rate <= 0:
        out.append(Violation("emitter.emission_rate", "must be > 0"))
    return out


def require_valid(definition: EffectDefinition) -> None:
    violations = validate_effect(definition)
    if violations:
        raise ValidationError(violations)


def classify_emission_shape(definition: EffectDefinition) -> str:
    """Classify the emission region; sub-threshold radii count as points."""
    if definition.emitter.emission_radius < POINT_RADIUS_THRESHOLD:
        return "point"
    return definition.emitter.emission_kind


# --- serialization -----------------------------------------------------------

_EMITTER_FIELDS = tuple(EmitterSpec.__dataclass_fields__)
_EFFECT_FIELDS = ("id", "description", "theme", "emitter", "seed")


def emitter_to_dict(em: EmitterSpec) -> dict:
    out = {}
    for name in _EMITTER_FIELDS:
        value = getattr(em, name)
        if value is not None:
            out[name] = value
    return out


def effect_to_dict(definition: EffectDefinition) -> dict:
    return {
        "id": definition.id,
        "description": definition.description,
        "theme": definition.theme,
        "emitter": emitter_to_dict(definition.emitter),
        "seed": definition.seed,
    }


def emitter_from_dict(data: dict) -> EmitterSpec:
    unknown = set(data) - set(_EMITTER_FIELDS)
    if unknown:
        raise ValueError(f"unknown emitter fields: {sorted(unknown)}")
    return EmitterSpec(**data)


def effect_from_dict(data: dict) -> EffectDefinition:
    unknown = set(data) - set(_EFFECT_FIELDS)
    if unknown:
        raise ValueError(f"unknown effect fields: {sorted(unknown)}")
    emitter = emitter_from_dict(data.get("emitter", {}))
    return EffectDefinition(id=data["id"],
                            description=data["description"],
                            theme=data.get("theme", ""),
                            emitter=emitter,
                            seed=int(data.get("seed", 0)))


def write_corpus(definitions, path) -> None:
    """Write definitions as one JSON object per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for definition in definitions:
            fh.write(json.dumps(effect_to_dict(definition), sort_keys=True))
            fh.write("\n")


def read_corpus(path) -> list[EffectDefinition]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(effect_from_dict(json.loads(line)))
            except (ValueError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return out


def artwork_to_dict(artwork: ArtworkComposition) -> dict:
    return {
        "name": artwork.name,
        "items": [
            {"effect_id": item.effect_id,
             "placement": item.placement.to_dict(),
             "start_delay": item.start_delay,
             "playback_speed": item.playback_speed}
            for item in artwork.items
        ],
    }


def artwork_from_dict(data: dict) -> ArtworkComposition:
    items = []
    for raw in data.get("items", []):
        items.append(ArtworkItem(
            effect_id=raw["effect_id"],
            placement=Transformation.from_dict(raw.get("placement", {})),
            start_delay=float(raw.get("start_delay", 0.0)),
            playback_speed=float(raw.get("playback_speed", 1.0))))
    return ArtworkComposition(name=data["name"], items=tuple(items))


def validate_artwork(artwork: ArtworkComposition, known_ids) -> list[Violation]:
    out = []
    known = set(known_ids)
    for i, item in enumerate(artwork.items):
        if item.effect_id not in known:
            out.append(Violation(f"items[{i}].effect_id",
                                 f"unknown effect {item.effect_id!r}"))
        if item.start_delay < 0:
            out.append(Violation(f"items[{i}].start_delay", "must be >= 0"))
        if item.playback_speed <= 0:
            out.append(Violation(f"items[{i}].playback_speed", "must be > 0"))
    return out
