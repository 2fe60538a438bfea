"""Generator configuration, presets and the ground-truth record."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from importlib import resources

import yaml

from ..errors import InvalidConfig
from .lexicon import DEGREES, PROVINCES

STRONG_DNI = "STRONG_DNI"
AMBIGUOUS_DNI = "AMBIGUOUS_DNI"
NAME_TWIN = "NAME_TWIN"
ID_COLLISION = "ID_COLLISION"
FAMILIES = (STRONG_DNI, AMBIGUOUS_DNI, NAME_TWIN, ID_COLLISION)

_FRACTIONS = (
    "duplicate_rate", "name_typo_rate", "variant_rate", "clue_plant_rate", "no_dni_rate",
    "repeat_form_rate", "multi_campus_rate", "unknown_school_rate", "bad_date_rate",
    "moved_to_majority_rate",
)


@dataclass(frozen=True)
class SynthConfig:
    """Knobs of the synthetic register.

    ``missing_rate_by_decade`` is realised exactly (rounded to whole persons)
    within each decade. Which persons go missing follows a legacy score over
    (province of birth, degree): earlier-registered provinces and older degrees
    lose their school data first, as the source describes.
    """

    population_size: int = 1000
    seed: int = 42
    decade_mix: dict = field(default_factory=lambda: {1980: 0.25, 1990: 0.25, 2000: 0.25, 2010: 0.25})
    missing_rate_by_decade: dict = field(default_factory=lambda: {1980: 0.98, 1990: 0.8, 2000: 0.002, 2010: 0.001})
    duplicate_rate: float = 0.01
    name_typo_rate: float = 0.5
    variant_rate: float = 0.15
    clue_plant_rate: float = 0.0
    degree_mix: dict = field(default_factory=lambda: {d: 1 / len(DEGREES) for d in DEGREES})
    province_mix: dict = field(default_factory=lambda: {p.name: 1 / len(PROVINCES) for p in PROVINCES})
    # Legacy order: earlier entries lose school data first.
    province_legacy_order: tuple = tuple(p.name for p in PROVINCES)
    degree_legacy_order: tuple = DEGREES
    family_mix: dict = field(default_factory=lambda: {STRONG_DNI: 0.7, AMBIGUOUS_DNI: 0.1,
                                                      NAME_TWIN: 0.1, ID_COLLISION: 0.1})
    no_dni_rate: float = 0.02
    repeat_form_rate: float = 0.1
    multi_campus_rate: float = 0.14
    unknown_school_rate: float = 0.05
    bad_date_rate: float = 0.002
    moved_to_majority_rate: float = 0.2
    majority_province: str = PROVINCES[0].name
    name: str = "custom"

    def __post_init__(self):
        validate(self)

    def with_overrides(self, **changes) -> "SynthConfig":
        return replace(self, **changes)


def _check_fraction(name: str, value) -> None:
    if not isinstance(value, (int, float)) or isinstance(value, bool) or math.isnan(value):
        raise InvalidConfig(f"{name} must be a number")
    if not 0.0 <= value <= 1.0:
        raise InvalidConfig(f"{name}={value} is outside [0, 1]")


def _check_mix(name: str, mix: dict, allowed=None) -> None:
    if not mix:
        raise InvalidConfig(f"{name} is empty")
    for k, v in mix.items():
        _check_fraction(f"{name}[{k}]", v)
        if allowed is not None and k not in allowed:
            raise InvalidConfig(f"{name}: unknown key {k!r}")
    if abs(sum(mix.values()) - 1.0) > 1e-9:
        raise InvalidConfig(f"{name} sums to {sum(mix.values())}, not 1")


def validate(cfg: SynthConfig) -> None:
    if not isinstance(cfg.population_size, int) or cfg.population_size < 0:
        raise InvalidConfig("population_size must be a non-negative integer")
    if not isinstance(cfg.seed, int):
        raise InvalidConfig("seed must be an integer")
    for name in _FRACTIONS:
        _check_fraction(name, getattr(cfg, name))
    _check_mix("decade_mix", cfg.decade_mix)
    for d in cfg.decade_mix:
        if not isinstance(d, int) or d % 10:
            raise InvalidConfig(f"decade {d!r} must be an integer multiple of 10")
    if set(cfg.missing_rate_by_decade) != set(cfg.decade_mix):
        raise InvalidConfig("missing_rate_by_decade must cover exactly the decades of decade_mix")
    for d, r in cfg.missing_rate_by_decade.items():
        _check_fraction(f"missing_rate_by_decade[{d}]", r)
    _check_mix("degree_mix", cfg.degree_mix)
    _check_mix("province_mix", cfg.province_mix, {p.name for p in PROVINCES})
    _check_mix("family_mix", cfg.family_mix, set(FAMILIES))
    if set(cfg.province_legacy_order) != {p.name for p in PROVINCES}:
        raise InvalidConfig("province_legacy_order must list every province once")
    if set(cfg.degree_legacy_order) != set(cfg.degree_mix):
        raise InvalidConfig("degree_legacy_order must list every degree of degree_mix")
    if cfg.majority_province not in cfg.province_mix:
        raise InvalidConfig("majority_province must appear in province_mix")


def config_from_dict(doc: dict, **overrides) -> SynthConfig:
    known = {f.name for f in fields(SynthConfig)}
    unknown = set(doc) - known
    if unknown:
        raise InvalidConfig(f"unknown synth settings: {', '.join(sorted(unknown))}")
    kwargs = dict(doc)
    for key in ("decade_mix", "missing_rate_by_decade"):
        if key in kwargs:
            kwargs[key] = {int(k): float(v) for k, v in kwargs[key].items()}
    for key in ("province_legacy_order", "degree_legacy_order"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    kwargs.update(overrides)
    try:
        return SynthConfig(**kwargs)
    except TypeError as exc:
        raise InvalidConfig(str(exc)) from exc


PRESETS = {"paper_shape": "paper_shape.yaml"}


def load_preset(name: str, **overrides) -> SynthConfig:
    if name not in PRESETS:
        raise InvalidConfig(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}")
    text = resources.files("cohort.data").joinpath(PRESETS[name]).read_text(encoding="utf-8")
    doc = yaml.safe_load(text)
    doc.setdefault("name", name)
    return config_from_dict(doc, **overrides)


@dataclass
class PlantedCluster:
    cluster_id: int
    family: str
    member_ids: tuple[str, ...]


@dataclass
class GroundTruth:
    true_person_count: int = 0
    duplicate_clusters: list[PlantedCluster] = field(default_factory=list)
    true_school_type: dict[str, str] = field(default_factory=dict)
    true_missing: dict[str, int] = field(default_factory=dict)
    # person id -> the real person it stands for (merged ids share one)
    true_person: dict[str, str] = field(default_factory=dict)
    # person id -> decade, province of birth, degree (the cells of the analysis)
    attributes: dict[str, dict] = field(default_factory=dict)
    planted_clues: dict[str, str] = field(default_factory=dict)
    used_documents: set[str] = field(default_factory=set, repr=False)

    def clusters_of(self, family: str) -> list[PlantedCluster]:
        return [c for c in self.duplicate_clusters if c.family == family]
