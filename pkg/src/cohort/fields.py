"""Logical censal vocabulary and the YAML field-mapping configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import yaml

from .errors import DuplicateMapping, MissingMandatoryField, ParseError

PERSON_ID = "person_id"
AUXILIARY = "auxiliary_text"

# Order matters: it is the column order of every intermediate CSV.
LOGICAL_FIELDS = (
    "person_id",
    "national_doc",
    "full_name",
    "birth_date",
    "sex",
    "civil_status",
    "country_birth",
    "province_birth",
    "locality_birth",
    "province_residence",
    "locality_residence",
    "school_name",
    "school_type_raw_hint",
    "intake_date",
    "entry_year",
    "degree",
)

IDENTIFIER_FIELDS = ("person_id", "national_doc")
CENSAL_FIELDS = tuple(f for f in LOGICAL_FIELDS if f not in IDENTIFIER_FIELDS)
DATE_FIELDS = ("birth_date", "intake_date")
GEO_FIELDS = (
    "country_birth",
    "province_birth",
    "locality_birth",
    "province_residence",
    "locality_residence",
)
SCHOOL_FIELDS = ("school_name", "school_type_raw_hint")

VARIABLE_GROUPS: dict[str, tuple[str, ...]] = {
    "demographics": (
        "full_name",
        "birth_date",
        "sex",
        "civil_status",
        "intake_date",
        "entry_year",
        "degree",
    ),
    "geography": GEO_FIELDS,
    "school": SCHOOL_FIELDS,
    # No logical field in the fixed vocabulary carries parental data.
    "family_background": (),
}

MISSING_MARKERS = frozenset({"", "nan", "NaN", "NULL"})

DEFAULT_DATE_FORMATS = ("%Y-%m-%d", "%d/%m/%Y", "%d-%m-%Y", "%Y/%m/%d", "%d.%m.%Y")


@dataclass(frozen=True)
class FieldMapping:
    logical_field: str
    source_column: str
    required: bool = False


@dataclass(frozen=True)
class FieldMappingSet:
    """Validated mappings plus the reader options from the ``options:`` section."""

    mappings: tuple[FieldMapping, ...]
    delimiter: str = ","
    date_formats: tuple[str, ...] = DEFAULT_DATE_FORMATS
    extra: dict = field(default_factory=dict, compare=False)

    def __iter__(self) -> Iterator[FieldMapping]:
        return iter(self.mappings)

    def __len__(self) -> int:
        return len(self.mappings)

    def source_for(self, logical: str) -> str | None:
        for m in self.mappings:
            if m.logical_field == logical:
                return m.source_column
        return None

    @property
    def auxiliary_columns(self) -> list[str]:
        return [m.source_column for m in self.mappings if m.logical_field == AUXILIARY]

    def to_yaml(self) -> str:
        fields_doc: dict = {}
        for m in self.mappings:
            if m.logical_field == AUXILIARY:
                fields_doc.setdefault(AUXILIARY, []).append(m.source_column)
            elif m.required and m.logical_field != PERSON_ID:
                fields_doc[m.logical_field] = {"column": m.source_column, "required": True}
            else:
                fields_doc[m.logical_field] = m.source_column
        doc = {
            "fields": fields_doc,
            "options": {"delimiter": self.delimiter, "date_formats": list(self.date_formats)},
        }
        return yaml.safe_dump(doc, sort_keys=False, allow_unicode=True)


class _StrictLoader(yaml.SafeLoader):
    """SafeLoader that refuses duplicate keys instead of keeping the last one."""


def _construct_mapping(loader: _StrictLoader, node: yaml.MappingNode, deep: bool = False):
    seen = set()
    for key_node, _ in node.value:
        key = loader.construct_object(key_node, deep=deep)
        if key in seen:
            raise DuplicateMapping(f"logical field {key!r} is mapped more than once")
        seen.add(key)
    return yaml.SafeLoader.construct_mapping(loader, node, deep=deep)


_StrictLoader.add_constructor(
    yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping
)


def parse_config(text: str) -> FieldMappingSet:
    try:
        doc = yaml.load(text, Loader=_StrictLoader)
    except DuplicateMapping:
        raise
    except yaml.YAMLError as exc:
        raise ParseError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("fields"), dict):
        raise ParseError("config must contain a 'fields:' mapping")

    mappings: list[FieldMapping] = []
    for logical, spec in doc["fields"].items():
        if logical == AUXILIARY:
            columns = spec if isinstance(spec, list) else [spec]
            for col in columns:
                if not isinstance(col, str) or not col:
                    raise ParseError("auxiliary_text entries must be column names")
                mappings.append(FieldMapping(AUXILIARY, col))
            continue
        if logical not in LOGICAL_FIELDS:
            raise ParseError(f"unknown logical field {logical!r}")
        if isinstance(spec, str) and spec:
            column, required = spec, False
        elif isinstance(spec, dict) and isinstance(spec.get("column"), str):
            column, required = spec["column"], bool(spec.get("required", False))
        else:
            raise ParseError(f"field {logical!r} needs a source column name")
        mappings.append(FieldMapping(logical, column, required or logical == PERSON_ID))

    if not any(m.logical_field == PERSON_ID for m in mappings):
        raise MissingMandatoryField("config has no person_id mapping")

    options = doc.get("options") or {}
    if not isinstance(options, dict):
        raise ParseError("'options:' must be a mapping")
    delimiter = options.get("delimiter", ",")
    if not isinstance(delimiter, str) or len(delimiter) != 1:
        raise ParseError("delimiter must be a single character")
    formats = options.get("date_formats", list(DEFAULT_DATE_FORMATS))
    if not isinstance(formats, list) or not all(isinstance(f, str) for f in formats):
        raise ParseError("date_formats must be a list of strptime patterns")
    return FieldMappingSet(tuple(mappings), delimiter, tuple(formats), extra=options)


def load_config(path: str | Path) -> FieldMappingSet:
    """Read and validate a field-mapping configuration file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
