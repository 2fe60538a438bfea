"""Per-person missing_school_type indicator with stratification covariates."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import SpecMismatch
from ..normalise.iterations import CleanStudentRecord
from ..normalise.rules import DATA_MISSING
from ..records import write_rows

UNDATED = "UNDATED"
NA = "NA"

COVARIATES = ("decade", "entry_decade", "entry_year", "degree", "sex",
              "country_birth", "province_birth", "locality_birth")

FLAG_COLUMNS = (
    "person_id_original", "person_id_canonical", "missing_school_type", "entry_year",
    "entry_decade", "degree", "sex", "country_birth_id", "province_birth_id", "locality_birth_id",
)


@dataclass(frozen=True)
class MissingnessFlagRecord:
    person_id_original: str
    person_id_canonical: str
    missing_school_type: int
    entry_year: int | None
    entry_decade: int | str
    degree: str
    sex: str
    country_birth_id: int | None
    province_birth_id: int | None
    locality_birth_id: int | None

    def covariate(self, name: str):
        if name in ("decade", "entry_decade"):
            return self.entry_decade
        if name in ("province_birth", "country_birth", "locality_birth"):
            return getattr(self, name + "_id")
        if name not in COVARIATES:
            raise SpecMismatch(f"unknown covariate {name!r}")
        return getattr(self, name)


def decade_of(year: int | None) -> int | str:
    return UNDATED if year is None else (year // 10) * 10


def build_flags(v3: list[CleanStudentRecord]) -> list[MissingnessFlagRecord]:
    out = []
    for r in v3:
        degree = r.value("degree")
        sex = r.value("sex")
        out.append(MissingnessFlagRecord(
            person_id_original=r.person_id_original,
            person_id_canonical=r.person_id_canonical or r.person_id_original,
            missing_school_type=1 if r.school_type_final == DATA_MISSING else 0,
            entry_year=r.entry_year,
            entry_decade=decade_of(r.entry_year),
            degree=degree.strip() if degree else NA,
            sex=sex.strip().upper() if sex else NA,
            country_birth_id=r.country_birth_id,
            province_birth_id=r.province_birth_id,
            locality_birth_id=r.locality_birth_id,
        ))
    return out


def write_flags(path, flags: list[MissingnessFlagRecord]) -> None:
    write_rows(path, FLAG_COLUMNS, ([getattr(f, c) for c in FLAG_COLUMNS] for f in flags))
