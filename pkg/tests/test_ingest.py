import csv
import logging

import pytest

from cohort.errors import DuplicateMapping, HeaderMismatch, MissingMandatoryField, ParseError
from cohort.fields import load_config, parse_config
from cohort.ingest import ingest_raw, parse_date, write_rejects

CONFIG = """
fields:
  person_id: nro_alumno
  national_doc: dni
  full_name: apellido_nombre
  birth_date: fecha_nac
  school_name: colegio
  intake_date: fecha_ingreso
  auxiliary_text: [obs1, obs2]
options:
  delimiter: ","
"""
HEADER = ["nro_alumno", "dni", "apellido_nombre", "fecha_nac", "colegio", "fecha_ingreso", "obs1", "obs2"]


@pytest.fixture
def mapping():
    return parse_config(CONFIG)


def write_csv(path, rows, header=HEADER):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def test_minimal_config_has_two_mappings():
    m = parse_config("fields:\n  person_id: nro_alumno\n  school_name: colegio\n")
    assert len(m) == 2
    assert m.source_for("school_name") == "colegio"
    assert [x.required for x in m] == [True, False]


def test_config_without_person_id_is_rejected():
    with pytest.raises(MissingMandatoryField):
        parse_config("fields:\n  school_name: colegio\n")


def test_field_mapped_twice_is_rejected():
    with pytest.raises(DuplicateMapping):
        parse_config("fields:\n  person_id: a\n  school_name: colegio\n  school_name: escuela\n")


def test_unknown_logical_field_and_bad_yaml(tmp_path):
    with pytest.raises(ParseError):
        parse_config("fields:\n  person_id: a\n  shoe_size: b\n")
    with pytest.raises(ParseError):
        parse_config("fields: [unclosed\n")
    with pytest.raises(ParseError):
        load_config(tmp_path / "absent.yaml")


def test_auxiliary_text_may_repeat(mapping):
    assert mapping.auxiliary_columns == ["obs1", "obs2"]


def test_config_round_trips_through_yaml(mapping):
    again = parse_config(mapping.to_yaml())
    assert again.mappings == mapping.mappings


def test_empty_file_gives_no_records(tmp_path, mapping):
    res = ingest_raw(write_csv(tmp_path / "raw.csv", []), mapping)
    assert res.records == [] and res.row_count == 0


def test_missing_mapped_column_is_header_mismatch(tmp_path, mapping):
    path = write_csv(tmp_path / "raw.csv", [], header=HEADER[:-1])
    with pytest.raises(HeaderMismatch):
        ingest_raw(path, mapping)


def test_malformed_rows_are_quarantined_not_dropped(tmp_path, mapping):
    path = tmp_path / "raw.csv"
    path.write_text(
        ",".join(HEADER) + "\n"
        "1,20123456,Pérez Ana,1980-01-02,Colegio Nacional,1998-03-01,,\n"
        "2,too,few\n"
        ",1,no id,,,,,\n"
        "3,,Gómez Luis,02/03/1981,nan,1999-03-01,x,y\n",
        encoding="utf-8",
    )
    res = ingest_raw(path, mapping)
    assert [r.person_id_original for r in res.records] == ["1", "3"]
    assert [r.row_number for r in res.rejects] == [2, 3]
    assert len(res.records) + len(res.rejects) == res.row_count == 4
    write_rejects(tmp_path / "rejects.csv", res.rejects)
    rows = list(csv.DictReader(open(tmp_path / "rejects.csv", encoding="utf-8")))
    assert rows[0]["raw_line"] == "2,too,few"
    assert set(rows[0]) == {"row_number", "reason", "raw_line"}


def test_unparseable_date_is_kept_absent_with_warning(tmp_path, mapping, caplog):
    path = write_csv(tmp_path / "raw.csv", [["7", "", "Ruiz Eva", "31/02/1980", "x", "1999-03-01", "", ""]])
    with caplog.at_level(logging.WARNING, logger="cohort.ingest"):
        res = ingest_raw(path, mapping)
    rec = res.records[0]
    assert rec.birth_date is None
    assert rec.raw["birth_date"] == "31/02/1980"
    assert res.warnings == [(1, "birth_date", "unparseable date '31/02/1980'")]
    assert "cell warnings" in caplog.text


def test_no_cleaning_at_ingest(tmp_path, mapping):
    row = ["0042", " 20.123.456 ", "  PÉREZ,  ana ", "1980-01-02", "nan", "1998-03-01", "NULL", " nota "]
    rec = ingest_raw(write_csv(tmp_path / "raw.csv", [row]), mapping).records[0]
    assert rec.raw["person_id"] == "0042"
    assert rec.raw["national_doc"] == " 20.123.456 "
    assert rec.raw["full_name"] == "  PÉREZ,  ana "
    # Missing markers are absent at the typed level but survive verbatim.
    assert rec.school_name is None and rec.raw["school_name"] == "nan"
    assert rec.auxiliary_texts == ("NULL", " nota ")


def test_invalid_utf8_is_replaced_and_logged(tmp_path, mapping):
    path = tmp_path / "raw.csv"
    path.write_bytes(",".join(HEADER).encode() + b"\n1,,P\xe9rez,,,,,\n")  # latin-1 byte, not UTF-8
    res = ingest_raw(path, mapping)
    assert "�" in res.records[0].raw["full_name"]
    assert any("UTF-8" in w[2] for w in res.warnings)


def test_ingest_is_deterministic(tmp_path, mapping):
    rows = [[str(i), str(20_000_000 + i), f"Name {i}", "1980-01-02", "Escuela", "1998-03-01", "", ""]
            for i in range(50)]
    path = write_csv(tmp_path / "raw.csv", rows)
    assert ingest_raw(path, mapping).records == ingest_raw(path, mapping).records


def test_date_formats_tried_in_order():
    formats = ("%Y-%m-%d", "%d/%m/%Y")
    assert parse_date("1980-01-02", formats).isoformat() == "1980-01-02"
    assert parse_date("02/01/1980", formats).isoformat() == "1980-01-02"
    assert parse_date("nan", formats) is None
    assert parse_date("1980/01/02", formats) is None


def test_custom_delimiter(tmp_path):
    m = parse_config("fields:\n  person_id: id\n  full_name: nombre\noptions:\n  delimiter: ';'\n")
    path = tmp_path / "raw.csv"
    path.write_text("id;nombre\n1;Ana, María\n", encoding="utf-8")
    assert ingest_raw(path, m).records[0].raw["full_name"] == "Ana, María"
