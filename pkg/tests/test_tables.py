import logging

import numpy as np
import pytest

from capwitness.errors import DataError
from capwitness.tables import (EXPECTED_ROWS, HEADER, TableRow, bundled_table, format_table,
                               ingest_table, parse_table, recompute_from_table, recompute_row,
                               write_table)

ROW = "0.1,0.9,0.001,0.1,0.001,0.8,0.002,0.2,0.002,0.05,0.001,0.95,0.001"


def table_text(*rows):
    return ",".join(HEADER) + "\n" + "\n".join(rows) + "\n"


@pytest.mark.parametrize("kind", sorted(EXPECTED_ROWS))
def test_bundled_tables_load(kind):
    rows = ingest_table(bundled_table(kind), kind)
    assert len(rows) == EXPECTED_ROWS[kind]
    assert rows[0].param == 0.0


def test_header_mismatch():
    with pytest.raises(DataError, match="header"):
        parse_table("param,a,b\n1,2,3\n")


def test_empty_file():
    with pytest.raises(DataError, match="empty"):
        parse_table("")


def test_bad_field_count_and_number():
    with pytest.raises(DataError, match=":2"):
        parse_table(table_text("0.1,0.9"))
    with pytest.raises(DataError):
        parse_table(table_text(ROW.replace("0.9", "abc", 1)))
    with pytest.raises(DataError):
        parse_table(table_text(ROW.replace("0.001", "-0.001", 1)))
    with pytest.raises(DataError):
        parse_table(table_text(ROW.replace("0.9", "nan", 1)))


def test_params_must_increase():
    with pytest.raises(DataError, match="increasing"):
        parse_table(table_text(ROW, ROW))


def test_row_count_checked_for_kind():
    with pytest.raises(DataError, match="expected 21 rows"):
        parse_table(table_text(ROW), "d")
    with pytest.raises(DataError):
        parse_table(table_text(ROW), "xx")


def test_blank_lines_ignored():
    assert len(parse_table(table_text(ROW, ""))) == 1


def test_complement_rule():
    row = parse_table(table_text(ROW))[0]
    q = row.transition_matrix("x").matrix
    np.testing.assert_allclose(q, [[0.8, 0.2], [0.2, 0.8]])
    assert row.transition_matrix("z").sanitization == "table"


def test_consistency_warning_logged(caplog):
    bad = ROW.replace("0.9,0.001,0.1", "0.95,0.001,0.1", 1)
    with caplog.at_level(logging.INFO, logger="capwitness.tables"):
        rows = parse_table(table_text(bad))
    assert rows[0].consistency_warnings()
    assert "axis z" in caplog.text


def test_roundtrip(tmp_path):
    rows = ingest_table(bundled_table("pd"))
    path = tmp_path / "pd.csv"
    write_table(rows, path)
    again = ingest_table(path, "pd")
    assert format_table(again) == format_table(rows)


def test_recompute_row_matches_manual():
    row = TableRow(0.2, {"Qz00": 0.9, "Qz10": 0.1, "Qx00": 0.8, "Qx10": 0.2, "Qy00": 0.3, "Qy10": 0.7},
                   {k: 0.002 for k in ("Qz00", "Qz10", "Qx00", "Qx10", "Qy00", "Qy10")})
    r = recompute_row(row, "paper-abs", draws=2000, rng=np.random.default_rng(0))
    assert r.axes["z"].errors.eps0 == pytest.approx(0.1)
    assert r.axes["y"].errors.eps0 == pytest.approx(0.3)
    assert r.winner == "z"
    assert 0 < r.axes["z"].std["eps0"] < 0.01
    assert r.c_d_std > 0


def test_recompute_is_seeded():
    rows = ingest_table(bundled_table("d"), "d")[:3]
    a = recompute_from_table(rows, draws=500, seed=4)
    b = recompute_from_table(rows, draws=500, seed=4)
    assert [r.c_d_std for r in a] == [r.c_d_std for r in b]
    assert [r.param for r in a] == [0.0, rows[1].param, rows[2].param]


def test_abs_sanitize_differs_from_clamp():
    rows = ingest_table(bundled_table("pd"), "pd")[:1]
    abs_ = recompute_from_table(rows, "paper-abs", draws=0)[0]
    clamp = recompute_from_table(rows, "clamp", draws=0)[0]
    assert abs_.axes["z"].capacity < clamp.axes["z"].capacity
