"""Deterministic CSV rendering."""
import numpy as np
import pytest

from planarwalk.csvio import emit_csv, format_value, render_csv


def test_format_value_types():
    assert format_value(True) == "1"
    assert format_value(False) == "0"
    assert format_value(7) == "7"
    assert format_value(np.int64(-3)) == "-3"
    assert format_value(0.1) == "0.1"
    assert format_value(np.float64(1 / 3)) == "0.333333333333"
    assert format_value(1e-15) == "1e-15"
    assert format_value("label") == "label"


def test_render_layout_and_determinism():
    rows = [(1, 0.5, True), (2, 1.0 / 3.0, False)]
    schema = ["n", "p", "ok"]
    meta = {"seed": 0, "alpha": 0.25}
    text = render_csv(rows, schema, meta)
    assert text == render_csv(rows, schema, meta)  # byte-identical
    lines = text.splitlines()
    assert lines[0] == "# planarwalk format=1 seed=0 alpha=0.25"
    assert lines[1] == "n,p,ok"
    assert lines[2] == "1,0.5,1"
    assert lines[3] == "2,0.333333333333,0"
    assert text.endswith("\n") and "\r" not in text


def test_dict_rows_follow_the_schema_order():
    text = render_csv([{"b": 2, "a": 1}], ["a", "b"], {})
    assert text.splitlines()[2] == "1,2"


def test_row_width_is_enforced():
    with pytest.raises(ValueError):
        render_csv([(1, 2)], ["a", "b", "c"], {})


def test_meta_values_never_break_the_header_grammar():
    text = render_csv([], ["x"], {"note": "two words", "k": 1})
    header = text.splitlines()[0]
    tokens = header.split(" ")[2:]  # after "# planarwalk"
    assert all("=" in t for t in tokens)
    assert "note=two_words" in tokens


def test_emit_csv_writes_lf_file(tmp_path):
    dest = tmp_path / "out.csv"
    text = emit_csv([(1,)], ["v"], str(dest), {"seed": 3})
    raw = dest.read_bytes()
    assert raw == text.encode("utf-8")
    assert b"\r" not in raw


def test_emit_csv_stdout(capsys):
    emit_csv([(1,)], ["v"], "-", {})
    assert capsys.readouterr().out.splitlines()[1] == "v"
