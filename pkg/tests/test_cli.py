import csv
import io
import json
import os

import pytest

from systole_census import cli
from systole_census.cli import (
    EXIT_IO,
    EXIT_OK,
    EXIT_RESOURCE,
    EXIT_VERIFY_FAIL,
    load_cached_matrix,
    main,
    store_cached_matrix,
)
from systole_census.geodesic_intersections import intersection_matrix


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_census_csv_shape(capsys):
    code, out, _ = run(capsys, "census", "--n-min", "3", "--n-max", "10")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == cli.CSV_COLUMNS
    assert len(rows) == 1 + 8
    row7 = next(r for r in rows[1:] if r[0] == "7")
    assert row7[3] == "3"  # genus column


def test_census_squarefree_filter_drops_n4(capsys):
    code, out, _ = run(
        capsys, "census", "--n-min", "3", "--n-max", "6", "--squarefree-only"
    )
    assert code == EXIT_OK
    levels = [r[0] for r in list(csv.reader(io.StringIO(out)))[1:]]
    assert levels == ["3", "5"]  # 12 and 32 are not squarefree


def test_census_json_schema(capsys):
    code, out, _ = run(
        capsys,
        "census",
        "--n-min",
        "3",
        "--n-max",
        "5",
        "--format",
        "json",
        "--include-matrices",
    )
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["schema_version"] == "1"
    assert "generated_at" in doc
    assert doc["parameters"]["n_min"] == 3
    assert [r["N"] for r in doc["rows"]] == [3, 4, 5]
    assert doc["matrices"]["5"]["entries"] == [[4, 8], [8, 4]]


def test_census_no_timestamp_byte_identical(tmp_path, capsys):
    args = [
        "census",
        "--n-min",
        "3",
        "--n-max",
        "6",
        "--format",
        "json",
        "--no-timestamp",
        "--cache-dir",
        str(tmp_path / "cache"),
    ]
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)  # warm cache second time
    assert code1 == code2 == EXIT_OK
    assert out1 == out2
    assert "generated_at" not in out1


def test_census_output_file_and_figures(tmp_path, capsys):
    out_file = tmp_path / "table.csv"
    figdir = tmp_path / "figs"
    code, _, err = run(
        capsys,
        "census",
        "--n-min",
        "3",
        "--n-max",
        "6",
        "--output",
        str(out_file),
        "--figures",
        str(figdir),
    )
    assert code == EXIT_OK
    assert out_file.exists()
    names = sorted(os.listdir(figdir))
    assert names == ["census_counts.png", "exponent_trends.png"]
    assert "wrote" in err


def test_census_unwritable_output_is_io_error(tmp_path, capsys):
    code, _, err = run(
        capsys,
        "census",
        "--n-min",
        "3",
        "--n-max",
        "4",
        "--output",
        str(tmp_path / "missing" / "table.csv"),
    )
    assert code == EXIT_IO
    assert "I/O error" in err


def test_census_bad_range_is_usage_error(capsys):
    code, _, _ = run(capsys, "census", "--n-min", "9", "--n-max", "3")
    assert code == 2


def test_cache_round_trip_and_staleness(tmp_path):
    cache = str(tmp_path)
    m = intersection_matrix(5)
    store_cached_matrix(cache, m)
    assert load_cached_matrix(cache, 5) == m
    # stale algorithm version is recomputed, never reused
    path = tmp_path / "5.json"
    doc = json.loads(path.read_text())
    doc["payload"]["algorithm_version"] = "0"
    path.write_text(json.dumps(doc))
    assert load_cached_matrix(cache, 5) is None
    # corrupted content hash is rejected
    store_cached_matrix(cache, m)
    doc = json.loads(path.read_text())
    doc["payload"]["entries"][0][0] += 1
    path.write_text(json.dumps(doc))
    assert load_cached_matrix(cache, 5) is None
    # garbage file is rejected
    path.write_text("not json")
    assert load_cached_matrix(cache, 5) is None


def test_verify_index(capsys):
    code, out, _ = run(capsys, "verify", "index", "--n-min", "2", "--n-max", "10")
    assert code == EXIT_OK
    assert "0 failures" in out


def test_verify_cnf_json(capsys):
    code, out, _ = run(
        capsys,
        "verify",
        "cnf",
        "--n-min",
        "3",
        "--n-max",
        "9",
        "--tol",
        "1e-3",
        "--format",
        "json",
    )
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["failures"] == 0
    statuses = {item["item"]: item["status"] for item in doc["items"]}
    assert any("N=4" in k and v == "skip" for k, v in statuses.items())


def test_verify_genus_and_lemma4_and_prop2(capsys):
    for kind, extra in (
        ("genus", ["--n-max", "40"]),
        ("lemma4", ["--seed", "1"]),
        ("prop2", ["--n-min", "3", "--n-max", "9"]),
    ):
        code, out, _ = run(capsys, "verify", kind, *extra)
        assert code == EXIT_OK, (kind, out)
        assert "0 failures" in out


def test_verify_unknown_kind_usage_exit():
    with pytest.raises(SystemExit) as exc_info:
        main(["verify", "bogus"])
    assert exc_info.value.code == 2


def test_intersections_text_and_certificate(capsys):
    code, out, _ = run(capsys, "intersections", "3")
    assert code == EXIT_OK
    assert "enumeration_bound" in out and "total=2" in out


def test_intersections_nonsquarefree_flagged(capsys):
    code, out, _ = run(capsys, "intersections", "4", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["squarefree"] is False
    assert doc["N"] == 4


def test_intersections_cached_rerun_identical(tmp_path, capsys):
    args = ["intersections", "5", "--format", "json", "--cache-dir", str(tmp_path)]
    _, out1, _ = run(capsys, *args)
    _, out2, _ = run(capsys, *args)
    assert out1 == out2


def test_class_number_command(capsys):
    code, out, _ = run(capsys, "class-number", "12")
    assert code == EXIT_OK
    assert "h=2" in out
    code, _, err = run(capsys, "class-number", "7")
    assert code == 2 and "invalid" in err


def test_l_value_command(capsys):
    code, out, _ = run(capsys, "l-value", "5", "--tol", "1e-4", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert abs(doc["value"] - 0.4304089409640040) < 2e-4
    code, _, _ = run(capsys, "l-value", "3477", "--tol", "1e-12")
    assert code == EXIT_RESOURCE


def test_subfamily_from_matrix_file(tmp_path, capsys):
    doc = {"entries": [[0, 2, 1], [2, 0, 0], [1, 0, 0]]}
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(
        capsys, "subfamily", "2", "--matrix", str(path), "--format", "json"
    )
    assert code == EXIT_OK
    result = json.loads(out)
    assert len(result["subset"]) == 2
    bound = (2 / 3) ** 2 * 3
    assert result["crossing_number"] < bound


def test_subfamily_from_level(capsys):
    code, out, _ = run(
        capsys, "subfamily", "1", "--from-level", "5", "--format", "json"
    )
    assert code == EXIT_OK
    assert json.loads(out)["crossing_number"] == 0


def test_subfamily_needs_source(capsys):
    code, _, err = run(capsys, "subfamily", "2")
    assert code == 2 and "subfamily needs" in err


def test_lower_bound_command(capsys):
    code, out, _ = run(capsys, "lower-bound", "2", "10")
    assert code == EXIT_OK and ">= 4" in out
    code, _, _ = run(capsys, "lower-bound", "1", "10")
    assert code == 2


def test_env_variable_defaults(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SYSTOLE_N_MAX", "5")
    monkeypatch.setenv("SYSTOLE_FORMAT", "json")
    code, out, _ = run(capsys, "census", "--n-min", "3", "--no-timestamp")
    assert code == EXIT_OK
    doc = json.loads(out)  # format came from the environment
    assert [r["N"] for r in doc["rows"]] == [3, 4, 5]
    # flags beat the environment
    code, out, _ = run(
        capsys, "census", "--n-min", "3", "--n-max", "4", "--format", "csv"
    )
    assert code == EXIT_OK
    assert out.startswith("N,")
