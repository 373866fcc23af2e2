import csv
import io
import json
from pathlib import Path

import pytest

from esagraph import catalog
from esagraph.cli import dumps, execute, parse_horizons, parse_lambda

FAMILIES = Path(__file__).resolve().parents[1] / "families"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = execute(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, text, err = run(*argv)
    assert code == 0, err
    return json.loads(text)


def test_reproduce_example2_at_zero():
    rep = run_json("reproduce", "example2", "--A", "0")
    res = rep["results"]
    assert res["verdict"]["status"] == "NotESA"
    assert res["verdict"]["rule"] == "WeylNumeric"
    assert all(m < 1 for m in res["root_moduli"])
    assert res["table"][0]["matches"]


def test_reproduce_example4_small_branching():
    res = run_json("reproduce", "example4", "--N", "1")["results"]
    assert res["table"][0]["status"] == "NotESA"
    assert res["table"][0]["rule"] == "ThmNonComplete"


@pytest.mark.parametrize("example", ["example1", "example3"])
def test_reproduce_incomplete_examples(example):
    res = run_json("reproduce", example)["results"]
    row = res["table"][0]
    assert (row["status"], row["rule"], row["matches"]) == ("NotESA", "ThmNonComplete", True)


def test_missing_file_exits_one():
    code, text, err = run("classify", "--family", "/nonexistent/missing.json")
    assert code == 1
    assert text == ""
    assert "file not found" in err and "missing.json" in err


def test_malformed_json_exits_one(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "end", ')
    code, _, err = run("classify", "--family", str(bad))
    assert code == 1
    assert "malformed JSON" in err


def test_unknown_kind_exits_one(tmp_path):
    bad = tmp_path / "odd.json"
    bad.write_text('{"kind": "mesh"}')
    code, _, err = run("classify", "--family", str(bad))
    assert code == 1 and "mesh" in err


def test_bad_arguments_exit_one():
    code, _, err = run("reproduce", "example5")
    assert code == 1
    assert err.startswith("esagraph: error:")


def test_output_is_byte_identical():
    argv = ("sweep", "--family", str(FAMILIES / "example2.json"), "--param", "A",
            "--from", "-1", "--to", "1", "--step", "0.5", "--jobs", "3")
    first = run(*argv)
    assert first[0] == 0
    assert run(*argv) == first
    assert run(*argv[:-2]) == first      # thread count does not change the output


def test_timing_is_opt_in():
    assert "wall_time" not in run_json("reproduce", "example1")
    assert run_json("reproduce", "example1", "--timing")["wall_time"] >= 0


def test_strict_flags_inconclusive():
    code, _, _ = run("reproduce", "example2", "--A", repr(catalog.A0), "--strict")
    assert code == 2
    code, _, _ = run("reproduce", "example2", "--A", repr(catalog.A0))
    assert code == 0
    code, _, _ = run("reproduce", "example2", "--A", "1", "--strict")
    assert code == 0


def test_sweep_csv_rows_in_grid_order():
    code, text, err = run("sweep", "--family", str(FAMILIES / "example2.json"), "--param", "A",
                          "--values=1,-4,0", "--format", "csv", "--jobs", "4")
    assert code == 0, err
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [float(r["A"]) for r in rows] == [1.0, -4.0, 0.0]
    assert [r["status"] for r in rows] == ["ESA", "ESA", "NotESA"]
    assert set(rows[0]) == {"A", "status", "rule", "root_moduli", "conflict"}


def test_set_parameter_on_tree_family():
    res = run_json("classify", "--family", str(FAMILIES / "tree.json"), "--set", "N=2")["results"]
    assert res["status"] == "NotESA"


def test_missing_placeholder_value_is_an_error():
    code, _, err = run("classify", "--family", str(FAMILIES / "tree.json"))
    assert code == 1 and "$N" in err


def test_starlike_family_classifies():
    res = run_json("classify", "--family", str(FAMILIES / "starlike.json"))["results"]
    assert res["status"] == "NotESA"
    assert res["rule"] == "ThmNonComplete"


def test_metric_and_weyl_and_dirichlet_commands():
    fam = str(FAMILIES / "example1.json")
    metric = run_json("metric", "--family", fam)["results"]
    assert metric
    weyl = run_json("weyl", "--family", fam)["results"]
    assert weyl
    dirichlet = run_json("dirichlet", "--family", fam, "--horizons", "50,100")["results"]
    assert dirichlet


def test_parse_helpers():
    assert parse_lambda("1j") == 1j
    assert parse_lambda("-2") == -2
    assert parse_horizons("100,200") == [100, 200]


def test_dumps_is_deterministic_and_handles_specials():
    text = dumps({"b": float("nan"), "a": float("inf"), "c": 0.1})
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": "Infinity", "b": "NaN", "c": 0.1}
