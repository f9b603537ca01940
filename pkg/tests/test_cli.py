import csv
import io
import json
import subprocess
import sys

import pytest

from subposet.cli import run
from subposet.core_family import load_family


def call(argv):
    buf = io.StringIO()
    code = run(argv, stdout=buf)
    return code, buf.getvalue()


def call_json(argv):
    code, out = call(argv)
    return code, json.loads(out)


def test_construct_knl_to_file(tmp_path):
    path = tmp_path / "fam.txt"
    code, out = call_json(["construct", "knl", "--n", "7", "--k", "3", "--l", "3", "--out", str(path)])
    assert code == 0
    fam = load_family(path.read_text())
    assert out["size"] == str(len(fam)) and out["out"] == str(path)


def test_construct_inline_kt():
    code, out = call_json(["construct", "kt", "--n", "3"])
    assert code == 0
    assert out["family"] == "n=3\n1\n2\n1,3\n2,3\n"


def test_count_and_free(tmp_path):
    path = tmp_path / "fam.txt"
    path.write_text("n=3\n1\n2\n1,3\n2,3\n")
    code, out = call_json(["count", "--family", str(path), "--poset", "wedge:1"])
    assert code == 0 and out["value"] == "2"
    code, out = call_json(["free", "--family", str(path), "--forbid", "wedge:2", "--forbid", "vee:2"])
    assert code == 0 and out["free"] is True


def test_search():
    code, out = call_json(["search", "--n", "3", "--forbid", "chain:3", "--target", "chain:2"])
    assert code == 0
    assert out["value"] == "6" and out["exhausted"] is True
    assert load_family(out["witness"]).n == 3


def test_formula_values():
    assert call_json(["formula", "chains", "--n", "4", "--sizes", "3,2,1"])[1]["value"] == "24"
    assert call_json(["formula", "erdos", "--n", "4", "--k", "2"])[1]["value"] == "10"
    out = call_json(["formula", "lachain", "--n", "3", "--k", "3", "--l", "2"])[1]
    assert (out["value"], out["levels"]) == ("6", "1,2")
    out = call_json(["formula", "constant", "--k", "4", "--l", "4", "--s", "1"])[1]
    assert out["value"] == "3/2" and out["value_decimal"] == "1.5"


def test_table_csv():
    code, text = call(["table", "--n", "3-5", "--k", "3", "--format", "csv"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["n"] for r in rows] == ["3", "4", "5"]
    assert rows[0]["value"] == "6"


def test_verify_knl():
    code, out = call_json(["verify", "knl", "--n", "10", "--k", "3", "--l", "3"])
    assert code == 0 and out["ok"] is True


def test_verify_random_suites_are_reproducible():
    a = call(["verify", "augment", "--k", "4", "--l", "4", "--seed", "5", "--instances", "20"])
    b = call(["verify", "augment", "--k", "4", "--l", "4", "--seed", "5", "--instances", "20"])
    assert a == b and json.loads(a[1])["ok"] is True
    code, out = call_json(["verify", "hall", "--seed", "1", "--instances", "30"])
    assert code == 0 and out["violations"] == "0"
    code, out = call_json(["verify", "repair", "--seed", "2", "--instances", "10"])
    assert code == 0 and out["ok"] is True


def test_verify_repair_file(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("n=4\n1\n2\n1,2\n1,2,3\n1,2,4\n")
    code, out = call_json(["verify", "repair", "--family", str(path)])
    assert code == 0 and out["ok"] is True
    assert out["components"] == [{"vertices": "6", "edges": "8", "repaired": True, "ratio_ok": True}]


def test_verify_hall_file(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"A": ["a1", "a2"], "B": ["b"], "edges": [["a1", "b"], ["a2", "b"]]}))
    code, out = call_json(["verify", "hall", "--graph", str(path)])
    assert code == 0 and out["covers_b"] is True and out["matching"] == {"b": "a1"}


@pytest.mark.parametrize(
    "argv, kind",
    [
        (["count", "--family", "/nonexistent/f.txt", "--poset", "chain:2"], "domain_error"),
        (["search", "--n", "9", "--forbid", "chain:2"], "parameter"),
        (["construct", "knl", "--n", "16", "--k", "3", "--l", "3", "--cap", "5"], "cap_exceeded"),
        (["formula", "constant", "--k", "3", "--l", "3", "--s", "5"], "parameter"),
        (["search", "--n", "3", "--forbid", "blob:2"], "poset_spec"),
    ],
)
def test_domain_errors(argv, kind):
    code, out = call_json(argv)
    assert code == 1 and out["error"] == kind and out["message"]


def test_malformed_family_file(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("n=3\n1,9\n")
    code, out = call_json(["count", "--family", str(path), "--poset", "chain:2"])
    assert code == 1 and out["error"] == "family_format"


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["verify", "augment", "--k", "3", "--l", "3"],
        ["verify", "hall"],
        ["construct", "knl", "--n", "7"],
        ["formula", "erdos", "--n", "3"],
        ["search", "--n", "3"],
        ["table", "--n", "3-x", "--k", "3"],
    ],
)
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        run(argv, stdout=io.StringIO())
    assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "subposet", "formula", "erdos", "--n", "3", "--k", "1"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["value"] == "3"
