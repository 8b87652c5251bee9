from __future__ import annotations

import io
import json
from pathlib import Path

import pytest

from qlocal.cli import SpecError, parse_group_spec, run

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def call(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_parse_catalog_and_inline():
    g, label = parse_group_spec("catalog:A5")
    assert (g.degree, g.order(), label) == (5, 60, "A5")
    g, _ = parse_group_spec('{"degree": 3, "generators": ["(0 1 2)"]}')
    assert (g.degree, g.order()) == (3, 3)


def test_parse_errors_name_the_position():
    with pytest.raises(SpecError, match=r"generators\[1\].*position 3"):
        parse_group_spec('{"degree": 4, "generators": ["(0 1)", "(0 x 2)"]}')
    with pytest.raises(SpecError, match="line 1 column"):
        parse_group_spec('{"degree": 4,')
    with pytest.raises(SpecError, match="no such file"):
        parse_group_spec("missing-file.json")
    with pytest.raises(SpecError):
        parse_group_spec("catalog:NOPE")


def test_classify_agl():
    code, out, _ = call("classify", "--group", "catalog:AGL(3,2)", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["type"] == "HA" and rep["degree"] == 8 and rep["provisional"] is False


def test_classify_not_quasiprimitive_exits_2():
    code, out, _ = call("classify", "--group", "catalog:D6")
    assert code == 2 and "check failed" in out


def test_compat_check_incompatible_exits_2():
    code, out, _ = call("compat-check", "--left", "catalog:SL(2,5):regular", "--right", "catalog:S5:regular",
                        "--json")
    rep = json.loads(out)
    assert code == 2
    assert rep["reason"] == "no common simple quotient"
    assert rep["certifiedIncompatible"] is True


def test_compat_check_compatible_candidates_pass():
    code, out, _ = call("compat-check", "--left", "catalog:A5xC2:regular", "--right", "catalog:SL(2,5):regular",
                        "--json")
    assert code == 0 and json.loads(out)["passed"] is True


def test_witness_writes_dot(tmp_path):
    dot = tmp_path / "out.dot"
    code, out, _ = call("witness", "--problem", str(PROBLEMS / "s3.json"), "--digraph", str(dot), "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["checks"] and all(rep["checks"].values())
    text = dot.read_text()
    assert text.startswith("digraph") and "->" in text


def test_witness_json_digraph(tmp_path):
    path = tmp_path / "w.json"
    code, _, _ = call("witness", "--problem", str(PROBLEMS / "d8.json"), "--digraph", str(path))
    data = json.loads(path.read_text())
    assert code == 0 and data["vertexCount"] > 1 and data["arcs"]


def test_budget_exhaustion_exits_3():
    code, _, err = call("witness", "--problem", str(PROBLEMS / "s3.json"), "--budget-max-index", "2")
    assert code == 3 and "budget" in err


def test_errors_exit_1():
    code, _, err = call("analyze", "--group", '{"degree": 3, "generators": ["(0 1 2"]}')
    assert code == 1 and "position" in err
    code, _, _ = call("witness", "--problem", '{"group": {"degree": 3, "generators": ["(0 1 2)"]}}')
    assert code == 1


def test_reports_are_byte_identical_on_repeat():
    args = ("witness", "--problem", str(PROBLEMS / "s3.json"), "--seed", "5", "--json")
    assert call(*args) == call(*args)
    args = ("analyze", "--group", "catalog:S4")
    assert call(*args) == call(*args)


def test_human_report_format():
    code, out, _ = call("digraph", "--group", "catalog:S3", "--arc", "0", "1")
    assert code == 0
    assert "arcs: 6" in out and "stronglyConnected: yes" in out and out.endswith("status: ok\n")


def test_catalog_listing():
    code, out, _ = call("catalog", "--json")
    names = {row["name"] for row in json.loads(out)["corpus"]}
    assert code == 0 and {"AGL(3,2)", "HolSym(A5,1)"} <= names
    code, out, _ = call("catalog", "A5", "--json")
    assert json.loads(out)["order"] == 60


def test_selftest_subset():
    code, out, _ = call("selftest", "--only", "1,5,9", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] is True
    assert [c["number"] for c in rep["criteria"]] == [1, 5, 9]
