import json
import sys
from pathlib import Path

import jsonschema
import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

import app as bott_app  # noqa: E402
from config import cli_config  # noqa: E402
from errors import SpecDocumentError  # noqa: E402
from report import (  # noqa: E402
    EXIT_INPUT_ERROR,
    analyze_surface,
    exit_code_for,
    load_surface_spec,
    parse_report,
    parse_surface_spec,
    render_report,
)
from verdict import VerdictStatus, rule_registry  # noqa: E402

EXAMPLES = ROOT / "data" / "examples"
SCHEMA = json.loads((ROOT / "data" / "report.schema.json").read_text(encoding="utf-8"))


@pytest.fixture
def write_doc(tmp_path):
    def _write(name, document):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path
    return _write


@pytest.fixture
def plane_doc(write_doc):
    return write_doc("plane.json", {"gram": [[0, 1], [1, 0]], "ample": [1, 2]})


def run(capsys, *argv):
    code = bott_app.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_degree_22_fails(capsys):
    code, out, _ = run(capsys, "analyze", str(EXAMPLES / "rank1_degree22.json"))
    assert code == 1
    assert "[rank-one-degree-22]" in out
    assert "Status: Fails" in out


def test_analyze_unigonal_cusp_fails(capsys):
    code, out, _ = run(capsys, "analyze", str(EXAMPLES / "unigonal_cusp_b40.json"))
    assert code == 1
    assert "[unigonal-cusp]" in out


def test_analyze_degree_62_json(capsys):
    code, out, _ = run(capsys, "analyze", str(EXAMPLES / "degree62.json"), "--format", "json")
    assert code == 2
    report = parse_report(out)
    assert report.status == "Undetermined"
    assert [r["rule_id"] for r in report.reasons] == ["fano-window", "degree-62-section"]
    assert "(-K_Y)^3 <= 72" in report.reasons[0]["citation"]
    assert report.reasons[0]["witness"]["window"] == [20, 72]
    assert report.computed["pencils"] == []
    assert any("degree-62" in w for w in report.warnings)


def test_analyze_vanishing_reports_multiples(capsys):
    code, out, _ = run(capsys, "analyze", str(EXAMPLES / "rank1_degree24.json"), "--format", "json")
    assert code == 0
    report = parse_report(out)
    assert report.full_bott_vanishing
    assert report.computed["multiples"]["holds"]
    assert report.computed["basepoint_free"]


def test_unigonal_report_computed_data():
    report = analyze_surface(load_surface_spec(EXAMPLES / "unigonal_nodal_b40.json"))
    computed = report.computed
    assert report.status == "Vanishes"
    assert computed["B_squared"] == 40
    assert computed["signature"] == [1, 1]
    assert computed["determinant"] == -1
    assert computed["pencils"] == [{"fiber_class": [0, 1], "r": 1}]
    assert computed["euler_characteristic"] == {"line_bundle": 22, "omega_twist": 20}
    assert computed["basepoint_free"] is False
    assert computed["very_ample"] is False
    assert computed["multiples"]["holds"] is False


@pytest.mark.parametrize("path", sorted(EXAMPLES.glob("*.json")), ids=lambda p: p.stem)
def test_corpus_reports_round_trip(path):
    report = analyze_surface(load_surface_spec(path))
    text = render_report(report, "json")
    assert parse_report(text) == report
    assert render_report(parse_report(text), "json") == text
    jsonschema.validate(instance=json.loads(text), schema=SCHEMA)
    assert report.exit_code == exit_code_for(VerdictStatus(report.status))


def test_report_matches_shipped_schema():
    report = analyze_surface(load_surface_spec(EXAMPLES / "hyperelliptic_nodal_b92.json"))
    document = json.loads(render_report(report, "json"))
    assert set(document) == set(SCHEMA["required"])
    assert set(SCHEMA["properties"]["computed"]["required"]) <= set(document["computed"])
    outcome = document["computed"]["pencil_outcomes"][0]
    assert outcome["status"] == "Vanishes" and outcome["fibers"] == "I2 x12"
    jsonschema.validate(instance=document, schema=SCHEMA)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d["reasons"][0].pop("witness"),
        lambda d: d["reasons"].clear(),
        lambda d: d["computed"].update(very_ample="yes"),
        lambda d: d["computed"]["pencil_outcomes"][0].update(r=5),
        lambda d: d["computed"]["euler_characteristic"].pop("omega_twist"),
        lambda d: d["computed"]["multiples"].update(rule_id=3),
        lambda d: d.update(exit_code=64),
    ],
)
def test_shipped_schema_rejects_drifted_reports(mutate):
    report = analyze_surface(load_surface_spec(EXAMPLES / "hyperelliptic_nodal_b92.json"))
    document = json.loads(render_report(report, "json"))
    mutate(document)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(instance=document, schema=SCHEMA)


def test_exit_codes_are_a_function_of_status():
    assert exit_code_for(VerdictStatus.VANISHES) == 0
    assert exit_code_for(VerdictStatus.FAILS) == 1
    assert exit_code_for(VerdictStatus.UNDETERMINED) == 2
    assert exit_code_for(VerdictStatus.NEEDS_FIBER_DATA) == 2


def test_enumerate_isotropic_classes(capsys, plane_doc):
    code, out, _ = run(capsys, "enumerate", str(plane_doc), "--square", "0", "--degree-min", "1", "--degree-max", "4")
    assert code == 0
    assert "6 classes" in out
    assert out.splitlines()[0].startswith("(0, 1)  square=0  degree=1")


def test_enumerate_minus_two_class(capsys, plane_doc):
    code, out, _ = run(capsys, "enumerate", str(plane_doc), "--square", "-2", "--degree-min", "1", "--degree-max", "1")
    assert code == 0
    assert out.splitlines()[0] == "(1, -1)  square=-2  degree=1"


def test_enumerate_degree_62_has_no_isotropic_class(capsys):
    code, out, _ = run(
        capsys, "enumerate", str(EXAMPLES / "degree62.json"),
        "--square", "0", "--degree-min", "1", "--degree-max", "1000",
    )
    assert code == 0
    assert out.startswith("0 classes")


def test_enumerate_rejects_inverted_window(capsys, plane_doc):
    code, _, err = run(capsys, "enumerate", str(plane_doc), "--square", "0", "--degree-min", "4", "--degree-max", "1")
    assert code == EXIT_INPUT_ERROR
    assert "empty degree window" in err


def test_delpezzo_command(capsys):
    code, out, _ = run(capsys, "delpezzo", "--degree", "5")
    assert code == 0
    assert "10 (-1)-curves" in out
    assert "Petersen: yes" in out

    code, out, _ = run(capsys, "delpezzo", "--degree", "6")
    assert code == 0
    assert "6-cycle" in out

    code, _, err = run(capsys, "delpezzo", "--degree", "8")
    assert code == EXIT_INPUT_ERROR
    assert "degree" in err


@pytest.mark.parametrize(
    "document, field",
    [
        ({"gram": [[0, 1], [1, 0]]}, "ample"),
        ({"gram": [[0, 1], [1, 0]], "ample": [1, 2], "rank_one": {"degree": 2}}, "document"),
        ({"gram": [[0, 1], [1, 0]], "ample": [1, 2, 3]}, "ample"),
        ({"gram": [[0, 1], [2, 0]], "ample": [1, 2]}, "gram"),
        ({"rank_one": {"degree": 3}}, "rank_one.degree"),
        ({"rank_one": {"degree": 2, "multiple": 0}}, "rank_one.multiple"),
        ({"gram": [[-2, 1], [1, 0]], "ample": [1, 21],
          "fibrations": [{"fiber_class": [0, 1], "singular_fibers": [{"type": "I*", "count": 1}]}]},
         "fibrations[0].singular_fibers[0].type"),
        ({"gram": [[-2, 1], [1, 0]], "ample": [1, 21],
          "fibrations": [{"fiber_class": [0, 1], "singular_fibers": [{"type": "I12", "count": 2}]}]},
         "fibrations[0].singular_fibers[0].type"),
        ({"gram": [[0, 1], [1, 0]], "ample": [1, 2], "expected_status": "Maybe"}, "expected_status"),
        ({"gram": [[0, 1], [1, 0]], "ample": [1, 2], "basis_labels": 7}, "basis_labels"),
        ({"gram": [[0, 1], [1, 0]], "ample": [1, 2], "basis_labels": ["E", 2]}, "basis_labels"),
        ({"gram": [[0, 1], [1, 0]], "ample": [1, 2], "basis_labels": ["E"]}, "basis_labels"),
        ([1, 2], "document"),
    ],
)
def test_malformed_documents_name_the_field(document, field):
    with pytest.raises(SpecDocumentError) as info:
        parse_surface_spec(document)
    assert info.value.field == field


def test_analyze_malformed_document_exits_64(capsys, write_doc):
    path = write_doc("bad.json", {"gram": [[0, 1], [1, 0]]})
    code, out, err = run(capsys, "analyze", str(path))
    assert code == EXIT_INPUT_ERROR
    assert out == ""
    assert "ample" in err


def test_analyze_invalid_polarization_exits_64(capsys, write_doc):
    path = write_doc("wall.json", {"gram": [[0, 1], [1, 0]], "ample": [1, 1]})
    code, _, err = run(capsys, "analyze", str(path))
    assert code == EXIT_INPUT_ERROR
    assert "(1, -1)" in err


def test_line_bundle_must_be_in_the_ample_chamber(capsys, write_doc):
    path = write_doc("plane.json", {"gram": [[0, 1], [1, 0]], "ample": [1, 2], "line_bundle": [2, 1]})
    code, _, err = run(capsys, "analyze", str(path))
    assert code == EXIT_INPUT_ERROR
    assert "not nef" in err


def test_line_bundle_in_chamber_is_analyzed():
    spec = parse_surface_spec({"gram": [[-2, 1], [1, 0]], "ample": [1, 21], "line_bundle": [1, 51]})
    report = analyze_surface(spec)
    assert report.computed["B_squared"] == 100
    assert report.status == "NeedsFiberData"


def test_batch_over_bundled_corpus(capsys):
    code, out, _ = run(capsys, "batch", str(EXAMPLES))
    assert code == 0
    documents = len(list(EXAMPLES.glob("*.json")))
    assert f"{documents}/{documents} documents match" in out
    assert "MISMATCH" not in out


def test_batch_default_directory_is_configured():
    assert cli_config.examples_dir.resolve() == EXAMPLES.resolve()


def test_batch_reports_mismatch(capsys, write_doc):
    write_doc("wrong.json", {"rank_one": {"degree": 22, "multiple": 1}, "expected_status": "Vanishes"})
    path = write_doc("right.json", {"rank_one": {"degree": 24, "multiple": 1}, "expected_status": "Vanishes"})
    code, out, _ = run(capsys, "batch", str(path.parent))
    assert code == 1
    assert "MISMATCH" in out
    assert "1/2 documents match" in out


def test_non_utf8_document_exits_64(capsys, tmp_path):
    path = tmp_path / "binary.json"
    path.write_bytes(b'{"gram": [[0, 1], [1, 0]], "ample": [1, 2], "name": "\xff\xfe"}')
    with pytest.raises(SpecDocumentError) as info:
        load_surface_spec(path)
    assert info.value.field == "document"

    code, out, err = run(capsys, "analyze", str(path))
    assert code == EXIT_INPUT_ERROR
    assert out == ""
    assert "UTF-8" in err


def test_bad_basis_labels_exit_64(capsys, write_doc):
    path = write_doc("labels.json", {"gram": [[0, 1], [1, 0]], "ample": [1, 2], "basis_labels": 7})
    code, _, err = run(capsys, "analyze", str(path))
    assert code == EXIT_INPUT_ERROR
    assert "basis_labels" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "x.json", "--format", "xml"],
        ["enumerate", "x.json", "--degree-min", "1", "--degree-max", "2"],
        ["enumerate", "x.json", "--square", "zero", "--degree-min", "1", "--degree-max", "2"],
        ["delpezzo"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors_exit_64(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_INPUT_ERROR
    assert out == ""
    assert "usage:" in err


def test_help_exits_0(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0
    assert "analyze" in out


def test_rules_command_lists_the_registry(capsys):
    code, out, _ = run(capsys, "rules", "--format", "json")
    assert code == 0
    listed = json.loads(out)
    assert [item["rule_id"] for item in listed] == [rule_id for rule_id, _ in rule_registry()]
    assert {"riemann-roch", "fano-window", "unigonal-cusp"} <= {item["rule_id"] for item in listed}

    code, out, _ = run(capsys, "rules")
    assert code == 0
    assert out.splitlines()[0].startswith("riemann-roch")
