import csv
import io
import json
import re
import subprocess
import sys

import jsonschema
import pytest

from mixedlink.cli import CERTIFY_SCHEMA, REPORT_SCHEMA, main


@pytest.fixture
def poly(tmp_path):
    def write(text, name="f.txt"):
        p = tmp_path / name
        p.write_text(text + "\n")
        return str(p)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_text_and_json(capsys, poly):
    f = poly("z1^3 + z2^2")
    code, out, _ = run(capsys, "analyze", f)
    assert code == 0
    assert "radial: Q=[2, 3] m_r=6" in out and "polar: P=[2, 3] m_p=6" in out
    assert "non-degeneracy: probed, not proven" in out
    code, out, _ = run(capsys, "analyze", f, "--json")
    data = json.loads(out)
    assert data["homogeneity"]["radial"]["weights"] == [2, 3]


def test_analyze_not_convenient(capsys, poly):
    code, out, _ = run(capsys, "analyze", poly("z1*z2"))
    assert code == 0 and "not convenient: axes 1,2 missing" in out


def test_analyze_dimension_mismatch(capsys, poly):
    code, _, err = run(capsys, "analyze", poly("z1 + z2"), "--n", "1")
    assert code == 1 and "error" in err


def test_pullback_example(capsys, poly):
    code, out, _ = run(capsys, "pullback", poly("z1^2 + z2^2"), "--a", "2", "--b", "1")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "w1^4*~w1^2 + w2^4*~w2^2"
    assert "covering degree 1" in lines
    assert "rdeg 6, pdeg 2" in lines


def test_pullback_out_file(capsys, poly, tmp_path):
    out_path = tmp_path / "g.txt"
    code, out, _ = run(capsys, "pullback", poly("z1"), "--a", "2", "--b", "1", "--out", str(out_path))
    assert code == 0 and out_path.read_text().strip() == "w1^2*~w1"


@pytest.mark.parametrize("argv", [["pullback", "--a", "1", "--b", "1"], ["certify", "--check", "nope"], ["frobnicate"]])
def test_usage_errors(capsys, poly, argv):
    if argv[0] == "pullback":
        argv = [argv[0], poly("z1 + z2")] + argv[1:]
    code, _, _ = run(capsys, *argv)
    assert code == 1


def test_parse_error_is_usage(capsys, poly):
    code, _, err = run(capsys, "analyze", poly("z1^^2 +"))
    assert code == 1 and "parse error" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", str(tmp_path / "nope.txt"))
    assert code == 1 and "cannot read" in err


def test_certify_json_schema_and_exit(capsys, poly):
    f = poly("z1^2 + z2^2")
    code, out, _ = run(capsys, "certify", "--pullback-of", f, "--a", "2", "--b", "1", "--radius", "0.5",
                       "--samples", "30", "--json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, CERTIFY_SCHEMA)
    assert [r["check"] for r in doc["reports"]] == ["transversality", "contact", "openbook"]
    for rep in doc["reports"]:
        jsonschema.validate(rep, REPORT_SCHEMA)


def test_certify_violated_exit(capsys, poly):
    f = poly("z1^2 + z2^2")
    code, out, _ = run(capsys, "certify", "--pullback-of", f, "--a", "1", "--b", "2", "--radius", "0.5",
                       "--samples", "30", "--check", "contact")
    assert code == 3 and "violated" in out and "witness=(" in out
    code, _, _ = run(capsys, "certify", "--pullback-of", f, "--a", "1", "--b", "2", "--radius", "0.5",
                     "--samples", "30", "--check", "contact", "--expected-sign", "-")
    assert code == 0


def test_certify_inconclusive_exit(capsys, poly):
    code, out, _ = run(capsys, "certify", poly("z1*~z1 + z2*~z2 + 1"), "--radius", "1", "--samples", "5",
                       "--check", "transversality")
    assert code == 2 and "inconclusive" in out


def test_text_and_json_numbers_agree(capsys, poly):
    argv = ["certify", "--pullback-of", poly("z1^3 + z2^2"), "--a", "2", "--b", "1", "--radius", "0.3",
            "--samples", "25", "--seed", "3"]
    _, text, _ = run(capsys, *argv)
    _, js, _ = run(capsys, *argv, "--json")
    reports = json.loads(js)["reports"]
    margins = re.findall(r"margin=(\S+)", text)
    assert len(margins) == len(reports)
    for m, rep in zip(margins, reports):
        assert float(m) == rep["margin"]


def test_emit_samples_csv(capsys, poly, tmp_path):
    path = tmp_path / "s.csv"
    code, _, _ = run(capsys, "certify", "--pullback-of", poly("z1^2 + z2^2"), "--a", "2", "--b", "1",
                     "--radius", "0.5", "--samples", "10", "--emit-samples", str(path))
    assert code == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["re_w1", "im_w1", "re_w2", "im_w2", "C", "dthetaR", "min_sv"]
    link = [r for r in rows[1:] if r[5] == ""]
    tube = [r for r in rows[1:] if r[5] != ""]
    assert len(link) == 10 and len(tube) == 10
    assert all(float(r[5]) == pytest.approx(4) for r in tube)


def test_sample_command(capsys, poly):
    code, out, err = run(capsys, "sample", poly("z1^3 + z2^2"), "--radius", "0.5", "--samples", "5")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 6
    assert json.loads(err)["accepted"] == 5


@pytest.mark.parametrize(
    "argv",
    [
        ["--which", "cab", "--pullback-of", "{f}", "--a", "2", "--b", "1"],
        ["--which", "positivity", "--pullback-of", "{f}", "--a", "3", "--b", "2"],
        ["{f}", "--which", "euler"],
        ["{f}", "--which", "fourform", "--trials", "10"],
        ["{f}", "--which", "chainrule", "--trials", "10"],
    ],
)
def test_identity_check(capsys, poly, argv):
    f = poly("z1^3 + z2^2")
    code, out, _ = run(capsys, "identity-check", *[a.format(f=f) for a in argv])
    assert code == 0 and ": pass" in out


def test_identity_inapplicable(capsys, poly):
    code, _, err = run(capsys, "identity-check", poly("z1 + z2 + z3 + z4"), "--which", "fourform")
    assert code == 1 and "fourform" in err


def test_module_entry_point(poly):
    proc = subprocess.run([sys.executable, "-m", "mixedlink", "pullback", poly("z1"), "--a", "2", "--b", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("w1^2*~w1")
