import io
import json
import os
import random

import pytest

from conftest import DATA_DIR, GOLDEN_CASES, GOLDEN_DIR, closures, data_path
from twistlab import formats as fm
from twistlab.cli import run
from twistlab.errors import SchemaError
from twistlab.exactlin import GF, QQ
from twistlab.samples import random_closed_map, random_complex
from twistlab.tstruct import ProjCategory, a2_algebra, dual_numbers_algebra, field_algebra
from twistlab.algebras import regular_module


def run_cli(argv, cwd=DATA_DIR):
    out, err = io.StringIO(), io.StringIO()
    old = os.getcwd()
    os.chdir(cwd)
    try:
        code = run(argv, stdout=out, stderr=err)
    finally:
        os.chdir(old)
    return code, out.getvalue(), err.getvalue()


def report_of(stdout):
    return json.loads(stdout[stdout.index("\n{") + 1:])


# ---------------------------------------------------------------------------
# round trips


def test_dgcat_round_trip(field):
    for label, C, objs in closures(field):
        doc = fm.dgcat_to_doc(C.base)
        text = fm.dumps(doc)
        back = fm.dgcat_from_doc(json.loads(text))
        assert back == C.base
        assert fm.dumps(fm.dgcat_to_doc(back)) == text


def test_tw_round_trip(field):
    rng = random.Random(1)
    for label, C, objs in closures(field):
        cdoc = {"dgcat": fm.dgcat_to_doc(C.base)}
        for _ in range(3):
            X = random_complex(C, rng, -2, 1, objs)
            Y = random_complex(C, rng, -2, 1, objs)
            kind, X2, ctx = fm.tw_from_doc(json.loads(fm.dumps(fm.complex_to_doc(X, cdoc))))
            assert kind == "complex" and X2 == X
            f = random_closed_map(X, Y, rng)
            kind, f2, ctx = fm.tw_from_doc(json.loads(fm.dumps(fm.morphism_to_doc(f, cdoc))))
            assert kind == "morphism" and f2 == f


def test_algebra_and_module_round_trip(field):
    for R in (field_algebra(field), a2_algebra(field), dual_numbers_algebra(field)):
        doc = fm.algebra_to_doc(R)
        R2 = fm.algebra_from_doc(json.loads(fm.dumps(doc)))
        assert fm.algebra_to_doc(R2) == doc
        assert R2.c == R.c and R2.idempotents == R.idempotents and R2.radical == R.radical
        M = regular_module(R)
        mdoc = fm.module_to_doc(M)
        M2 = fm.module_from_doc(json.loads(fm.dumps(mdoc)))
        assert M2.action == M.action and M2.dim == M.dim


def test_algebra_backed_complex_round_trip():
    pc = ProjCategory(a2_algebra(QQ))
    rng = random.Random(2)
    cdoc = {"algebra": fm.algebra_to_doc(pc.algebra)}
    for _ in range(3):
        X = random_complex(pc.closure, rng, -2, 1, ["P1", "P2"])
        kind, X2, ctx = fm.tw_from_doc(json.loads(fm.dumps(fm.complex_to_doc(X, cdoc))))
        assert ctx.pc is not None
        assert X2.components == X.components and X2.twist == X.twist


def test_cert_round_trip():
    doc = fm.cert_doc("validate", "fail", [fm.check("maurer-cartan", False, ["1/2"], location=[0, 2])],
                      {"k": 1})
    assert json.loads(fm.dumps(doc)) == doc


def test_canonical_scalars():
    assert fm.scalar(QQ, "6/4") == QQ("3/2")
    assert fm.scalar(GF(5), "1/2") == GF(5)(3)
    with pytest.raises(SchemaError):
        fm.scalar(GF(5), "1/5")
    with pytest.raises(SchemaError):
        fm.scalar(QQ, 1.5)
    with pytest.raises(SchemaError):
        fm.scalar(QQ, True)


def test_schema_errors(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        fm.load_json(str(p))
    p.write_text(json.dumps({"objects": []}))
    with pytest.raises(SchemaError):
        fm.load_json(str(p))
    p.write_text(json.dumps({"schema": "tw-v9"}))
    with pytest.raises(SchemaError):
        fm.load_json(str(p))
    doc = fm.dgcat_to_doc(closures(QQ)[0][1].base)
    doc["field"] = "Fp:9"
    with pytest.raises(SchemaError):
        fm.dgcat_from_doc(doc)


def test_field_override_consistency():
    doc = fm.dgcat_to_doc(closures(QQ)[1][1].base)
    assert fm.dgcat_from_doc(doc, GF(7)).field == GF(7)
    doc7 = fm.dgcat_to_doc(closures(GF(7))[1][1].base)
    assert fm.dgcat_from_doc(doc7, GF(7)).field == GF(7)
    with pytest.raises(SchemaError):
        fm.dgcat_from_doc(doc7, QQ)
    with pytest.raises(SchemaError):
        fm.dgcat_from_doc(doc7, GF(5))


# ---------------------------------------------------------------------------
# command line


@pytest.mark.parametrize("stem,argv,code", GOLDEN_CASES, ids=[c[0] for c in GOLDEN_CASES])
def test_golden_reports(stem, argv, code):
    got, out, err = run_cli(argv)
    assert got == code, err
    with open(os.path.join(GOLDEN_DIR, stem + ".txt"), encoding="utf-8") as fh:
        assert out == fh.read()


def test_bad_example_reports_violation_at_0_2():
    code, out, err = run_cli(["validate", "three_term_bad.tw.json"])
    assert code == 1
    rep = report_of(out)
    bad = [c for c in rep["checks"] if not c["passed"]]
    assert bad == [{"name": "maurer-cartan", "passed": False, "location": [0, 2], "residual": ["1"]}]


def test_t_truncate_report_dimension_vectors():
    code, out, err = run_cli(["t-truncate", "a2_resolution.tw.json", "--n", "0"])
    assert code == 0
    pattern = report_of(out)["data"]["pattern"]
    assert pattern["1"] == {"X": [1, 0], "tau_le": [0, 0], "tau_ge": [1, 0]}
    assert pattern["0"]["tau_le"] == [0, 0]


def test_out_file_matches_stdout_block(tmp_path):
    target = tmp_path / "cert.json"
    code, out, err = run_cli(["iso-check", "scale_two.tw.json", "--out", str(target)])
    assert code == 0
    assert target.read_text() == out[out.index("\n{") + 1:]


def test_reports_are_deterministic():
    a = run_cli(["holim", "a2_resolution.tw.json"])
    b = run_cli(["holim", "a2_resolution.tw.json"])
    assert a == b


def test_unknown_verb_rejected_before_reading(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate", str(tmp_path / "missing.json")])
    assert exc.value.code == 2


def test_input_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert run_cli(["validate", str(bad)])[0] == 2
    assert run_cli(["validate", str(tmp_path / "missing.json")])[0] == 2
    assert run_cli(["shift", "k_to_k.tw.json"])[0] == 2
    assert run_cli(["cone", "k_to_k.tw.json"])[0] == 2
    assert run_cli(["t-truncate", "k_to_k.tw.json", "--n", "0"])[0] == 2
    fp = tmp_path / "fp.dgcat.json"
    doc = json.load(open(data_path("field.dgcat.json")))
    doc["field"] = "Fp:7"
    fp.write_text(json.dumps(doc))
    assert run_cli(["validate", str(fp), "--field", "Q"])[0] == 2
    with pytest.raises(SystemExit) as exc:
        run(["validate", "k_to_k.tw.json", "--field", "Fp:4"])
    assert exc.value.code == 2


def test_nested_field_mismatch(tmp_path):
    alg = json.load(open(data_path("a2.alg.json")))
    alg["field"] = "Fp:5"
    (tmp_path / "a2.alg.json").write_text(json.dumps(alg))
    mod = json.load(open(data_path("s1.mod.json")))
    (tmp_path / "s1.mod.json").write_text(json.dumps(mod))
    assert run_cli(["validate", "s1.mod.json"], cwd=str(tmp_path))[0] == 2


def regenerate_goldens():
    os.makedirs(GOLDEN_DIR, exist_ok=True)
    for stem, argv, code in GOLDEN_CASES:
        got, out, err = run_cli(argv)
        assert got == code, (stem, got, err)
        with open(os.path.join(GOLDEN_DIR, stem + ".txt"), "w", encoding="utf-8") as fh:
            fh.write(out)


if __name__ == "__main__":
    regenerate_goldens()
