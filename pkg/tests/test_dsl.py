import io
import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from pdens.cli import dump, main
from pdens.dsl import (BallExpr, BoxExpr, CellExpr, CosetGroupExpr, Document, DSLSyntaxError,
                       FieldExpr, FormulaExpr, GraphExpr, GroupDef, NameRef, PGroupExpr, PointExpr,
                       Query, RayConeExpr, SemanticError, SetDef, SphereExpr, SphereUnionExpr,
                       UnionExpr, exit_code, parse, parse_formula, print_document, run)

ROOT = Path(__file__).resolve().parent.parent
CORPUS = sorted((ROOT / "corpus").glob("*.pd"))

# ---------------------------------------------------------------------------
# round trip
# ---------------------------------------------------------------------------

rats = st.fractions(min_value=-50, max_value=50, max_denominator=9)
nz_rats = rats.filter(bool)
small = st.integers(-5, 8)
pos = st.integers(1, 6)
one_var = st.one_of(
    st.just(FieldExpr()),
    st.builds(CellExpr, rats, nz_rats, pos,
              st.lists(st.tuples(st.sampled_from([">=", "<=", ">", "<", "="]), small),
                       max_size=2).map(tuple)),
    st.builds(PointExpr, rats),
    st.builds(BallExpr, rats, small),
    st.builds(SphereExpr, rats, small),
    st.builds(SphereUnionExpr, rats, pos, small),
    st.sampled_from([FormulaExpr("t in 1 * P 2"), FormulaExpr("ord(t - 1/5) >= 2 or t = 3"),
                     FormulaExpr("not (t + 2 in 5 * P 4 and true)")]),
)
two_var = st.one_of(
    st.builds(lambda a, b: BoxExpr((a, b)), one_var, one_var),
    st.builds(GraphExpr, one_var, rats, st.integers(2, 4), st.one_of(st.none(), st.integers(1, 4))),
    st.builds(RayConeExpr, st.tuples(rats, rats), st.booleans(),
              st.lists(st.tuples(st.tuples(nz_rats, rats), nz_rats, pos), max_size=3).map(tuple)),
)
verbs = st.sampled_from(["density", "volume", "theta-sequence", "cone", "sc", "mt-check",
                         "distinguished-check", "crofton", "cross-check", "member"])
groups = st.one_of(st.builds(PGroupExpr, pos), st.builds(lambda n: CosetGroupExpr(n, (1,)), pos))


@st.composite
def documents(draw):
    p = draw(st.sampled_from([3, 5, 7, 11]))
    items = []
    names = []
    for i, expr in enumerate(draw(st.lists(st.one_of(one_var, two_var), min_size=1, max_size=4))):
        if names and draw(st.booleans()):
            expr = UnionExpr((expr, NameRef(draw(st.sampled_from(names)))))
        items.append(SetDef(f"S{i}", expr))
        names.append(f"S{i}")
    items.append(GroupDef("G", draw(groups)))
    for _ in range(draw(st.integers(0, 4))):
        q = Query(draw(verbs), draw(st.sampled_from(names)),
                  at=draw(st.one_of(st.none(), st.tuples(rats), st.tuples(rats, rats))),
                  group=draw(st.one_of(st.none(), st.just(NameRef("G")), groups)),
                  level=draw(st.one_of(st.none(), small)),
                  on=draw(st.one_of(st.none(), st.tuples(rats, rats))),
                  refine=tuple(draw(st.lists(groups, max_size=2))),
                  depth=draw(st.one_of(st.none(), pos)))
        items.append(q)
    return Document(p, tuple(items))


@given(documents())
def test_round_trip_generated(doc):
    assert parse(print_document(doc)) == doc


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_round_trip_corpus(path):
    doc = parse(path.read_text())
    assert parse(print_document(doc)) == doc
    assert print_document(parse(print_document(doc))) == print_document(doc)


def test_evenval_sugar():
    a = parse("prime 5; set E = union over k in Z of sphere(0, 2k); query density E at 0;")
    b = parse("prime 5; set E = evenval(0); query density E at 0;")
    assert a == b
    out = run(a)[0].payload
    assert out["density"] == "1/2"


def test_raycone_document():
    doc = parse("prime 5; set C = raycone origin (0,0) ray dir (1,1) coset 1 * P 2;")
    assert doc.items[0].expr == RayConeExpr((0, 0), False, (((1, 1), 1, 2),))


# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("src,line,col", [
    ("prime 5;\nset X = cell(0, 1 * Q 2);", 2, 21),
    ("prime 5;\nset X = ball(0 2);", 2, 16),
    ("prime 5;\n\nquery frobnicate X;", 3, 7),
    ("prime 5; set X = K @", 1, 20),
    ("prime 5; set X = K", 1, 19),
])
def test_syntax_errors_carry_positions(src, line, col):
    with pytest.raises(DSLSyntaxError) as info:
        parse(src)
    assert (info.value.line, info.value.col) == (line, col)


def test_formula_errors_point_into_the_string():
    with pytest.raises(DSLSyntaxError) as info:
        parse('prime 5;\nset F = formula "t in 1 * P";')
    assert info.value.line == 2
    with pytest.raises(DSLSyntaxError):
        parse_formula("ord(t) >= 1/2")


@pytest.mark.parametrize("src", [
    "prime 4; set X = K;",
    "prime 2; set X = K;",
    "prime 5; query density X;",
    "prime 5; set X = K; set X = K;",
    "prime 5; set X = K; query cone X with H;",
    "prime 5; group G = cosets 4 {2};",
    "prime 5; set Y = union(K, Z);",
    "prime 5; set C = raycone origin (0, 0) ray dir (1) coset 1 * P 2;",
    "prime 5; set C = cell(0, 1 * P 0);",
])
def test_semantic_errors(src):
    with pytest.raises(SemanticError):
        parse(src)


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------

def test_errors_become_objects_and_execution_continues():
    doc = parse("prime 5; set Pt = point(3); set E = evenval(0);\n"
                "query density Pt at 3; query density E at 0;")
    res = run(doc)
    assert res[0].payload["error_kind"] == "UnsupportedSet"
    assert set(res[0].payload) == {"query", "error_kind", "message"}
    assert res[1].payload["density"] == "1/2"
    assert exit_code(res) == 1


def test_checks_drive_exit_code():
    ok = run(parse("prime 5; set C = raycone origin (0,0) ray dir (1,1) coset 1 * P 2;"
                   "query mt-check C at (0,0) with P 2; query crofton C at (0, 0);"))
    assert [r.payload["equal"] for r in ok] == [True, True]
    assert ok[0].payload["lhs"] == ok[0].payload["rhs"] == "1/4"
    assert exit_code(ok) == 0


def test_crofton_on_a_full_line():
    res = run(parse("prime 5; set L = raycone origin (0, 0) apex ray dir (2, 1) coset 1 * P 1;"
                    "query crofton L at (0, 0);"))
    assert (res[0].payload["lhs"], res[0].payload["rhs"], res[0].payload["equal"]) == ("1", "1", True)


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_golden_files(path):
    gold = ROOT / "tests" / "golden" / (path.stem + ".json")
    text = "".join(dump(r.payload) + "\n" for r in run(parse(path.read_text())))
    assert text == gold.read_text()
    again = "".join(dump(r.payload) + "\n" for r in run(parse(path.read_text())))
    assert again == text


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def test_cli_run(tmp_path, capsys):
    f = tmp_path / "a.pd"
    f.write_text("prime 5;\nset E = evenval(0);\nquery density E at 0;\n")
    assert main(["run", str(f)]) == 0
    line = capsys.readouterr().out.strip()
    assert json.loads(line)["density"] == "1/2" and "\n" not in line
    assert main(["run", str(f), "--pretty"]) == 0
    assert "\n  " in capsys.readouterr().out


def test_cli_parse_failure(tmp_path, capsys):
    f = tmp_path / "bad.pd"
    f.write_text("prime 9;")
    assert main(["run", str(f)]) == 2
    assert "SemanticError" in capsys.readouterr().err


def test_cli_depth_from_environment(tmp_path, capsys, monkeypatch):
    f = tmp_path / "c.pd"
    f.write_text("prime 5; set S = cell(0, 1 * P 2); query cross-check S at 0 on 1;")
    monkeypatch.setenv("PDENS_DEPTH", "6")
    assert main(["run", str(f)]) == 0
    assert json.loads(capsys.readouterr().out)["depth"] == 6
    assert main(["run", str(f), "--depth", "8"]) == 0
    assert json.loads(capsys.readouterr().out)["depth"] == 8


def test_cli_precision_membership(tmp_path, capsys):
    f = tmp_path / "m.pd"
    f.write_text("prime 5; set E = evenval(0); query member E at 25; query member E at 5;")
    assert main(["run", str(f), "--precision", "4"]) == 0
    out = [json.loads(l)["member"] for l in capsys.readouterr().out.splitlines()]
    assert out == [True, False]


def test_repl(monkeypatch, capsys):
    script = "prime 5;\nset E =\n evenval(0);\nquery density E;\nquery density Z;\n"
    monkeypatch.setattr("sys.stdin", io.StringIO(script))
    assert main(["repl"]) == 0
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert lines[0]["density"] == "1/2"
    assert lines[1]["error_kind"] == "SemanticError"
