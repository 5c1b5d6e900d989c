import pytest

from geoforge.errors import (
    ArityMismatch,
    DanglingDependency,
    DuplicatePoint,
    DuplicateRuleName,
    UnboundConclusionVariable,
    UndeclaredPoint,
    UnknownPredicate,
)
from geoforge.parsing import parse_problem, parse_rules
from geoforge.records import ProofStep, Record, lint_record, parse_record, serialize_record
from geoforge.statements import Statement


def test_parse_problem_clauses_and_goal():
    p = parse_problem("a : ; b : ; c : coll a b c [000] ? cong a b a c")
    assert [c.points for c in p.clauses] == [("a",), ("b",), ("c",)]
    assert p.clauses[2].statements == (Statement("coll", ("a", "b", "c")),)
    assert p.clauses[2].ids == (0,)
    assert p.goal == Statement("cong", ("a", "b", "a", "c"))


def test_parse_problem_errors():
    with pytest.raises(UnknownPredicate) as e:
        parse_problem("a : ; b : kolinear a b b")
    assert e.value.token == "kolinear"
    assert e.value.offset == 10
    with pytest.raises(ArityMismatch):
        parse_problem("a : ; b : coll a b")
    with pytest.raises(UndeclaredPoint):
        parse_problem("a : ; b : coll a b z")
    with pytest.raises(DuplicatePoint):
        parse_problem("a : ; a : ")


def test_parse_rules_roundtrip_and_errors():
    rules = parse_rules(
        """
        # comment line
        r35 : eqangle B A B C Q R Q P, eqangle C A C B R Q R P, sameclock A B C P R Q => simtrir A B C P Q R
        r53 : simtrir A B C P Q R => eqratio A B P Q B C Q R
        """
    )
    assert [r.name for r in rules] == ["r35", "r53"]
    assert len(rules[0].premises) == 2
    assert len(rules[0].guards) == 1
    assert rules[0].guards[0].pred == "sameclock"
    with pytest.raises(DuplicateRuleName):
        parse_rules("x : coll A B C => coll A C B\nx : coll A B C => coll B A C")
    with pytest.raises(UnboundConclusionVariable):
        parse_rules("bad : coll A B C => coll A B D")


def test_record_roundtrip_token_identical(sample_record_text):
    record = parse_record(sample_record_text)
    assert record.problem.goal == Statement("cong", ("f", "e", "g", "e"))
    assert len(record.problem.clauses) == 7
    assert len(record.aux) == 1
    assert record.aux[0].tag == "x00"
    assert record.aux[0].points == ("h",)
    assert [sid for _, sid in record.checks] == [9, 10]
    assert len(record.proof) == 9
    assert record.proof[-1].rule == "a00"
    assert record.proof[-1].deps == (14, 18)
    out = serialize_record(record)
    assert out.split() == sample_record_text.split()


def test_serialize_rejects_dangling_dependency(sample_record_text):
    record = parse_record(sample_record_text)
    bad = record.proof[-1]._replace(deps=(14, 99))
    record.proof[-1] = bad
    with pytest.raises(DanglingDependency):
        serialize_record(record)


def test_lint_record_flags_sparse_ids(sample_record_text):
    record = parse_record(sample_record_text)
    assert lint_record(record) == []
    record.proof[3] = record.proof[3]._replace(id=99)
    issues = lint_record(record)
    assert any("out of order" in msg for msg in issues)
