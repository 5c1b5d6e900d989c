"""Figure construction: catalog, sketch recipes, script and clause solving."""

import math
import random

import pytest

from geoforge.builder import (
    Figure,
    build_figure,
    build_problem_figure,
    check_prerequisites,
    match_catalog_clause,
)
from geoforge.catalog import load_catalog
from geoforge.errors import BuildFailed
from geoforge.numeric import Point, Tolerances, eval_statement
from geoforge.parsing import ConstructionClause, parse_construction_script, parse_problem
from geoforge.records import parse_record
from geoforge.sketches import LOCI, RECIPES

TOL = Tolerances()


@pytest.fixture(scope="module")
def defs():
    return load_catalog()


def build(script, defs, seed=0):
    return build_figure(parse_construction_script(script, defs), defs, TOL, random.Random(seed))


def test_catalog_counts_and_required_names(defs):
    cats = {}
    for d in defs.values():
        cats.setdefault(d.category, []).append(d.name)
    assert len(cats["BASIC"]) >= 3
    assert len(cats["BASIC_FREE"]) == 1
    assert len(cats["INTERSECT"]) >= 6
    assert len(cats["OTHERS"]) >= 8
    for name in (
        "segment", "triangle", "rectangle", "free", "on_line", "on_circle",
        "on_bline", "orthocenter", "circumcenter", "midpoint", "foot", "incenter",
    ):
        assert name in defs
    # every catalog entry has a sketch recipe; INTERSECT entries have a locus
    for d in defs.values():
        assert d.name in RECIPES
        if d.category == "INTERSECT":
            assert d.name in LOCI


def test_orthocenter_script(defs):
    fig = build("a b c = triangle; x = orthocenter x a b c", defs)
    assert set(fig.points) == {"a", "b", "c", "x"}
    a, b, c, x = (fig.points[n] for n in "abcx")
    # oracle: altitude dot products vanish
    assert abs((x - a).dot(c - b)) < 1e-9
    assert abs((x - b).dot(c - a)) < 1e-9
    for stmt in fig.statements():
        assert eval_statement(stmt, fig.points, TOL)


def test_prerequisites(defs):
    fig = Figure(points={"a": Point(0, 0), "b": Point(1, 0), "c": Point(2, 0)})
    ortho = ConstructionClause(("x",), "orthocenter", ("a", "b", "c"))
    assert not check_prerequisites(ortho, fig, defs)  # collinear args
    free = ConstructionClause(("z",), "free", ())
    assert check_prerequisites(free, fig, defs)
    collide = ConstructionClause(("a",), "free", ())
    assert not check_prerequisites(collide, fig, defs)


def test_empty_script(defs):
    fig = build_figure([], defs, TOL, random.Random(0))
    assert fig.points == {} and fig.clauses == []


def test_determinism(defs):
    script = "a b c d = rectangle; m = midpoint m a c; x = on_circle x m a"
    f1 = build(script, defs, seed=7)
    f2 = build(script, defs, seed=7)
    assert f1.points == f2.points
    assert f1.clauses == f2.clauses
    f3 = build(script, defs, seed=8)
    assert f1.points != f3.points


def test_intersect_pair_step(defs):
    # bline(a,b) meets line(a,b) exactly at the midpoint
    fig = build("a b = segment; x = on_line x a b, on_bline x a b", defs)
    a, b, x = fig.points["a"], fig.points["b"], fig.points["x"]
    mid = Point((a.x + b.x) / 2, (a.y + b.y) / 2)
    assert x.dist(mid) < 1e-9
    for stmt in fig.statements():
        assert eval_statement(stmt, fig.points, TOL)


def test_infeasible_intersection(defs):
    # concentric circles of different radii never meet
    script = "a b = segment; m = midpoint m a b; x = on_circle x m a, on_circle x m b"
    with pytest.raises(BuildFailed) as e:
        build(script, defs)
    assert e.value.step == 2


def test_rectangle_predicates_hold(defs):
    fig = build("a b c d = rectangle", defs, seed=3)
    stmts = fig.statements()
    assert len(stmts) == 6
    for stmt in stmts:
        assert eval_statement(stmt, fig.points, TOL)


def test_normalization(defs):
    fig = build("a b c = triangle; x = circumcenter x a b c", defs, seed=5)
    pts = list(fig.points.values())
    cx = sum(p.x for p in pts) / len(pts)
    cy = sum(p.y for p in pts) / len(pts)
    assert abs(cx) < 1e-9 and abs(cy) < 1e-9
    assert abs(max(p.norm() for p in pts) - 1.0) < 1e-9


def test_recipe_soundness_sample(defs):
    scripts = [
        "a b = segment; m = midpoint m a b; x = pmirror x a b",
        "a b c = triangle; f = foot f a b c; r = reflect r a b c",
        "a b c = triangle; o = circumcenter o a b c; i = incenter i a b c",
        "a b c = iso_triangle; d = on_pline d a b c; e = on_tline e a b c",
        "a b c = r_triangle; x = on_dia x b c; y = on_cyclic y a b c",
        "a b c = triangle; p = free; x = intersection_ll x a b c p",
    ]
    for k, script in enumerate(scripts):
        fig = build(script, defs, seed=100 + k)
        for stmt in fig.statements():
            assert eval_statement(stmt, fig.points, TOL), f"{script}: {stmt}"


def test_reverse_match_incenter(defs, sample_record_text):
    record = parse_record(sample_record_text)
    clause_e = record.problem.clauses[4]
    assert clause_e.points == ("e",)
    matches = match_catalog_clause(clause_e, defs)
    names = {cdef.name for cdef, _ in matches}
    assert "incenter" in names
    cdef, b = next((c, b) for c, b in matches if c.name == "incenter")
    assert b[cdef.outputs[0]] == "e"
    assert sorted(b[a] for a in cdef.args) == ["a", "b", "d"]


def test_reverse_match_foot(defs, sample_record_text):
    record = parse_record(sample_record_text)
    clause_f = record.problem.clauses[5]
    matches = match_catalog_clause(clause_f, defs)
    names = {cdef.name for cdef, _ in matches}
    assert "foot" in names
    cdef, b = next((c, b) for c, b in matches if c.name == "foot")
    # f is the foot of the perpendicular from e onto line ab
    assert b["x"] == "f" and b["a"] == "e" and sorted((b["b"], b["c"])) == ["a", "b"]


def test_build_problem_figure(defs, sample_record_text):
    record = parse_record(sample_record_text)
    fig = build_problem_figure(record.problem, defs, TOL, random.Random(11), extra_clauses=record.aux)
    assert set(fig.points) == set("abcdefgh")
    for clause in record.problem.clauses + record.aux:
        for stmt in clause.statements:
            assert eval_statement(stmt, fig.points, TOL), str(stmt)
    # the goal is a true theorem of this configuration
    assert eval_statement(record.problem.goal, fig.points, TOL)
    # checks from the record hold on the rebuilt figure
    for stmt, _ in record.checks:
        assert eval_statement(stmt, fig.points, TOL), str(stmt)


def test_build_problem_determinism(defs, sample_record_text):
    record = parse_record(sample_record_text)
    f1 = build_problem_figure(record.problem, defs, TOL, random.Random(2), extra_clauses=record.aux)
    f2 = build_problem_figure(record.problem, defs, TOL, random.Random(2), extra_clauses=record.aux)
    assert f1.points == f2.points


def test_loci_fallback(defs):
    # a clause shape not in the catalog: point on a circle through 3 points
    # plus a parallel constraint; solved by intersecting the two loci
    problem = parse_problem(
        "a b c : ; x : cyclic a b c x para a x b c"
    )
    # clause 'a b c' has no statements: three free points
    fig = build_problem_figure(problem, defs, TOL, random.Random(4))
    for stmt in problem.clauses[1].statements:
        assert eval_statement(stmt, fig.points, TOL)


def test_unsupported_clause_fails_fast(defs):
    problem = parse_problem("a b c : ; x : eqratio a x b x a b b c")
    with pytest.raises(BuildFailed):
        build_problem_figure(problem, defs, TOL, random.Random(0))
