"""Proof extraction and record replay.

trace() walks dependency edges backwards from a proven fact.  Because every
fact cites only earlier facts, ascending database id is already a topological
order of the resulting DAG.

classify_aux() splits the construction script: a clause is auxiliary when
none of its output points is needed to state the goal, i.e. it contributes
to the proof but not to posing the problem.  Clauses neither cited nor
needed to construct a kept point are dropped.

replay_record() is the independent validator: it rebuilds a figure agreeing
with the record's orientation checks, then re-derives every proof step from
its cited dependencies alone, and re-checks each statement numerically.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .builder import build_problem_figure
from .catalog import ConstructionDef, load_catalog
from .errors import BuildFailed, ReplayFailed
from .numeric import Tolerances
from .parsing import Clause, Problem, Rule, load_rules
from .records import ProofStep, Record, format_id, lint_record
from .statements import Statement, canonicalize, statement_points
from .engine.db import Fact, FactDB
from .engine.matching import match_all


@dataclass
class ProofDAG:
    """Facts reachable from a goal, split by provenance."""

    steps: List[Fact]      # derived facts, ascending id (topological)
    premises: List[Fact]   # rule == "premise"
    checks: List[Fact]     # rule == "numerical_check"
    goal: Fact


def trace(db: FactDB, goal_id: int) -> ProofDAG:
    """Minimal dependency DAG justifying the given fact."""
    need: Set[int] = set()
    stack = [goal_id]
    while stack:
        fid = stack.pop()
        if fid in need:
            continue
        need.add(fid)
        stack.extend(db.facts[fid].deps)
    steps: List[Fact] = []
    premises: List[Fact] = []
    checks: List[Fact] = []
    for fid in sorted(need):
        fact = db.facts[fid]
        if fact.rule == "premise":
            premises.append(fact)
        elif fact.rule == "numerical_check":
            checks.append(fact)
        else:
            steps.append(fact)
    return ProofDAG(steps, premises, checks, db.facts[goal_id])


def _clause_refs(clause: Clause) -> Set[str]:
    pts: Set[str] = set()
    for stmt in clause.statements:
        pts.update(statement_points(stmt))
    return pts - set(clause.points)


def classify_aux(clauses: Sequence[Clause], goal: Statement,
                 dag: ProofDAG) -> Tuple[List[int], List[int]]:
    """Indices of premise clauses and auxiliary clauses, in script order.

    Premise clauses are those defining a point in the goal's construction
    closure (the points needed to state the goal, transitively).  Auxiliary
    clauses are the remaining used ones; unused clauses appear in neither.
    """
    defining: Dict[str, int] = {}
    for i, clause in enumerate(clauses):
        for p in clause.points:
            defining.setdefault(p, i)

    # clauses needed to state the goal
    closure: Set[str] = set(statement_points(goal))
    required: Set[int] = set()
    frontier = list(closure)
    while frontier:
        p = frontier.pop()
        i = defining.get(p)
        if i is None or i in required:
            continue
        required.add(i)
        for q in _clause_refs(clauses[i]):
            if q not in closure:
                closure.add(q)
                frontier.append(q)

    # clauses cited by the proof, plus whatever constructs their points
    cited = {canonicalize(f.stmt) for f in dag.premises}
    used: Set[int] = set(required)
    used.update(i for i, c in enumerate(clauses)
                if any(canonicalize(s) in cited for s in c.statements))
    queue = list(used)
    while queue:
        i = queue.pop()
        for p in _clause_refs(clauses[i]):
            j = defining.get(p)
            if j is not None and j not in used:
                used.add(j)
                queue.append(j)

    premise_idx = [i for i in range(len(clauses)) if i in used and i in required]
    aux_idx = [i for i in range(len(clauses)) if i in used and i not in required]
    return premise_idx, aux_idx


def build_record(clauses: Sequence[Clause], goal: Statement,
                 db: FactDB, goal_id: int) -> Record:
    """Record for a proven goal: sections numbered densely in order."""
    dag = trace(db, goal_id)
    premise_idx, aux_idx = classify_aux(clauses, goal, dag)

    next_id = 0
    stmt_id: Dict[Statement, int] = {}

    def number_clause(clause: Clause, tag: Optional[str]) -> Clause:
        nonlocal next_id
        ids = []
        for stmt in clause.statements:
            stmt_id.setdefault(canonicalize(stmt), next_id)
            ids.append(next_id)
            next_id += 1
        return Clause(clause.points, clause.statements, tuple(ids), tag)

    problem_clauses = [number_clause(clauses[i], None) for i in premise_idx]
    aux_clauses = [number_clause(clauses[i], f"x{k:02d}")
                   for k, i in enumerate(aux_idx)]

    dense: Dict[int, int] = {}
    for fact in dag.premises:
        key = canonicalize(fact.stmt)
        if key not in stmt_id:
            raise ReplayFailed(f"premise {fact.stmt} cited by the proof "
                               "belongs to no kept clause")
        dense[fact.id] = stmt_id[key]
    checks: List[Tuple[Statement, int]] = []
    for fact in dag.checks:
        dense[fact.id] = next_id
        checks.append((fact.stmt, next_id))
        next_id += 1
    proof: List[ProofStep] = []
    for fact in dag.steps:
        dense[fact.id] = next_id
        proof.append(ProofStep(fact.stmt, next_id, fact.rule,
                               tuple(dense[d] for d in fact.deps)))
        next_id += 1
    return Record(Problem(problem_clauses, goal), aux_clauses, checks, proof)


# ---------------------------------------------------------------------------
# replay validation


def _figure_for_record(record: Record, defs: Dict[str, ConstructionDef],
                       tol: Tolerances, seeds: int):
    """A rebuilt figure on which every recorded orientation check holds."""
    last = "build failed on every seed"
    for seed in range(seeds):
        try:
            fig = build_problem_figure(record.problem, defs, tol=tol,
                                       rng=random.Random(seed),
                                       extra_clauses=record.aux)
        except BuildFailed as e:
            last = str(e)
            continue
        db = FactDB(fig.points, tol)
        if all(db.eval_true(stmt) for stmt, _ in record.checks):
            return fig
        last = "orientation checks never all hold"
    raise ReplayFailed(f"cannot rebuild figure: {last}")


def _step_derivable(points, step: ProofStep, dep_stmts: Sequence[Statement],
                    rule: Optional[Rule], tol: Tolerances) -> bool:
    involved = set(statement_points(step.stmt))
    for stmt in dep_stmts:
        involved.update(statement_points(stmt))
    scratch = FactDB({p: xy for p, xy in points.items() if p in involved}, tol)
    # repeat insertion: a dependency may merge classes only once an
    # alignment produced by a later-listed dependency is in place
    for _ in range(len(dep_stmts) + 1):
        for stmt in dep_stmts:
            scratch.insert(stmt, rule="premise", deps=(), force=True)
        if scratch.satisfies(step.stmt) is not None:
            return True
    if rule is None:
        return False
    emissions, _ = match_all(scratch, [rule], partial=True)
    want = canonicalize(step.stmt)
    return any(canonicalize(em.stmt) == want for em in emissions)


def replay_record(record: Record,
                  defs: Optional[Dict[str, ConstructionDef]] = None,
                  rules: Optional[List[Rule]] = None,
                  tol: Optional[Tolerances] = None,
                  seeds: int = 32,
                  figure=None) -> None:
    """Validate a record against a fresh engine; raises ReplayFailed.

    Every step must follow from its cited dependencies alone (by its named
    rule or by equivalence chaining) and must hold numerically on a rebuilt
    figure, so rules whose soundness leans on the diagram are re-audited.
    A caller that already owns a figure for the record may pass it to skip
    the rebuild.
    """
    defs = defs if defs is not None else load_catalog()
    rules = rules if rules is not None else load_rules()
    tol = tol or Tolerances()
    issues = lint_record(record)
    if issues:
        raise ReplayFailed("; ".join(issues))
    if figure is not None:
        probe = FactDB(figure.points, tol)
        if not all(probe.eval_true(stmt) for stmt, _ in record.checks):
            raise ReplayFailed("orientation checks fail on the given figure")
        fig = figure
    else:
        fig = _figure_for_record(record, defs, tol, seeds)
    db = FactDB(fig.points, tol)
    by_id: Dict[int, Statement] = {}
    for clause in record.problem.clauses + record.aux:
        for stmt, sid in zip(clause.statements, clause.ids):
            if not db.eval_true(stmt):
                raise ReplayFailed(f"premise {format_id(sid)} fails on the "
                                   f"rebuilt figure: {stmt}", step=sid)
            by_id[sid] = stmt
    for stmt, sid in record.checks:
        by_id[sid] = stmt
    rule_by_name = {r.name: r for r in rules}
    for step in record.proof:
        if not db.eval_true(step.stmt):
            raise ReplayFailed(f"step {format_id(step.id)} numerically false: "
                               f"{step.stmt}", step=step.id)
        dep_stmts = [by_id[d] for d in step.deps]
        if not _step_derivable(fig.points, step, dep_stmts,
                               rule_by_name.get(step.rule), tol):
            raise ReplayFailed(f"step {format_id(step.id)} does not follow "
                               f"from its dependencies by {step.rule}",
                               step=step.id)
        by_id[step.id] = step.stmt
    if record.problem.goal is not None and record.proof:
        if canonicalize(record.proof[-1].stmt) != canonicalize(record.problem.goal):
            raise ReplayFailed("proof does not conclude the goal")
