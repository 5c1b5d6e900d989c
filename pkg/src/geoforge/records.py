"""Proof records: the four-section text format and its (de)serialization.

A record has four ordered sections:

    <problem>       construction clauses and the goal
    <aux>           auxiliary clauses (tagged x00, x01, ...)
    <numerical_check>  facts assumed from the diagram (sameclock)
    <proof>         deduction steps: statement [id] rule [dep] [dep] ...

Fact ids are zero-padded decimals assigned densely across the sections in
order: premises, aux, numerical checks, proof steps.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple

from .errors import DanglingDependency, ParseError, ReplayFailed
from .parsing import Clause, Problem, _Tokens, _parse_statement, parse_problem_tokens
from .statements import Statement

_SECTION_RE = re.compile(r"<(problem|aux|numerical_check|proof)>(.*?)</\1>", re.DOTALL)
_ID_RE = re.compile(r"^\[(\d+)\]$")


class ProofStep(NamedTuple):
    stmt: Statement
    id: int
    rule: str
    deps: Tuple[int, ...]


@dataclass
class Record:
    problem: Problem
    aux: List[Clause] = field(default_factory=list)
    checks: List[Tuple[Statement, int]] = field(default_factory=list)
    proof: List[ProofStep] = field(default_factory=list)

    def declared_points(self) -> List[str]:
        pts = self.problem.declared_points()
        for c in self.aux:
            pts.extend(c.points)
        return pts


def format_id(i: int) -> str:
    return f"[{i:03d}]"


def _clause_text(clause: Clause) -> str:
    head = " ".join(clause.points)
    if clause.tag:
        head = f"{clause.tag} {head}"
    parts = [head, ":"]
    for stmt, sid in zip(clause.statements, clause.ids):
        parts.append(str(stmt))
        if sid is not None:
            parts.append(format_id(sid))
    return " ".join(parts)


def serialize_record(record: Record) -> str:
    """Render a record to its canonical text (one clause/step per line)."""
    _check_dependencies(record)
    lines = ["<problem>"]
    clauses = record.problem.clauses
    for i, clause in enumerate(clauses):
        suffix = " ;" if i < len(clauses) - 1 else ""
        lines.append(_clause_text(clause) + suffix)
    if record.problem.goal is not None:
        lines.append(f"? {record.problem.goal}")
    lines.append("</problem>")
    lines.append("<aux>")
    for clause in record.aux:
        lines.append(_clause_text(clause) + " ;")
    lines.append("</aux>")
    lines.append("<numerical_check>")
    for stmt, sid in record.checks:
        lines.append(f"{stmt} {format_id(sid)} ;")
    lines.append("</numerical_check>")
    lines.append("<proof>")
    for step in record.proof:
        deps = " ".join(format_id(d) for d in step.deps)
        tail = f" {deps}" if deps else ""
        lines.append(f"{step.stmt} {format_id(step.id)} {step.rule}{tail} ;")
    lines.append("</proof>")
    return "\n".join(lines) + "\n"


def _check_dependencies(record: Record) -> None:
    defined = set()
    for clause in record.problem.clauses + record.aux:
        for sid in clause.ids:
            if sid is not None:
                defined.add(sid)
    for _, sid in record.checks:
        defined.add(sid)
    for step in record.proof:
        for dep in step.deps:
            if dep not in defined:
                raise DanglingDependency(f"step {format_id(step.id)} cites undefined {format_id(dep)}")
        defined.add(step.id)


def parse_record(text: str) -> Record:
    """Parse the four-section record format."""
    sections = {}
    for m in _SECTION_RE.finditer(text):
        sections[m.group(1)] = (m.group(2), m.start(2))
    if "problem" not in sections:
        raise ParseError("record lacks a <problem> section", "<problem>", 0)
    body, base = sections["problem"]
    declared: set = set()
    problem = parse_problem_tokens(_Tokens(body, base), declared)
    record = Record(problem)
    if "aux" in sections:
        body, base = sections["aux"]
        aux_problem = parse_problem_tokens(_Tokens(body, base), declared, allow_tag=True)
        record.aux = aux_problem.clauses
    if "numerical_check" in sections:
        body, base = sections["numerical_check"]
        toks = _Tokens(body, base)
        while toks:
            tok, _ = toks.peek()
            if tok == ";":
                toks.next()
                continue
            stmt = _parse_statement(toks, declared)
            nxt = toks.peek()
            sid = None
            if nxt and _ID_RE.match(nxt[0]):
                sid = int(_ID_RE.match(toks.next()[0]).group(1))
            record.checks.append((stmt, sid if sid is not None else -1))
    if "proof" in sections:
        body, base = sections["proof"]
        toks = _Tokens(body, base)
        while toks:
            tok, off = toks.peek()
            if tok == ";":
                toks.next()
                continue
            stmt = _parse_statement(toks, declared)
            nxt = toks.peek()
            if not nxt or not _ID_RE.match(nxt[0]):
                bad, boff = nxt if nxt else ("<end>", -1)
                raise ParseError("proof step lacks an id", bad, boff)
            sid = int(_ID_RE.match(toks.next()[0]).group(1))
            rule, roff = toks.next()
            deps: List[int] = []
            while toks:
                nxt = toks.peek()
                m = _ID_RE.match(nxt[0]) if nxt else None
                if not m:
                    break
                toks.next()
                deps.append(int(m.group(1)))
            record.proof.append(ProofStep(stmt, sid, rule, tuple(deps)))
    return record


def lint_record(record: Record) -> List[str]:
    """Structural checks: dense ids in section order, deps defined earlier."""
    issues: List[str] = []
    expected = 0
    order: List[Tuple[str, Optional[int]]] = []
    for clause in record.problem.clauses + record.aux:
        for sid in clause.ids:
            order.append(("premise/aux", sid))
    for _, sid in record.checks:
        order.append(("numerical_check", sid))
    for step in record.proof:
        order.append(("proof", step.id))
    for kind, sid in order:
        if sid is None or sid != expected:
            issues.append(f"{kind} id {sid} out of order (expected {expected})")
        expected += 1
    defined: set = set()
    for clause in record.problem.clauses + record.aux:
        defined.update(sid for sid in clause.ids if sid is not None)
    defined.update(sid for _, sid in record.checks)
    for step in record.proof:
        for dep in step.deps:
            if dep not in defined:
                issues.append(f"step {step.id} cites undefined dep {dep}")
        defined.add(step.id)
    if record.proof and record.problem.goal is not None:
        from .statements import canonicalize

        if canonicalize(record.proof[-1].stmt) != canonicalize(record.problem.goal):
            issues.append("last proof step does not conclude the goal")
    return issues
