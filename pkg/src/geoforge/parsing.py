"""Parsers for the plain-text formats: problems, construction scripts, rules.

Problem grammar (whitespace and newlines are interchangeable):

    clause ( ';' clause )* [ '?' statement ]
    clause    := [tag] name+ ':' ( statement ['[' id ']'] )*
    statement := predicate point{arity} [literal]

A clause declares its names as new points; statements may reference points
from the same or earlier clauses.  Ids in brackets are recorded when present.
The optional clause tag (x00, x01, ...) appears on auxiliary clauses inside
records.

Construction script grammar, one construction per line (or ';'-separated):

    out1 [out2 ...] '=' name out1 [out2 ...] arg...

Rule grammar, one rule per line, '#' starts a comment:

    name ':' template ( ',' template )* '=>' template ( ',' template )*

Templates look like statements with variable slots; sameclock premises are
split off as numeric guards.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    ArityMismatch,
    DuplicatePoint,
    DuplicateRuleName,
    ParseError,
    UnboundConclusionVariable,
    UndeclaredPoint,
    UnknownConstruction,
    UnknownPredicate,
    WrongArgCount,
)
from .statements import LITERAL_PREDICATES, PREDICATES, Statement, parse_literal

_ID_RE = re.compile(r"^\[(\d+)\]$")
_TAG_RE = re.compile(r"^x\d+$")
_LITERAL_RE = re.compile(r"^-?\d+(/\d+)?$")


class _Tokens:
    """Token stream with byte offsets."""

    def __init__(self, text: str, base_offset: int = 0):
        self.items: List[Tuple[str, int]] = [
            (m.group(0), base_offset + m.start()) for m in re.finditer(r"\S+", text)
        ]
        self.pos = 0

    def peek(self) -> Optional[Tuple[str, int]]:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self) -> Tuple[str, int]:
        item = self.items[self.pos]
        self.pos += 1
        return item

    def __bool__(self) -> bool:
        return self.pos < len(self.items)


@dataclass
class Clause:
    """One construction clause in declarative form."""

    points: Tuple[str, ...]
    statements: Tuple[Statement, ...] = ()
    ids: Tuple[Optional[int], ...] = ()
    tag: Optional[str] = None


@dataclass
class Problem:
    clauses: List[Clause] = field(default_factory=list)
    goal: Optional[Statement] = None

    def declared_points(self) -> List[str]:
        out: List[str] = []
        for c in self.clauses:
            out.extend(c.points)
        return out


def _parse_statement(toks: _Tokens, declared, allow_undeclared: bool = False, arities=None) -> Statement:
    arities = arities if arities is not None else PREDICATES
    tok, off = toks.next()
    if tok not in arities:
        raise UnknownPredicate(f"unknown predicate {tok!r}", tok, off)
    pred = tok
    arity = arities[pred]
    args = []
    for _ in range(arity):
        nxt = toks.peek()
        if nxt is None or nxt[0] in (";", "?", ":") or _ID_RE.match(nxt[0]) or nxt[0] in arities:
            bad, boff = nxt if nxt else ("<end>", -1)
            raise ArityMismatch(f"{pred} expects {arity} points", bad, boff)
        tok, off = toks.next()
        if not allow_undeclared and declared is not None and tok not in declared:
            raise UndeclaredPoint(f"point {tok!r} not declared", tok, off)
        args.append(tok)
    literal = None
    if pred in LITERAL_PREDICATES:
        nxt = toks.peek()
        if nxt is None or not _LITERAL_RE.match(nxt[0]):
            bad, boff = nxt if nxt else ("<end>", -1)
            raise ArityMismatch(f"{pred} expects a rational literal", bad, boff)
        tok, _ = toks.next()
        literal = parse_literal(tok)
    return Statement(pred, tuple(args), literal)


def _parse_clause(toks: _Tokens, declared: set, allow_tag: bool) -> Clause:
    names: List[Tuple[str, int]] = []
    while True:
        tok, off = toks.next()
        if tok == ":":
            break
        names.append((tok, off))
    tag = None
    if allow_tag and len(names) >= 2 and _TAG_RE.match(names[0][0]):
        tag = names[0][0]
        names = names[1:]
    if not names:
        tok, off = toks.peek() or ("<end>", -1)
        raise ParseError("clause declares no points", tok, off)
    for name, off in names:
        if name in PREDICATES:
            raise ParseError(f"point name {name!r} is reserved", name, off)
        if name in declared:
            raise DuplicatePoint(f"point {name!r} already declared", name, off)
    for name, _ in names:
        declared.add(name)
    statements: List[Statement] = []
    ids: List[Optional[int]] = []
    while toks:
        nxt = toks.peek()
        if nxt[0] in (";", "?"):
            break
        statements.append(_parse_statement(toks, declared))
        nxt = toks.peek()
        if nxt and _ID_RE.match(nxt[0]):
            tok, _ = toks.next()
            ids.append(int(_ID_RE.match(tok).group(1)))
        else:
            ids.append(None)
    return Clause(tuple(n for n, _ in names), tuple(statements), tuple(ids), tag)


def parse_problem_tokens(toks: _Tokens, declared: Optional[set] = None, allow_tag: bool = False) -> Problem:
    problem = Problem()
    declared = declared if declared is not None else set()
    while toks:
        tok, off = toks.peek()
        if tok == "?":
            toks.next()
            problem.goal = _parse_statement(toks, declared)
            break
        if tok == ";":
            toks.next()
            continue
        problem.clauses.append(_parse_clause(toks, declared, allow_tag))
    return problem


def parse_problem(text: str) -> Problem:
    """Parse a declarative problem: clauses separated by ';', goal after '?'."""
    return parse_problem_tokens(_Tokens(text))


# ---------------------------------------------------------------------------
# construction scripts


@dataclass(frozen=True)
class ConstructionClause:
    outputs: Tuple[str, ...]
    name: str
    args: Tuple[str, ...]

    def __str__(self) -> str:
        head = " ".join(self.outputs)
        return f"{head} = {self.name} {' '.join(self.outputs + self.args)}".rstrip()


Step = Tuple[ConstructionClause, ...]


def format_step(step: Step) -> str:
    return ", ".join(str(c) for c in step)


def parse_construction_script(text: str, defs: Dict[str, "object"]) -> List[Step]:
    """Parse `out... = name out... arg... [, name out... arg...]` steps.

    Steps are separated by ';' or newlines.  The tokens after each
    construction name repeat the step's outputs first (matching the catalog
    convention), followed by the input arguments.  Comma-joined constructions
    within one step constrain the same new point(s), e.g. an intersection

        x = on_line x a b, on_circle x o c
    """
    steps: List[Step] = []
    offset = 0
    for raw in re.split(r"[;\n]", text):
        line = raw.split("#", 1)[0]
        chunk_offset = offset
        offset += len(raw) + 1
        if not line.strip():
            continue
        if "=" not in line:
            raise ParseError("construction line lacks '='", line.strip().split()[0], chunk_offset)
        head, _, tail = line.partition("=")
        outs = head.split()
        if not outs:
            raise ParseError("construction line declares no outputs", "=", chunk_offset)
        clauses: List[ConstructionClause] = []
        cursor = chunk_offset + len(head) + 1
        for chunk in tail.split(","):
            toks = _Tokens(chunk, cursor)
            cursor += len(chunk) + 1
            if not toks:
                raise ParseError("construction step lacks a name", "<end>", chunk_offset)
            name, noff = toks.next()
            if name not in defs:
                raise UnknownConstruction(f"unknown construction {name!r}", name, noff)
            rest = []
            while toks:
                rest.append(toks.next()[0])
            cdef = defs[name]
            bad = WrongArgCount(
                f"{name} takes {len(cdef.outputs)} outputs and {len(cdef.args)} args",
                name,
                noff,
            )
            if len(outs) != len(cdef.outputs):
                raise bad
            # outputs may be repeated after the name (full form) or omitted
            if len(rest) == len(cdef.outputs) + len(cdef.args):
                if rest[: len(outs)] != outs:
                    raise bad
                rest = rest[len(outs):]
            elif len(rest) != len(cdef.args):
                raise bad
            clauses.append(ConstructionClause(tuple(outs), name, tuple(rest)))
        steps.append(tuple(clauses))
    return steps


# ---------------------------------------------------------------------------
# rules


@dataclass(frozen=True)
class Rule:
    """Horn clause over statement templates with uppercase variable slots."""

    name: str
    premises: Tuple[Statement, ...]
    guards: Tuple[Statement, ...]
    conclusions: Tuple[Statement, ...]

    def variables(self) -> List[str]:
        seen: List[str] = []
        for t in self.premises + self.guards + self.conclusions:
            for v in t.args:
                if v not in seen:
                    seen.append(v)
        return seen

    def __str__(self) -> str:
        left = ", ".join(str(t) for t in self.premises + self.guards)
        right = ", ".join(str(t) for t in self.conclusions)
        return f"{self.name} : {left} => {right}"


def _parse_template(toks: _Tokens) -> Statement:
    return _parse_statement(toks, None, allow_undeclared=True)


def parse_rules(text: str) -> List[Rule]:
    """Parse a rule file; '#' starts a comment, one rule per line."""
    rules: List[Rule] = []
    seen = set()
    offset = 0
    for raw in text.split("\n"):
        line = raw.split("#", 1)[0]
        line_offset = offset
        offset += len(raw) + 1
        if not line.strip():
            continue
        if "=>" not in line:
            raise ParseError("rule lacks '=>'", line.strip().split()[0], line_offset)
        head, _, tail = line.partition(":")
        name = head.strip()
        if not name:
            raise ParseError("rule lacks a name", "<none>", line_offset)
        if name in seen:
            raise DuplicateRuleName(f"duplicate rule name {name!r}", name, line_offset)
        seen.add(name)
        left, _, right = tail.partition("=>")
        premises: List[Statement] = []
        guards: List[Statement] = []
        for part in left.split(","):
            if not part.strip():
                continue
            t = _parse_template(_Tokens(part, line_offset))
            (guards if t.pred == "sameclock" else premises).append(t)
        conclusions = [
            _parse_template(_Tokens(part, line_offset))
            for part in right.split(",")
            if part.strip()
        ]
        if not conclusions:
            raise ParseError(f"rule {name!r} has no conclusion", name, line_offset)
        bound = {v for t in premises for v in t.args}
        for t in guards + conclusions:
            for v in t.args:
                if v not in bound:
                    raise UnboundConclusionVariable(
                        f"variable {v!r} of rule {name!r} not bound by premises", v, line_offset
                    )
        rules.append(Rule(name, tuple(premises), tuple(guards), tuple(conclusions)))
    return rules


def load_rules(path: Optional[str] = None) -> List[Rule]:
    """Load rules from `path`, or the bundled default rule file."""
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_rules(fh.read())
    text = resources.files("geoforge").joinpath("data/rules.txt").read_text("utf-8")
    return parse_rules(text)


def load_problem(path: str) -> Problem:
    """Load a declarative problem file ('#' lines are comments)."""
    with open(path, "r", encoding="utf-8") as fh:
        body = " ".join(ln for ln in fh if not ln.lstrip().startswith("#"))
    if not body.strip():
        raise ParseError(f"no problem text in {path}")
    return parse_problem(body)
