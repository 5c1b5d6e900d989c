"""Synthetic Euclidean geometry: deduction engine, generator, proof search."""

__version__ = "0.1.0"

from .statements import Statement, canonicalize
from .numeric import Point, Tolerances, eval_statement, line_angle
from .parsing import Clause, ConstructionClause, Problem, Rule, parse_problem, parse_rules
from .records import Record, ProofStep, parse_record, serialize_record

__all__ = [
    "Statement",
    "canonicalize",
    "Point",
    "Tolerances",
    "eval_statement",
    "line_angle",
    "Clause",
    "ConstructionClause",
    "Problem",
    "Rule",
    "parse_problem",
    "parse_rules",
    "Record",
    "ProofStep",
    "parse_record",
    "serialize_record",
]
