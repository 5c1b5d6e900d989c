"""Construction catalog: named point constructions with category tags.

The catalog is a data file, one definition per line:

    CATEGORY name | outputs | args | prerequisites | added predicates

Prerequisites are statement templates over the argument points and may use
the guard predicates (`diff`, `ncoll`, `npara`) alongside the ordinary ones.
Added predicates are templates over outputs plus arguments; they become the
premise statements a construction contributes to a figure.

Categories:
  BASIC       scaffold constructions creating several mutually free points
  BASIC_FREE  one fresh unconstrained point
  INTERSECT   one output constrained to a single locus (line or circle);
              two of these sharing an output pin the point by intersection
  OTHERS      the output is uniquely determined by the arguments
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Dict, Optional, Tuple

from .errors import ParseError
from .parsing import _parse_statement, _Tokens
from .statements import PREDICATES, Statement

# numeric guard predicates usable in prerequisite position
GUARDS = {"diff": 2, "ncoll": 3, "npara": 4}

CATEGORIES = ("BASIC", "BASIC_FREE", "INTERSECT", "OTHERS")

_TEMPLATE_ARITIES = {**PREDICATES, **GUARDS}


@dataclass(frozen=True)
class ConstructionDef:
    name: str
    category: str
    outputs: Tuple[str, ...]
    args: Tuple[str, ...]
    prerequisites: Tuple[Statement, ...]
    added: Tuple[Statement, ...]


def _parse_templates(field: str, offset: int, arities) -> Tuple[Statement, ...]:
    out = []
    for part in field.split(","):
        if not part.strip():
            continue
        toks = _Tokens(part, offset)
        out.append(_parse_statement(toks, None, allow_undeclared=True, arities=arities))
        if toks:
            tok, off = toks.peek()
            raise ParseError(f"trailing tokens after template: {tok!r}", tok, off)
    return tuple(out)


def parse_catalog(text: str) -> Dict[str, ConstructionDef]:
    """Parse catalog text into an ordered name -> ConstructionDef map."""
    defs: Dict[str, ConstructionDef] = {}
    offset = 0
    for raw in text.split("\n"):
        line = raw.split("#", 1)[0]
        line_offset = offset
        offset += len(raw) + 1
        if not line.strip():
            continue
        fields = line.split("|")
        if len(fields) != 5:
            raise ParseError("catalog line needs 5 '|' fields", line.strip()[:20], line_offset)
        head = fields[0].split()
        if len(head) != 2 or head[0] not in CATEGORIES:
            raise ParseError("catalog line must start with CATEGORY name", fields[0].strip(), line_offset)
        category, name = head
        if name in defs:
            raise ParseError(f"duplicate construction {name!r}", name, line_offset)
        outputs = tuple(fields[1].split())
        args = tuple(fields[2].split())
        prereqs = _parse_templates(fields[3], line_offset, _TEMPLATE_ARITIES)
        added = _parse_templates(fields[4], line_offset, PREDICATES)
        _validate(category, name, outputs, args, prereqs, added, line_offset)
        defs[name] = ConstructionDef(name, category, outputs, args, prereqs, added)
    return defs


def _validate(category, name, outputs, args, prereqs, added, off):
    if not outputs:
        raise ParseError(f"{name}: no outputs", name, off)
    if len(set(outputs + args)) != len(outputs) + len(args):
        raise ParseError(f"{name}: repeated variable", name, off)
    argset, outset = set(args), set(outputs)
    for t in prereqs:
        for v in t.args:
            if v not in argset:
                raise ParseError(f"{name}: prerequisite var {v!r} not an argument", v, off)
    for t in added:
        for v in t.args:
            if v not in argset | outset:
                raise ParseError(f"{name}: added var {v!r} unknown", v, off)
    if category == "BASIC_FREE" and (args or len(outputs) != 1):
        raise ParseError(f"{name}: BASIC_FREE takes no args, one output", name, off)
    if category in ("BASIC", "BASIC_FREE") and args:
        raise ParseError(f"{name}: {category} takes no arguments", name, off)
    if category == "INTERSECT":
        if len(outputs) != 1 or len(added) != 1:
            raise ParseError(f"{name}: INTERSECT adds one locus on one output", name, off)
    if category in ("INTERSECT", "OTHERS") and not args:
        raise ParseError(f"{name}: {category} needs arguments", name, off)


def load_catalog(path: Optional[str] = None) -> Dict[str, ConstructionDef]:
    """Load the catalog from `path`, or the bundled default."""
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_catalog(fh.read())
    text = resources.files("geoforge").joinpath("data/constructions.txt").read_text("utf-8")
    return parse_catalog(text)


def by_category(defs: Dict[str, ConstructionDef], category: str) -> Tuple[ConstructionDef, ...]:
    return tuple(d for d in defs.values() if d.category == category)
