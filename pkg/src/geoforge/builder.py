"""Figure construction: place coordinates for scripts and problem clauses.

Two entry points share the retry/verify/normalize machinery:

  build_figure          runs a construction script (catalog syntax), the
                        generator's path
  build_problem_figure  solves declarative problem clauses, the prover's
                        and checker's path; clauses are matched back to
                        catalog definitions when possible, otherwise the
                        new point is pinned by intersecting statement loci

A whole attempt is retried from scratch (fresh coordinates everywhere) when
any step comes out numerically infeasible; per-step resampling would skew
intersection branch choices.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .catalog import GUARDS, ConstructionDef
from .errors import BuildFailed, DegenerateInput, NumericallyInfeasible
from .numeric import (
    Circle,
    Coords,
    Point,
    Tolerances,
    circ_diff_mod_pi,
    eval_statement,
    line_angle,
    normalize_coords,
    orientation,
    intersect,
)
from .parsing import Clause, ConstructionClause, Problem, Step
from .sketches import LOCI, RECIPES, locus_of_statement
from .statements import Statement, images

_TRIES = 64
# fresh points closer than this to an existing one are resampled
_MIN_SEP = 1e-3


@dataclass
class Figure:
    """A placed diagram plus the declarative clauses that produced it."""

    points: Dict[str, Point] = field(default_factory=dict)
    clauses: List[Clause] = field(default_factory=list)
    provenance: Dict[str, str] = field(default_factory=dict)

    def statements(self) -> List[Statement]:
        out: List[Statement] = []
        for c in self.clauses:
            out.extend(c.statements)
        return out


# ---------------------------------------------------------------------------
# guards


def eval_guard(stmt: Statement, coords: Coords, tol: Tolerances) -> bool:
    """Numeric truth of a prerequisite; guards use the degeneracy margin."""
    p, a = stmt.pred, stmt.args
    if p == "diff":
        return coords[a[0]].dist(coords[a[1]]) > tol.eps_deg
    if p == "ncoll":
        return abs(orientation(coords[a[0]], coords[a[1]], coords[a[2]])) > tol.eps_deg
    if p == "npara":
        try:
            a1 = line_angle(coords[a[0]], coords[a[1]])
            a2 = line_angle(coords[a[2]], coords[a[3]])
        except DegenerateInput:
            return False
        return circ_diff_mod_pi(a1, a2) > tol.eps_deg
    try:
        return eval_statement(stmt, coords, tol)
    except DegenerateInput:
        return False


def prerequisite_failure(
    cc: ConstructionClause, coords: Coords, defs: Dict[str, ConstructionDef], tol: Tolerances
) -> Optional[str]:
    cdef = defs[cc.name]
    for out in cc.outputs:
        if out in coords:
            return f"name collision: {out}"
    for arg in cc.args:
        if arg not in coords:
            return f"unknown point: {arg}"
    sub = dict(zip(cdef.args, cc.args))
    for t in cdef.prerequisites:
        inst = Statement(t.pred, tuple(sub[v] for v in t.args), t.literal)
        if not eval_guard(inst, coords, tol):
            return f"prerequisite failed: {inst}"
    return None


def check_prerequisites(
    cc: ConstructionClause, fig: Figure, defs: Dict[str, ConstructionDef], tol: Optional[Tolerances] = None
) -> bool:
    """True iff `cc` can be applied to `fig` (guards hold, no name collision)."""
    return prerequisite_failure(cc, fig.points, defs, tol or Tolerances()) is None


# ---------------------------------------------------------------------------
# script path


def _instantiate(cdef: ConstructionDef, cc: ConstructionClause) -> List[Statement]:
    sub = dict(zip(cdef.outputs + cdef.args, cc.outputs + cc.args))
    return [Statement(t.pred, tuple(sub[v] for v in t.args), t.literal) for t in cdef.added]


def _verify_new(coords: Coords, new_names: Sequence[str], stmts: Sequence[Statement], tol: Tolerances):
    for name in new_names:
        p = coords[name]
        if not (abs(p.x) < 1e6 and abs(p.y) < 1e6):
            raise NumericallyInfeasible(f"{name} escaped to {p}")
        for other, q in coords.items():
            if other not in new_names and p.dist(q) < _MIN_SEP:
                raise NumericallyInfeasible(f"{name} coincides with {other}")
    for s in stmts:
        try:
            if not eval_statement(s, coords, tol):
                raise NumericallyInfeasible(f"added predicate fails: {s}")
        except DegenerateInput as e:
            raise NumericallyInfeasible(str(e))


def _apply_step(coords: Coords, step: Step, defs, rng, tol) -> Clause:
    new_stmts: List[Statement] = []
    for cc in step:
        failure = prerequisite_failure(cc, coords, defs, tol)
        if failure is not None:
            raise NumericallyInfeasible(failure)
        new_stmts.extend(_instantiate(defs[cc.name], cc))
    outputs = step[0].outputs
    if len(step) == 1:
        cc = step[0]
        recipe = RECIPES.get(cc.name)
        if recipe is None:
            raise BuildFailed(-1, f"no sketch recipe for {cc.name}")
        try:
            placed = recipe([coords[a] for a in cc.args], rng)
        except DegenerateInput as e:
            raise NumericallyInfeasible(str(e))
        for name, p in zip(cc.outputs, placed):
            coords[name] = p
    elif len(step) == 2 and all(c.name in LOCI for c in step) and len(outputs) == 1:
        try:
            loci = [LOCI[c.name]([coords[a] for a in c.args]) for c in step]
            candidates = intersect(loci[0], loci[1])
        except DegenerateInput as e:
            raise NumericallyInfeasible(str(e))
        candidates = sorted(set(candidates))
        keep = [p for p in candidates if all(p.dist(q) > _MIN_SEP for q in coords.values())]
        if not keep:
            raise NumericallyInfeasible("intersection yields no fresh point")
        coords[outputs[0]] = keep[rng.randrange(len(keep))]
    else:
        raise BuildFailed(-1, "unsupported step combination")
    _verify_new(coords, outputs, new_stmts, tol)
    return Clause(points=tuple(outputs), statements=tuple(new_stmts))


def build_figure(
    steps: Sequence[Step],
    defs: Dict[str, ConstructionDef],
    tol: Optional[Tolerances] = None,
    rng: Optional[random.Random] = None,
    max_retries: int = 16,
) -> Figure:
    """Place coordinates for a construction script, retrying whole attempts."""
    tol = tol or Tolerances()
    rng = rng or random.Random(0)
    last: Tuple[int, str] = (-1, "no attempts")
    for _ in range(max_retries):
        sub = random.Random(rng.getrandbits(64))
        coords: Coords = {}
        clauses: List[Clause] = []
        provenance: Dict[str, str] = {}
        try:
            for i, step in enumerate(steps):
                try:
                    clause = _apply_step(coords, step, defs, sub, tol)
                except NumericallyInfeasible as e:
                    last = (i, str(e))
                    raise
                except BuildFailed as e:
                    raise BuildFailed(i, e.reason)
                clauses.append(clause)
                for cc in step:
                    for out in cc.outputs:
                        provenance[out] = cc.name
        except NumericallyInfeasible:
            continue
        return Figure(normalize_coords(coords), clauses, provenance)
    raise BuildFailed(last[0], last[1])


# ---------------------------------------------------------------------------
# declarative path: clause -> catalog definition (reverse matching)


def _match_template(template: Statement, concrete: Statement, binding: Dict[str, str]):
    if template.pred != concrete.pred or template.literal != concrete.literal:
        return None
    b = dict(binding)
    for var, val in zip(template.args, concrete.args):
        if b.get(var, val) != val:
            return None
        b[var] = val
    return b


def _unify_templates(
    templates: Sequence[Statement], stmts: List[Statement], binding: Dict[str, str]
) -> Iterator[Dict[str, str]]:
    if not templates:
        yield binding
        return
    head = templates[0]
    for i, s in enumerate(stmts):
        seen = set()
        for img in images(s):
            b = _match_template(head, img, binding)
            if b is None:
                continue
            key = tuple(sorted(b.items()))
            if key in seen:
                continue
            seen.add(key)
            yield from _unify_templates(templates[1:], stmts[:i] + stmts[i + 1 :], b)


def match_catalog_clause(
    clause: Clause, defs: Dict[str, ConstructionDef]
) -> List[Tuple[ConstructionDef, Dict[str, str]]]:
    """Catalog definitions whose added predicates explain `clause` exactly."""
    results: List[Tuple[ConstructionDef, Dict[str, str]]] = []
    new = set(clause.points)
    for cdef in defs.values():
        if not cdef.added or len(cdef.added) != len(clause.statements):
            continue
        if len(cdef.outputs) != len(clause.points):
            continue
        seen = set()
        for b in _unify_templates(cdef.added, list(clause.statements), {}):
            outs = tuple(b.get(o) for o in cdef.outputs)
            if set(outs) != new or len(set(outs)) != len(outs):
                continue
            argvals = tuple(b.get(v) for v in cdef.args)
            if None in argvals or any(v in new for v in argvals):
                continue
            key = (outs, argvals)
            if key in seen:
                continue
            seen.add(key)
            results.append((cdef, b))
    return results


def _place_free(coords: Coords, names: Sequence[str], rng) -> None:
    for name in names:
        for _ in range(_TRIES):
            p = Point(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
            if all(p.dist(q) > 0.3 for q in coords.values()):
                coords[name] = p
                break
        else:
            raise NumericallyInfeasible("free point placement stalled")


def _verify_clause(coords: Coords, clause: Clause, tol: Tolerances) -> bool:
    try:
        return all(eval_statement(s, coords, tol) for s in clause.statements)
    except DegenerateInput:
        return False


def _solve_via_catalog(clause: Clause, coords: Coords, defs, rng, tol) -> bool:
    for cdef, b in match_catalog_clause(clause, defs):
        if any(b[a] not in coords for a in cdef.args):
            continue
        cc = ConstructionClause(
            tuple(b[o] for o in cdef.outputs), cdef.name, tuple(b[a] for a in cdef.args)
        )
        if prerequisite_failure(cc, coords, defs, tol) is not None:
            continue
        try:
            placed = RECIPES[cdef.name]([coords[a] for a in cc.args], rng)
        except (NumericallyInfeasible, DegenerateInput):
            continue
        trial = dict(coords)
        for name, p in zip(cc.outputs, placed):
            trial[name] = p
        try:
            _verify_new(trial, cc.outputs, clause.statements, tol)
        except NumericallyInfeasible:
            continue
        coords.update(trial)
        return True
    return False


def _solve_via_loci(clause: Clause, coords: Coords, rng, tol) -> None:
    if len(clause.points) != 1:
        raise BuildFailed(-1, f"cannot solve clause for points {clause.points}")
    x = clause.points[0]
    loci = []
    for s in clause.statements:
        try:
            locus = locus_of_statement(s, x, coords)
        except DegenerateInput as e:
            raise NumericallyInfeasible(str(e))
        if locus is None:
            raise BuildFailed(-1, f"no locus for statement: {s}")
        loci.append(locus)
    fixed = [l for l in loci if isinstance(l, Point)]
    candidates: List[Point]
    if fixed:
        candidates = [fixed[0]]
    elif len(loci) == 1:
        _sample_on_locus(clause, coords, loci[0], rng, tol)
        return
    else:
        try:
            candidates = sorted(set(intersect(loci[0], loci[1])))
        except DegenerateInput as e:
            raise NumericallyInfeasible(str(e))
    keep = []
    for p in candidates:
        trial = dict(coords)
        trial[x] = p
        try:
            _verify_new(trial, (x,), clause.statements, tol)
        except NumericallyInfeasible:
            continue
        keep.append(p)
    if not keep:
        raise NumericallyInfeasible(f"no placement satisfies clause for {x}")
    coords[x] = keep[rng.randrange(len(keep))]


def _sample_on_locus(clause: Clause, coords: Coords, locus, rng, tol) -> None:
    x = clause.points[0]
    for _ in range(_TRIES):
        if isinstance(locus, Circle):
            p = locus.point_at(rng.uniform(0.0, 2 * math.pi))
        else:
            p = locus.point_at(rng.uniform(-1.5, 1.5))
        trial = dict(coords)
        trial[x] = p
        try:
            _verify_new(trial, (x,), clause.statements, tol)
        except NumericallyInfeasible:
            continue
        coords[x] = p
        return
    raise NumericallyInfeasible(f"locus sampling stalled for {x}")


def solve_clause(clause: Clause, coords: Coords, defs, rng, tol) -> None:
    """Place the clause's new points into `coords` (mutates on success)."""
    for name in clause.points:
        if name in coords:
            raise BuildFailed(-1, f"point {name} already placed")
    if not clause.statements:
        _place_free(coords, clause.points, rng)
        return
    if _solve_via_catalog(clause, coords, defs, rng, tol):
        return
    _solve_via_loci(clause, coords, rng, tol)


def build_problem_figure(
    problem: Problem,
    defs: Dict[str, ConstructionDef],
    tol: Optional[Tolerances] = None,
    rng: Optional[random.Random] = None,
    max_retries: int = 16,
    extra_clauses: Sequence[Clause] = (),
) -> Figure:
    """Build a figure satisfying a declarative problem (plus aux clauses)."""
    tol = tol or Tolerances()
    rng = rng or random.Random(0)
    all_clauses = list(problem.clauses) + list(extra_clauses)
    last: Tuple[int, str] = (-1, "no attempts")
    for _ in range(max_retries):
        sub = random.Random(rng.getrandbits(64))
        coords: Coords = {}
        try:
            for i, clause in enumerate(all_clauses):
                try:
                    solve_clause(clause, coords, defs, sub, tol)
                except NumericallyInfeasible as e:
                    last = (i, str(e))
                    raise
                except BuildFailed as e:
                    raise BuildFailed(i, e.reason)
        except NumericallyInfeasible:
            continue
        provenance = {name: "clause" for c in all_clauses for name in c.points}
        return Figure(normalize_coords(coords), all_clauses, provenance)
    raise BuildFailed(last[0], last[1])
