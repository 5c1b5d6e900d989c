"""Beam-search proof loop with pluggable auxiliary-construction proposers.

The loop saturates the bare problem first; while the goal stays unproven it
asks a proposer for candidate constructions, builds and saturates each
extended premise set, and keeps the highest-scoring states up to the beam
width.  Any record returned has passed replay validation, so proposer
behavior can never produce an invalid proof.

Proposers receive the current state and return scored declarative clauses.
The bundled enumerative proposer ranks catalog constructions by how many
numeric coincidences (equal angles and lengths) the new point would create.
An external proposer speaks a line protocol over a child process:

    request:  the <problem> and <aux> sections, then one line "propose K"
    reply:    up to K lines "score<TAB>clause", then one empty line
"""

from __future__ import annotations

import logging
import math
import random
import shlex
import subprocess
import threading
import time
from bisect import bisect_left
from dataclasses import dataclass, field
from itertools import combinations
from queue import Empty, Queue
from typing import Dict, List, Optional, Sequence, Tuple

from .builder import Figure, _apply_step, build_problem_figure
from .catalog import ConstructionDef, load_catalog
from .errors import (BuildFailed, GeoError, InvalidProposal,
                     NumericallyInfeasible, ProposerUnavailable, ReplayFailed)
from .numeric import Tolerances, line_angle
from .parsing import (Clause, ConstructionClause, Problem, Rule, _Tokens,
                      parse_problem_tokens)
from .records import Record, _clause_text
from .tracer import build_record, replay_record
from .engine import Budget, db_from_figure, saturate
from .engine.db import FactDB

log = logging.getLogger("geoforge.prover")


@dataclass
class SearchBudget:
    beam_width: int = 4
    max_depth: int = 2
    engine: Budget = field(default_factory=lambda: Budget(max_rounds=4, max_facts=800))
    wall_millis: Optional[float] = None
    # candidates requested per state; deliberately independent of beam_width
    # so widening the beam cannot change which clauses get proposed
    proposals: Optional[int] = None

    def __post_init__(self):
        if self.beam_width < 1 or self.max_depth < 0:
            raise ValueError("beam_width >= 1 and max_depth >= 0 required")

    @property
    def k(self) -> int:
        return self.proposals if self.proposals is not None else max(self.beam_width, 8)


@dataclass
class ProofState:
    problem: Problem
    aux: Tuple[Clause, ...]
    fig: Figure
    db: FactDB
    score: float


def _clause_key(clause: Clause) -> str:
    body = " ".join(str(s) for s in clause.statements)
    return f"{' '.join(clause.points)} : {body}"


# ---------------------------------------------------------------------------
# enumerative proposer


def _coincidence_score(coords: Dict[str, object], new_name: str,
                       eps: float) -> float:
    """How many equal-angle / equal-length coincidences the point creates."""
    others = sorted(n for n in coords if n != new_name)
    old_lens: List[float] = []
    old_angs: List[float] = []
    for a, b in combinations(others, 2):
        old_lens.append(coords[a].dist(coords[b]))
        try:
            old_angs.append(line_angle(coords[a], coords[b]))
        except GeoError:
            pass
    old_lens.sort()
    old_angs.sort()

    def hits(values: List[float], table: List[float], wrap: float = 0.0) -> int:
        n = 0
        for v in values:
            i = bisect_left(table, v - eps)
            if i < len(table) and table[i] <= v + eps:
                n += 1
                continue
            if wrap and (v < eps or v > wrap - eps):
                twin = v + wrap if v < eps else v - wrap
                i = bisect_left(table, twin - eps)
                if i < len(table) and table[i] <= twin + eps:
                    n += 1
        return n

    p = coords[new_name]
    new_lens = [p.dist(coords[q]) for q in others]
    new_angs = []
    for q in others:
        try:
            new_angs.append(line_angle(p, coords[q]))
        except GeoError:
            pass
    return float(hits(new_lens, old_lens) + hits(new_angs, old_angs, math.pi))


def _fresh_name(taken) -> str:
    for c in "abcdefghijklmnopqrstuvwxyz":
        if c not in taken:
            return c
    i = 0
    while f"p{i}" in taken:
        i += 1
    return f"p{i}"


class EnumerativeProposer:
    """Deterministic proposer over a fixed menu of catalog constructions."""

    MENU = ("midpoint", "foot", "circumcenter", "intersection_ll")

    def __init__(self, defs: Optional[Dict[str, ConstructionDef]] = None,
                 menu: Optional[Sequence[str]] = None,
                 tol: Optional[Tolerances] = None):
        self.defs = defs if defs is not None else load_catalog()
        self.menu = tuple(menu if menu is not None else self.MENU)
        self.tol = tol or Tolerances()

    def _arg_tuples(self, name: str, state: ProofState):
        pts = sorted(state.fig.points)
        if name == "midpoint":
            yield from combinations(pts, 2)
        elif name in ("foot", "reflect"):
            for a in pts:
                for b, c in combinations([p for p in pts if p != a], 2):
                    yield (a, b, c)
        elif name in ("circumcenter", "orthocenter", "incenter"):
            yield from combinations(pts, 3)
        elif name == "intersection_ll":
            db = state.db
            lines = []
            for lid in db.lines.live():
                named = sorted(db.names[i] for i in db.lines.get(lid).points)
                if len(named) >= 2:
                    lines.append(tuple(named))
            for l1, l2 in combinations(sorted(lines), 2):
                yield (l1[0], l1[1], l2[0], l2[1])
        else:
            cdef = self.defs.get(name)
            if cdef is not None:
                yield from combinations(pts, len(cdef.args))

    def propose(self, state: ProofState, k: int) -> List[Tuple[float, Clause]]:
        coords = state.fig.points
        name = _fresh_name(set(coords))
        seen_pts = set()
        scored: List[Tuple[float, str, Clause]] = []
        rng = random.Random(0)
        for cname in self.menu:
            cdef = self.defs.get(cname)
            if cdef is None or len(cdef.outputs) != 1:
                continue
            for args in self._arg_tuples(cname, state):
                cc = ConstructionClause((name,), cname, tuple(args))
                trial = dict(coords)
                try:
                    built = _apply_step(trial, (cc,), self.defs, rng, self.tol)
                except (NumericallyInfeasible, BuildFailed, GeoError):
                    continue
                p = trial[name]
                key = (round(p.x, 6), round(p.y, 6))
                if key in seen_pts:
                    continue
                seen_pts.add(key)
                clause = Clause(built.points, built.statements,
                                (None,) * len(built.statements), None)
                score = _coincidence_score(trial, name, self.tol.eps_eq)
                scored.append((score, _clause_key(clause), clause))
        scored.sort(key=lambda t: (-t[0], t[1]))
        return [(s, clause) for s, _, clause in scored[:k]]


# ---------------------------------------------------------------------------
# external proposer (line protocol over a child process)


def _state_text(state: ProofState) -> str:
    lines = ["<problem>"]
    clauses = state.problem.clauses
    for i, clause in enumerate(clauses):
        suffix = " ;" if i < len(clauses) - 1 else ""
        lines.append(_clause_text(clause) + suffix)
    if state.problem.goal is not None:
        lines.append(f"? {state.problem.goal}")
    lines.append("</problem>")
    lines.append("<aux>")
    for i, clause in enumerate(state.aux):
        tagged = Clause(clause.points, clause.statements,
                        clause.ids, tag=f"x{i:02d}")
        lines.append(_clause_text(tagged) + " ;")
    lines.append("</aux>")
    return "\n".join(lines)


def parse_proposal(text: str, declared: set) -> Clause:
    """Parse one declarative clause; raises InvalidProposal."""
    try:
        problem = parse_problem_tokens(_Tokens(text.replace(",", " ")),
                                       set(declared), allow_tag=True)
    except GeoError as e:
        raise InvalidProposal(f"unparseable clause {text!r}: {e}")
    if len(problem.clauses) != 1 or problem.goal is not None:
        raise InvalidProposal(f"expected exactly one clause: {text!r}")
    clause = problem.clauses[0]
    if not clause.statements:
        raise InvalidProposal(f"clause adds no predicates: {text!r}")
    if any(p in declared for p in clause.points):
        raise InvalidProposal(f"clause redefines an existing point: {text!r}")
    return Clause(clause.points, clause.statements,
                  (None,) * len(clause.statements), None)


class ExternalProposer:
    """Adapter for a child process speaking the score/clause line protocol."""

    def __init__(self, command: str, timeout: float = 10.0):
        self.command = command
        self.timeout = timeout
        self._proc: Optional[subprocess.Popen] = None
        self._queue: Queue = Queue()

    def _ensure(self) -> subprocess.Popen:
        if self._proc is not None and self._proc.poll() is None:
            return self._proc
        try:
            self._proc = subprocess.Popen(
                shlex.split(self.command), stdin=subprocess.PIPE,
                stdout=subprocess.PIPE, text=True, bufsize=1)
        except OSError as e:
            raise ProposerUnavailable(f"cannot start {self.command!r}: {e}")
        self._queue = Queue()

        def pump(proc, queue):
            for line in proc.stdout:
                queue.put(line)
            queue.put(None)

        threading.Thread(target=pump, args=(self._proc, self._queue),
                         daemon=True).start()
        return self._proc

    def propose(self, state: ProofState, k: int) -> List[Tuple[float, Clause]]:
        proc = self._ensure()
        request = _state_text(state) + f"\npropose {k}\n"
        try:
            proc.stdin.write(request)
            proc.stdin.flush()
        except (BrokenPipeError, OSError) as e:
            raise ProposerUnavailable(f"proposer process lost: {e}")
        declared = set(state.fig.points)
        out: List[Tuple[float, Clause]] = []
        deadline = time.monotonic() + self.timeout
        while len(out) < k:
            remain = deadline - time.monotonic()
            if remain <= 0:
                log.warning("proposer timed out; returning %d candidates", len(out))
                break
            try:
                line = self._queue.get(timeout=remain)
            except Empty:
                log.warning("proposer timed out; returning %d candidates", len(out))
                break
            if line is None:
                raise ProposerUnavailable("proposer closed its output")
            line = line.strip()
            if not line:
                break
            try:
                score_text, clause_text = line.split("\t", 1)
                score = float(score_text)
                if not math.isfinite(score):
                    raise ValueError("score must be finite")
                clause = parse_proposal(clause_text, declared)
            except (ValueError, InvalidProposal) as e:
                log.warning("discarding proposal %r: %s", line, e)
                continue
            out.append((score, clause))
        return out

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.terminate()
        self._proc = None


class EnsembleProposer:
    """Interleaves the ranked candidates of several proposers."""

    def __init__(self, *proposers):
        if not proposers:
            raise ValueError("ensemble needs at least one proposer")
        self.proposers = proposers

    def propose(self, state: ProofState, k: int) -> List[Tuple[float, Clause]]:
        ranked: List[List[Tuple[float, Clause]]] = []
        down = 0
        for p in self.proposers:
            try:
                ranked.append(p.propose(state, k))
            except ProposerUnavailable as e:
                down += 1
                log.warning("ensemble member unavailable: %s", e)
        if down == len(self.proposers):
            raise ProposerUnavailable("every ensemble member is unavailable")
        out: List[Tuple[float, Clause]] = []
        seen = set()
        for i in range(k):
            for lst in ranked:
                if i < len(lst):
                    key = _clause_key(lst[i][1])
                    if key not in seen:
                        seen.add(key)
                        out.append(lst[i])
        return out[:k]


# ---------------------------------------------------------------------------
# the loop


def solve(problem: Problem, rules: Sequence[Rule],
          proposer=None,
          budget: Optional[SearchBudget] = None,
          defs: Optional[Dict[str, ConstructionDef]] = None,
          tol: Optional[Tolerances] = None,
          fallback=None) -> Optional[Record]:
    """Prove the problem's goal, extending premises by beam search.

    Returns a replay-validated record, or None when the budget is exhausted.
    A ProposerUnavailable error degrades to `fallback` when one is given.
    """
    if problem.goal is None:
        raise ValueError("problem has no goal")
    budget = budget or SearchBudget()
    defs = defs if defs is not None else load_catalog()
    tol = tol or Tolerances()
    goal = problem.goal
    start = time.monotonic()

    def expired() -> bool:
        return (budget.wall_millis is not None
                and (time.monotonic() - start) * 1e3 >= budget.wall_millis)

    def make_state(aux: Tuple[Clause, ...], score: float) -> ProofState:
        fig = build_problem_figure(problem, defs, tol=tol,
                                   rng=random.Random(0),
                                   extra_clauses=list(aux))
        db = db_from_figure(fig.points, fig.statements(), tol)
        saturate(db, rules, budget=budget.engine, goal=goal)
        return ProofState(problem, aux, fig, db, score)

    def finish(state: ProofState) -> Optional[Record]:
        gid = state.db.query(goal)
        if gid is None:
            return None
        clauses = list(problem.clauses) + list(state.aux)
        record = build_record(clauses, goal, state.db, gid)
        replay_record(record, defs, rules, tol, figure=state.fig)
        return record

    state0 = make_state((), 0.0)
    record = finish(state0)
    if record is not None:
        return record
    if proposer is None:
        return None

    warned = False
    beam = [state0]
    for _ in range(budget.max_depth):
        children: List[ProofState] = []
        for state in beam:
            if expired():
                return None
            try:
                proposals = proposer.propose(state, budget.k)
            except ProposerUnavailable as e:
                if fallback is None:
                    raise
                if not warned:
                    log.warning("proposer unavailable (%s); degrading to fallback", e)
                    warned = True
                proposer = fallback
                proposals = proposer.propose(state, budget.k)
            for score, clause in proposals:
                if expired():
                    return None
                try:
                    child = make_state(state.aux + (clause,), score)
                except (BuildFailed, NumericallyInfeasible, InvalidProposal) as e:
                    log.debug("proposal %s rejected: %s", _clause_key(clause), e)
                    continue
                try:
                    record = finish(child)
                except ReplayFailed as e:
                    log.warning("discarding unreplayable proof: %s", e)
                    record = None
                if record is not None:
                    return record
                children.append(child)
        if not children:
            return None
        children.sort(key=lambda st: (-st.score, len(st.aux),
                                      tuple(_clause_key(c) for c in st.aux)))
        beam = children[:budget.beam_width]
    return None
