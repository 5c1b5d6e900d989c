"""Conclusion quality filter: trivial/reducible rejection plus equivalence dedupe.

judge() applies the predicate-specific rejection rows in a fixed order, so a
conclusion matching several rows always gets the first reason.  dedupe()
collapses eqangle conclusions whose corresponding lines are pairwise
parallel on the figure, and eqratio conclusions whose corresponding segments
are congruent, keeping one representative per class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .builder import Figure
from .numeric import Tolerances, circ_diff_mod_pi, cluster_values, line_angle
from .statements import Statement, canonicalize, images
from .engine.db import FactDB


class FilterReason(Enum):
    TrivialSelf = "TrivialSelf"
    ReducibleToPara = "ReducibleToPara"
    ReducibleToCong = "ReducibleToCong"
    ReducibleToPerp = "ReducibleToPerp"
    ReducibleToColl = "ReducibleToColl"
    ReducibleToSimilarity = "ReducibleToSimilarity"
    SameclockExcluded = "SameclockExcluded"
    EquivalentDuplicate = "EquivalentDuplicate"
    Keep = "Keep"


@dataclass(frozen=True)
class FilterVerdict:
    keep: bool
    reason: FilterReason


_KEEP = FilterVerdict(True, FilterReason.Keep)


def _reject(reason: FilterReason) -> FilterVerdict:
    return FilterVerdict(False, reason)


def _upair(a: str, b: str) -> Tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def _similarity_induced(db: FactDB) -> Set[Statement]:
    """Canonical eqangle statements entailed by stored similarity facts."""
    cached = getattr(db, "_sim_induced", None)
    if cached is not None and cached[0] == len(db.facts):
        return cached[1]
    out: Set[Statement] = set()
    for pred, direct in (("simtri", True), ("simtrir", False)):
        for fact in db.pred_facts(pred):
            for im in images(fact.stmt):
                a, b, c, p, q, r = im.args
                if direct:
                    pair = (Statement("eqangle", (b, a, b, c, q, p, q, r)),
                            Statement("eqangle", (c, a, c, b, r, p, r, q)))
                else:
                    pair = (Statement("eqangle", (b, a, b, c, q, r, q, p)),
                            Statement("eqangle", (c, a, c, b, r, q, r, p)))
                out.add(canonicalize(pair[0]))
                out.add(canonicalize(pair[1]))
    db._sim_induced = (len(db.facts), out)
    return out


def judge(c: Statement, fig: Figure, db: FactDB,
          tol: Optional[Tolerances] = None) -> FilterVerdict:
    """Verdict for one numerically-true conclusion on its figure."""
    tol = tol or Tolerances()
    pts = fig.points
    pred = c.pred
    a = c.args

    def parallel(s1, s2) -> bool:
        v1 = line_angle(pts[s1[0]], pts[s1[1]])
        v2 = line_angle(pts[s2[0]], pts[s2[1]])
        return circ_diff_mod_pi(v1, v2) < tol.eps_eq

    def perpendicular(s1, s2) -> bool:
        v1 = line_angle(pts[s1[0]], pts[s1[1]])
        v2 = line_angle(pts[s2[0]], pts[s2[1]])
        return abs(circ_diff_mod_pi(v1, v2) - math.pi / 2) < tol.eps_eq

    def congruent(s1, s2) -> bool:
        d1 = pts[s1[0]].dist(pts[s1[1]])
        d2 = pts[s2[0]].dist(pts[s2[1]])
        return abs(d1 - d2) < tol.eps_eq

    if pred == "sameclock":
        return _reject(FilterReason.SameclockExcluded)

    if pred == "aconst":
        if c.literal is not None and c.literal % 180 == 0:
            return _reject(FilterReason.ReducibleToPara)
        return _KEEP

    if pred == "rconst":
        if c.literal == 1:
            return _reject(FilterReason.ReducibleToCong)
        return _KEEP

    if pred == "cong":
        if _upair(a[0], a[1]) == _upair(a[2], a[3]):
            return _reject(FilterReason.TrivialSelf)
        return _KEEP

    if pred == "para":
        if _upair(a[0], a[1]) == _upair(a[2], a[3]):
            return _reject(FilterReason.TrivialSelf)
        if len(set(a)) < 4:
            return _reject(FilterReason.ReducibleToColl)
        return _KEEP

    if pred == "eqratio":
        s = [_upair(a[0], a[1]), _upair(a[2], a[3]),
             _upair(a[4], a[5]), _upair(a[6], a[7])]
        if s[0] == s[2] and s[1] == s[3]:
            return _reject(FilterReason.TrivialSelf)
        if s[0] == s[3] and s[1] == s[2]:
            return _reject(FilterReason.ReducibleToCong)
        if s[0] == s[1] or s[2] == s[3]:
            return _reject(FilterReason.ReducibleToCong)
        if congruent(s[0], s[1]) or congruent(s[2], s[3]):
            return _reject(FilterReason.ReducibleToCong)
        if congruent(s[0], s[2]) or congruent(s[1], s[3]):
            return _reject(FilterReason.ReducibleToCong)
        return _KEEP

    if pred == "eqangle":
        s = [_upair(a[0], a[1]), _upair(a[2], a[3]),
             _upair(a[4], a[5]), _upair(a[6], a[7])]
        if s[0] == s[2] and s[1] == s[3]:
            return _reject(FilterReason.TrivialSelf)
        if s[0] == s[3] and s[1] == s[2]:
            return _reject(FilterReason.ReducibleToPerp)
        if s[0] == s[1] or s[2] == s[3]:
            return _reject(FilterReason.ReducibleToPara)
        if any(parallel(s[i], s[j]) for i in range(4) for j in range(i + 1, 4)):
            return _reject(FilterReason.ReducibleToPara)
        if perpendicular(s[0], s[1]) or perpendicular(s[2], s[3]):
            return _reject(FilterReason.ReducibleToPerp)
        if canonicalize(c) in _similarity_induced(db):
            return _reject(FilterReason.ReducibleToSimilarity)
        return _KEEP

    if pred in ("simtri", "simtrir", "contri", "contrir"):
        if a[:3] == a[3:]:
            return _reject(FilterReason.TrivialSelf)
        return _KEEP

    return _KEEP


# ---------------------------------------------------------------------------
# equivalence dedupe


def _direction_buckets(fig: Figure, sides: Sequence[Tuple[str, str]],
                       eps: float) -> Dict[Tuple[str, str], int]:
    items = []
    for i, side in enumerate(sides):
        v = line_angle(fig.points[side[0]], fig.points[side[1]])
        items.append((v, i))
        if v < 2 * eps:                       # wraparound twin near 0 = pi
            items.append((v + math.pi, i))
    # a side can appear in two clusters through its twin; union them
    parent = list(range(len(sides)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for cluster in cluster_values(items, eps):
        members = sorted({i for _, i in cluster})
        for i in members[1:]:
            ra, rb = find(members[0]), find(i)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    return {side: find(i) for i, side in enumerate(sides)}


def _length_buckets(fig: Figure, sides: Sequence[Tuple[str, str]],
                    eps: float) -> Dict[Tuple[str, str], int]:
    items = [(fig.points[s[0]].dist(fig.points[s[1]]), i)
             for i, s in enumerate(sides)]
    buckets: Dict[Tuple[str, str], int] = {}
    for ci, cluster in enumerate(cluster_values(items, eps)):
        for _, i in cluster:
            buckets[sides[i]] = ci
    return buckets


def _signature(stmt: Statement, buckets) -> tuple:
    best = None
    for im in images(stmt):
        ar = im.args
        sig = tuple(buckets[_upair(ar[i], ar[i + 1])] for i in (0, 2, 4, 6))
        if best is None or sig < best:
            best = sig
    return best


def dedupe(kept: Sequence[Statement], fig: Figure,
           tol: Optional[Tolerances] = None) -> List[Statement]:
    """One representative per equivalence class, original order preserved.

    eqangle statements are equivalent when their corresponding lines are
    pairwise parallel; eqratio when corresponding segments are congruent.
    The representative is the member with the least canonical form.
    """
    tol = tol or Tolerances()
    by_pred: Dict[str, List[Statement]] = {"eqangle": [], "eqratio": []}
    for stmt in kept:
        if stmt.pred in by_pred:
            by_pred[stmt.pred].append(stmt)

    rep: Dict[int, Statement] = {}          # id(stmt) -> class representative
    for pred, group in by_pred.items():
        if not group:
            continue
        sides = sorted({_upair(s.args[i], s.args[i + 1])
                        for s in group for i in (0, 2, 4, 6)})
        if pred == "eqangle":
            buckets = _direction_buckets(fig, sides, tol.eps_eq)
        else:
            buckets = _length_buckets(fig, sides, tol.eps_eq)
        classes: Dict[tuple, List[Statement]] = {}
        for s in group:
            classes.setdefault(_signature(s, buckets), []).append(s)
        for members in classes.values():
            best = min(members, key=lambda s: canonicalize(s).args)
            for s in members:
                rep[id(s)] = best

    out: List[Statement] = []
    emitted: Set[int] = set()
    for stmt in kept:
        chosen = rep.get(id(stmt), stmt)
        if id(chosen) in emitted:
            continue
        emitted.add(id(chosen))
        out.append(chosen)
    return out
