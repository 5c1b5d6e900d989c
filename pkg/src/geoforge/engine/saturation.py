"""Forward-chaining saturation and numeric relation pre-identification.

saturate() alternates frozen matching rounds with a deterministic merge:
matching sees only the round-start database, emissions are inserted in
(rule index, binding, conclusion index) order, so both matching modes grow
the database through identical fact sequences.  Budgets bound rounds, fact
count and wall time; exhaustion marks the database incomplete instead of
raising.

pre_identify() is the numeric front end: it sorts pairwise angle and ratio
values over every point pair of the figure, sweeps them into clusters, and
verifies candidates pairwise inside each cluster.  The sweep eps dominates
the relation tolerance, so the result equals the all-pairs scan while doing
a fraction of the comparisons.  Similar-triangle candidates are assembled
from ratio candidates that share a vertex on both sides.
"""

import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..numeric import Point, Tolerances, cluster_values, orientation
from ..statements import Statement, canonicalize
from .db import FactDB
from .matching import MatchStats, match_all

PI = math.pi


@dataclass
class Budget:
    max_rounds: int = 8
    max_facts: int = 3000
    max_millis: Optional[float] = None


def db_from_figure(points: Dict[str, Point], statements: Sequence[Statement],
                   tol: Optional[Tolerances] = None) -> FactDB:
    """Database seeded with a figure's construction statements."""
    db = FactDB(points, tol)
    for stmt in statements:
        db.insert(stmt, rule="premise", deps=(), force=True)
    return db


def saturate(db: FactDB, rules, mode: str = "partial",
             budget: Optional[Budget] = None,
             goal: Optional[Statement] = None) -> MatchStats:
    """Match rules to fixed point (or budget), inserting derived facts.

    With a goal, stops after the first round that entails it; the closure is
    then partial by design and the database is not marked incomplete.
    """
    budget = budget or Budget()
    partial = mode != "naive"
    stats = MatchStats()
    start = time.perf_counter()
    if partial and db.pre_candidates is None:
        db.pre_candidates = pre_identify(db)
    if goal is not None and db.satisfies(goal) is not None:
        return stats
    for _ in range(budget.max_rounds):
        if (budget.max_millis is not None
                and (time.perf_counter() - start) * 1e3 >= budget.max_millis):
            db.incomplete = True
            return stats
        emissions, stats = match_all(db, rules, partial, stats)
        stats.rounds += 1
        db.rounds += 1
        novel = 0
        for em in emissions:
            if len(db.facts) >= budget.max_facts:
                db.incomplete = True
                return stats
            # an earlier merge this round may have entailed it meanwhile
            if db.satisfies(em.stmt) is not None:
                continue
            deps = list(em.deps)
            for g in em.guards:
                gid = db.index.get(canonicalize(g))
                if gid is None:
                    gid = db.insert(g, rule="numerical_check", deps=(), force=True)
                if gid not in deps:
                    deps.append(gid)
            db.insert(em.stmt, em.rule_name, tuple(deps))
            novel += 1
        if goal is not None and db.satisfies(goal) is not None:
            return stats
        if novel == 0:
            return stats
    db.incomplete = True
    return stats


# ---------------------------------------------------------------------------
# numeric pre-identification


def _verified_pairs(cluster, vals_eq) -> list:
    """Index pairs inside one cluster that pass the exact relation test."""
    idxs = np.array(sorted({payload for _, payload in cluster}))
    if len(idxs) < 2:
        return []
    mask = vals_eq(idxs)
    ii, jj = np.nonzero(np.triu(mask, k=1))
    return [(int(idxs[i]), int(idxs[j])) for i, j in zip(ii, jj)]


def pre_identify(db: FactDB, tol: Optional[Tolerances] = None) -> Dict[str, List[Statement]]:
    """Candidate eqangle/eqratio/simtri relations read off the coordinates.

    Equals the brute-force all-pairs scan: clusters only narrow which pairs
    get the exact test.  Candidates are canonical, deduplicated and sorted;
    the "simtri" list mixes both orientation variants.
    """
    tol = tol or db.tol
    names = db.names
    n = len(names)
    ang, dist = db.tables()
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    m = len(pairs)
    out: Dict[str, List[Statement]] = {"eqangle": [], "eqratio": [], "simtri": []}
    if m < 2:
        return out
    pi_, pj_ = np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])
    pang = np.asarray(ang)[pi_, pj_]
    pdist = np.asarray(dist)[pi_, pj_]
    off = ~np.eye(m, dtype=bool)
    U, V = np.nonzero(off)

    def stmt8(pred, k1, k2):
        args = pairs[U[k1]] + pairs[V[k1]] + pairs[U[k2]] + pairs[V[k2]]
        return canonicalize(Statement(pred, tuple(names[p] for p in args)))

    # angles of ordered pair-pairs, mod pi; values near 0 get a +pi twin so
    # the sweep sees the wraparound neighbourhood
    avals = (pang[V] - pang[U]) % PI
    items = [(float(v), k) for k, v in enumerate(avals)]
    items += [(float(v) + PI, k) for k, v in enumerate(avals) if v < tol.eps_eq]

    def angle_eq(idxs):
        vv = avals[idxs]
        d = np.abs(vv[:, None] - vv[None, :]) % PI
        return np.minimum(d, PI - d) < tol.eps_eq

    seen = set()
    for cluster in cluster_values(items, tol.eps_eq):
        for k1, k2 in _verified_pairs(cluster, angle_eq):
            s = stmt8("eqangle", k1, k2)
            if s not in seen:
                seen.add(s)
                out["eqangle"].append(s)

    # ratios: the cross-product relation bounds |r - r'| by eps / dmin^2
    rvals = pdist[U] / pdist[V]
    dmin = float(pdist.min())
    sweep = tol.eps_eq / max(dmin * dmin, 1e-18)
    ritems = [(float(v), k) for k, v in enumerate(rvals)]

    def ratio_eq(idxs):
        du, dv = pdist[U[idxs]], pdist[V[idxs]]
        return np.abs(du[:, None] * dv[None, :] - dv[:, None] * du[None, :]) < tol.eps_eq

    seen = set()
    tri_seen = set()
    coords = [db.coords[nm] for nm in names]
    for cluster in cluster_values(ritems, sweep):
        for k1, k2 in _verified_pairs(cluster, ratio_eq):
            s = stmt8("eqratio", k1, k2)
            if s not in seen:
                seen.add(s)
                out["eqratio"].append(s)
            for t in _assemble_triangles(pairs, U, V, k1, k2, dist, coords, tol):
                if t not in tri_seen:
                    tri_seen.add(t)
                    out["simtri"].append(Statement(t[0], tuple(names[p] for p in t[1])))

    out["eqangle"].sort()
    out["eqratio"].sort()
    out["simtri"] = [canonicalize(s) for s in sorted(out["simtri"])]
    return out


def _shared_vertex(u, v):
    common = set(u) & set(v)
    if len(common) != 1:
        return None
    b = common.pop()
    a = u[0] if u[1] == b else u[1]
    c = v[0] if v[1] == b else v[1]
    return a, b, c


def triangles_similar(dist, t1, t2, eps) -> bool:
    """All three side cross-products agree within eps."""
    a, b, c = t1
    p, q, r = t2
    ab, bc, ca = dist[a][b], dist[b][c], dist[c][a]
    pq, qr, rp = dist[p][q], dist[q][r], dist[r][p]
    return (abs(ab * qr - bc * pq) < eps and abs(bc * rp - ca * qr) < eps
            and abs(ab * rp - ca * pq) < eps)


def _assemble_triangles(pairs, U, V, k1, k2, dist, coords, tol):
    """Triangle correspondences suggested by one verified ratio pair."""
    t1 = _shared_vertex(pairs[U[k1]], pairs[V[k1]])
    t2 = _shared_vertex(pairs[U[k2]], pairs[V[k2]])
    if t1 is None or t2 is None or t1 == t2:
        return
    if not triangles_similar(dist, t1, t2, tol.eps_eq):
        return
    o1 = orientation(coords[t1[0]], coords[t1[1]], coords[t1[2]])
    o2 = orientation(coords[t2[0]], coords[t2[1]], coords[t2[2]])
    if abs(o1) < tol.eps_deg or abs(o2) < tol.eps_deg:
        return
    pred = "simtri" if (o1 > 0) == (o2 > 0) else "simtrir"
    yield (pred, t1 + t2)
