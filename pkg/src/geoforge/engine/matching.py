"""Rule matching over a frozen fact database.

Both matching modes share one satisfaction semantics (FactDB.sat_ids) and one
candidate-generation scheme, so they agree on the produced binding set:

  naive     premises joined in source order; the candidate lists are scanned
            in full and filtered only by variable consistency + satisfaction
  partial   premises reordered by ascending candidate-count estimate; bound
            variables narrow the candidate lists through the registry indexes
            (an exact narrowing), and 8-ary candidates are screened against
            the numeric tables first, which only discards instances that no
            sound database could satisfy

Candidates never come from raw point tuples: they are expanded from the
registries (lines, direction classes, angle-pair classes, length and ratio
classes) and from stored-fact images for the lookup-only predicates.  The
matcher runs against a snapshot; emissions are inserted by the saturation
loop after the round, sorted by (rule index, binding, conclusion index), so
both modes grow the database through identical fact sequences.
"""

import math
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

from ..parsing import Rule
from ..statements import PAIR_PREDICATES, Statement, images
from .db import FactDB

PI = math.pi

# predicates satisfied only by stored facts; candidates come from fact images
_FACT_PREDS = ("midp", "simtri", "simtrir", "contri", "contrir",
               "aconst", "rconst", "sameclock")


class MatchStats:
    """Counter bundle: per-rule candidate/filter/emission counts."""

    def __init__(self) -> None:
        self.per_rule: Dict[str, Dict[str, int]] = {}
        self.rounds = 0

    def bump(self, rule: str, key: str, n: int = 1) -> None:
        d = self.per_rule.setdefault(rule, {})
        d[key] = d.get(key, 0) + n

    def total(self, key: str) -> int:
        return sum(d.get(key, 0) for d in self.per_rule.values())

    def summary(self) -> str:
        keys = ("candidates", "pruned", "satisfied", "bindings", "guard_rejected",
                "emitted", "rejected_structural", "rejected_numeric", "duplicate")
        lines = ["rule        " + " ".join(f"{k:>12}" for k in keys)]
        for rule in sorted(self.per_rule):
            d = self.per_rule[rule]
            lines.append(f"{rule:<12}" + " ".join(f"{d.get(k, 0):>12}" for k in keys))
        lines.append(f"{'total':<12}" + " ".join(f"{self.total(k):>12}" for k in keys))
        return "\n".join(lines)


class Emission(NamedTuple):
    rule_index: int
    binding_key: tuple
    concl_index: int
    stmt: Statement
    rule_name: str
    deps: Tuple[int, ...]
    guards: Tuple[Statement, ...]


def _dedup(seq) -> Tuple[int, ...]:
    seen = set()
    out = []
    for x in seq:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return tuple(out)


class MatchContext:
    """Frozen per-round view of the database with candidate indexes."""

    def __init__(self, db: FactDB, partial: bool):
        self.db = db
        self.partial = partial
        self.names = db.names
        self.ang, self.dist = db.tables()
        self.eps_prune = db.tol.eps_deg

        # directions: segments grouped by direction root
        self.pair_line: Dict[Tuple[int, int], int] = {}
        self.pair_dir: Dict[Tuple[int, int], int] = {}
        self.dir_members: Dict[int, List[Tuple[int, int]]] = {}
        self.dir_pt_roots: Dict[int, set] = {}
        self.coll_lines: List[List[int]] = []
        for lid in db.lines.live():
            entry = db.lines.get(lid)
            root = db.dirs.find(entry.dir)
            pts = sorted(entry.points)
            if len(pts) >= 3:
                self.coll_lines.append(pts)
            mem = self.dir_members.setdefault(root, [])
            for i, p in enumerate(pts):
                self.dir_pt_roots.setdefault(p, set()).add(root)
                for q in pts[i + 1:]:
                    self.pair_line[(p, q)] = lid
                    self.pair_dir[(p, q)] = root
                    mem.append((p, q))
                    self.dir_pt_roots.setdefault(q, set()).add(root)
        for mem in self.dir_members.values():
            mem.sort()
        self.dir_roots = sorted(self.dir_members)

        # angle-pair classes over materialized keys
        az = db.angles
        self.zero_root = az.uf.find(az.zero)
        self.right_root = az.uf.find(az.right)
        self.angle_groups: Dict[object, list] = {}
        for key in sorted(az.nodes):
            root = az.uf.find(az.nodes[key])
            self.angle_groups.setdefault(root, []).append(("K", key))
        # same-direction sides belong to the zero class
        zero = self.angle_groups.setdefault(self.zero_root, [])
        zero[0:0] = [("Z", r) for r in self.dir_roots]

        # lengths: segments grouped by length root
        self.pair_len: Dict[Tuple[int, int], int] = {}
        self.len_members: Dict[int, List[Tuple[int, int]]] = {}
        self.len_pt_roots: Dict[int, set] = {}
        for seg in sorted(db.segs.ids):
            root = db.segs.lengths.find(db.segs.ids[seg])
            self.pair_len[seg] = root
            self.len_members.setdefault(root, []).append(seg)
            self.len_pt_roots.setdefault(seg[0], set()).add(root)
            self.len_pt_roots.setdefault(seg[1], set()).add(root)
        self.len_roots = sorted(self.len_members)

        rz = db.ratios
        self.unit_root = rz.uf.find(rz.zero)
        self.ratio_groups: Dict[object, list] = {}
        for key in sorted(rz.nodes):
            root = rz.uf.find(rz.nodes[key])
            self.ratio_groups.setdefault(root, []).append(("K", key))
        unit = self.ratio_groups.setdefault(self.unit_root, [])
        unit[0:0] = [("Z", r) for r in self.len_roots]

        self.circle_pts = [sorted(e.points) for e in db.circles.live()
                           if len(e.points) >= 4]

        self._fact_tuples: Dict[str, list] = {}

    # ------------------------------------------------------------- estimates

    def estimate(self, prem: Statement, bound=frozenset()) -> float:
        """Branching-factor guess for a premise given already-bound variables.

        Bound variables shrink the guess: a fully bound segment slot is
        narrowed to a handful of candidates, a half-bound one to a member
        list.  Only the ordering of estimates matters, not their scale.
        """
        est = float(self._base_estimate(prem))
        if not bound:
            return est
        args = prem.args
        paired = prem.pred in ("para", "perp", "cong") or (
            prem.pred in PAIR_PREDICATES and len(set(args)) <= 6)
        if paired:
            for i in range(0, len(args), 2):
                hits = (args[i] in bound) + (args[i + 1] in bound)
                if hits == 2:
                    est /= 16.0
                elif hits == 1:
                    est /= 4.0
        else:
            for a in set(args):
                if a in bound:
                    est /= 3.0
        return max(est, 1.0)

    def _base_estimate(self, prem: Statement) -> int:
        pred = prem.pred
        if pred == "coll":
            return sum(len(l) * (len(l) - 1) * (len(l) - 2) for l in self.coll_lines)
        if pred == "para":
            return 4 * sum(len(m) ** 2 for m in self.dir_members.values())
        if pred == "perp":
            keys = [k for (t, k) in self.angle_groups.get(self.right_root, ()) if t == "K"]
            return 4 * sum(len(self.dir_members.get(a, ())) * len(self.dir_members.get(b, ()))
                           for a, b in keys)
        if pred == "cong":
            return 4 * sum(len(m) ** 2 for m in self.len_members.values())
        if pred == "eqangle":
            if len(set(prem.args)) > 6:
                return len(self.db.by_pred.get(pred, ())) * 12
            sides = sum(len(self.dir_members.get(a, ())) * len(self.dir_members.get(b, ()))
                        for group in self.angle_groups.values() for (t, k) in group
                        for a, b in [k if t == "K" else (k, k)])
            return 16 * sides * sides
        if pred == "eqratio":
            if len(set(prem.args)) > 6:
                return len(self.db.by_pred.get(pred, ())) * 12
            sides = sum(len(self.len_members.get(a, ())) * len(self.len_members.get(b, ()))
                        for group in self.ratio_groups.values() for (t, k) in group
                        for a, b in [k if t == "K" else (k, k)])
            return 16 * sides * sides
        if pred == "cyclic":
            return sum(len(c) ** 4 for c in self.circle_pts)
        count = len(self.db.by_pred.get(pred, ()))
        mult = {"midp": 2, "aconst": 8, "rconst": 8}.get(pred, 12)
        return count * mult

    # ------------------------------------------------------------ fact images

    def fact_tuples(self, pred: str, literal=None) -> list:
        key = pred if literal is None else f"{pred}:{literal}"
        hit = self._fact_tuples.get(key)
        if hit is not None:
            return hit
        pid = self.db.pid
        out = []
        for fid in self.db.by_pred.get(pred, ()):
            fact = self.db.facts[fid]
            seen = set()
            for img in images(fact.stmt):
                if literal is not None and img.literal != literal:
                    continue
                t = tuple(pid[a] for a in img.args)
                if t not in seen:
                    seen.add(t)
                    out.append(t)
        self._fact_tuples[key] = out
        return out

    # ------------------------------------------------------------- numeric

    def true_eqangle(self, s1, s2, s3, s4) -> bool:
        ang = self.ang
        d1 = (ang[s2[0]][s2[1]] - ang[s1[0]][s1[1]]) % PI
        d2 = (ang[s4[0]][s4[1]] - ang[s3[0]][s3[1]]) % PI
        d = abs(d1 - d2) % PI
        return min(d, PI - d) < self.eps_prune

    def true_eqratio(self, s1, s2, s3, s4) -> bool:
        dist = self.dist
        ab = dist[s1[0]][s1[1]]
        cd = dist[s2[0]][s2[1]]
        ef = dist[s3[0]][s3[1]]
        gh = dist[s4[0]][s4[1]]
        return abs(ab * gh - cd * ef) < self.eps_prune


def _slot_constraint(t_a: str, t_b: str, bind: dict):
    """Constraint a partial binding puts on one segment slot (p < q form)."""
    pa, pb = bind.get(t_a), bind.get(t_b)
    if pa is not None and pb is not None:
        if pa == pb:
            return "dead"
        return ("fix", (pa, pb) if pa < pb else (pb, pa))
    if pa is not None:
        return ("has", pa)
    if pb is not None:
        return ("has", pb)
    return None


def _filter_segs(members, cons) -> list:
    if cons is None:
        return members
    if cons == "dead":
        return []
    kind, val = cons
    if kind == "fix":
        return [val] if val in members else []
    return [s for s in members if val in s]


def _orders(seg, t_a, t_b, bind):
    """Ordered variants of a segment consistent with the two slot variables."""
    p, q = seg
    for a, b in ((p, q), (q, p)):
        if t_a == t_b:
            continue
        pa, pb = bind.get(t_a), bind.get(t_b)
        if (pa is None or pa == a) and (pb is None or pb == b):
            yield (a, b)


class Matcher:
    def __init__(self, ctx: MatchContext, stats: Optional[MatchStats] = None):
        self.ctx = ctx
        self.db = ctx.db
        self.stats = stats or MatchStats()
        self._cur_rule = ""

    # ------------------------------------------------------------ candidates

    def candidates(self, prem: Statement, bind: dict) -> Iterator[tuple]:
        pred = prem.pred
        if pred == "coll":
            return self._cand_coll(prem, bind)
        if pred == "cyclic":
            return self._cand_cyclic(prem, bind)
        if pred == "para":
            return self._cand_para(prem, bind)
        if pred == "perp":
            return self._cand_perp(prem, bind)
        if pred == "cong":
            return self._cand_cong(prem, bind)
        if pred in PAIR_PREDICATES:
            # premises wider than any storable pattern (more than 6 distinct
            # slots) match stored facts only: class expansion over four free
            # segment slots enumerates the whole figure squared
            if len(set(prem.args)) > 6:
                return iter(self.ctx.fact_tuples(pred, prem.literal))
            return self._cand_eight(prem, bind, pred == "eqangle")
        if pred in _FACT_PREDS:
            return iter(self.ctx.fact_tuples(pred, prem.literal))
        raise ValueError(f"premise predicate {pred!r} not supported")

    def _cand_coll(self, prem, bind):
        bound = [bind[v] for v in prem.args if v in bind]
        for pts in self.ctx.coll_lines:
            if self.ctx.partial and any(p not in pts for p in bound):
                continue
            for a in pts:
                for b in pts:
                    if b == a:
                        continue
                    for c in pts:
                        if c != a and c != b:
                            yield (a, b, c)

    def _cand_cyclic(self, prem, bind):
        bound = [bind[v] for v in prem.args if v in bind]
        for pts in self.ctx.circle_pts:
            if self.ctx.partial and any(p not in pts for p in bound):
                continue
            for a in pts:
                for b in pts:
                    for c in pts:
                        for d in pts:
                            if len({a, b, c, d}) == 4:
                                yield (a, b, c, d)

    def _pair_candidates(self, prem, bind, groups, members_of):
        """Shared para/cong enumeration: two slots drawn from one class."""
        t = prem.args
        c1 = _slot_constraint(t[0], t[1], bind) if self.ctx.partial else None
        c2 = _slot_constraint(t[2], t[3], bind) if self.ctx.partial else None
        for root in groups:
            mem = members_of(root)
            for s1 in _filter_segs(mem, c1):
                for o1 in _orders(s1, t[0], t[1], bind):
                    for s2 in _filter_segs(mem, c2):
                        yield o1, s1, s2

    def _cand_para(self, prem, bind):
        t = prem.args
        ctx = self.ctx
        for o1, s1, s2 in self._pair_candidates(prem, bind, ctx.dir_roots,
                                                lambda r: ctx.dir_members[r]):
            if ctx.pair_line[s1] == ctx.pair_line[s2]:
                continue
            for o2 in _orders(s2, t[2], t[3], bind):
                yield o1 + o2

    def _cand_cong(self, prem, bind):
        t = prem.args
        ctx = self.ctx
        for o1, s1, s2 in self._pair_candidates(prem, bind, ctx.len_roots,
                                                lambda r: ctx.len_members[r]):
            for o2 in _orders(s2, t[2], t[3], bind):
                yield o1 + o2

    def _cand_perp(self, prem, bind):
        t = prem.args
        ctx = self.ctx
        keys = [k for (kind, k) in ctx.angle_groups.get(ctx.right_root, ()) if kind == "K"]
        c1 = _slot_constraint(t[0], t[1], bind) if ctx.partial else None
        c2 = _slot_constraint(t[2], t[3], bind) if ctx.partial else None
        for r1, r2 in keys:
            for s1 in _filter_segs(ctx.dir_members.get(r1, ()), c1):
                for o1 in _orders(s1, t[0], t[1], bind):
                    for s2 in _filter_segs(ctx.dir_members.get(r2, ()), c2):
                        for o2 in _orders(s2, t[2], t[3], bind):
                            yield o1 + o2

    def _expand_side(self, desc, members_of, ca, cb):
        kind, k = desc
        r1, r2 = k if kind == "K" else (k, k)
        m1 = _filter_segs(members_of(r1), ca)
        if not m1:
            return ()
        m2 = _filter_segs(members_of(r2), cb)
        return [(s1, s2) for s1 in m1 for s2 in m2]

    def _cand_eight(self, prem, bind, is_angle: bool):
        """eqangle/eqratio candidates: two sides with equal class roots.

        Sides are expanded from class descriptors: ("Z", r) covers the
        zero/unit diagonal (both slots share one base root), ("K", key)
        covers materialized pair nodes.  Fresh keys (never merged) can only
        match themselves, enumerated last.  Slot constraints restrict which
        base roots a descriptor may use, an exact narrowing that keeps the
        candidate set identical to the unrestricted scan.
        """
        ctx = self.ctx
        t = prem.args
        if is_angle:
            groups, members, roots = ctx.angle_groups, ctx.dir_members, ctx.dir_roots
            prune, seg_root, pt_roots = ctx.true_eqangle, ctx.pair_dir, ctx.dir_pt_roots
        else:
            groups, members, roots = ctx.ratio_groups, ctx.len_members, ctx.len_roots
            prune, seg_root, pt_roots = ctx.true_eqratio, ctx.pair_len, ctx.len_pt_roots
        partial = ctx.partial
        cons = [_slot_constraint(t[i], t[i + 1], bind) if partial else None
                for i in (0, 2, 4, 6)]
        mget = lambda r: members.get(r, ())

        def allowed(c):
            # roots a slot constraint leaves possible; None = unrestricted
            if c is None:
                return None
            if c == "dead":
                return frozenset()
            kind, val = c
            if kind == "fix":
                r = seg_root.get(val)
                return frozenset() if r is None else frozenset((r,))
            return frozenset(pt_roots.get(val, ()))

        S = [allowed(c) for c in cons]

        def desc_ok(desc, sa, sb):
            kind, k = desc
            ra, rb = k if kind == "K" else (k, k)
            return (sa is None or ra in sa) and (sb is None or rb in sb)

        def emit(sides_l, sides_r):
            for s1, s2 in sides_l:
                for s3, s4 in sides_r:
                    if partial and not prune(s1, s2, s3, s4):
                        self.stats.bump(self._cur_rule, "pruned")
                        continue
                    for o1 in _orders(s1, t[0], t[1], bind):
                        for o2 in _orders(s2, t[2], t[3], bind):
                            for o3 in _orders(s3, t[4], t[5], bind):
                                for o4 in _orders(s4, t[6], t[7], bind):
                                    yield o1 + o2 + o3 + o4

        for root in sorted(groups):
            group = groups[root]
            for d1 in group:
                if not desc_ok(d1, S[0], S[1]):
                    continue
                sides_l = self._expand_side(d1, mget, cons[0], cons[1])
                if not sides_l:
                    continue
                for d2 in group:
                    if not desc_ok(d2, S[2], S[3]):
                        continue
                    sides_r = self._expand_side(d2, mget, cons[2], cons[3])
                    if sides_r:
                        yield from emit(sides_l, sides_r)
        # fresh keys: an unmerged ordered root pair equals only itself, so
        # both sides share one key and each slot pins the key's root domain
        materialized = {k for group in groups.values() for (kind, k) in group if kind == "K"}

        def dom(sa, sb):
            if sa is None and sb is None:
                return roots
            if sa is None or sb is None:
                return sorted(sa if sb is None else sb)
            return sorted(sa & sb)

        for r1 in dom(S[0], S[2]):
            for r2 in dom(S[1], S[3]):
                if r1 == r2 or (r1, r2) in materialized:
                    continue
                sides_l = self._expand_side(("K", (r1, r2)), mget, cons[0], cons[1])
                if not sides_l:
                    continue
                sides_r = self._expand_side(("K", (r1, r2)), mget, cons[2], cons[3])
                if sides_r:
                    yield from emit(sides_l, sides_r)

    # ----------------------------------------------------------------- join

    def match_rule(self, rule: Rule, rule_index: int) -> List[Emission]:
        ctx = self.ctx
        prems = rule.premises
        if ctx.partial:
            # greedy: cheapest premise first, re-costing the rest as their
            # variables become bound by earlier picks
            order = []
            rest = list(range(len(prems)))
            seen: set = set()
            while rest:
                nxt = min(rest, key=lambda i: (ctx.estimate(prems[i], seen), i))
                rest.remove(nxt)
                order.append(nxt)
                seen.update(prems[nxt].args)
        else:
            order = list(range(len(prems)))
        out: List[Emission] = []
        bind: Dict[str, int] = {}
        deps_by_src: List[Optional[Tuple[int, ...]]] = [None] * len(prems)
        name = rule.name
        self._cur_rule = name
        stats = self.stats
        db = self.db

        def leaf() -> None:
            guard_stmts = []
            for g in rule.guards:
                inst = Statement(g.pred, tuple(self.ctx.names[bind[v]] for v in g.args))
                if not db.eval_true(inst):
                    stats.bump(name, "guard_rejected")
                    return
                guard_stmts.append(inst)
            stats.bump(name, "bindings")
            deps = _dedup(x for d in deps_by_src if d for x in d)
            bkey = tuple(sorted(bind.items()))
            for ci, templ in enumerate(rule.conclusions):
                pts = tuple(bind[v] for v in templ.args)
                if not self._concl_ok(templ.pred, pts):
                    stats.bump(name, "rejected_structural")
                    continue
                inst = Statement(templ.pred,
                                 tuple(self.ctx.names[p] for p in pts), templ.literal)
                if db.sat_ids(templ.pred, pts, templ.literal) is not None:
                    stats.bump(name, "duplicate")
                    continue
                if not db.eval_true(inst):
                    stats.bump(name, "rejected_numeric")
                    continue
                stats.bump(name, "emitted")
                out.append(Emission(rule_index, bkey, ci, inst, name,
                                    deps, tuple(guard_stmts)))

        def rec(k: int) -> None:
            if k == len(order):
                leaf()
                return
            src = order[k]
            prem = prems[src]
            for cand in self.candidates(prem, bind):
                stats.bump(name, "candidates")
                new = _assign(prem.args, cand, bind)
                if new is None:
                    continue
                d = db.sat_ids(prem.pred, cand, prem.literal)
                if d is None:
                    continue
                stats.bump(name, "satisfied")
                for v, p in new:
                    bind[v] = p
                deps_by_src[src] = d
                rec(k + 1)
                deps_by_src[src] = None
                for v, _ in new:
                    del bind[v]

        rec(0)
        return out

    @staticmethod
    def _concl_ok(pred: str, pts: tuple) -> bool:
        if pred in ("para", "perp", "cong", "aconst", "rconst"):
            return pts[0] != pts[1] and pts[2] != pts[3]
        if pred in PAIR_PREDICATES:
            if any(pts[i] == pts[i + 1] for i in (0, 2, 4, 6)):
                return False
            return len(set(pts)) <= 6
        if pred in ("coll", "midp"):
            return len(set(pts)) == 3
        if pred == "cyclic":
            return len(set(pts)) == 4
        # triangle predicates: nondegenerate triples, distinct correspondence
        t1, t2 = pts[:3], pts[3:]
        return len(set(t1)) == 3 and len(set(t2)) == 3 and t1 != t2


def _assign(tvars, cand, bind) -> Optional[List[Tuple[str, int]]]:
    """New variable assignments if candidate args fit the binding, else None."""
    new: List[Tuple[str, int]] = []
    for var, pid in zip(tvars, cand):
        cur = bind.get(var)
        if cur is None:
            for v2, p2 in new:
                if v2 == var:
                    cur = p2
                    break
        if cur is None:
            new.append((var, pid))
        elif cur != pid:
            return None
    return new


def match_all(db: FactDB, rules: List[Rule], partial: bool,
              stats: Optional[MatchStats] = None) -> Tuple[List[Emission], MatchStats]:
    """One frozen matching round over every rule; emissions sorted for merge."""
    ctx = MatchContext(db, partial)
    matcher = Matcher(ctx, stats)
    out: List[Emission] = []
    for ri, rule in enumerate(rules):
        out.extend(matcher.match_rule(rule, ri))
    out.sort(key=lambda e: (e.rule_index, e.binding_key, e.concl_index))
    return out, matcher.stats
