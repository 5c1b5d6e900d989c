"""Canonical fact store with equivalence-structure entailment.

Facts are stored append-only under their canonical statement.  Inserting a
fact also updates the registries: coll facts grow lines, para facts merge
directions, perp facts pin angle pairs to the right-angle class, cong facts
merge lengths, eqangle/eqratio facts merge angle-pair/ratio-pair classes and
cyclic facts grow circles.

``satisfies`` decides whether a statement instance follows from the stored
facts plus the equivalence structures, and returns fact ids that justify it:
the union-find chain between the two sides, closed over the line memberships
and class-root merges the chain implicitly leans on, so the cited facts alone
rederive the statement.
"""

from typing import Dict, List, NamedTuple, Optional, Tuple

from ..numeric import Point, Tolerances, eval_statement
from ..errors import DegenerateInput
from ..statements import Statement, canonicalize
from . import kernels
from .registries import (CircleRegistry, ExplainUF, LineRegistry,
                         PairStructure, SegmentTable)

# rule label used when a queried goal is entailed by an equivalence chain
# rather than stored directly: angle-family chains ride the perp-transfer
# rule's label, length/ratio chains the unit-ratio rule's label
CHAIN_RULES = {
    "coll": "a01", "para": "a01", "perp": "a01", "eqangle": "a01",
    "aconst": "a01", "cong": "a00", "eqratio": "a00", "rconst": "a00",
    "cyclic": "a05",
}

_ANGLE_PAIR_PREDS = ("para", "perp", "aconst")


class Fact(NamedTuple):
    id: int
    stmt: Statement        # as derived (template argument order preserved)
    key: Statement         # canonical form, the identity of the fact
    rule: str
    deps: Tuple[int, ...]


def _dedup(seq) -> Tuple[int, ...]:
    seen = set()
    out = []
    for x in seq:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return tuple(out)


class FactDB:
    def __init__(self, coords: Dict[str, Point], tol: Optional[Tolerances] = None):
        self.tol = tol or Tolerances()
        self.coords = dict(coords)
        self.names: List[str] = list(coords)
        self.pid: Dict[str, int] = {n: i for i, n in enumerate(self.names)}

        self.facts: List[Fact] = []
        self.index: Dict[Statement, int] = {}
        self.by_pred: Dict[str, List[int]] = {}

        self.dirs = ExplainUF()
        self.angles = PairStructure(with_right=True)
        self.lines = LineRegistry(self.dirs, self._merge_dirs)
        self.segs = SegmentTable()
        self.ratios = PairStructure(with_right=False)
        self.circles = CircleRegistry()

        self.incomplete = False
        self.rounds = 0
        self.pre_candidates = None
        self._eval_cache: Dict[Statement, bool] = {}
        self._tables = None

    def tables(self):
        """Pairwise line-angle and distance tables, indexed by point id."""
        if self._tables is None:
            xs = [self.coords[n].x for n in self.names]
            ys = [self.coords[n].y for n in self.names]
            self._tables = (kernels.angle_table(xs, ys), kernels.dist_table(xs, ys))
        return self._tables

    # ---------------------------------------------------------------- merges

    def _merge_dirs(self, n1: int, n2: int, reason: Optional[int]) -> None:
        res = self.dirs.union(n1, n2, reason)
        if res is not None:
            kept, absorbed = res
            self.angles.on_base_merge(kept, absorbed, reason)

    def _merge_lengths(self, s1: int, s2: int, reason: Optional[int]) -> None:
        res = self.segs.lengths.union(s1, s2, reason)
        if res is not None:
            kept, absorbed = res
            self.ratios.on_base_merge(kept, absorbed, reason)

    # ------------------------------------------------------------ resolution

    def _pids(self, args) -> Optional[Tuple[int, ...]]:
        pid = self.pid
        try:
            return tuple(pid[a] for a in args)
        except KeyError:
            return None

    def _line(self, p: int, q: int) -> Optional[int]:
        return self.lines.pair2line.get((p, q) if p < q else (q, p))

    def _dir_key(self, p: int, q: int):
        """Direction root of segment pq, or a fresh marker for unseen pairs."""
        lid = self._line(p, q)
        if lid is None:
            return ("*", p, q) if p < q else ("*", q, p)
        return self.dirs.find(self.lines.get(lid).dir)

    def _line_log(self, p: int, q: int) -> Tuple[int, ...]:
        lid = self._line(p, q)
        if lid is None:
            return ()
        pts = self.lines.get(lid).points
        return pts[p] + pts[q]

    def _len_key(self, p: int, q: int):
        sid = self.segs.ids.get((p, q) if p < q else (q, p))
        if sid is None:
            return ("*", p, q) if p < q else ("*", q, p)
        return self.segs.lengths.find(sid)

    def _angle_node(self, k1, k2) -> Optional[int]:
        """Existing angle-pair node for two direction keys (no creation)."""
        if isinstance(k1, tuple) or isinstance(k2, tuple):
            return None
        if k1 == k2:
            return self.angles.zero
        return self.angles.nodes.get((k1, k2))

    def _ratio_node(self, k1, k2) -> Optional[int]:
        if isinstance(k1, tuple) or isinstance(k2, tuple):
            return None
        if k1 == k2:
            return self.ratios.zero
        return self.ratios.nodes.get((k1, k2))

    # -------------------------------------------------------------- support

    def _support(self, chain, segs=(), pairs=(), pair_dirs: bool = False) -> Tuple[int, ...]:
        """Close a citation over the merges that align what it mentions.

        A union-find chain proves equality between classes, but rederiving
        it from the cited facts alone needs more: node keys are class roots,
        a fact names a line by any two of its points, and a transfer merge
        leans on an alignment some earlier fact produced.  So walk every
        cited fact and every segment or line pair it mentions, citing line
        memberships and union-find paths to the current class roots, until
        nothing new appears.
        """
        out: List[int] = []
        seen: set = set()
        todo_f: List[int] = []

        def take(fids) -> None:
            for f in fids:
                if f not in seen:
                    seen.add(f)
                    out.append(f)
                    todo_f.append(f)

        take(chain)
        todo_s: List[int] = list(segs)
        todo_p = [(self._pkey(a, b), pair_dirs) for a, b in pairs]
        done_s: set = set()
        done_p: Dict[Tuple[int, int], bool] = {}
        while todo_f or todo_s or todo_p:
            if todo_s:
                s = todo_s.pop()
                if s in done_s:
                    continue
                done_s.add(s)
                r = self.segs.lengths.find(s)
                if r != s:
                    take(self.segs.lengths.explain(s, r))
                continue
            if todo_p:
                pq, want_dir = todo_p.pop()
                state = done_p.get(pq)
                if state is True or (state is False and not want_dir):
                    continue
                done_p[pq] = want_dir
                lid = self.lines.pair2line.get(pq)
                if lid is None:
                    continue
                entry = self.lines.get(lid)
                if state is None:
                    take(entry.points[pq[0]] + entry.points[pq[1]])
                if want_dir:
                    d = entry.dir
                    r = self.dirs.find(d)
                    if r != d:
                        take(self.dirs.explain(d, r))
                continue
            f = todo_f.pop()
            stmt = self.facts[f].stmt
            pts = self._pids(stmt.args)
            if pts is None:
                continue
            if stmt.pred in ("cong", "rconst", "eqratio"):
                for i in range(0, len(pts) - 1, 2):
                    if pts[i] != pts[i + 1]:
                        sid = self.segs.ids.get(self._pkey(pts[i], pts[i + 1]))
                        if sid is not None:
                            todo_s.append(sid)
            elif stmt.pred in ("para", "perp", "aconst", "eqangle"):
                for i in range(0, len(pts) - 1, 2):
                    if pts[i] != pts[i + 1]:
                        todo_p.append((self._pkey(pts[i], pts[i + 1]), True))
            elif stmt.pred == "coll":
                for i, j in ((0, 1), (0, 2), (1, 2)):
                    if pts[i] != pts[j]:
                        todo_p.append((self._pkey(pts[i], pts[j]), False))
        return tuple(out)

    @staticmethod
    def _pkey(p: int, q: int) -> Tuple[int, int]:
        return (p, q) if p < q else (q, p)

    # ------------------------------------------------------------- satisfies

    def satisfies(self, stmt: Statement) -> Optional[Tuple[int, ...]]:
        """Dep fact ids if `stmt` follows from the database, else None."""
        pts = self._pids(stmt.args)
        if pts is None:
            return None
        return self.sat_ids(stmt.pred, pts, stmt.literal)

    def sat_ids(self, pred: str, pts: Tuple[int, ...],
                literal=None) -> Optional[Tuple[int, ...]]:
        """satisfies() on already-resolved point ids (matcher hot path)."""
        if pred == "coll":
            if len(set(pts)) != 3:
                return None
            lid = self.lines.find_line(pts)
            if lid is None:
                return None
            just = self.lines.get(lid).points
            return _dedup(x for p in pts for x in just[p])
        if pred == "cyclic":
            if len(set(pts)) != 4:
                return None
            entry = self.circles.find_circle(pts)
            return _dedup(entry.log) if entry is not None else None
        if pred == "para":
            return self._sat_para(pts)
        if pred == "perp":
            return self._sat_perp(pts)
        if pred == "cong":
            return self._sat_cong(pts)
        if pred == "eqangle":
            return self._sat_eqangle(pts)
        if pred == "eqratio":
            return self._sat_eqratio(pts)
        if pred == "aconst":
            lit = literal % 180
            if lit == 0:
                return self._sat_para(pts, allow_same_line=True)
            if lit == 90:
                return self._sat_perp(pts)
            return self._sat_lookup(pred, pts, literal)
        if pred == "rconst":
            if literal == 1:
                return self._sat_cong(pts)
            return self._sat_lookup(pred, pts, literal)
        # midp, simtri(r), contri(r), sameclock: stored facts only
        return self._sat_lookup(pred, pts, literal)

    def _sat_lookup(self, pred, pts, literal=None):
        names = self.names
        stmt = Statement(pred, tuple(names[p] for p in pts), literal)
        fid = self.index.get(canonicalize(stmt))
        return (fid,) if fid is not None else None

    def _sat_para(self, pts, allow_same_line: bool = False):
        p1, p2, p3, p4 = pts
        if p1 == p2 or p3 == p4:
            return None
        l1, l2 = self._line(p1, p2), self._line(p3, p4)
        if l1 is not None and l1 == l2:
            if not allow_same_line:
                return None
            return self._support((), pairs=((p1, p2), (p3, p4)))
        k1, k2 = self._dir_key(p1, p2), self._dir_key(p3, p4)
        if isinstance(k1, tuple) or isinstance(k2, tuple) or k1 != k2:
            return None
        chain = self.dirs.explain(self.lines.get(l1).dir, self.lines.get(l2).dir)
        return self._support(chain, pairs=((p1, p2), (p3, p4)))

    def _sat_perp(self, pts):
        p1, p2, p3, p4 = pts
        if p1 == p2 or p3 == p4:
            return None
        k1, k2 = self._dir_key(p1, p2), self._dir_key(p3, p4)
        nid = self._angle_node(k1, k2)
        if nid is None or not self.angles.same(nid, self.angles.right):
            return None
        chain = self.angles.uf.explain(nid, self.angles.right)
        return self._support(chain, pairs=((p1, p2), (p3, p4)), pair_dirs=True)

    def _sat_cong(self, pts):
        p1, p2, p3, p4 = pts
        if p1 == p2 or p3 == p4:
            return None
        s1 = (p1, p2) if p1 < p2 else (p2, p1)
        s2 = (p3, p4) if p3 < p4 else (p4, p3)
        if s1 == s2:
            return ()
        i1, i2 = self.segs.ids.get(s1), self.segs.ids.get(s2)
        if i1 is None or i2 is None or self.segs.lengths.find(i1) != self.segs.lengths.find(i2):
            return None
        return self._support(self.segs.lengths.explain(i1, i2))

    def _sat_eqangle(self, pts):
        p = pts
        for i in (0, 2, 4, 6):
            if p[i] == p[i + 1]:
                return None
        pairs = tuple((p[i], p[i + 1]) for i in (0, 2, 4, 6))
        keys = [self._dir_key(a, b) for a, b in pairs]
        left, rght = (keys[0], keys[1]), (keys[2], keys[3])
        if left != rght:
            n1, n2 = self._angle_node(*left), self._angle_node(*rght)
            if n1 is None or n2 is None or not self.angles.same(n1, n2):
                return None
            chain = tuple(self.angles.uf.explain(n1, n2))
            return self._support(chain, pairs=pairs, pair_dirs=True)
        # dir roots agree pairwise; cite the merges that aligned them
        chain = ()
        for i, j in ((0, 4), (2, 6)):
            l1, l2 = self._line(p[i], p[i + 1]), self._line(p[j], p[j + 1])
            if l1 is not None and l2 is not None and l1 != l2:
                chain += tuple(self.dirs.explain(
                    self.lines.get(l1).dir, self.lines.get(l2).dir))
        return self._support(chain, pairs=pairs)

    def _sat_eqratio(self, pts):
        p = pts
        for i in (0, 2, 4, 6):
            if p[i] == p[i + 1]:
                return None
        keys = [self._len_key(p[i], p[i + 1]) for i in (0, 2, 4, 6)]
        left, rght = (keys[0], keys[1]), (keys[2], keys[3])
        if left == rght:
            # length roots agree pairwise; cite the merges that aligned them
            chain: Tuple[int, ...] = ()
            for i, j in ((0, 4), (2, 6)):
                s1 = self.segs.ids.get(self._pkey(p[i], p[i + 1]))
                s2 = self.segs.ids.get(self._pkey(p[j], p[j + 1]))
                if s1 is not None and s2 is not None and s1 != s2:
                    chain += tuple(self.segs.lengths.explain(s1, s2))
            return self._support(chain)
        n1, n2 = self._ratio_node(*left), self._ratio_node(*rght)
        if n1 is None or n2 is None or not self.ratios.same(n1, n2):
            return None
        chain = tuple(self.ratios.uf.explain(n1, n2))
        segs = [self.segs.ids[self._pkey(p[i], p[i + 1])] for i in (0, 2, 4, 6)]
        return self._support(chain, segs=segs)

    # --------------------------------------------------------------- insert

    def insert(self, stmt: Statement, rule: str, deps: Tuple[int, ...] = (),
               force: bool = False) -> Optional[int]:
        """Store a fact; returns its id, or None when already entailed.

        force=True always stores (premises, aux statements, numeric checks
        and queried goals need stable ids even when redundant).
        """
        if not force and self.satisfies(stmt) is not None:
            return None
        key = canonicalize(stmt)
        fid = len(self.facts)
        fact = Fact(fid, stmt, key, rule, tuple(deps))
        self.facts.append(fact)
        self.index.setdefault(key, fid)
        self.by_pred.setdefault(stmt.pred, []).append(fid)
        pts = self._pids(stmt.args)
        if pts is not None:
            self._update(stmt, pts, fid)
        return fid

    def _update(self, stmt: Statement, p: Tuple[int, ...], fid: int) -> None:
        pred = stmt.pred
        if pred == "coll":
            if len(set(p)) == 3:
                self.lines.add_coll(p, fid)
            return
        if pred == "cyclic":
            if len(set(p)) == 4:
                self.circles.add_cyclic(p, fid)
            return
        if pred in _ANGLE_PAIR_PREDS:
            if p[0] == p[1] or p[2] == p[3]:
                return
            l1 = self.lines.line_id(p[0], p[1])
            l2 = self.lines.line_id(p[2], p[3])
            lit = stmt.literal % 180 if pred == "aconst" else None
            if pred == "para" or (pred == "aconst" and lit == 0):
                if l1 != l2:
                    self._merge_dirs(self.lines.get(l1).dir, self.lines.get(l2).dir, fid)
            elif pred == "perp" or (pred == "aconst" and lit == 90):
                r1 = self.dirs.find(self.lines.get(l1).dir)
                r2 = self.dirs.find(self.lines.get(l2).dir)
                if r1 != r2:
                    self.angles.merge(self.angles.node(r1, r2), self.angles.right, fid)
                    self.angles.merge(self.angles.node(r2, r1), self.angles.right, fid)
            return
        if pred == "eqangle":
            if any(p[i] == p[i + 1] for i in (0, 2, 4, 6)):
                return
            lids = [self.lines.line_id(p[i], p[i + 1]) for i in (0, 2, 4, 6)]
            dnodes = [self.lines.get(l).dir for l in lids]
            r = [self.dirs.find(d) for d in dnodes]
            if r[0] != r[1] or r[2] != r[3]:
                n1 = self.angles.node(r[0], r[1])
                n2 = self.angles.node(r[2], r[3])
                self.angles.merge(n1, n2, fid)
                self.angles.merge(self.angles.node(r[1], r[0]),
                                  self.angles.node(r[3], r[2]), fid)
            # a zero angle on one side forces the other side parallel, and a
            # shared direction on matching slots transfers to the other slots
            if r[0] == r[1] and r[2] != r[3]:
                self._merge_dirs(dnodes[2], dnodes[3], fid)
            elif r[2] == r[3] and r[0] != r[1]:
                self._merge_dirs(dnodes[0], dnodes[1], fid)
            elif r[0] == r[2] and r[1] != r[3]:
                self._merge_dirs(dnodes[1], dnodes[3], fid)
            elif r[1] == r[3] and r[0] != r[2]:
                self._merge_dirs(dnodes[0], dnodes[2], fid)
            return
        if pred == "cong" or (pred == "rconst" and stmt.literal == 1):
            if p[0] == p[1] or p[2] == p[3]:
                return
            self._merge_lengths(self.segs.seg_id(p[0], p[1]),
                                self.segs.seg_id(p[2], p[3]), fid)
            return
        if pred == "eqratio":
            if any(p[i] == p[i + 1] for i in (0, 2, 4, 6)):
                return
            sids = [self.segs.seg_id(p[i], p[i + 1]) for i in (0, 2, 4, 6)]
            r = [self.segs.lengths.find(s) for s in sids]
            if r[0] != r[1] or r[2] != r[3]:
                self.ratios.merge(self.ratios.node(r[0], r[1]),
                                  self.ratios.node(r[2], r[3]), fid)
                self.ratios.merge(self.ratios.node(r[1], r[0]),
                                  self.ratios.node(r[3], r[2]), fid)
            if r[0] == r[1] and r[2] != r[3]:
                self._merge_lengths(sids[2], sids[3], fid)
            elif r[2] == r[3] and r[0] != r[1]:
                self._merge_lengths(sids[0], sids[1], fid)
            elif r[0] == r[2] and r[1] != r[3]:
                self._merge_lengths(sids[1], sids[3], fid)
            elif r[1] == r[3] and r[0] != r[2]:
                self._merge_lengths(sids[0], sids[2], fid)
            return

    # ---------------------------------------------------------------- query

    def query(self, goal: Statement) -> Optional[int]:
        """Fact id answering the goal, materializing a chain step if needed."""
        fid = self.index.get(canonicalize(goal))
        if fid is not None:
            return fid
        deps = self.satisfies(goal)
        if deps is None:
            return None
        rule = CHAIN_RULES.get(goal.pred, "a00")
        return self.insert(goal, rule, deps, force=True)

    # -------------------------------------------------------------- numeric

    def eval_true(self, stmt: Statement) -> bool:
        key = canonicalize(stmt)
        hit = self._eval_cache.get(key)
        if hit is None:
            try:
                hit = eval_statement(stmt, self.coords, self.tol)
            except DegenerateInput:
                hit = False
            self._eval_cache[key] = hit
        return hit

    def fact(self, fid: int) -> Fact:
        return self.facts[fid]

    def pred_facts(self, pred: str) -> List[Fact]:
        return [self.facts[i] for i in self.by_pred.get(pred, ())]
